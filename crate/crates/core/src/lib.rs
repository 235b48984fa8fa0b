//! Unsupervised capacity identification for the multilinear aggregation
//! model.
//!
//! The pipeline: generate or load a decision matrix ([`datagen`], [`io`]),
//! aggregate it with a capacity ([`aggregation`]), measure how much each
//! criterion drives the result ([`sobol`]), and fit a 2-additive capacity
//! whose first-order sensitivity indices are equal across criteria
//! ([`identification`]). Capacities convert losslessly to Banzhaf
//! interaction and Fourier coordinates ([`capacity`]).

pub mod aggregation;
pub mod capacity;
pub mod datagen;
pub mod error;
pub mod identification;
pub mod io;
pub mod sobol;
pub mod subset;

pub use aggregation::{multilinear, rank, wam, DecisionMatrix, Ranking, WeightVector};
pub use capacity::{Capacity, FourierVector, InteractionVector, ValidationReport};
pub use datagen::{generate, pearson, GenSpec};
pub use error::{Error, Result};
pub use identification::{identify, IdentificationConfig, IdentificationResult, TwoAdditive};
pub use sobol::{SliceConfig, SobolReport};
pub use subset::{Criteria, Subset};
