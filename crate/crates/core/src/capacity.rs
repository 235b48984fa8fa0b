//! Capacities and their Banzhaf-interaction and Fourier coordinates.
//!
//! All three representations are real vectors of length `2^m` indexed by
//! subset mask. The conversions are linear and invertible; the production
//! versions run one butterfly pass per criterion, `O(m 2^m)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{Criteria, Subset};

/// Default tolerance for monotonicity checks.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-12;

/// JSON layout shared by all set functions: values listed in cardinality order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetFunctionJson {
    pub m: usize,
    pub ordering: String,
    pub values: Vec<f64>,
}

pub const LIST_ORDERING: &str = "paper-list";

macro_rules! set_function {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(into = "SetFunctionJson", try_from = "SetFunctionJson")]
        pub struct $name {
            criteria: Criteria,
            values: Vec<f64>,
        }

        impl $name {
            /// Wraps values indexed by subset mask.
            pub fn from_masked(criteria: Criteria, values: Vec<f64>) -> Result<Self> {
                if values.len() != criteria.subset_count() {
                    return Err(Error::Dimension {
                        expected: criteria.subset_count(),
                        actual: values.len(),
                    });
                }
                if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NotFinite(pos));
                }
                Ok(Self { criteria, values })
            }

            /// Builds from values listed in cardinality order
            /// (`[∅, {1}, …, {m}, {1,2}, …, C]`).
            pub fn from_cardinality_list(criteria: Criteria, list: &[f64]) -> Result<Self> {
                if list.len() != criteria.subset_count() {
                    return Err(Error::Dimension {
                        expected: criteria.subset_count(),
                        actual: list.len(),
                    });
                }
                let mut values = vec![0.0; list.len()];
                for (subset, &v) in criteria.cardinality_order().into_iter().zip(list) {
                    values[subset.index()] = v;
                }
                Self::from_masked(criteria, values)
            }

            pub fn to_cardinality_list(&self) -> Vec<f64> {
                self.criteria
                    .cardinality_order()
                    .into_iter()
                    .map(|s| self.values[s.index()])
                    .collect()
            }

            pub fn criteria(&self) -> Criteria {
                self.criteria
            }

            pub fn m(&self) -> usize {
                self.criteria.count()
            }

            /// Values indexed by subset mask.
            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn get(&self, subset: Subset) -> f64 {
                self.values[subset.index()]
            }

            pub fn into_values(self) -> Vec<f64> {
                self.values
            }
        }

        impl std::ops::Index<Subset> for $name {
            type Output = f64;

            fn index(&self, subset: Subset) -> &f64 {
                &self.values[subset.index()]
            }
        }

        impl From<$name> for SetFunctionJson {
            fn from(f: $name) -> Self {
                SetFunctionJson {
                    m: f.m(),
                    ordering: LIST_ORDERING.to_string(),
                    values: f.to_cardinality_list(),
                }
            }
        }

        impl TryFrom<SetFunctionJson> for $name {
            type Error = Error;

            fn try_from(json: SetFunctionJson) -> Result<Self> {
                let criteria = Criteria::new(json.m)?;
                match json.ordering.as_str() {
                    LIST_ORDERING => Self::from_cardinality_list(criteria, &json.values),
                    "bitmask" => Self::from_masked(criteria, json.values),
                    other => Err(Error::Parse(format!("unknown ordering {other:?}"))),
                }
            }
        }
    };
}

set_function!(
    /// A set function `μ: 2^C → R`. Construction only checks shape; use
    /// [`Capacity::validate`] for the boundedness and monotonicity axioms.
    Capacity
);

set_function!(
    /// Banzhaf interaction indices `I^B(A)` for every subset.
    InteractionVector
);

set_function!(
    /// Fourier coefficients `μ̂(A) = (-1/2)^{|A|} I^B(A)`.
    FourierVector
);

fn check_same(expected: Criteria, actual: Criteria) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected: expected.count(), actual: actual.count() })
    }
}

/// In-place butterfly over every criterion bit.
fn butterfly(values: &mut [f64], op: impl Fn(f64, f64) -> (f64, f64)) {
    let n = values.len();
    let mut half = 1;
    while half < n {
        for block in values.chunks_exact_mut(half * 2) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (x, y) = op(*a, *b);
                *a = x;
                *b = y;
            }
        }
        half *= 2;
    }
}

impl Capacity {
    /// Additive capacity `μ(A) = Σ_{j∈A} w_j`; the weights must be
    /// nonnegative and sum to 1.
    pub fn additive(weights: &[f64]) -> Result<Self> {
        crate::aggregation::WeightVector::new(weights.to_vec())?;
        let criteria = Criteria::new(weights.len())?;
        let values = criteria.subsets().map(|s| s.members().map(|j| weights[j]).sum()).collect();
        Self::from_masked(criteria, values)
    }

    /// Additive capacity with equal weights `1/m`.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::additive(&vec![1.0 / m as f64; m])
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(MONOTONICITY_TOLERANCE)
    }

    /// Checks `μ(∅) = 0`, `μ(C) = 1` and `μ(A) ≤ μ(A ∪ {j}) + tol` for every
    /// `A` and `j ∉ A`. Adjacent pairs suffice for full monotonicity.
    pub fn validate_with(&self, tol: f64) -> ValidationReport {
        let empty_value = self.values[0];
        let full_value = self.values[self.criteria.full().index()];
        let bounded = empty_value.abs() <= tol && (full_value - 1.0).abs() <= tol;
        let mut violations = Vec::new();
        for subset in self.criteria.subsets() {
            for j in 0..self.m() {
                if subset.contains(j) {
                    continue;
                }
                let superset = subset.with(j);
                let drop = self.get(subset) - self.get(superset);
                if drop > tol {
                    violations.push(MonotonicityViolation { subset, superset, drop });
                }
            }
        }
        ValidationReport { bounded, empty_value, full_value, violations }
    }

    /// Errors unless the capacity passes [`Capacity::validate`].
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidCapacity(report.to_string()))
        }
    }

    /// Banzhaf interaction transform.
    pub fn banzhaf(&self) -> InteractionVector {
        let mut values = self.values.clone();
        butterfly(&mut values, |lo, hi| (0.5 * (lo + hi), hi - lo));
        InteractionVector { criteria: self.criteria, values }
    }

    /// Banzhaf power index of criterion `j`.
    pub fn power_index(&self, j: usize) -> Result<f64> {
        self.criteria.check(j)?;
        let m = self.m();
        let sum: f64 =
            self.criteria.subsets().filter(|s| !s.contains(j)).map(|s| self.get(s.with(j)) - self.get(s)).sum();
        Ok(sum / (1u64 << (m - 1)) as f64)
    }

    /// Banzhaf interaction index of the pair `{j, k}`.
    pub fn pair_interaction(&self, j: usize, k: usize) -> Result<f64> {
        self.criteria.check(j)?;
        self.criteria.check(k)?;
        if j == k {
            return Err(Error::InvalidArgument(format!(
                "pair interaction needs two distinct criteria, got {} twice",
                j + 1
            )));
        }
        let m = self.m();
        let sum: f64 = self
            .criteria
            .subsets()
            .filter(|s| !s.contains(j) && !s.contains(k))
            .map(|s| self.get(s.with(j).with(k)) - self.get(s.with(j)) - self.get(s.with(k)) + self.get(s))
            .sum();
        Ok(sum / (1u64 << (m - 2)) as f64)
    }

    /// Pointwise `alpha * μ`. The result is generally not a capacity.
    pub fn scaled(&self, alpha: f64) -> Capacity {
        Capacity { criteria: self.criteria, values: self.values.iter().map(|v| alpha * v).collect() }
    }

    pub fn add(&self, other: &Capacity) -> Result<Capacity> {
        check_same(self.criteria, other.criteria)?;
        Ok(Capacity {
            criteria: self.criteria,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

impl InteractionVector {
    /// Inverse Banzhaf transform back to the capacity.
    pub fn to_capacity(&self) -> Capacity {
        let mut values = self.values.clone();
        butterfly(&mut values, |avg, diff| (avg - 0.5 * diff, avg + 0.5 * diff));
        Capacity { criteria: self.criteria, values }
    }

    pub fn to_fourier(&self) -> FourierVector {
        let values = self.criteria.subsets().map(|s| (-0.5f64).powi(s.cardinality() as i32) * self.get(s)).collect();
        FourierVector { criteria: self.criteria, values }
    }

    pub fn power_index(&self, j: usize) -> f64 {
        self.get(Subset::singleton(j))
    }

    pub fn pair(&self, j: usize, k: usize) -> f64 {
        self.get(Subset::pair(j, k))
    }

    /// True iff `|I^B(A)| ≤ tol` for every `|A| ≥ 3`.
    pub fn is_two_additive(&self, tol: f64) -> bool {
        self.criteria.subsets().filter(|s| s.cardinality() >= 3).all(|s| self.get(s).abs() <= tol)
    }
}

impl FourierVector {
    pub fn to_banzhaf(&self) -> InteractionVector {
        let values = self.criteria.subsets().map(|s| (-2.0f64).powi(s.cardinality() as i32) * self.get(s)).collect();
        InteractionVector { criteria: self.criteria, values }
    }
}

/// Convenience wrapper with a dimension check, for callers holding an
/// expected criteria count.
pub fn banzhaf_from_capacity(criteria: Criteria, mu: &Capacity) -> Result<InteractionVector> {
    check_same(criteria, mu.criteria())?;
    Ok(mu.banzhaf())
}

pub fn capacity_from_banzhaf(criteria: Criteria, ib: &InteractionVector) -> Result<Capacity> {
    check_same(criteria, ib.criteria())?;
    Ok(ib.to_capacity())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub subset: Subset,
    pub superset: Subset,
    /// `μ(subset) - μ(superset)`, positive.
    pub drop: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub bounded: bool,
    pub empty_value: f64,
    pub full_value: f64,
    pub violations: Vec<MonotonicityViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.bounded && self.violations.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return f.write_str("valid capacity");
        }
        if !self.bounded {
            write!(f, "boundedness fails (mu(empty) = {}, mu(C) = {})", self.empty_value, self.full_value)?;
            if !self.violations.is_empty() {
                f.write_str("; ")?;
            }
        }
        if let Some(v) = self.violations.first() {
            write!(
                f,
                "{} monotonicity violation(s), first: mu({{{}}}) > mu({{{}}}) by {:.3e}",
                self.violations.len(),
                v.subset,
                v.superset,
                v.drop
            )?;
        }
        Ok(())
    }
}
