//! Synthetic decision matrices with uniform marginals and targeted pairwise
//! correlations, drawn through a Gaussian copula.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::aggregation::DecisionMatrix;
use crate::error::{Error, Result};
use crate::subset::Criteria;

/// Pearson correlation target between criteria `i` and `j` (0-based) on the
/// uniform scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTarget {
    pub i: usize,
    pub j: usize,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub targets: Vec<PairTarget>,
    pub seed: u64,
}

impl GenSpec {
    pub fn independent(n: usize, m: usize, seed: u64) -> Self {
        Self { n, m, targets: Vec::new(), seed }
    }

    pub fn with_target(mut self, i: usize, j: usize, rho: f64) -> Self {
        self.targets.push(PairTarget { i, j, rho });
        self
    }

    /// Latent Gaussian correlation matrix, row-major `m × m`.
    pub fn latent_correlation(&self) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(Error::Spec("n must be at least 1 (got 0)".into()));
        }
        Criteria::new(self.m).map_err(|_| Error::Spec(format!("m must be in 2..=20 (got {})", self.m)))?;
        let m = self.m;
        let mut r = vec![0.0; m * m];
        for d in 0..m {
            r[d * m + d] = 1.0;
        }
        for t in &self.targets {
            if t.i >= m || t.j >= m {
                return Err(Error::Spec(format!(
                    "correlation target ({}, {}) refers to a criterion beyond m = {m}",
                    t.i + 1,
                    t.j + 1
                )));
            }
            if t.i == t.j {
                return Err(Error::Spec(format!("correlation target pairs criterion {} with itself", t.i + 1)));
            }
            if t.rho.is_nan() || t.rho.abs() >= 1.0 {
                return Err(Error::Spec(format!("correlation target {} must satisfy |rho| < 1", t.rho)));
            }
            let g = latent_rho(t.rho);
            r[t.i * m + t.j] = g;
            r[t.j * m + t.i] = g;
        }
        Ok(r)
    }
}

/// Gaussian correlation whose copula gives uniform-scale Pearson `rho`.
pub fn latent_rho(rho: f64) -> f64 {
    2.0 * (std::f64::consts::PI * rho / 6.0).sin()
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
fn cholesky(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * m + k] * l[j * m + k]).sum();
            if i == j {
                let d = a[i * m + i] - dot;
                if d <= 1e-12 {
                    return None;
                }
                l[i * m + i] = d.sqrt();
            } else {
                l[i * m + j] = (a[i * m + j] - dot) / l[j * m + j];
            }
        }
    }
    Some(l)
}

pub fn generate(spec: &GenSpec) -> Result<DecisionMatrix> {
    let r = spec.latent_correlation()?;
    let m = spec.m;
    let l = cholesky(&r, m).ok_or_else(|| {
        Error::Spec("correlation targets are inconsistent (latent matrix is not positive definite)".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data = Vec::with_capacity(spec.n * m);
    let mut e = vec![0.0; m];
    for _ in 0..spec.n {
        for x in e.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        for i in 0..m {
            let z: f64 = (0..=i).map(|k| l[i * m + k] * e[k]).sum();
            data.push(normal_cdf(z));
        }
    }
    DecisionMatrix::from_row_major(spec.n, m, data)
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), actual: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least two observations".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
