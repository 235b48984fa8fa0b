//! Variance-based sensitivity of an aggregation model.
//!
//! Empirical indices come from a slice estimator: conditioning variables are
//! cut into equal-width bins on `[0, 1]` and `E[Y | Z_D]` is estimated by the
//! mean of `Y` within each cell. Analytic indices use the closed form
//! `Var[f_A] = I^B(A)^2 / 12^{|A|}`, valid for independent uniform inputs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aggregation::DecisionMatrix;
use crate::capacity::InteractionVector;
use crate::error::{Error, Result};
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SliceConfig {
    /// Equal-width bins per conditioning variable.
    pub slice_count: usize,
    /// Cells with fewer rows are left out of the estimate.
    pub min_slice_population: usize,
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self { slice_count: 20, min_slice_population: 1 }
    }
}

impl SliceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slice_count < 2 {
            return Err(Error::Config(format!("slice count must be at least 2, got {}", self.slice_count)));
        }
        if self.min_slice_population < 1 {
            return Err(Error::Config("minimum slice population must be at least 1".into()));
        }
        Ok(())
    }

    fn bin(&self, v: f64) -> usize {
        ((v * self.slice_count as f64) as usize).min(self.slice_count - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "empirical-slices")]
    EmpiricalSlices,
    #[serde(rename = "analytic-banzhaf")]
    AnalyticBanzhaf,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::EmpiricalSlices => "empirical-slices",
            Estimator::AnalyticBanzhaf => "analytic-banzhaf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolReport {
    pub subset: Subset,
    /// Nonnormalized index, `Var[f_A]`.
    pub raw_variance: f64,
    /// `raw_variance / Var[Y]`, when requested.
    pub normalized: Option<f64>,
    pub estimator: Estimator,
    pub sample_size: usize,
}

/// One HDMR component `f_A` evaluated at every row. Rows whose cell was
/// skipped (below the minimum population) carry `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct HdmrTerm {
    pub subset: Subset,
    pub values: Vec<Option<f64>>,
}

/// Assignment of rows to slice cells for a fixed conditioning subset.
/// Reusable across many outputs `Y` on the same data.
#[derive(Clone, Debug)]
pub struct SlicePartition {
    subset: Subset,
    cells: Vec<u32>,
    populations: Vec<usize>,
    min_population: usize,
}

impl SlicePartition {
    pub fn new(matrix: &DecisionMatrix, subset: Subset, cfg: &SliceConfig) -> Result<Self> {
        cfg.validate()?;
        let order = subset.cardinality();
        if order > 2 {
            return Err(Error::UnsupportedOrder(order));
        }
        if let Some(j) = subset.members().find(|&j| j >= matrix.m()) {
            return Err(Error::CriterionOutOfRange { index: j, count: matrix.m() });
        }
        if matrix.n() < 10 * cfg.slice_count.pow(order as u32) {
            log::warn!(
                "{} rows for {} slice cells; conditional means will be noisy",
                matrix.n(),
                cfg.slice_count.pow(order as u32)
            );
        }
        let members: Vec<usize> = subset.members().collect();
        let cell_count = cfg.slice_count.pow(order as u32);
        let cells: Vec<u32> = matrix
            .rows()
            .map(|row| members.iter().fold(0usize, |acc, &j| acc * cfg.slice_count + cfg.bin(row[j])) as u32)
            .collect();
        let mut populations = vec![0; cell_count];
        for &c in &cells {
            populations[c as usize] += 1;
        }
        Ok(Self { subset, cells, populations, min_population: cfg.min_slice_population })
    }

    pub fn subset(&self) -> Subset {
        self.subset
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn included(&self, cell: u32) -> bool {
        self.populations[cell as usize] >= self.min_population
    }

    fn cell_means(&self, y: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.populations.len()];
        for (&c, &v) in self.cells.iter().zip(y) {
            sums[c as usize] += v;
        }
        sums.iter_mut().zip(&self.populations).for_each(|(s, &p)| {
            if p > 0 {
                *s /= p as f64
            }
        });
        sums
    }

    /// Per-row estimate of `E[Y | Z_D]`.
    pub fn conditional_expectation(&self, y: &[f64]) -> Result<Vec<Option<f64>>> {
        self.check_len(y)?;
        let means = self.cell_means(y);
        Ok(self.cells.iter().map(|&c| self.included(c).then(|| means[c as usize])).collect())
    }

    /// `Var[E[Y | Z_D]]` over the included rows, without materializing the
    /// per-row estimate.
    pub fn conditional_variance(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        let means = self.cell_means(y);
        let cells: Vec<(f64, f64)> = means
            .iter()
            .zip(&self.populations)
            .filter(|&(_, &pop)| pop > 0 && pop >= self.min_population)
            .map(|(&mean, &pop)| (mean, pop as f64))
            .collect();
        let count: f64 = cells.iter().map(|c| c.1).sum();
        if count == 0.0 || cells.iter().all(|c| c.0 == cells[0].0) {
            return Ok(0.0);
        }
        let grand = cells.iter().map(|(mean, pop)| mean * pop).sum::<f64>() / count;
        let spread: f64 = cells.iter().map(|(mean, pop)| pop * (mean - grand) * (mean - grand)).sum();
        Ok(spread / count)
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() == self.cells.len() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.cells.len(), actual: y.len() })
        }
    }
}

/// Population variance (divides by the count). Empty or constant input gives exactly 0.
pub fn population_variance(values: &[f64]) -> f64 {
    if values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn option_variance(values: &[Option<f64>]) -> (f64, usize) {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (population_variance(&present), present.len())
}

fn check_output(y: &[f64], matrix: &DecisionMatrix) -> Result<()> {
    if y.len() != matrix.n() {
        return Err(Error::Dimension { expected: matrix.n(), actual: y.len() });
    }
    if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NotFinite(pos));
    }
    Ok(())
}

/// Per-row slice estimate of `E[Y | Z_D]` for `|D| ≤ 2`.
pub fn conditional_expectation(
    y: &[f64],
    matrix: &DecisionMatrix,
    subset: Subset,
    cfg: &SliceConfig,
) -> Result<Vec<Option<f64>>> {
    check_output(y, matrix)?;
    SlicePartition::new(matrix, subset, cfg)?.conditional_expectation(y)
}

/// HDMR component by inclusion–exclusion over conditional expectations:
/// `f_A = Σ_{D⊆A} (-1)^{|A∖D|} E[Y | Z_D]`.
pub fn hdmr_term(y: &[f64], matrix: &DecisionMatrix, subset: Subset, cfg: &SliceConfig) -> Result<HdmrTerm> {
    check_output(y, matrix)?;
    let order = subset.cardinality();
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut values: Vec<Option<f64>> = vec![Some(0.0); y.len()];
    let mut part = 0u32;
    loop {
        let sub = Subset(part);
        let sign = if (order - sub.cardinality()).is_multiple_of(2) { 1.0 } else { -1.0 };
        let expectation = conditional_expectation(y, matrix, sub, cfg)?;
        for (acc, e) in values.iter_mut().zip(expectation) {
            *acc = match (*acc, e) {
                (Some(a), Some(e)) => Some(a + sign * e),
                _ => None,
            };
        }
        if part == subset.bits() {
            break;
        }
        part = (part.wrapping_sub(subset.bits())) & subset.bits();
    }
    Ok(HdmrTerm { subset, values })
}

fn normalize(raw: f64, y: &[f64], normalize: bool) -> Result<Option<f64>> {
    if !normalize {
        return Ok(None);
    }
    let total = population_variance(y);
    if total <= 0.0 || y.iter().all(|&v| v == y[0]) {
        return Err(Error::UndefinedNormalization);
    }
    Ok(Some(raw / total))
}

/// First-order index `Var[E[Y | Z_j]]`, optionally divided by `Var[Y]`.
pub fn first_order_empirical(
    y: &[f64],
    matrix: &DecisionMatrix,
    j: usize,
    cfg: &SliceConfig,
    normalized: bool,
) -> Result<SobolReport> {
    matrix.criteria().check(j)?;
    check_output(y, matrix)?;
    let expectation = conditional_expectation(y, matrix, Subset::singleton(j), cfg)?;
    let (raw, sample_size) = option_variance(&expectation);
    Ok(SobolReport {
        subset: Subset::singleton(j),
        raw_variance: raw,
        normalized: normalize(raw, y, normalized)?,
        estimator: Estimator::EmpiricalSlices,
        sample_size,
    })
}

/// `Var[f_A]` for `1 ≤ |A| ≤ 2`. For singletons this equals
/// [`first_order_empirical`].
pub fn empirical_index(
    y: &[f64],
    matrix: &DecisionMatrix,
    subset: Subset,
    cfg: &SliceConfig,
    normalized: bool,
) -> Result<SobolReport> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("sensitivity index of the empty set".into()));
    }
    let term = hdmr_term(y, matrix, subset, cfg)?;
    let (raw, sample_size) = option_variance(&term.values);
    Ok(SobolReport {
        subset,
        raw_variance: raw,
        normalized: normalize(raw, y, normalized)?,
        estimator: Estimator::EmpiricalSlices,
        sample_size,
    })
}

/// Closed-form nonnormalized index `I^B(A)^2 / 12^{|A|}` of the multilinear
/// model under independent uniform inputs.
pub fn analytic_sobol(ib: &InteractionVector, subset: Subset) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("sensitivity index of the empty set".into()));
    }
    if !subset.is_subset_of(ib.criteria().full()) {
        return Err(Error::InvalidArgument(format!("subset {{{subset}}} outside the criteria set")));
    }
    let i = ib[subset];
    Ok(i * i / 12f64.powi(subset.cardinality() as i32))
}

/// Analytic report; the normalized value divides by the model's total
/// variance, which is the sum of all analytic indices.
pub fn analytic_report(ib: &InteractionVector, subset: Subset, sample_size: usize) -> Result<SobolReport> {
    let raw = analytic_sobol(ib, subset)?;
    let total: f64 = ib.criteria().subsets().skip(1).map(|s| analytic_sobol(ib, s)).sum::<Result<f64>>()?;
    Ok(SobolReport {
        subset,
        raw_variance: raw,
        normalized: (total > 0.0).then(|| raw / total),
        estimator: Estimator::AnalyticBanzhaf,
        sample_size,
    })
}
