//! Weighted arithmetic mean and multilinear aggregation, and rankings.

use serde::{Deserialize, Serialize};

use crate::capacity::{Capacity, InteractionVector};
use crate::error::{Error, Result};
use crate::subset::{Criteria, Subset};

/// `n × m` evaluations in `[0, 1]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionMatrix {
    criteria: Criteria,
    n: usize,
    data: Vec<f64>,
    criterion_names: Vec<String>,
    labels: Option<Vec<String>>,
}

impl DecisionMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::Dimension { expected: m, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), m, data)
    }

    pub fn from_row_major(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("decision matrix needs at least one alternative".into()));
        }
        let criteria = Criteria::new(m)?;
        if data.len() != n * m {
            return Err(Error::Dimension { expected: n * m, actual: data.len() });
        }
        for (pos, &value) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain { row: pos / m + 1, column: pos % m + 1, value });
            }
        }
        let criterion_names = (1..=m).map(|j| format!("c{j}")).collect();
        Ok(Self { criteria, n, data, criterion_names, labels: None })
    }

    /// Rescales every column to `[0, 1]` by its min and max. Constant columns map to 0.
    pub fn min_max_normalized(n: usize, m: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * m {
            return Err(Error::Dimension { expected: n * m, actual: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NotFinite(pos));
        }
        for j in 0..m {
            let column = data.iter().skip(j).step_by(m.max(1));
            let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let span = hi - lo;
            for v in data.iter_mut().skip(j).step_by(m.max(1)) {
                *v = if span > 0.0 { ((*v - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
            }
        }
        Self::from_row_major(n, m, data)
    }

    pub fn with_criterion_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.m() {
            return Err(Error::Dimension { expected: self.m(), actual: names.len() });
        }
        self.criterion_names = names;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.criteria.count()
    }

    pub fn criteria(&self) -> Criteria {
        self.criteria
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.data[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m())
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(j).step_by(self.m()).copied()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m() + j]
    }

    pub fn criterion_names(&self) -> &[String] {
        &self.criterion_names
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }
}

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self(weights))
    }

    pub fn equal(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        WeightVector::new(w)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Vec<f64> {
        w.0
    }
}

pub fn wam(matrix: &DecisionMatrix, weights: &WeightVector) -> Result<Vec<f64>> {
    if weights.0.len() != matrix.m() {
        return Err(Error::Dimension { expected: matrix.m(), actual: weights.0.len() });
    }
    Ok(matrix.rows().map(|row| row.iter().zip(&weights.0).map(|(v, w)| v * w).sum()).collect())
}

/// Multilinear (Owen) extension of `mu` evaluated on every row.
///
/// Dispatches to the pairwise expansion when `mu` is 2-additive, otherwise
/// enumerates all subsets.
pub fn multilinear(matrix: &DecisionMatrix, mu: &Capacity) -> Result<Vec<f64>> {
    if mu.m() != matrix.m() {
        return Err(Error::Dimension { expected: matrix.m(), actual: mu.m() });
    }
    let ib = mu.banzhaf();
    if ib.is_two_additive(1e-13) {
        multilinear_two_additive(matrix, &ib)
    } else {
        multilinear_full(matrix, mu)
    }
}

/// Direct evaluation `Σ_A μ(A) Π_{j∈A} v_j Π_{j∉A} (1 - v_j)`.
pub fn multilinear_full(matrix: &DecisionMatrix, mu: &Capacity) -> Result<Vec<f64>> {
    if mu.m() != matrix.m() {
        return Err(Error::Dimension { expected: matrix.m(), actual: mu.m() });
    }
    let size = mu.criteria().subset_count();
    let mut weights = vec![0.0; size];
    Ok(matrix
        .rows()
        .map(|row| {
            vertex_weights(row, &mut weights);
            weights.iter().zip(mu.values()).map(|(w, v)| w * v).sum()
        })
        .collect())
}

/// Fills `out[A] = Π_{j∈A} v_j Π_{j∉A} (1 - v_j)`.
fn vertex_weights(row: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    let mut filled = 1;
    for &v in row {
        for mask in 0..filled {
            let w = out[mask];
            out[mask] = w * (1.0 - v);
            out[mask + filled] = w * v;
        }
        filled *= 2;
    }
}

/// Pairwise expansion of the multilinear model in centred coordinates,
/// `I(∅) + Σ_j φ_j (v_j - ½) + Σ_{j<k} I_{jk} (v_j - ½)(v_k - ½)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseModel {
    pub base: f64,
    pub power: Vec<f64>,
    /// `(j, k, I_{jk})` for nonzero pair interactions.
    pub pairs: Vec<(usize, usize, f64)>,
}

impl PairwiseModel {
    /// Keeps the terms of order at most two; terms of order three and above
    /// are dropped, so this is exact only for 2-additive capacities.
    pub fn from_interactions(ib: &InteractionVector) -> Self {
        let m = ib.m();
        Self {
            base: ib[Subset::EMPTY],
            power: (0..m).map(|j| ib.power_index(j)).collect(),
            pairs: ib
                .criteria()
                .pairs()
                .into_iter()
                .map(|(j, k)| (j, k, ib.pair(j, k)))
                .filter(|&(_, _, w)| w != 0.0)
                .collect(),
        }
    }

    pub fn evaluate_row(&self, row: &[f64]) -> f64 {
        let linear: f64 = self.power.iter().zip(row).map(|(p, v)| p * (v - 0.5)).sum();
        let quadratic: f64 = self.pairs.iter().map(|&(j, k, w)| w * (row[j] - 0.5) * (row[k] - 0.5)).sum();
        self.base + linear + quadratic
    }

    pub fn evaluate(&self, matrix: &DecisionMatrix) -> Result<Vec<f64>> {
        if self.power.len() != matrix.m() {
            return Err(Error::Dimension { expected: matrix.m(), actual: self.power.len() });
        }
        Ok(matrix.rows().map(|row| self.evaluate_row(row)).collect())
    }
}

/// Multilinear model through [`PairwiseModel`]; exact for 2-additive capacities.
pub fn multilinear_two_additive(matrix: &DecisionMatrix, ib: &InteractionVector) -> Result<Vec<f64>> {
    PairwiseModel::from_interactions(ib).evaluate(matrix)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub overall: Vec<f64>,
    /// Alternatives (0-based), best first.
    pub order: Vec<usize>,
    /// Competition rank per alternative, 1 = best.
    pub positions: Vec<usize>,
}

/// Descending order, ties broken by lower index; tied values share the
/// smallest position.
pub fn rank(overall: &[f64]) -> Result<Ranking> {
    if let Some(pos) = overall.iter().position(|v| v.is_nan()) {
        return Err(Error::NotFinite(pos));
    }
    let mut order: Vec<usize> = (0..overall.len()).collect();
    order.sort_by(|&a, &b| overall[b].total_cmp(&overall[a]).then(a.cmp(&b)));
    let mut positions = vec![0; overall.len()];
    for (place, &i) in order.iter().enumerate() {
        positions[i] =
            if place > 0 && overall[order[place - 1]] == overall[i] { positions[order[place - 1]] } else { place + 1 };
    }
    Ok(Ranking { overall: overall.to_vec(), order, positions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn students() -> DecisionMatrix {
        DecisionMatrix::from_rows(&[vec![1.00, 0.94, 0.67], vec![0.67, 0.72, 0.94], vec![0.83, 0.89, 0.83]]).unwrap()
    }

    #[test]
    fn wam_on_students() {
        let r = wam(&students(), &WeightVector::equal(3)).unwrap();
        assert_abs_diff_eq!(r[0], 0.8700, epsilon = 5e-5);
        assert_abs_diff_eq!(r[1], 0.7767, epsilon = 5e-5);
        assert_abs_diff_eq!(r[2], 0.8500, epsilon = 5e-5);
    }

    #[test]
    fn constant_rows_are_idempotent() {
        let v = DecisionMatrix::from_rows(&[vec![0.3; 4], vec![0.8; 4]]).unwrap();
        let w = WeightVector::equal(4);
        assert_eq!(wam(&v, &w).unwrap(), vec![0.3, 0.8]);
        let r = multilinear(&v, &Capacity::uniform(4).unwrap()).unwrap();
        assert_abs_diff_eq!(r[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn multilinear_on_student_three() {
        // The decimal pair values the published figures were computed with.
        let mu = Capacity::from_cardinality_list(
            Criteria::new(3).unwrap(),
            &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.4, 0.67, 0.67, 1.0],
        )
        .unwrap();
        let r = multilinear(&students(), &mu).unwrap();
        assert_abs_diff_eq!(r[2], 0.8172, epsilon = 5e-4);
    }

    #[test]
    fn vertices_return_capacity_values() {
        let mu = Capacity::from_cardinality_list(Criteria::new(3).unwrap(), &[0.0, 0.1, 0.2, 0.3, 0.5, 0.4, 0.6, 1.0])
            .unwrap();
        let rows: Vec<Vec<f64>> = (0..8u32).map(|a| (0..3).map(|j| f64::from(a >> j & 1)).collect()).collect();
        let v = DecisionMatrix::from_rows(&rows).unwrap();
        for (a, r) in multilinear_full(&v, &mu).unwrap().into_iter().enumerate() {
            assert_eq!(r, mu.values()[a]);
        }
    }

    #[test]
    fn domain_error_names_the_cell() {
        let err = DecisionMatrix::from_rows(&[vec![0.2, 0.3], vec![0.4, 1.2]]).unwrap_err();
        assert!(matches!(err, Error::Domain { row: 2, column: 2, .. }), "{err}");
        assert!(DecisionMatrix::from_rows(&[]).is_err());
        assert!(DecisionMatrix::from_rows(&[vec![0.2]]).is_err());
    }

    #[test]
    fn min_max_normalization() {
        let v = DecisionMatrix::min_max_normalized(3, 2, vec![10.0, 5.0, 20.0, 5.0, 15.0, 5.0]).unwrap();
        assert_eq!(v.column(0).collect::<Vec<_>>(), vec![0.0, 1.0, 0.5]);
        assert_eq!(v.column(1).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn weight_vector_checks() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![0.6, 0.5]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
        assert!(wam(&students(), &WeightVector::new(vec![0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn ranking_rules() {
        let r = rank(&[0.7874, 0.7703, 0.8172]).unwrap();
        assert_eq!(r.positions, vec![2, 3, 1]);
        assert_eq!(r.order, vec![2, 0, 1]);

        let tie = rank(&[0.5, 0.5]).unwrap();
        assert_eq!(tie.positions, vec![1, 1]);
        assert_eq!(tie.order, vec![0, 1]);

        let r = rank(&[0.7976, 0.8196, 0.8445]).unwrap();
        assert_eq!(r.order[0], 2);

        let r = rank(&[0.3, 0.9, 0.3, 0.1]).unwrap();
        assert_eq!(r.positions, vec![2, 1, 2, 4]);

        assert!(rank(&[0.1, f64::NAN]).is_err());
        assert_eq!(rank(&[0.4]).unwrap().positions, vec![1]);
    }
}
