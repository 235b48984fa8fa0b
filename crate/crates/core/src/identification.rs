//! Unsupervised identification of a 2-additive capacity by equalizing
//! Sobol' indices of same-cardinality coalitions.
//!
//! Singleton capacities are fixed to a common value `s`; the free parameters
//! are the pair capacities `μ({j,k})`. Under 2-additivity `μ(C) = 1` pins
//! their sum, so every outer step moves one pair coordinate by golden-section
//! search while a second one absorbs the change and all others stay fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregation::{multilinear, DecisionMatrix, PairwiseModel};
use crate::capacity::{Capacity, InteractionVector, MONOTONICITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::sobol::{population_variance, SliceConfig, SlicePartition};
use crate::subset::{Criteria, Subset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentificationConfig {
    /// Common value of every `μ({j})`; `None` means `1/m`.
    pub singleton_value: Option<f64>,
    /// Cardinalities whose indices are equalized (1 and/or 2).
    pub objective_orders: Vec<usize>,
    pub slices: SliceConfig,
    /// Golden-section stops once the bracket is this narrow.
    pub gs_tolerance: f64,
    /// Outer steps improving by less than this count as stagnant.
    pub objective_tolerance: f64,
    pub max_outer_iterations: usize,
    pub rng_seed: u64,
    /// Number of starting points; the first is always the additive one.
    pub starts: usize,
    /// Equalize indices divided by `Var[Y]` instead of raw variances.
    pub normalized: bool,
    /// Weight of `Σ (pair Möbius mass)^2` added to the objective. Only breaks
    /// ties along directions the objective cannot see.
    pub interaction_penalty: f64,
}

impl Default for IdentificationConfig {
    fn default() -> Self {
        Self {
            singleton_value: None,
            objective_orders: vec![1],
            slices: SliceConfig::default(),
            gs_tolerance: 1e-6,
            objective_tolerance: 1e-10,
            max_outer_iterations: 500,
            rng_seed: 0,
            starts: 1,
            normalized: false,
            interaction_penalty: 1e-12,
        }
    }
}

impl IdentificationConfig {
    pub fn singleton_for(&self, m: usize) -> f64 {
        self.singleton_value.unwrap_or(1.0 / m as f64)
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        self.slices.validate()?;
        let s = self.singleton_for(m);
        let upper = (2.0 / m as f64).min(1.0);
        if !(s > 0.0 && s <= upper + 1e-15) {
            return Err(Error::Config(format!(
                "singleton value {s} admits no monotone 2-additive completion for m = {m} (need 0 < s <= {upper})"
            )));
        }
        if self.objective_orders.is_empty() {
            return Err(Error::Config("at least one objective order is required".into()));
        }
        if let Some(&o) = self.objective_orders.iter().find(|&&o| o == 0 || o > 2) {
            return Err(Error::UnsupportedOrder(o));
        }
        if self.gs_tolerance.is_nan() || self.gs_tolerance <= 0.0 {
            return Err(Error::Config("golden-section tolerance must be positive".into()));
        }
        if self.objective_tolerance.is_nan() || self.objective_tolerance < 0.0 {
            return Err(Error::Config("objective tolerance must be nonnegative".into()));
        }
        if self.starts == 0 {
            return Err(Error::Config("at least one start is required".into()));
        }
        if self.interaction_penalty.is_nan() || self.interaction_penalty < 0.0 {
            return Err(Error::Config("interaction penalty must be nonnegative".into()));
        }
        Ok(())
    }
}

/// The linear constraint on pair capacities implied by `μ(C) = 1` for a
/// 2-additive capacity with fixed singletons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairConstraint {
    pub pair_count: usize,
    /// Required `Σ_{j<k} μ({j,k})`, equal to `1 + s·m·(m-2)`.
    pub pair_sum: f64,
    /// Required `Σ_{j<k} m_{jk}` of pair Möbius masses, equal to `1 - m·s`.
    pub mass_sum: f64,
}

pub fn pair_constraint_targets(m: usize, singleton_value: f64) -> Result<PairConstraint> {
    if m < 2 {
        return Err(Error::CriteriaCount(m));
    }
    let mf = m as f64;
    Ok(PairConstraint {
        pair_count: m * (m - 1) / 2,
        pair_sum: 1.0 + singleton_value * mf * (mf - 2.0),
        mass_sum: 1.0 - mf * singleton_value,
    })
}

/// 2-additive capacity in pair coordinates: common singleton value and
/// `μ({j,k})` for each pair in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoAdditive {
    criteria: Criteria,
    singleton: f64,
    pairs: Vec<f64>,
}

impl TwoAdditive {
    pub fn new(criteria: Criteria, singleton: f64, pairs: Vec<f64>) -> Result<Self> {
        let count = criteria.count() * (criteria.count() - 1) / 2;
        if pairs.len() != count {
            return Err(Error::Dimension { expected: count, actual: pairs.len() });
        }
        Ok(Self { criteria, singleton, pairs })
    }

    /// Equal pair masses summing to `1 - m·s`; the additive capacity when `s = 1/m`.
    pub fn uniform_start(criteria: Criteria, singleton: f64) -> Self {
        let target = pair_constraint_targets(criteria.count(), singleton).expect("m >= 2");
        let mass = target.mass_sum / target.pair_count as f64;
        Self { criteria, singleton, pairs: vec![2.0 * singleton + mass; target.pair_count] }
    }

    pub fn criteria(&self) -> Criteria {
        self.criteria
    }

    pub fn singleton(&self) -> f64 {
        self.singleton
    }

    /// `μ({j,k})` in lexicographic pair order.
    pub fn pairs(&self) -> &[f64] {
        &self.pairs
    }

    pub fn pair_labels(&self) -> Vec<(usize, usize)> {
        self.criteria.pairs()
    }

    pub fn pair_sum(&self) -> f64 {
        self.pairs.iter().sum()
    }

    fn mass(&self, p: usize) -> f64 {
        self.pairs[p] - 2.0 * self.singleton
    }

    /// Minimum over criteria of `s + Σ_k min(0, m_{jk})`, the smallest
    /// marginal contribution `μ(A ∪ {j}) - μ(A)`. Nonnegative iff monotone.
    pub fn monotonicity_slack(&self) -> f64 {
        let m = self.criteria.count();
        let mut worst = vec![self.singleton; m];
        for (p, (j, k)) in self.criteria.pairs().into_iter().enumerate() {
            let mass = self.mass(p).min(0.0);
            worst[j] += mass;
            worst[k] += mass;
        }
        worst.into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn capacity(&self) -> Capacity {
        let pair_list = self.criteria.pairs();
        let values = self
            .criteria
            .subsets()
            .map(|a| {
                // Stored coordinates are exact; the constraint fixes μ(C) = 1.
                if a == self.criteria.full() {
                    return 1.0;
                }
                if a.cardinality() == 2 {
                    let p = pair_list.iter().position(|&(j, k)| Subset::pair(j, k) == a).expect("pair listed");
                    return self.pairs[p];
                }
                let singles = a.cardinality() as f64 * self.singleton;
                let pairs: f64 = pair_list
                    .iter()
                    .enumerate()
                    .filter(|(_, &(j, k))| a.contains(j) && a.contains(k))
                    .map(|(p, _)| self.mass(p))
                    .sum();
                singles + pairs
            })
            .collect();
        Capacity::from_masked(self.criteria, values).expect("shape matches criteria")
    }

    pub fn interactions(&self) -> InteractionVector {
        let model = self.model();
        let mut values = vec![0.0; self.criteria.subset_count()];
        values[0] = model.base;
        for (j, p) in model.power.iter().enumerate() {
            values[Subset::singleton(j).index()] = *p;
        }
        for (p, (j, k)) in self.criteria.pairs().into_iter().enumerate() {
            values[Subset::pair(j, k).index()] = self.mass(p);
        }
        InteractionVector::from_masked(self.criteria, values).expect("shape matches criteria")
    }

    /// Multilinear model of this capacity in centred coordinates.
    pub fn model(&self) -> PairwiseModel {
        let m = self.criteria.count();
        let mut power = vec![self.singleton; m];
        let mut pairs = Vec::with_capacity(self.pairs.len());
        let mut mass_total = 0.0;
        for (p, (j, k)) in self.criteria.pairs().into_iter().enumerate() {
            let mass = self.mass(p);
            power[j] += 0.5 * mass;
            power[k] += 0.5 * mass;
            mass_total += mass;
            pairs.push((j, k, mass));
        }
        PairwiseModel { base: 0.5 * m as f64 * self.singleton + 0.25 * mass_total, power, pairs }
    }

    fn mass_norm(&self) -> f64 {
        (0..self.pairs.len()).map(|p| self.mass(p).powi(2)).sum()
    }

    /// Sets pair `moving` to `value` and recomputes pair `balancing` from the
    /// pair-sum constraint.
    pub fn moved(&self, moving: usize, balancing: usize, value: f64) -> Self {
        let target = pair_constraint_targets(self.criteria.count(), self.singleton).expect("m >= 2").pair_sum;
        let mut pairs = self.pairs.clone();
        pairs[moving] = value;
        let others: f64 = pairs.iter().enumerate().filter(|&(p, _)| p != balancing).map(|(_, v)| v).sum();
        pairs[balancing] = target - others;
        Self { pairs, ..*self }
    }
}

/// The largest interval for pair `moving` such that, with pair `balancing`
/// keeping the pair sum and all other pairs fixed, the capacity stays
/// monotone (and therefore within `[0, 1]`).
///
/// Each marginal-contribution bound `s + Σ_k min(0, m_{jk}) ≥ 0` is concave
/// and piecewise linear in the moving coordinate, so the feasible set is an
/// interval. Its ends are located by walking the mass sign changes outward,
/// then refining the crossing with repeated chords.
pub fn feasible_interval(point: &TwoAdditive, moving: usize, balancing: usize) -> Result<(f64, f64)> {
    let count = point.pairs.len();
    if moving >= count || balancing >= count {
        return Err(Error::InvalidArgument(format!("pair index out of range (have {count} pairs)")));
    }
    if moving == balancing {
        return Err(Error::InvalidArgument("moving and balancing pairs must differ".into()));
    }
    let target = pair_constraint_targets(point.criteria.count(), point.singleton)?.pair_sum;
    if (point.pair_sum() - target).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("pair sum {} differs from the required {target}", point.pair_sum())));
    }
    let slack = |x: f64| point.moved(moving, balancing, x).monotonicity_slack();
    let current = point.pairs[moving];
    if slack(current) < -MONOTONICITY_TOLERANCE {
        return Err(Error::Infeasible(format!("current capacity is not monotone (slack {})", slack(current))));
    }

    let s = point.singleton;
    let budget = point.pairs[moving] + point.pairs[balancing];
    // Both moving and balancing masses must stay ≥ -s on their own.
    let lower = s;
    let upper = budget - s;
    let mut kinks = vec![lower, upper, 2.0 * s, budget - 2.0 * s];
    kinks.retain(|&x| (lower..=upper).contains(&x));
    kinks.sort_by(f64::total_cmp);

    let walk = |towards: &mut dyn Iterator<Item = f64>| {
        let mut inside = current;
        let mut inside_slack = slack(current).max(0.0);
        for x in towards {
            let sx = slack(x);
            if sx >= 0.0 {
                inside = x;
                inside_slack = sx;
                continue;
            }
            // The chord undershoots where the binding criterion changes
            // inside the segment; repeat from each new inside point.
            for _ in 0..64 {
                let cross = inside + (x - inside) * inside_slack / (inside_slack - sx);
                let sc = slack(cross);
                if sc.abs() <= 1e-15 {
                    return cross;
                }
                if sc < 0.0 || cross == inside {
                    return inside;
                }
                inside = cross;
                inside_slack = sc;
            }
            return inside;
        }
        inside
    };
    let lo = walk(&mut kinks.iter().rev().copied().filter(|&x| x < current)).min(current);
    let hi = walk(&mut kinks.iter().copied().filter(|&x| x > current)).max(current);
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMinimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`. Also evaluates
/// both ends and returns the best point seen.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> LineMinimum {
    let mut best = LineMinimum { x: lo, value: f(lo), evaluations: 1 };
    let consider = |x: f64, v: f64, best: &mut LineMinimum| {
        best.evaluations += 1;
        if v < best.value {
            best.x = x;
            best.value = v;
        }
    };
    if hi <= lo {
        return best;
    }
    let fhi = f(hi);
    consider(hi, fhi, &mut best);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    consider(c, fc, &mut best);
    let mut fd = f(d);
    consider(d, fd, &mut best);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            consider(d, fd, &mut best);
        }
    }
    best
}

/// Sum of squared differences between same-cardinality Sobol' indices on a
/// fixed data sample. Slice partitions are built once.
pub struct Objective<'a> {
    matrix: &'a DecisionMatrix,
    orders: Vec<Vec<Subset>>,
    partitions: Vec<SlicePartition>,
    normalized: bool,
}

impl<'a> Objective<'a> {
    pub fn new(matrix: &'a DecisionMatrix, cfg: &IdentificationConfig) -> Result<Self> {
        cfg.slices.validate()?;
        let mut orders: Vec<usize> = cfg.objective_orders.clone();
        orders.sort_unstable();
        orders.dedup();
        if let Some(&o) = orders.iter().find(|&&o| o == 0 || o > 2) {
            return Err(Error::UnsupportedOrder(o));
        }
        let groups: Vec<Vec<Subset>> =
            orders.iter().map(|&o| matrix.criteria().subsets().filter(|s| s.cardinality() == o).collect()).collect();
        // Pair terms need the singleton partitions too.
        let mut needed: Vec<Subset> = groups
            .iter()
            .flatten()
            .flat_map(|s| {
                let mut v: Vec<Subset> = s.members().map(Subset::singleton).collect();
                v.push(*s);
                v
            })
            .collect();
        needed.sort_unstable();
        needed.dedup();
        let partitions =
            needed.into_iter().map(|s| SlicePartition::new(matrix, s, &cfg.slices)).collect::<Result<_>>()?;
        Ok(Self { matrix, orders: groups, partitions, normalized: cfg.normalized })
    }

    fn partition(&self, subset: Subset) -> &SlicePartition {
        self.partitions.iter().find(|p| p.subset() == subset).expect("partition prepared for every objective subset")
    }

    /// Empirical index of one subset (order 1 or 2) for output `y`.
    fn index(&self, y: &[f64], subset: Subset) -> Result<f64> {
        if subset.cardinality() == 1 {
            return self.partition(subset).conditional_variance(y);
        }
        let mut members = subset.members();
        let (j, k) = (members.next().unwrap(), members.next().unwrap());
        let joint = self.partition(subset).conditional_expectation(y)?;
        let ej = self.partition(Subset::singleton(j)).conditional_expectation(y)?;
        let ek = self.partition(Subset::singleton(k)).conditional_expectation(y)?;
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let term: Vec<f64> = joint
            .iter()
            .zip(&ej)
            .zip(&ek)
            .filter_map(|((a, b), c)| Some(a.as_ref()? - b.as_ref()? - c.as_ref()? + mean))
            .collect();
        Ok(population_variance(&term))
    }

    /// Indices of every subset in the objective orders, grouped by order.
    pub fn indices(&self, y: &[f64]) -> Result<Vec<Vec<(Subset, f64)>>> {
        let scale = if self.normalized {
            let total = population_variance(y);
            if total <= 0.0 {
                return Err(Error::UndefinedNormalization);
            }
            1.0 / total
        } else {
            1.0
        };
        self.orders
            .iter()
            .map(|group| group.iter().map(|&s| Ok((s, self.index(y, s)? * scale))).collect::<Result<Vec<_>>>())
            .collect()
    }

    pub fn value_for_output(&self, y: &[f64]) -> Result<f64> {
        let groups = self.indices(y)?;
        Ok(groups
            .iter()
            .map(|g| {
                let mut total = 0.0;
                for (a, (_, sa)) in g.iter().enumerate() {
                    for (_, sd) in &g[a + 1..] {
                        total += (sa - sd) * (sa - sd);
                    }
                }
                total
            })
            .sum())
    }

    pub fn value(&self, point: &TwoAdditive) -> Result<f64> {
        let y = point.model().evaluate(self.matrix)?;
        self.value_for_output(&y)
    }

    /// Raw first-order indices for every criterion.
    pub fn first_order(&self, y: &[f64]) -> Result<Vec<f64>> {
        (0..self.matrix.m()).map(|j| self.partition(Subset::singleton(j)).conditional_variance(y)).collect()
    }
}

/// Objective for an arbitrary capacity: sum over unordered pairs of
/// same-cardinality subsets (restricted to the configured orders) of the
/// squared difference of their slice-estimated indices.
pub fn objective(mu: &Capacity, matrix: &DecisionMatrix, cfg: &IdentificationConfig) -> Result<f64> {
    let y = multilinear(matrix, mu)?;
    Objective::new(matrix, cfg)?.value_for_output(&y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub capacity: Capacity,
    pub interactions: InteractionVector,
    /// Pair capacities `μ({j,k})`, lexicographic pair order.
    pub pair_capacities: Vec<f64>,
    /// Raw first-order indices at the additive start.
    pub sobol_before: Vec<f64>,
    /// Raw first-order indices at the result.
    pub sobol_after: Vec<f64>,
    /// Minimized value (objective plus tie-break penalty) after each outer step,
    /// starting with the initial point.
    pub objective_trace: Vec<f64>,
    /// Objective at the result, without the penalty.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub start_index: usize,
    pub seed: u64,
    pub config: IdentificationConfig,
}

struct Descent {
    point: TwoAdditive,
    merit: f64,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn merit(objective: &Objective, point: &TwoAdditive, penalty: f64) -> Result<f64> {
    Ok(objective.value(point)? + penalty * point.mass_norm())
}

fn draw_roles(rng: &mut ChaCha8Rng, count: usize) -> (usize, usize) {
    let moving = rng.random_range(0..count);
    let mut balancing = rng.random_range(0..count - 1);
    if balancing >= moving {
        balancing += 1;
    }
    (moving, balancing)
}

fn descend(
    objective: &Objective,
    start: TwoAdditive,
    cfg: &IdentificationConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Descent> {
    let count = start.pairs.len();
    let mut point = start;
    let mut current = merit(objective, &point, cfg.interaction_penalty)?;
    let mut trace = vec![current];
    if count < 2 {
        return Ok(Descent { point, merit: current, trace, iterations: 0, converged: true });
    }
    let window = 3 * count;
    let mut stagnant = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_outer_iterations {
        iterations += 1;
        let (moving, balancing) = draw_roles(rng, count);
        let (lo, hi) = feasible_interval(&point, moving, balancing)?;
        let mut failure = None;
        let best = golden_section(
            |x| match merit(objective, &point.moved(moving, balancing, x), cfg.interaction_penalty) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            lo,
            hi,
            cfg.gs_tolerance,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let improvement = current - best.value;
        if improvement > 0.0 {
            point = point.moved(moving, balancing, best.x);
            current = best.value;
            debug_assert!(point.capacity().validate().is_valid(), "optimizer left the capacity polytope");
        }
        trace.push(current);
        if improvement < cfg.objective_tolerance {
            stagnant += 1;
            if stagnant >= window {
                converged = true;
                break;
            }
        } else {
            stagnant = 0;
        }
    }
    Ok(Descent { point, merit: current, trace, iterations, converged })
}

/// Random feasible start: a burst of uniformly drawn moves from `base`.
fn scattered_start(base: &TwoAdditive, rng: &mut ChaCha8Rng) -> Result<TwoAdditive> {
    let count = base.pairs.len();
    let mut point = base.clone();
    if count < 2 {
        return Ok(point);
    }
    for _ in 0..2 * count {
        let (moving, balancing) = draw_roles(rng, count);
        let (lo, hi) = feasible_interval(&point, moving, balancing)?;
        let x = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        point = point.moved(moving, balancing, x);
    }
    Ok(point)
}

/// Identifies a 2-additive capacity that equalizes the configured Sobol'
/// indices on `matrix`. The sample is fixed for the whole run, so the
/// objective is deterministic and a given seed reproduces the result exactly.
pub fn identify(matrix: &DecisionMatrix, cfg: &IdentificationConfig) -> Result<IdentificationResult> {
    let m = matrix.m();
    cfg.validate(m)?;
    if matrix.n() < 10 * cfg.slices.slice_count {
        log::warn!("{} alternatives for {} slices; Sobol' estimates will be noisy", matrix.n(), cfg.slices.slice_count);
    }
    let objective = Objective::new(matrix, cfg)?;
    let singleton = cfg.singleton_for(m);
    let additive = TwoAdditive::uniform_start(matrix.criteria(), singleton);

    let mut best: Option<(usize, Descent)> = None;
    for start_index in 0..cfg.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(start_index as u64);
        let start = if start_index == 0 { additive.clone() } else { scattered_start(&additive, &mut rng)? };
        let descent = descend(&objective, start, cfg, &mut rng)?;
        if best.as_ref().is_none_or(|(_, b)| descent.merit < b.merit) {
            best = Some((start_index, descent));
        }
    }
    let (start_index, descent) = best.expect("at least one start");

    let before_y = additive.model().evaluate(matrix)?;
    let after_y = descent.point.model().evaluate(matrix)?;
    Ok(IdentificationResult {
        capacity: descent.point.capacity(),
        interactions: descent.point.interactions(),
        pair_capacities: descent.point.pairs.clone(),
        sobol_before: objective.first_order(&before_y)?,
        sobol_after: objective.first_order(&after_y)?,
        objective: objective.value(&descent.point)?,
        objective_trace: descent.trace,
        iterations: descent.iterations,
        converged: descent.converged,
        start_index,
        seed: cfg.rng_seed,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn three() -> Criteria {
        Criteria::new(3).unwrap()
    }

    #[test]
    fn pair_sum_targets() {
        let c = pair_constraint_targets(3, 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(c.pair_sum, 2.0, epsilon = 1e-15);
        assert_eq!(c.pair_count, 3);
        let c = pair_constraint_targets(4, 0.25).unwrap();
        assert_abs_diff_eq!(c.mass_sum, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.pair_sum, 3.0, epsilon = 1e-15);
        assert!(pair_constraint_targets(1, 0.5).is_err());
        let c = pair_constraint_targets(2, 0.3).unwrap();
        assert_abs_diff_eq!(c.pair_sum, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn additive_start_satisfies_constraint() {
        let start = TwoAdditive::uniform_start(three(), 1.0 / 3.0);
        for &p in start.pairs() {
            assert_abs_diff_eq!(p, 2.0 / 3.0, epsilon = 1e-15);
        }
        assert!(start.capacity().banzhaf().pair(0, 1).abs() < 1e-15);
    }

    #[test]
    fn direct_coordinates_agree_with_transforms() {
        let point = TwoAdditive::new(three(), 1.0 / 3.0, vec![0.4190, 0.7778, 0.8032]).unwrap();
        let direct = point.interactions();
        let via = point.capacity().banzhaf();
        for s in three().subsets() {
            assert_abs_diff_eq!(direct[s], via[s], epsilon = 1e-14);
        }
        assert!(direct.is_two_additive(1e-12));
    }

    #[test]
    fn interval_from_additive_point() {
        let start = TwoAdditive::uniform_start(three(), 1.0 / 3.0);
        // pairs: {1,2}=0, {1,3}=1, {2,3}=2
        let (lo, hi) = feasible_interval(&start, 0, 2).unwrap();
        assert_abs_diff_eq!(lo, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interval_errors() {
        let start = TwoAdditive::uniform_start(three(), 1.0 / 3.0);
        assert!(feasible_interval(&start, 1, 1).is_err());
        assert!(feasible_interval(&start, 0, 3).is_err());
        let off = TwoAdditive::new(three(), 1.0 / 3.0, vec![0.5, 0.5, 0.5]).unwrap();
        assert!(matches!(feasible_interval(&off, 0, 1), Err(Error::Infeasible(_))));
        let broken = TwoAdditive::new(three(), 1.0 / 3.0, vec![0.1, 0.9, 1.0]).unwrap();
        assert!(matches!(feasible_interval(&broken, 0, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn degenerate_interval_is_a_point() {
        // With s = 2/m every criterion's margin is exactly used up.
        let p = TwoAdditive::uniform_start(three(), 2.0 / 3.0);
        assert_abs_diff_eq!(p.monotonicity_slack(), 0.0, epsilon = 1e-15);
        let (lo, hi) = feasible_interval(&p, 0, 2).unwrap();
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_section_on_parabola() {
        let r = golden_section(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-8);
        assert_abs_diff_eq!(r.x, 0.3, epsilon = 1e-7);
        let edge = golden_section(|x| x, 0.2, 1.0, 1e-8);
        assert_eq!(edge.x, 0.2);
        let point = golden_section(|x| x * x, 0.5, 0.5, 1e-8);
        assert_eq!((point.x, point.evaluations), (0.5, 1));
    }

    #[test]
    fn config_validation() {
        let cfg = IdentificationConfig { singleton_value: Some(0.7), ..Default::default() };
        assert!(matches!(cfg.validate(3), Err(Error::Config(_))));
        let cfg = IdentificationConfig { singleton_value: Some(2.0 / 3.0), ..Default::default() };
        assert!(cfg.validate(3).is_ok());
        let cfg = IdentificationConfig { objective_orders: vec![3], ..Default::default() };
        assert!(cfg.validate(3).is_err());
        let cfg = IdentificationConfig { starts: 0, ..Default::default() };
        assert!(cfg.validate(3).is_err());
    }

    #[test]
    fn two_criteria_are_trivial() {
        let rows: Vec<Vec<f64>> = (0..400).map(|i| vec![(i % 20) as f64 / 19.0, (i / 20) as f64 / 19.0]).collect();
        let v = DecisionMatrix::from_rows(&rows).unwrap();
        let r = identify(&v, &IdentificationConfig::default()).unwrap();
        assert_eq!(r.pair_capacities, vec![1.0]);
        assert!(r.converged);
        assert!(r.capacity.validate().is_valid());
    }
}
