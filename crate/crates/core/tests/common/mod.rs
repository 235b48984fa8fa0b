//! Direct-definition oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use mlcap::{Capacity, Criteria, DecisionMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn popcount(x: usize) -> i32 {
    x.count_ones() as i32
}

/// Interaction of coalition `a` straight from the definition: average over
/// every outside coalition of the alternating sum over subsets of `a`.
pub fn interaction_by_definition(mu: &[f64], m: usize, a: usize) -> f64 {
    let full = (1usize << m) - 1;
    let outside = full & !a;
    let mut total = 0.0;
    let mut b = outside;
    loop {
        let mut d = a;
        loop {
            let sign = if (popcount(a) - popcount(d)) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * mu[b | d];
            if d == 0 {
                break;
            }
            d = (d - 1) & a;
        }
        if b == 0 {
            break;
        }
        b = (b - 1) & outside;
    }
    total / f64::powi(2.0, m as i32 - popcount(a))
}

/// Capacity value of `a` rebuilt from every interaction index.
pub fn capacity_by_definition(interactions: &[f64], m: usize, a: usize) -> f64 {
    (0..1usize << m)
        .map(|b| {
            let sign = if popcount(b & !a) % 2 == 0 { 1.0 } else { -1.0 };
            sign * 0.5f64.powi(popcount(b)) * interactions[b]
        })
        .sum()
}

/// Average marginal contribution of criterion `j`.
pub fn power_by_definition(mu: &[f64], m: usize, j: usize) -> f64 {
    let bit = 1usize << j;
    let sum: f64 = (0..1usize << m).filter(|b| b & bit == 0).map(|b| mu[b | bit] - mu[b]).sum();
    sum / f64::powi(2.0, m as i32 - 1)
}

/// Joint marginal effect of criteria `j` and `k`.
pub fn pair_by_definition(mu: &[f64], m: usize, j: usize, k: usize) -> f64 {
    let (bj, bk) = (1usize << j, 1usize << k);
    let sum: f64 = (0..1usize << m)
        .filter(|b| b & (bj | bk) == 0)
        .map(|b| mu[b | bj | bk] - mu[b | bj] - mu[b | bk] + mu[b])
        .sum();
    sum / f64::powi(2.0, m as i32 - 2)
}

/// Random monotone capacity: each coalition takes the largest value among
/// its maximal proper subsets plus a random increment, then everything is
/// rescaled so the full set has value one.
pub fn random_capacity(rng: &mut ChaCha8Rng, m: usize) -> Capacity {
    let size = 1usize << m;
    let mut order: Vec<usize> = (1..size).collect();
    order.sort_by_key(|&a| a.count_ones());
    let mut mu = vec![0.0; size];
    for a in order {
        let floor = (0..m).filter(|j| a >> j & 1 == 1).map(|j| mu[a & !(1 << j)]).fold(0.0, f64::max);
        let step = if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() };
        mu[a] = floor + step;
    }
    let top = mu[size - 1];
    if top > 0.0 {
        mu.iter_mut().for_each(|v| *v /= top);
    } else {
        mu[size - 1] = 1.0;
    }
    Capacity::from_masked(Criteria::new(m).unwrap(), mu).unwrap()
}

/// Random capacity whose interactions vanish above order two.
pub fn random_two_additive(rng: &mut ChaCha8Rng, m: usize) -> Capacity {
    loop {
        let criteria = Criteria::new(m).unwrap();
        let singleton: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let pairs: Vec<f64> = criteria.pairs().iter().map(|_| rng.random_range(-0.5..0.5)).collect();
        // Möbius masses: singletons plus pairs, normalized to total one.
        let total: f64 = singleton.iter().sum::<f64>() + pairs.iter().sum::<f64>();
        if total <= 0.1 {
            continue;
        }
        let mut mu = vec![0.0; 1 << m];
        for (a, value) in mu.iter_mut().enumerate() {
            let mut v = 0.0;
            for (j, &w) in singleton.iter().enumerate().take(m) {
                if a >> j & 1 == 1 {
                    v += w;
                }
            }
            for (p, &(j, k)) in criteria.pairs().iter().enumerate() {
                if a >> j & 1 == 1 && a >> k & 1 == 1 {
                    v += pairs[p];
                }
            }
            *value = v / total;
        }
        let mu = Capacity::from_masked(criteria, mu).unwrap();
        if mu.validate().is_valid() {
            return mu;
        }
    }
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DecisionMatrix {
    let data = (0..n * m).map(|_| rng.random::<f64>()).collect();
    DecisionMatrix::from_row_major(n, m, data).unwrap()
}

/// Multilinear value at a point by the vertex-weight sum, one subset at a time.
pub fn multilinear_by_definition(mu: &[f64], point: &[f64]) -> f64 {
    let m = point.len();
    (0..1usize << m)
        .map(|a| {
            let w: f64 = (0..m).map(|j| if a >> j & 1 == 1 { point[j] } else { 1.0 - point[j] }).product();
            w * mu[a]
        })
        .sum()
}
