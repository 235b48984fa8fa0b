//! Browser bindings for the demo page in `www/`. Every export returns a JSON
//! string; failures come back as `{"error": "..."}` so the page can show them.

use mlcap::datagen::{generate, pearson, GenSpec};
use mlcap::sobol::{analytic_sobol, first_order_empirical};
use mlcap::{
    identify, multilinear, rank, wam, Capacity, Criteria, DecisionMatrix, IdentificationConfig, SliceConfig, Subset,
    WeightVector,
};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest sample the page may request.
pub const MAX_ALTERNATIVES: usize = 20_000;

const STUDENTS: [[f64; 3]; 3] = [[1.00, 0.94, 0.67], [0.67, 0.72, 0.94], [0.83, 0.89, 0.83]];

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value).unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn correlated(rho: f64, n: usize, seed: u64) -> Result<DecisionMatrix, String> {
    if n > MAX_ALTERNATIVES {
        return Err(format!("at most {MAX_ALTERNATIVES} alternatives"));
    }
    let mut spec = GenSpec::independent(n, 3, seed);
    if rho != 0.0 {
        spec = spec.with_target(0, 1, rho);
    }
    generate(&spec).map_err(|e| e.to_string())
}

fn sample_rho(data: &DecisionMatrix) -> Option<f64> {
    pearson(&data.column(0).collect::<Vec<_>>(), &data.column(1).collect::<Vec<_>>()).ok()
}

#[derive(Serialize)]
struct StudentsView {
    valid: bool,
    validation: String,
    interactions: Vec<f64>,
    power: Vec<f64>,
    weighted_mean: Vec<f64>,
    weighted_positions: Vec<usize>,
    multilinear: Option<Vec<f64>>,
    multilinear_positions: Option<Vec<usize>>,
}

/// Ranks the three students with the capacity whose singletons are 1/3 and
/// whose pair values are given, next to the equal-weight mean.
#[wasm_bindgen]
pub fn explore_students(pair12: f64, pair13: f64, pair23: f64) -> String {
    to_json((|| {
        let criteria = Criteria::new(3).map_err(|e| e.to_string())?;
        let third = 1.0 / 3.0;
        let mu = Capacity::from_cardinality_list(criteria, &[0.0, third, third, third, pair12, pair13, pair23, 1.0])
            .map_err(|e| e.to_string())?;
        let report = mu.validate();
        let ib = mu.banzhaf();
        let matrix = DecisionMatrix::from_rows(&STUDENTS.map(|r| r.to_vec())).map_err(|e| e.to_string())?;
        let weighted = wam(&matrix, &WeightVector::equal(3)).map_err(|e| e.to_string())?;
        let weighted_positions = rank(&weighted).map_err(|e| e.to_string())?.positions;
        let (ml, ml_positions) = if report.is_valid() {
            let values = multilinear(&matrix, &mu).map_err(|e| e.to_string())?;
            let positions = rank(&values).map_err(|e| e.to_string())?.positions;
            (Some(values), Some(positions))
        } else {
            (None, None)
        };
        Ok(StudentsView {
            valid: report.is_valid(),
            validation: report.to_string(),
            interactions: ib.to_cardinality_list(),
            power: (0..3).map(|j| ib.power_index(j)).collect(),
            weighted_mean: weighted,
            weighted_positions,
            multilinear: ml,
            multilinear_positions: ml_positions,
        })
    })())
}

#[derive(Serialize)]
struct SobolView {
    sample_rho: Option<f64>,
    empirical: Vec<f64>,
    analytic: Vec<f64>,
}

/// First-order indices of the equal-weight model on generated data, by the
/// slice estimator and by the closed form for independent inputs.
#[wasm_bindgen]
pub fn sobol_profile(rho: f64, n: usize, seed: u32) -> String {
    to_json((|| {
        let data = correlated(rho, n, u64::from(seed))?;
        let mu = Capacity::uniform(3).map_err(|e| e.to_string())?;
        let y = multilinear(&data, &mu).map_err(|e| e.to_string())?;
        let cfg = SliceConfig::default();
        let ib = mu.banzhaf();
        let mut empirical = Vec::new();
        let mut analytic = Vec::new();
        for j in 0..3 {
            empirical.push(first_order_empirical(&y, &data, j, &cfg, false).map_err(|e| e.to_string())?.raw_variance);
            analytic.push(analytic_sobol(&ib, Subset::singleton(j)).map_err(|e| e.to_string())?);
        }
        Ok(SobolView { sample_rho: sample_rho(&data), empirical, analytic })
    })())
}

#[derive(Serialize)]
struct IdentifyView {
    sample_rho: Option<f64>,
    capacity: Vec<f64>,
    interactions: Vec<f64>,
    power: Vec<f64>,
    sobol_before: Vec<f64>,
    sobol_after: Vec<f64>,
    objective_trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Generates data with the given correlation between criteria 1 and 2 and
/// identifies the equalizing 2-additive capacity.
#[wasm_bindgen]
pub fn identify_demo(rho: f64, n: usize, seed: u32) -> String {
    to_json((|| {
        let data = correlated(rho, n, u64::from(seed))?;
        let cfg = IdentificationConfig { rng_seed: u64::from(seed), starts: 2, ..Default::default() };
        let r = identify(&data, &cfg).map_err(|e| e.to_string())?;
        Ok(IdentifyView {
            sample_rho: sample_rho(&data),
            capacity: r.capacity.to_cardinality_list(),
            interactions: r.interactions.to_cardinality_list(),
            power: (0..3).map(|j| r.interactions.power_index(j)).collect(),
            sobol_before: r.sobol_before,
            sobol_after: r.sobol_after,
            objective_trace: r.objective_trace,
            iterations: r.iterations,
            converged: r.converged,
        })
    })())
}
