use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use mlcap::{identify, DecisionMatrix, IdentificationConfig, IdentificationResult, SliceConfig};
use serde::Deserialize;

use crate::{emit, fill_options, parse_list, read_data, required, CliResult};

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifyArgs {
    /// Decision matrix CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Min-max scale every column to [0, 1] first.
    #[arg(long)]
    pub min_max: bool,
    /// Fixed singleton capacity (default 1/m).
    #[arg(long)]
    pub singleton: Option<f64>,
    /// Index orders to equalize, comma-separated (1 and/or 2).
    #[arg(long)]
    pub orders: Option<String>,
    /// Equal-width slices per criterion.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Cells with fewer alternatives are left out of the estimate.
    #[arg(long)]
    pub min_population: Option<usize>,
    /// Golden-section bracket tolerance.
    #[arg(long)]
    pub gs_tolerance: Option<f64>,
    /// Smallest objective decrease counted as progress.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Coordinate steps per start.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Number of starts; the first is the additive capacity.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Seed for the coordinate roles and the extra starts.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Equalize indices divided by the output variance.
    #[arg(long)]
    pub normalize: bool,
    /// Result JSON. Stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Human-readable summary. Printed to stderr if omitted.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fill_options!(IdentifyArgs {
    data, singleton, orders, slices, min_population, gs_tolerance, tolerance, max_iterations, starts, seed, out, summary
} vecs {} switches { min_max, normalize });

impl IdentifyArgs {
    pub fn config(&self) -> CliResult<IdentificationConfig> {
        let d = IdentificationConfig::default();
        let slices = SliceConfig {
            slice_count: self.slices.unwrap_or(d.slices.slice_count),
            min_slice_population: self.min_population.unwrap_or(d.slices.min_slice_population),
        };
        let objective_orders = match &self.orders {
            Some(text) => parse_list(text, "--orders")?,
            None => d.objective_orders.clone(),
        };
        Ok(IdentificationConfig {
            singleton_value: self.singleton.or(d.singleton_value),
            objective_orders,
            slices,
            gs_tolerance: self.gs_tolerance.unwrap_or(d.gs_tolerance),
            objective_tolerance: self.tolerance.unwrap_or(d.objective_tolerance),
            max_outer_iterations: self.max_iterations.unwrap_or(d.max_outer_iterations),
            rng_seed: self.seed.unwrap_or(d.rng_seed),
            starts: self.starts.unwrap_or(d.starts),
            normalized: self.normalize,
            interaction_penalty: d.interaction_penalty,
        })
    }
}

pub fn summary(data: &DecisionMatrix, r: &IdentificationResult) -> String {
    let mut s = String::new();
    let criteria = data.criteria();
    let name = |j: usize| data.criterion_names()[j].clone();
    let _ = writeln!(s, "{} alternatives, {} criteria, seed {}", data.n(), data.m(), r.seed);
    let _ = writeln!(s, "\ncapacity and interaction indices");
    let _ = writeln!(s, "  {:<12} {:>10} {:>10}", "subset", "capacity", "interaction");
    for subset in criteria.cardinality_order() {
        let label = if subset.is_empty() { "{}".to_string() } else { format!("{{{subset}}}") };
        let _ = writeln!(s, "  {label:<12} {:>10.4} {:>10.4}", r.capacity[subset], r.interactions[subset]);
    }
    let _ = writeln!(s, "\nfirst-order indices (raw)");
    let _ = writeln!(s, "  {:<16} {:>10} {:>10} {:>10}", "criterion", "power", "before", "after");
    for j in 0..data.m() {
        let _ = writeln!(
            s,
            "  {:<16} {:>10.4} {:>10.5} {:>10.5}",
            name(j),
            r.interactions.power_index(j),
            r.sobol_before[j],
            r.sobol_after[j]
        );
    }
    let mut redundant = Vec::new();
    let mut complementary = Vec::new();
    for (j, k) in criteria.pairs() {
        let v = r.interactions.pair(j, k);
        let label = format!("{}-{}", name(j), name(k));
        if v < 0.0 {
            redundant.push(label);
        } else if v > 0.0 {
            complementary.push(label);
        }
    }
    let _ =
        writeln!(s, "\nredundant pairs: {}", if redundant.is_empty() { "none".into() } else { redundant.join(", ") });
    let _ = writeln!(
        s,
        "complementary pairs: {}",
        if complementary.is_empty() { "none".into() } else { complementary.join(", ") }
    );
    let _ = writeln!(
        s,
        "objective {:.3e} after {} iterations ({})",
        r.objective,
        r.iterations,
        if r.converged { "converged" } else { "iteration limit" }
    );
    s
}

pub fn run(args: IdentifyArgs) -> CliResult {
    let cfg = args.config()?;
    let data = read_data(&required(args.data.clone(), "data")?, args.min_max)?;
    let result = identify(&data, &cfg)?;
    let mut json = serde_json::to_string_pretty(&result)?;
    json.push('\n');
    emit(args.out.as_deref(), &json)?;
    let text = summary(&data, &result);
    match &args.summary {
        Some(path) => emit(Some(path), &text),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}
