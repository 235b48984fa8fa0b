use std::path::PathBuf;

use clap::Args;
use mlcap::sobol::{analytic_report, empirical_index, SobolReport};
use mlcap::{multilinear, Capacity, SliceConfig};
use serde::Deserialize;

use crate::{emit, fill_options, parse_list, read_capacity, read_data, required, CliResult, ExitKind, Failure};

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolArgs {
    /// Decision matrix CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Capacity JSON defining the aggregated output.
    #[arg(long, conflicts_with = "weights")]
    pub capacity: Option<PathBuf>,
    /// Comma-separated weights of an additive capacity (used instead of --capacity).
    #[arg(long)]
    pub weights: Option<String>,
    /// Orders to report, comma-separated (1 and/or 2).
    #[arg(long)]
    pub orders: Option<String>,
    /// Equal-width slices per criterion.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Cells with fewer alternatives are left out of the estimate.
    #[arg(long)]
    pub min_population: Option<usize>,
    /// Also report indices divided by the output variance.
    #[arg(long)]
    pub normalize: bool,
    /// Min-max scale every column to [0, 1] first.
    #[arg(long)]
    pub min_max: bool,
    /// Report CSV. Stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fill_options!(SobolArgs { data, capacity, weights, orders, slices, min_population, out } vecs {} switches { normalize, min_max });

pub fn run(args: SobolArgs) -> CliResult {
    let data = read_data(&required(args.data, "data")?, args.min_max)?;
    let mu = match (&args.capacity, &args.weights) {
        (Some(path), _) => read_capacity(path)?,
        (None, Some(text)) => Capacity::additive(&parse_list::<f64>(text, "--weights")?)?,
        (None, None) => {
            return Err(Failure::input(anyhow::anyhow!("missing required option --capacity (or --weights)")))
        }
    };
    if mu.m() != data.m() {
        return Err(Failure::new(
            ExitKind::InvalidCapacity,
            anyhow::anyhow!("capacity has {} criteria, data has {}", mu.m(), data.m()),
        ));
    }
    let mut orders: Vec<usize> = parse_list(args.orders.as_deref().unwrap_or("1"), "--orders")?;
    orders.sort_unstable();
    orders.dedup();
    if let Some(&o) = orders.iter().find(|&&o| o == 0 || o > 2) {
        return Err(mlcap::Error::UnsupportedOrder(o).into());
    }
    let defaults = SliceConfig::default();
    let cfg = SliceConfig {
        slice_count: args.slices.unwrap_or(defaults.slice_count),
        min_slice_population: args.min_population.unwrap_or(defaults.min_slice_population),
    };
    cfg.validate()?;

    let y = multilinear(&data, &mu)?;
    let ib = mu.banzhaf();
    let mut reports: Vec<SobolReport> = Vec::new();
    for &order in &orders {
        for subset in data.criteria().cardinality_order().into_iter().filter(|s| s.cardinality() == order) {
            reports.push(empirical_index(&y, &data, subset, &cfg, args.normalize)?);
            let mut analytic = analytic_report(&ib, subset, data.n())?;
            if !args.normalize {
                analytic.normalized = None;
            }
            reports.push(analytic);
        }
    }
    let mut out = Vec::new();
    mlcap::io::write_sobol_reports(&mut out, &reports)?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&out))
}
