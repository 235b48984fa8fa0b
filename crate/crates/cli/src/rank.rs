use std::path::PathBuf;

use clap::Args;
use mlcap::io::fmt_float;
use mlcap::{multilinear, rank, wam, WeightVector};
use serde::Deserialize;

use crate::{emit, fill_options, parse_list, read_capacity, read_data, required, CliResult, ExitKind, Failure};

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankArgs {
    /// Decision matrix CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Comma-separated weights for the weighted mean (equal weights if neither
    /// weights nor a capacity is given).
    #[arg(long, conflicts_with = "capacity")]
    pub weights: Option<String>,
    /// Capacity JSON for the multilinear model.
    #[arg(long)]
    pub capacity: Option<PathBuf>,
    /// Min-max scale every column to [0, 1] before aggregating.
    #[arg(long)]
    pub min_max: bool,
    /// Ranking CSV (label,overall,position). Stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fill_options!(RankArgs { data, weights, capacity, out } vecs {} switches { min_max });

pub fn run(args: RankArgs) -> CliResult {
    let data = read_data(&required(args.data, "data")?, args.min_max)?;
    if args.weights.is_some() && args.capacity.is_some() {
        return Err(Failure::input(anyhow::anyhow!("give either --weights or --capacity, not both")));
    }
    let overall = match (&args.weights, &args.capacity) {
        (_, Some(path)) => {
            let mu = read_capacity(path)?;
            if mu.m() != data.m() {
                return Err(Failure::new(
                    ExitKind::InvalidCapacity,
                    anyhow::anyhow!("capacity has {} criteria, data has {}", mu.m(), data.m()),
                ));
            }
            multilinear(&data, &mu)?
        }
        (Some(text), None) => wam(&data, &WeightVector::new(parse_list(text, "--weights")?)?)?,
        (None, None) => wam(&data, &WeightVector::equal(data.m()))?,
    };
    let ranking = rank(&overall)?;

    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["label", "overall", "position"])?;
    for (i, value) in overall.iter().enumerate() {
        let label = data.labels().map_or_else(|| (i + 1).to_string(), |l| l[i].clone());
        out.write_record([label, fmt_float(*value), ranking.positions[i].to_string()])?;
    }
    let bytes = out.into_inner().map_err(|e| Failure::input(anyhow::anyhow!("{e}")))?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}
