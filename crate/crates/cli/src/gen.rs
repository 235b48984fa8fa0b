use std::path::{Path, PathBuf};

use clap::Args;
use mlcap::datagen::{generate, latent_rho, pearson, GenSpec};
use serde::{Deserialize, Serialize};

use crate::{fill_options, required, CliResult, Failure};

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenArgs {
    /// Number of alternatives.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of criteria.
    #[arg(long)]
    pub m: Option<usize>,
    /// Pearson correlation target `j,k,rho` between criteria j and k (1-based). Repeatable.
    #[arg(long = "rho", value_name = "J,K,RHO", allow_hyphen_values = true)]
    pub rho: Vec<String>,
    /// Random seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; a `.spec.json` sidecar is written next to it. Stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fill_options!(GenArgs { n, m, seed, out } vecs { rho } switches {});

#[derive(Serialize)]
struct Sidecar {
    generator: &'static str,
    n: usize,
    m: usize,
    seed: u64,
    targets: Vec<SidecarTarget>,
}

#[derive(Serialize)]
struct SidecarTarget {
    criteria: [usize; 2],
    rho: f64,
    latent_rho: f64,
    sample_rho: Option<f64>,
}

pub fn parse_target(text: &str) -> CliResult<(usize, usize, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Failure::input(anyhow::anyhow!("--rho expects J,K,RHO with 1-based criteria, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let j: usize = parts[0].parse().map_err(|_| bad())?;
    let k: usize = parts[1].parse().map_err(|_| bad())?;
    let rho: f64 = parts[2].parse().map_err(|_| bad())?;
    if j == 0 || k == 0 {
        return Err(bad());
    }
    Ok((j - 1, k - 1, rho))
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("spec.json")
}

pub fn run(args: GenArgs) -> CliResult {
    let mut spec = GenSpec::independent(required(args.n, "n")?, required(args.m, "m")?, args.seed.unwrap_or(0));
    for t in &args.rho {
        let (j, k, rho) = parse_target(t)?;
        spec = spec.with_target(j, k, rho);
    }
    let data = generate(&spec)?;
    let mut csv = Vec::new();
    mlcap::io::write_matrix(&mut csv, &data)?;

    let mut targets = Vec::new();
    for t in &spec.targets {
        let x: Vec<f64> = data.column(t.i).collect();
        let y: Vec<f64> = data.column(t.j).collect();
        let sample_rho = pearson(&x, &y).ok();
        log::info!("criteria {},{}: target {} sample {sample_rho:?}", t.i + 1, t.j + 1, t.rho);
        targets.push(SidecarTarget {
            criteria: [t.i + 1, t.j + 1],
            rho: t.rho,
            latent_rho: latent_rho(t.rho),
            sample_rho,
        });
    }
    match &args.out {
        Some(out) => {
            std::fs::write(out, &csv).map_err(|e| Failure::input(e).context(format!("writing {}", out.display())))?;
            let sidecar = Sidecar { generator: "gaussian-copula", n: spec.n, m: spec.m, seed: spec.seed, targets };
            mlcap::io::write_json(&sidecar_path(out), &sidecar)?;
        }
        None => print!("{}", String::from_utf8_lossy(&csv)),
    }
    Ok(())
}
