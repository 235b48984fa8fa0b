use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::Args;
use mlcap::datagen::{generate, GenSpec};
use mlcap::io::fmt_float;
use mlcap::{identify, IdentificationConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{fill_options, parse_list, required, CliResult, Failure};

const CRITERIA: usize = 3;
const STATS: [&str; 6] = ["phi1", "phi2", "phi3", "i12", "i13", "i23"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Target correlation between criteria 1 and 2, one experiment each.
    pub rho_values: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub identification: IdentificationConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            rho_values: vec![0.75, 0.0, -0.75],
            n_grid: vec![100, 250, 500, 1000, 2500, 5000, 10000],
            runs: 100,
            base_seed: 0,
            // A lone start occasionally stalls in a corner of the feasible
            // polytope where every pairwise exchange is blocked.
            identification: IdentificationConfig { starts: 4, ..Default::default() },
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> mlcap::Result<()> {
        use mlcap::Error::Spec;
        if self.runs == 0 {
            return Err(Spec("runs must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.rho_values.is_empty() {
            return Err(Spec("n grid and rho values must be nonempty".into()));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Spec(format!("n grid must be positive and strictly ascending (got {:?})", self.n_grid)));
        }
        if let Some(r) = self.rho_values.iter().find(|r| r.is_nan() || r.abs() >= 1.0) {
            return Err(Spec(format!("rho must lie in (-1, 1) (got {r})")));
        }
        let mut tags: Vec<String> = self.rho_values.iter().map(|&r| rho_tag(r)).collect();
        tags.sort();
        tags.dedup();
        if tags.len() != self.rho_values.len() {
            return Err(Spec("rho values must be distinct".into()));
        }
        self.identification.validate(CRITERIA)
    }

    pub fn total_runs(&self) -> usize {
        self.rho_values.len() * self.n_grid.len() * self.runs
    }
}

/// Result of one identification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rho: f64,
    pub n: usize,
    pub run: usize,
    pub seed: u64,
    /// `φ1, φ2, φ3, I12, I13, I23`.
    pub values: [f64; 6],
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: ExperimentSpec,
    pub total_runs: usize,
    pub completed: usize,
    pub complete: bool,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentArgs {
    /// Output directory for summaries, run files and the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated correlation targets between criteria 1 and 2.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_values: Option<String>,
    /// Comma-separated, ascending numbers of alternatives.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Repetitions per (correlation, size) cell.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; every run derives its own from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Equal-width slices per criterion.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Identification starts per run.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Coordinate steps per start.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Reuse run files left by an earlier, interrupted invocation.
    #[arg(long)]
    pub resume: bool,
    /// Also write a gnuplot script for the summaries.
    #[arg(long)]
    pub gnuplot: bool,
    /// Full identification settings (config file only).
    #[arg(skip)]
    pub identification: Option<IdentificationConfig>,
}

fill_options!(ExperimentArgs {
    out_dir, rho_values, n_grid, runs, seed, jobs, slices, starts, max_iterations, identification
} vecs {} switches { resume, gnuplot });

impl ExperimentArgs {
    pub fn spec(&self) -> CliResult<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        if let Some(text) = &self.rho_values {
            spec.rho_values = parse_list(text, "--rho-values")?;
        }
        if let Some(text) = &self.n_grid {
            spec.n_grid = parse_list(text, "--n-grid")?;
        }
        if let Some(runs) = self.runs {
            spec.runs = runs;
        }
        if let Some(seed) = self.seed {
            spec.base_seed = seed;
        }
        if let Some(cfg) = &self.identification {
            spec.identification = cfg.clone();
        }
        let id = &mut spec.identification;
        if let Some(k) = self.slices {
            id.slices.slice_count = k;
        }
        if let Some(s) = self.starts {
            id.starts = s;
        }
        if let Some(i) = self.max_iterations {
            id.max_outer_iterations = i;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one run, independent of scheduling and of the other grid points.
pub fn run_seed(base: u64, rho: f64, n: usize, run: usize) -> u64 {
    [rho.to_bits(), n as u64, run as u64].iter().fold(splitmix(base), |z, &v| splitmix(z ^ v))
}

/// File-name tag of a correlation value: `p0.75`, `m0.75`, `0`.
pub fn rho_tag(rho: f64) -> String {
    if rho > 0.0 {
        format!("p{rho}")
    } else if rho < 0.0 {
        format!("m{}", -rho)
    } else {
        "0".into()
    }
}

pub fn summary_path(dir: &Path, rho: f64) -> PathBuf {
    dir.join(format!("rho_{}.csv", rho_tag(rho)))
}

fn run_path(dir: &Path, rho: f64, n: usize, run: usize) -> PathBuf {
    dir.join("runs").join(format!("{}_n{n}_r{run}.json", rho_tag(rho)))
}

/// Runs one identification and returns its record.
pub fn run_one(spec: &ExperimentSpec, rho: f64, n: usize, run: usize) -> mlcap::Result<RunRecord> {
    let seed = run_seed(spec.base_seed, rho, n, run);
    let mut gen = GenSpec::independent(n, CRITERIA, seed);
    if rho != 0.0 {
        gen = gen.with_target(0, 1, rho);
    }
    let data = generate(&gen)?;
    let cfg = IdentificationConfig { rng_seed: splitmix(seed), ..spec.identification.clone() };
    let r = identify(&data, &cfg)?;
    let ib = &r.interactions;
    Ok(RunRecord {
        rho,
        n,
        run,
        seed,
        values: [ib.power_index(0), ib.power_index(1), ib.power_index(2), ib.pair(0, 1), ib.pair(0, 2), ib.pair(1, 2)],
        objective: r.objective,
        iterations: r.iterations,
        converged: r.converged,
    })
}

fn load_run(path: &Path, seed: u64) -> Option<RunRecord> {
    let text = std::fs::read_to_string(path).ok()?;
    let record: RunRecord = serde_json::from_str(&text).ok()?;
    (record.seed == seed).then_some(record)
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(tmp, path)
}

fn write_manifest(dir: &Path, spec: &ExperimentSpec, completed: usize) -> CliResult {
    let manifest = Manifest {
        spec: spec.clone(),
        total_runs: spec.total_runs(),
        completed,
        complete: completed == spec.total_runs(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomically(&dir.join("manifest.json"), &text)?;
    Ok(())
}

/// Mean and sample standard deviation (0 for a single run).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Summary CSV for one correlation value: one row per grid point.
pub fn summary_csv(spec: &ExperimentSpec, records: &[RunRecord]) -> String {
    let mut s = String::from("n,runs");
    for name in STATS {
        let _ = write!(s, ",{name}_mean,{name}_std");
    }
    s.push('\n');
    for &n in &spec.n_grid {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.n == n).collect();
        let _ = write!(s, "{n},{}", rows.len());
        for k in 0..STATS.len() {
            let values: Vec<f64> = rows.iter().map(|r| r.values[k]).collect();
            let (mean, std) = mean_std(&values);
            let _ = write!(s, ",{},{}", fmt_float(mean), fmt_float(std));
        }
        s.push('\n');
    }
    s
}

fn gnuplot_script(spec: &ExperimentSpec) -> String {
    let mut s = String::from(
        "# Mean interaction indices with one standard deviation over runs.\n\
         set datafile separator ','\nset key outside\nset xlabel 'alternatives'\nset logscale x\n\
         set terminal pngcairo size 900,600\n",
    );
    for &rho in &spec.rho_values {
        let tag = rho_tag(rho);
        let file = format!("rho_{tag}.csv");
        let _ = writeln!(s, "set output 'interactions_{tag}.png'\nset title 'rho(1,2) = {rho}'");
        let _ = writeln!(
            s,
            "plot '{file}' every ::1 using 1:9:10 with yerrorlines title 'I12', \\\n     \
             '' every ::1 using 1:11:12 with yerrorlines title 'I13', \\\n     \
             '' every ::1 using 1:13:14 with yerrorlines title 'I23'"
        );
        let _ = writeln!(s, "set output 'power_{tag}.png'");
        let _ = writeln!(
            s,
            "plot '{file}' every ::1 using 1:3:4 with yerrorlines title 'phi1', \\\n     \
             '' every ::1 using 1:5:6 with yerrorlines title 'phi2', \\\n     \
             '' every ::1 using 1:7:8 with yerrorlines title 'phi3'"
        );
    }
    s
}

pub fn run(args: ExperimentArgs) -> CliResult {
    let dir = required(args.out_dir.clone(), "out-dir")?;
    let spec = args.spec()?;
    if spec.runs >= 100 && spec.n_grid.last().is_some_and(|&n| n >= 10_000) {
        log::warn!(
            "{} identifications on the full grid will take a while; --runs and --n-grid give a quicker pass",
            spec.total_runs()
        );
    }
    std::fs::create_dir_all(dir.join("runs"))
        .map_err(|e| Failure::input(e).context(format!("creating {}", dir.display())))?;

    let manifest_path = dir.join("manifest.json");
    if args.resume && manifest_path.exists() {
        let old: Manifest = mlcap::io::read_json(&manifest_path)?;
        if old.spec != spec {
            return Err(Failure::input(anyhow::anyhow!(
                "{} was written for a different experiment; rerun without --resume or use another directory",
                manifest_path.display()
            )));
        }
    }

    let tasks: Vec<(f64, usize, usize)> = spec
        .rho_values
        .iter()
        .flat_map(|&rho| spec.n_grid.iter().flat_map(move |&n| (0..spec.runs).map(move |r| (rho, n, r))))
        .collect();
    let reused: Vec<Option<RunRecord>> = tasks
        .iter()
        .map(|&(rho, n, r)| {
            args.resume.then(|| load_run(&run_path(&dir, rho, n, r), run_seed(spec.base_seed, rho, n, r))).flatten()
        })
        .collect();
    let done = AtomicUsize::new(reused.iter().filter(|r| r.is_some()).count());
    if args.resume {
        log::info!("resuming with {} of {} runs already done", done.load(Ordering::Relaxed), tasks.len());
    }
    write_manifest(&dir, &spec, done.load(Ordering::Relaxed))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::input(anyhow::anyhow!("thread pool: {e}")))?;
    // Small grid points make the identification warn about sparse slices on
    // every run; warn once here instead.
    if spec.n_grid[0] < 10 * spec.identification.slices.slice_count {
        log::warn!(
            "n = {} is small for {} slices; estimates will be noisy",
            spec.n_grid[0],
            spec.identification.slices.slice_count
        );
    }
    let level = log::max_level();
    log::set_max_level(level.min(log::LevelFilter::Error));
    let step = (tasks.len() / 10).max(1);
    let outcome: Vec<CliResult<RunRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .zip(reused.into_par_iter())
            .map(|(&(rho, n, r), old)| {
                if let Some(record) = old {
                    return Ok(record);
                }
                let record = run_one(&spec, rho, n, r)
                    .map_err(|e| Failure::from(e).context(format!("run {r} at rho {rho}, n {n}")))?;
                let mut text = serde_json::to_string_pretty(&record)?;
                text.push('\n');
                write_atomically(&run_path(&dir, rho, n, r), &text)?;
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if finished % step == 0 {
                    eprintln!("{finished}/{} runs", tasks.len());
                }
                Ok(record)
            })
            .collect()
    });
    log::set_max_level(level);
    let records = outcome.into_iter().collect::<CliResult<Vec<RunRecord>>>();
    write_manifest(&dir, &spec, done.load(Ordering::Relaxed))?;
    let records = records?;

    for &rho in &spec.rho_values {
        let subset: Vec<RunRecord> = records.iter().filter(|r| r.rho == rho).cloned().collect();
        std::fs::write(summary_path(&dir, rho), summary_csv(&spec, &subset))?;
    }
    if args.gnuplot {
        std::fs::write(dir.join("plot.gp"), gnuplot_script(&spec))?;
    }
    Ok(())
}
