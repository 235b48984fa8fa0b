//! Command-line pipeline: synthetic data, rankings, sensitivity reports,
//! capacity identification and the correlation experiments.
//!
//! Every subcommand also reads its options from a JSON config file
//! (`--config`), either flat or under a key named after the subcommand.
//! Flags given on the command line win over the file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

pub mod experiment;
pub mod gen;
pub mod identify;
pub mod rank;
pub mod sobol;

#[derive(Parser, Debug)]
#[command(name = "mlcap", version, about = "Capacity identification for the multilinear model")]
pub struct Cli {
    /// JSON file with default option values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a decision matrix with uniform marginals and correlated pairs.
    Gen(gen::GenArgs),
    /// Aggregate and rank alternatives with a weight vector or a capacity.
    Rank(rank::RankArgs),
    /// First- and second-order sensitivity indices of the aggregated output.
    Sobol(sobol::SobolArgs),
    /// Identify a 2-additive capacity that equalizes the sensitivity indices.
    Identify(identify::IdentifyArgs),
    /// Repeat identification over correlation levels and sample sizes.
    Experiment(experiment::ExperimentArgs),
}

/// Exit status of a failed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Input = 2,
    InvalidCapacity = 3,
    Numerical = 4,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: ExitKind, error: impl Into<anyhow::Error>) -> Self {
        Self { kind, error: error.into() }
    }

    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self::new(ExitKind::Input, error)
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }

    pub fn context(self, message: impl fmt::Display) -> Self {
        Self { kind: self.kind, error: self.error.context(message.to_string()) }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<mlcap::Error> for Failure {
    fn from(e: mlcap::Error) -> Self {
        use mlcap::Error::*;
        let kind = match e {
            InvalidCapacity(_) => ExitKind::InvalidCapacity,
            Infeasible(_) | UndefinedNormalization | UndefinedCorrelation | NotFinite(_) => ExitKind::Numerical,
            _ => ExitKind::Input,
        };
        Self::new(kind, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::input(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::input(e)
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Options shared between flags and the config file.
pub trait Options: DeserializeOwned + Default {
    /// Fills every option not set on the command line from `file`.
    fn fill_from(&mut self, file: Self);
}

/// Implements [`Options::fill_from`] for structs made of `Option`s, `Vec`s
/// and boolean switches.
#[macro_export]
macro_rules! fill_options {
    ($ty:ty { $($opt:ident),* $(,)? } vecs { $($vec:ident),* $(,)? } switches { $($flag:ident),* $(,)? }) => {
        impl $crate::Options for $ty {
            fn fill_from(&mut self, file: Self) {
                $(if self.$opt.is_none() { self.$opt = file.$opt; })*
                $(if self.$vec.is_empty() { self.$vec = file.$vec; })*
                $(self.$flag |= file.$flag;)*
            }
        }
    };
}

fn load_section<T: Options>(path: &Path, section: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(e).context(format!("reading config {}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(e).context(format!("parsing config {}", path.display())))?;
    let scoped = match value.get(section) {
        Some(inner) if inner.is_object() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(scoped)
        .map_err(|e| Failure::input(e).context(format!("config {} ({section})", path.display())))
}

fn resolve<T: Options>(mut args: T, config: Option<&Path>, section: &str) -> CliResult<T> {
    if let Some(path) = config {
        args.fill_from(load_section(path, section)?);
    }
    Ok(args)
}

pub fn run(cli: Cli) -> CliResult {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Gen(a) => gen::run(resolve(a, config, "gen")?),
        Command::Rank(a) => rank::run(resolve(a, config, "rank")?),
        Command::Sobol(a) => sobol::run(resolve(a, config, "sobol")?),
        Command::Identify(a) => identify::run(resolve(a, config, "identify")?),
        Command::Experiment(a) => experiment::run(resolve(a, config, "experiment")?),
    }
}

pub(crate) fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::input(anyhow::anyhow!("missing required option --{flag}")))
}

/// Parses a comma-separated list of numbers.
pub(crate) fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::input(anyhow::anyhow!("{what}: cannot parse {t:?}"))))
        .collect()
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(e).context(format!("writing {}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn read_data(path: &Path, normalize: bool) -> CliResult<mlcap::DecisionMatrix> {
    mlcap::io::read_matrix_file(path, normalize)
        .map_err(|e| Failure::from(e).context(format!("reading {}", path.display())))
}

pub(crate) fn read_capacity(path: &Path) -> CliResult<mlcap::Capacity> {
    let mu: mlcap::Capacity =
        mlcap::io::read_json(path).map_err(|e| Failure::from(e).context(format!("reading {}", path.display())))?;
    let report = mu.validate();
    if !report.is_valid() {
        return Err(Failure::new(
            ExitKind::InvalidCapacity,
            anyhow::anyhow!("{} is not a capacity: {report}", path.display()),
        ));
    }
    Ok(mu)
}
