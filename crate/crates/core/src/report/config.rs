//! Run configuration: command-line flags over config file over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator_lab::EstimatorStudyPlan;
use crate::gof_lab::GofPlan;
use crate::mh_sampler::MhConfig;

pub const DEFAULT_SEED: u64 = 20_070_420;
pub const DEFAULT_OUTPUT_DIR: &str = "statlab-out";
pub const OUTPUT_DIR_ENV: &str = "STATLAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Pooling,
    Mh,
    Estimator,
    Gof,
    All,
}

impl Command {
    pub fn includes(&self, other: Command) -> bool {
        *self == Command::All || *self == other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolingOptions {
    pub prevalence: f64,
    pub population: u64,
    pub k_range: (f64, f64),
    pub n_reps: u64,
}

impl Default for PoolingOptions {
    fn default() -> Self {
        PoolingOptions {
            prevalence: 0.05,
            population: 5000,
            k_range: (2.0, 10.0),
            n_reps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub root_seed: u64,
    /// Replicate-count override applied to every replicated study.
    pub reps: Option<u64>,
    pub output_dir: PathBuf,
    pub emit_figures: bool,
    /// Worker threads for replicated studies; `None` uses all cores.
    pub workers: Option<usize>,
    pub pooling: PoolingOptions,
    pub mh: MhConfig,
    pub estimator: EstimatorStudyPlan,
    pub gof: GofPlan,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            root_seed: DEFAULT_SEED,
            reps: None,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            emit_figures: false,
            workers: None,
            pooling: PoolingOptions::default(),
            mh: MhConfig::default(),
            estimator: EstimatorStudyPlan::default(),
            gof: GofPlan::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.pooling;
        if !(p.prevalence >= 0.0 && p.prevalence <= 1.0) {
            return Err(Error::Config(format!("--p must lie in [0, 1], got {}", p.prevalence)));
        }
        if p.population < 2 {
            return Err(Error::Config("--N must be at least 2".into()));
        }
        let (lo, hi) = p.k_range;
        if !(lo >= 2.0 && lo < hi && hi <= p.population as f64) {
            return Err(Error::Config(format!(
                "--k-range {lo}:{hi} must satisfy 2 <= lo < hi <= N"
            )));
        }
        if p.n_reps < 1 {
            return Err(Error::Config("pooling replicates must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("--workers must be positive".into()));
        }
        self.mh.validate().map_err(as_config)?;
        self.estimator.validate().map_err(as_config)?;
        self.gof.validate().map_err(as_config)?;
        Ok(())
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "statlab",
    version,
    about = "Analytic and simulation solutions to four statistical computing problems",
    arg_required_else_help = true,
    after_help = "Output directory: --out, else $STATLAB_OUT, else the config file, else ./statlab-out.\n\
                  Exit status: 0 success, 1 runtime error, 2 usage error."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replicate count for every replicated study.
    #[arg(long, global = true)]
    pub reps: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Also write SVG figures.
    #[arg(long, global = true)]
    pub figures: bool,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for replicated studies.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Pooled blood testing: expected tests, optimal pool size, savings.
    Pooling(PoolingArgs),
    /// Metropolis–Hastings sampling of (1+|y|)^3 exp(-y^4).
    Mh(MhArgs),
    /// IQR-based versus standard-deviation estimation of sigma.
    Estimator(EstimatorArgs),
    /// Null distribution of the chi-square statistic with small cell counts.
    Gof(GofArgs),
    /// Run every problem.
    All,
}

#[derive(Debug, Args)]
pub struct PoolingArgs {
    /// Prevalence.
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Population size.
    #[arg(long = "N")]
    pub population: Option<u64>,
    /// Pool-size range LO:HI for the cost curve and candidate search.
    #[arg(long = "k-range", value_parser = parse_range)]
    pub k_range: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct MhArgs {
    #[arg(long = "burn-in")]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long = "proposal-sd")]
    pub proposal_sd: Option<f64>,
    #[arg(long = "initial-x", allow_hyphen_values = true)]
    pub initial_x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// True standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[arg(long)]
    pub bins: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once([':', ','])
        .ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((a, b))
}

/// Config-file schema. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub reps: Option<u64>,
    pub out: Option<PathBuf>,
    pub figures: Option<bool>,
    pub workers: Option<usize>,
    pub pooling: Option<FilePooling>,
    pub mh: Option<FileMh>,
    pub estimator: Option<FileEstimator>,
    pub gof: Option<FileGof>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilePooling {
    pub p: Option<f64>,
    pub population: Option<u64>,
    pub k_range: Option<(f64, f64)>,
    pub reps: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileMh {
    pub burn_in: Option<u64>,
    pub samples: Option<u64>,
    pub proposal_sd: Option<f64>,
    pub initial_x: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEstimator {
    pub sizes: Option<Vec<usize>>,
    pub sigma: Option<f64>,
    pub mean: Option<f64>,
    pub reps: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileGof {
    pub bins: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub reps: Option<u64>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl FileConfig {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.root_seed, self.seed);
        cfg.reps = self.reps.or(cfg.reps);
        set(&mut cfg.output_dir, self.out);
        set(&mut cfg.emit_figures, self.figures);
        cfg.workers = self.workers.or(cfg.workers);
        if let Some(p) = self.pooling {
            set(&mut cfg.pooling.prevalence, p.p);
            set(&mut cfg.pooling.population, p.population);
            set(&mut cfg.pooling.k_range, p.k_range);
            set(&mut cfg.pooling.n_reps, p.reps);
        }
        if let Some(m) = self.mh {
            set(&mut cfg.mh.burn_in, m.burn_in);
            set(&mut cfg.mh.n_samples, m.samples);
            set(&mut cfg.mh.proposal_sd, m.proposal_sd);
            set(&mut cfg.mh.initial_x, m.initial_x);
        }
        if let Some(e) = self.estimator {
            set(&mut cfg.estimator.sample_sizes, e.sizes);
            set(&mut cfg.estimator.true_sd, e.sigma);
            set(&mut cfg.estimator.true_mean, e.mean);
            set(&mut cfg.estimator.n_reps, e.reps);
        }
        if let Some(g) = self.gof {
            set(&mut cfg.gof.bins, g.bins);
            set(&mut cfg.gof.sample_sizes, g.sizes);
            set(&mut cfg.gof.n_reps, g.reps);
        }
    }
}

impl Cli {
    /// Resolve defaults, then the config file, then flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let command = match &self.command {
            CliCommand::Pooling(_) => Command::Pooling,
            CliCommand::Mh(_) => Command::Mh,
            CliCommand::Estimator(_) => Command::Estimator,
            CliCommand::Gof(_) => Command::Gof,
            CliCommand::All => Command::All,
        };
        let mut cfg = RunConfig::new(command);
        if let Some(path) = &self.global.config {
            load_file_config(path)?.apply(&mut cfg);
        }
        let g = self.global;
        set(&mut cfg.root_seed, g.seed);
        cfg.reps = g.reps.or(cfg.reps);
        set(&mut cfg.output_dir, g.out);
        cfg.emit_figures |= g.figures;
        cfg.workers = g.workers.or(cfg.workers);
        match self.command {
            CliCommand::Pooling(a) => {
                set(&mut cfg.pooling.prevalence, a.p);
                set(&mut cfg.pooling.population, a.population);
                set(&mut cfg.pooling.k_range, a.k_range);
            }
            CliCommand::Mh(a) => {
                set(&mut cfg.mh.burn_in, a.burn_in);
                set(&mut cfg.mh.n_samples, a.samples);
                set(&mut cfg.mh.proposal_sd, a.proposal_sd);
                set(&mut cfg.mh.initial_x, a.initial_x);
            }
            CliCommand::Estimator(a) => {
                set(&mut cfg.estimator.sample_sizes, a.sizes);
                set(&mut cfg.estimator.true_sd, a.sigma);
            }
            CliCommand::Gof(a) => {
                set(&mut cfg.gof.bins, a.bins);
                set(&mut cfg.gof.sample_sizes, a.sizes);
            }
            CliCommand::All => {}
        }
        if let Some(r) = cfg.reps {
            if r == 0 {
                return Err(Error::Config("--reps must be positive".into()));
            }
            cfg.pooling.n_reps = r;
            cfg.estimator.n_reps = r;
            cfg.gof.n_reps = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Why parsing stopped.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    /// Usage problems, help and version requests; clap renders and exits.
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Usage(e) => e.exit_code(),
            ConfigError::Invalid(Error::Io { .. }) => 1,
            ConfigError::Invalid(_) => 2,
        }
    }
}

/// Parse `argv` (program name first) into a [`RunConfig`].
pub fn parse_config<I, T>(argv: I) -> std::result::Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(cli.into_config()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn parse(args: &[&str]) -> std::result::Result<RunConfig, ConfigError> {
        let mut argv = vec!["statlab"];
        argv.extend_from_slice(args);
        parse_config(argv)
    }

    #[test]
    fn pooling_flags() {
        let cfg = parse(&["pooling", "--p", "0.05", "--N", "5000", "--seed", "7"]).unwrap();
        assert_eq!(cfg.command, Command::Pooling);
        assert_eq!(cfg.pooling.prevalence, 0.05);
        assert_eq!(cfg.pooling.population, 5000);
        assert_eq!(cfg.root_seed, 7);
    }

    #[test]
    fn no_arguments_is_usage_error() {
        let err = parse(&[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_flag_rejected() {
        let err = parse(&["mh", "--bogus", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_value_is_usage_error() {
        assert_eq!(parse(&["pooling", "--p", "1.5"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["pooling", "--p", "abc"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["gof", "--sizes", "12"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["all", "--reps", "0"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn flag_beats_config_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "seed = 9\nreps = 77\n[mh]\nburn_in = 10").unwrap();
        let path = f.path().to_str().unwrap();
        let cfg = parse(&["mh", "--config", path, "--seed", "7"]).unwrap();
        assert_eq!(cfg.root_seed, 7);
        assert_eq!(cfg.reps, Some(77));
        assert_eq!(cfg.mh.burn_in, 10);
        let cfg = parse(&["mh", "--config", path]).unwrap();
        assert_eq!(cfg.root_seed, 9);
    }

    #[test]
    fn unknown_config_key_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "sed = 9").unwrap();
        let err = parse(&["all", "--config", f.path().to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn k_range_and_lists() {
        let cfg = parse(&["pooling", "--k-range", "2:20"]).unwrap();
        assert_eq!(cfg.pooling.k_range, (2.0, 20.0));
        let cfg = parse(&["estimator", "--sizes", "50,200", "--sigma", "2"]).unwrap();
        assert_eq!(cfg.estimator.sample_sizes, vec![50, 200]);
        assert_eq!(cfg.estimator.true_sd, 2.0);
        let cfg = parse(&["gof", "--bins", "4", "--sizes", "8,40"]).unwrap();
        assert_eq!(cfg.gof.bins, 4);
    }

    #[test]
    fn defaults() {
        let cfg = parse(&["all"]).unwrap();
        assert_eq!(cfg.root_seed, DEFAULT_SEED);
        assert_eq!(cfg.mh, MhConfig::default());
        assert_eq!(cfg.gof.n_reps, 10_000);
        assert!(!cfg.emit_figures);
    }
}
