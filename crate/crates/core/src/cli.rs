//! Command-line front end: `field`, `validate-ab`, `ensemble` and `sweep`.
//!
//! Every run writes its artifacts into `--out DIR` together with a manifest
//! listing each file's SHA-256. If any step fails, files already written by
//! that run are removed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};
use crate::ensemble::{run_ensemble, run_sweep, EnsembleError, SweepSeeds};
use crate::randfield::{estimate_statistics, fit_correlation_length, FieldError, FieldSynthesizer};
use crate::report::{self, FieldReport, FitReport, OutputEntry, RunManifest};
use crate::stats::{histogram, transmon_frequency, StatsError, MIN_FIT_SAMPLES};
use crate::transport::{uniform_sweep, TransportError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_COMPUTATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "jjvar", version, about = "Josephson-energy variability of rough Al/AlOx/Al junctions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration; the built-in paper defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "jjvar-out")]
    pub out: PathBuf,
    /// Overrides ensemble.master_seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Overrides ensemble.n_samples.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Synthesize one interface height field and its statistics.
    Field,
    /// Uniform-barrier E_J from the Ambegaokar–Baratoff relation and from
    /// short-junction Andreev bound states.
    ValidateAb {
        #[arg(long, default_value_t = 0.5)]
        d_min: f64,
        #[arg(long, default_value_t = 1.5)]
        d_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Monte Carlo ensemble, log-normal fit, histogram and transmon estimate.
    Ensemble,
    /// Ensembles over a grid of roughness parameters.
    Sweep {
        /// Comma-separated RMS roughness values (nm).
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.08, 0.09, 0.10])]
        sigmas: Vec<f64>,
        /// Comma-separated correlation lengths (nm).
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [10.0, 20.0, 30.0, 40.0, 50.0])]
        xis: Vec<f64>,
        /// Give each cell its own derived master seed instead of sharing one.
        #[arg(long)]
        per_cell_seeds: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("computation error: {0}")]
    Computation(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Computation(_) => EXIT_COMPUTATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Io(_) => CliError::Io(e.to_string()),
            FieldError::UnderResolved { .. }
            | FieldError::ExceedsDomain { .. }
            | FieldError::InvalidRoughness(_)
            | FieldError::BadFloor(_) => CliError::Validation(e.to_string()),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Validation(_) | EnsembleError::NoSamples | EnsembleError::EmptySweep => {
                CliError::Validation(e.to_string())
            }
            EnsembleError::Field(f) => f.into(),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::InvalidSweep(_) | TransportError::NegativeThickness(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Computation(e.to_string())
    }
}

/// Files written by one run; removed again unless the run commits.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    entries: Vec<OutputEntry>,
    committed: bool,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new(), entries: Vec::new(), committed: false })
    }

    fn write_raw(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        self.write_raw(name, contents.as_bytes())?;
        self.entries.push(OutputEntry::new(name, contents.as_bytes()));
        Ok(())
    }

    fn commit(mut self, name: &str, mut manifest: RunManifest, start: Instant) -> Result<(), CliError> {
        manifest.outputs = std::mem::take(&mut self.entries);
        manifest.wall_time_s = start.elapsed().as_secs_f64();
        self.write_raw(name, manifest.to_json().as_bytes())?;
        self.committed = true;
        log::info!("wrote {} files to {}", self.written.len(), self.dir.display());
        Ok(())
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

fn resolve_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::paper_defaults(),
    };
    if let Some(seed) = common.seed {
        config = config.with_seed(seed);
    }
    if let Some(n) = common.samples {
        config = config.with_samples(n);
    }
    config.check()?;
    Ok(config)
}

fn resolve_workers(common: &CommonArgs) -> usize {
    common
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let config = resolve_config(&cli.common)?;
    let workers = resolve_workers(&cli.common);
    let mut out = Outputs::new(&cli.common.out)?;
    match &cli.command {
        Command::Field => {
            let seed = config.ensemble.master_seed;
            let field = FieldSynthesizer::new(config.grid(), config.roughness())?.synthesize(seed);
            let stats = estimate_statistics(&field);
            let fitted_xi_nm = if config.roughness.sigma_nm > 0.0 {
                fit_correlation_length(&stats.radial)
            } else {
                None
            };
            let rep = FieldReport {
                seed,
                sigma_nm: config.roughness.sigma_nm,
                xi_nm: config.roughness.xi_nm,
                rms_nm: stats.rms,
                mean_nm: stats.mean,
                variance_nm2: field.variance(),
                fitted_xi_nm,
                statistics: &stats,
                config_sha256: config.hash(),
            };
            out.write(&format!("field_{seed}.csv"), &report::field_csv(&config, &field))?;
            out.write(&format!("field_{seed}_stats.json"), &rep.to_json())?;
            out.commit(&format!("field_{seed}_manifest.json"), RunManifest::new("field", &config, 1), start)
        }
        Command::ValidateAb { d_min, d_max, points } => {
            let pts = uniform_sweep(&config.junction(), *d_min, *d_max, *points)?;
            out.write("validate_ab.csv", &report::uniform_sweep_csv(&config, &pts))?;
            out.commit("validate_ab_manifest.json", RunManifest::new("validate-ab", &config, 1), start)
        }
        Command::Ensemble => {
            let result = run_ensemble(config.ensemble_config(), Some(workers))?;
            out.write("samples.csv", &report::samples_csv(&config, &result))?;
            if result.samples.len() >= MIN_FIT_SAMPLES {
                let fit = result.fit()?;
                let transmon = match config.analysis.e_c_ghz {
                    Some(e_c) => Some(transmon_frequency(fit.mean_ej, fit.std_ej, e_c)?),
                    None => None,
                };
                let hist = histogram(&result.ej_values(), config.analysis.n_bins)?;
                out.write("fit.json", &FitReport::new(&config, &fit, transmon).to_json())?;
                out.write("histogram.csv", &report::histogram_csv(&config, &hist, &fit))?;
            } else {
                log::warn!(
                    "{} samples: fit and histogram need at least {MIN_FIT_SAMPLES}, skipped",
                    result.samples.len()
                );
            }
            out.commit("ensemble_manifest.json", RunManifest::new("ensemble", &config, workers), start)
        }
        Command::Sweep { sigmas, xis, per_cell_seeds } => {
            let seeds = if *per_cell_seeds { SweepSeeds::PerCell } else { SweepSeeds::Common };
            let sweep = run_sweep(config.ensemble_config(), sigmas, xis, seeds, Some(workers))?;
            out.write("sweep_table.csv", &report::sweep_table_csv(&config, &sweep))?;
            out.write("sweep_cells.csv", &report::sweep_cells_csv(&config, &sweep))?;
            out.commit("sweep_manifest.json", RunManifest::new("sweep", &config, workers), start)
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("jjvar: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_sweep_lists() {
        let cli = Cli::try_parse_from(["jjvar", "sweep", "--sigmas", "0.08,0.1", "--xis", "10", "--workers", "2"])
            .unwrap();
        match cli.command {
            Command::Sweep { sigmas, xis, per_cell_seeds } => {
                assert_eq!(sigmas, vec![0.08, 0.1]);
                assert_eq!(xis, vec![10.0]);
                assert!(!per_cell_seeds);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cli.common.workers, Some(2));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with_args(["jjvar", "bogus"]), EXIT_USAGE);
        assert_eq!(main_with_args(["jjvar", "ensemble", "--workers", "0"]), EXIT_USAGE);
    }
}
