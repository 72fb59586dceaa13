//! Deterministic Monte Carlo ensembles of rough junctions and `(sigma, xi)`
//! parameter sweeps.
//!
//! Every sample draws its two interface fields from seeds derived from
//! `(master_seed, sample_index, interface)` alone, so results are identical
//! for any worker count or scheduling order.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{validate, GridSpec, JunctionParams, RoughnessParams, ValidationError};
use crate::randfield::{thickness_map, FieldError, FieldSynthesizer};
use crate::stats::{fit_lognormal, LogNormalFit, StatsError};
use crate::transport::{build_conductance_table, ej_rough, ConductanceTable, TransportError};

pub const DEFAULT_SAMPLES: usize = 5000;

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("n_samples must be >= 1")]
    NoSamples,
    #[error("random field setup failed: {0}")]
    Field(#[from] FieldError),
    #[error("conductance table: {0}")]
    Table(TransportError),
    #[error("sample {index} failed: {cause}")]
    Sample { index: usize, cause: String },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("fit: {0}")]
    Fit(#[from] StatsError),
    #[error("sweep lists must be non-empty")]
    EmptySweep,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed for `(index, stream)` under `master`. Distinct
/// counters map to distinct seeds because the mixer is a bijection.
pub fn derive_seed(master: u64, index: u64, stream: u64) -> u64 {
    let counter = index.wrapping_mul(2).wrapping_add(stream & 1);
    mix64(mix64(master).wrapping_add(GOLDEN_GAMMA.wrapping_mul(counter.wrapping_add(1))))
}

pub const TOP_INTERFACE: u64 = 0;
pub const BOTTOM_INTERFACE: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub junction: JunctionParams,
    pub roughness: RoughnessParams,
    pub grid: GridSpec,
    pub n_samples: usize,
    pub master_seed: u64,
    /// Lower clamp on the local thickness (nm).
    pub thickness_floor: f64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        validate(self.junction, self.roughness, self.grid)?;
        if self.n_samples == 0 {
            return Err(EnsembleError::NoSamples);
        }
        Ok(())
    }

    pub fn with_roughness(mut self, sigma_nm: f64, xi_nm: f64) -> Self {
        self.roughness.sigma_nm = sigma_nm;
        self.roughness.xi_nm = xi_nm;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub index: usize,
    pub seed_top: u64,
    pub seed_bottom: u64,
    /// E_J / h (GHz).
    pub ej_ghz: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub config: EnsembleConfig,
    pub samples: Vec<Sample>,
    pub elapsed: Duration,
}

impl EnsembleResult {
    pub fn ej_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ej_ghz).collect()
    }

    pub fn fit(&self) -> Result<LogNormalFit, StatsError> {
        fit_lognormal(&self.ej_values())
    }
}

/// Shared immutable state for one ensemble cell.
pub struct PreparedEnsemble {
    config: EnsembleConfig,
    table: ConductanceTable,
    synthesizer: FieldSynthesizer,
}

impl PreparedEnsemble {
    pub fn new(config: EnsembleConfig) -> Result<Self, EnsembleError> {
        config.validate()?;
        let table = build_conductance_table(&config.junction, &config.roughness, config.thickness_floor)
            .map_err(EnsembleError::Table)?;
        let synthesizer = FieldSynthesizer::new(config.grid, config.roughness)?;
        Ok(PreparedEnsemble { config, table, synthesizer })
    }

    pub fn table(&self) -> &ConductanceTable {
        &self.table
    }

    pub fn sample(&self, index: usize) -> Result<Sample, EnsembleError> {
        let c = &self.config;
        let seed_top = derive_seed(c.master_seed, index as u64, TOP_INTERFACE);
        let seed_bottom = derive_seed(c.master_seed, index as u64, BOTTOM_INTERFACE);
        let fail = |cause: String| EnsembleError::Sample { index, cause };
        let top = self.synthesizer.synthesize(seed_top);
        let bottom = self.synthesizer.synthesize(seed_bottom);
        let map = thickness_map(c.junction.nominal_thickness_nm, &top, &bottom, c.thickness_floor)
            .map_err(|e| fail(e.to_string()))?;
        let ej_ghz = ej_rough(&map, &self.table, &c.junction).map_err(|e| fail(e.to_string()))?;
        if !(ej_ghz > 0.0 && ej_ghz.is_finite()) {
            return Err(fail(format!("non-positive Josephson energy {ej_ghz}")));
        }
        Ok(Sample { index, seed_top, seed_bottom, ej_ghz })
    }

    fn run_all(&self) -> Result<Vec<Sample>, EnsembleError> {
        let results: Vec<Result<Sample, EnsembleError>> =
            (0..self.config.n_samples).into_par_iter().map(|i| self.sample(i)).collect();
        // The lowest failing index wins, independent of scheduling.
        results.into_iter().collect()
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, EnsembleError> {
    let threads = workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EnsembleError::Pool(e.to_string()))
}

/// Runs one ensemble on `workers` threads (default: available parallelism).
pub fn run_ensemble(config: EnsembleConfig, workers: Option<usize>) -> Result<EnsembleResult, EnsembleError> {
    let start = Instant::now();
    let prepared = PreparedEnsemble::new(config)?;
    let samples = pool(workers)?.install(|| prepared.run_all())?;
    Ok(EnsembleResult { config, samples, elapsed: start.elapsed() })
}

/// Master-seed assignment for the cells of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepSeeds {
    /// Every cell reuses the base master seed, so sample `i` sees the same
    /// white noise in every cell (common random numbers).
    #[default]
    Common,
    /// Each cell gets `derive_seed(master, cell_index, 0)`.
    PerCell,
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub sigma_nm: f64,
    pub xi_nm: f64,
    pub master_seed: u64,
    pub fit: LogNormalFit,
    pub result: EnsembleResult,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub sigmas: Vec<f64>,
    pub xis: Vec<f64>,
    pub seeds: SweepSeeds,
    /// Row-major over `(xi, sigma)`: `cells[ix * sigmas.len() + is]`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, sigma_index: usize, xi_index: usize) -> &SweepCell {
        &self.cells[xi_index * self.sigmas.len() + sigma_index]
    }
}

/// One ensemble per `(sigma, xi)` pair, laid out like a table with one row
/// per `xi` and one column per `sigma`.
pub fn run_sweep(
    base: EnsembleConfig,
    sigmas: &[f64],
    xis: &[f64],
    seeds: SweepSeeds,
    workers: Option<usize>,
) -> Result<SweepResult, EnsembleError> {
    if sigmas.is_empty() || xis.is_empty() {
        return Err(EnsembleError::EmptySweep);
    }
    let threads = pool(workers)?;
    let mut cells = Vec::with_capacity(sigmas.len() * xis.len());
    for (ix, &xi) in xis.iter().enumerate() {
        for (is, &sigma) in sigmas.iter().enumerate() {
            let cell_index = (ix * sigmas.len() + is) as u64;
            let master_seed = match seeds {
                SweepSeeds::Common => base.master_seed,
                SweepSeeds::PerCell => derive_seed(base.master_seed, cell_index, 0),
            };
            let mut config = base.with_roughness(sigma, xi);
            config.master_seed = master_seed;
            log::info!("sweep cell sigma = {sigma} nm, xi = {xi} nm ({} samples)", config.n_samples);
            let start = Instant::now();
            let prepared = PreparedEnsemble::new(config)?;
            let samples = threads.install(|| prepared.run_all())?;
            let result = EnsembleResult { config, samples, elapsed: start.elapsed() };
            let fit = result.fit()?;
            cells.push(SweepCell { sigma_nm: sigma, xi_nm: xi, master_seed, fit, result });
        }
    }
    Ok(SweepResult { sigmas: sigmas.to_vec(), xis: xis.to_vec(), seeds, cells })
}

/// Percentile bootstrap interval of `statistic` at confidence `level`.
pub fn bootstrap_interval<F>(values: &[f64], statistic: F, resamples: usize, level: f64, seed: u64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; n];
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.gen_range(0..n)];
            }
            statistic(&buf)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    percentile_pair(&stats, level)
}

/// Paired percentile bootstrap of `statistic(b) - statistic(a)`, resampling
/// the same indices from both lists.
pub fn bootstrap_paired_difference<F>(
    a: &[f64],
    b: &[f64],
    statistic: F,
    resamples: usize,
    level: f64,
    seed: u64,
) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let n = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ba, mut bb) = (vec![0.0; n], vec![0.0; n]);
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for k in 0..n {
                let j = rng.gen_range(0..n);
                ba[k] = a[j];
                bb[k] = b[j];
            }
            statistic(&bb) - statistic(&ba)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    percentile_pair(&stats, level)
}

fn percentile_pair(sorted: &[f64], level: f64) -> (f64, f64) {
    let alpha = (1.0 - level) / 2.0;
    let at = |q: f64| {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    (at(alpha), at(1.0 - alpha))
}

/// Fitted log-normal mean of positive samples; bootstrap statistic.
pub fn fitted_mean(values: &[f64]) -> f64 {
    let (mu, s) = log_moments(values);
    (mu + s * s / 2.0).exp()
}

/// Fitted log-normal standard deviation; bootstrap statistic.
pub fn fitted_std(values: &[f64]) -> f64 {
    let (mu, s) = log_moments(values);
    let s2 = s * s;
    ((s2.exp() - 1.0) * (2.0 * mu + s2).exp()).sqrt()
}

fn log_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mu = values.iter().map(|v| v.ln()).sum::<f64>() / n;
    let var = values.iter().map(|v| (v.ln() - mu).powi(2)).sum::<f64>() / n;
    (mu, var.sqrt())
}
