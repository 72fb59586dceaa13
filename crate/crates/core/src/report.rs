//! Serialized run artifacts: CSV tables with a commented header block, JSON
//! reports and the run manifest.
//!
//! Every renderer returns the full file contents so that checksums are taken
//! over exactly the bytes written. Floats use Rust's shortest round-trip
//! formatting, which is locale independent.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::ensemble::{EnsembleResult, SweepResult};
use crate::randfield::{write_field_csv, FieldStatistics, HeightField};
use crate::stats::{ks_critical_value, Histogram, LogNormalFit, TransmonEstimate};
use crate::transport::UniformPoint;

pub const TOOL_NAME: &str = "jjvar";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significance level of the KS critical value quoted in fit reports.
pub const KS_ALPHA: f64 = 0.01;

/// `#` lines echoing tool version, full config, its hash and the master seed,
/// followed by any extra `key: value` pairs.
pub fn header_block(config: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {TOOL_NAME} {TOOL_VERSION}");
    let _ = writeln!(s, "# config: {}", config.canonical_json());
    let _ = writeln!(s, "# config_sha256: {}", config.hash());
    let _ = writeln!(s, "# master_seed: {}", config.ensemble.master_seed);
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

pub fn samples_csv(config: &RunConfig, result: &EnsembleResult) -> String {
    let mut s = header_block(config, &[]);
    s.push_str("sample_index,seed_top,seed_bottom,ej_ghz\n");
    for x in &result.samples {
        let _ = writeln!(s, "{},{},{},{}", x.index, x.seed_top, x.seed_bottom, x.ej_ghz);
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    #[serde(rename = "mu_J")]
    pub mu_j: f64,
    #[serde(rename = "sigma_J")]
    pub sigma_j: f64,
    pub mean_ghz: f64,
    pub std_ghz: f64,
    pub n: usize,
    pub ks_statistic: f64,
    pub ks_critical_1pct: f64,
    pub fitted_skewness: f64,
    pub sample_mean_ghz: f64,
    pub sample_std_ghz: f64,
    pub sample_skewness: f64,
    pub transmon: Option<TransmonEstimate>,
    pub config_sha256: String,
}

impl FitReport {
    pub fn new(config: &RunConfig, fit: &LogNormalFit, transmon: Option<TransmonEstimate>) -> Self {
        FitReport {
            mu_j: fit.mu_j,
            sigma_j: fit.sigma_j,
            mean_ghz: fit.mean_ej,
            std_ghz: fit.std_ej,
            n: fit.n,
            ks_statistic: fit.ks_statistic,
            ks_critical_1pct: ks_critical_value(fit.n, KS_ALPHA),
            fitted_skewness: fit.skewness(),
            sample_mean_ghz: fit.sample_mean,
            sample_std_ghz: fit.sample_std,
            sample_skewness: fit.sample_skewness,
            transmon,
            config_sha256: config.hash(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Histogram bins with the fitted log-normal density at each bin center.
pub fn histogram_csv(config: &RunConfig, hist: &Histogram, fit: &LogNormalFit) -> String {
    let mut s = header_block(config, &[]);
    s.push_str("bin_left_ghz,bin_right_ghz,center_ghz,count,density,fitted_density\n");
    for i in 0..hist.counts.len() {
        let c = hist.centers[i];
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            hist.edges[i],
            hist.edges[i + 1],
            c,
            hist.counts[i],
            hist.densities[i],
            fit.pdf(c)
        );
    }
    s
}

pub fn uniform_sweep_csv(config: &RunConfig, points: &[UniformPoint]) -> String {
    let mut s = header_block(config, &[]);
    s.push_str("d_nm,ej_ab_ghz,ej_abs_ghz,ratio\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", p.d_nm, p.ej_ab_ghz, p.ej_abs_ghz, p.ratio());
    }
    s
}

/// Table layout: one row per `xi`, and for each `sigma` the fitted mean,
/// fitted std, sample count and master seed of that cell.
pub fn sweep_table_csv(config: &RunConfig, sweep: &SweepResult) -> String {
    let mut s = header_block(config, &[("sweep_seeds", format!("{:?}", sweep.seeds).to_lowercase())]);
    s.push_str("xi_nm");
    for sigma in &sweep.sigmas {
        let _ = write!(s, ",mean_ghz_sigma_{sigma},std_ghz_sigma_{sigma},n_sigma_{sigma},seed_sigma_{sigma}");
    }
    s.push('\n');
    for (ix, xi) in sweep.xis.iter().enumerate() {
        let _ = write!(s, "{xi}");
        for is in 0..sweep.sigmas.len() {
            let c = sweep.cell(is, ix);
            let _ = write!(s, ",{},{},{},{}", c.fit.mean_ej, c.fit.std_ej, c.fit.n, c.master_seed);
        }
        s.push('\n');
    }
    s
}

/// One line per cell with the full fit.
pub fn sweep_cells_csv(config: &RunConfig, sweep: &SweepResult) -> String {
    let mut s = header_block(config, &[("sweep_seeds", format!("{:?}", sweep.seeds).to_lowercase())]);
    s.push_str("sigma_nm,xi_nm,n,master_seed,mean_ghz,std_ghz,mu_J,sigma_J,sample_mean_ghz,sample_std_ghz,ks_statistic\n");
    for c in &sweep.cells {
        let f = &c.fit;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            c.sigma_nm,
            c.xi_nm,
            f.n,
            c.master_seed,
            f.mean_ej,
            f.std_ej,
            f.mu_j,
            f.sigma_j,
            f.sample_mean,
            f.sample_std,
            f.ks_statistic
        );
    }
    s
}

/// Height grid with the config echo prepended.
pub fn field_csv(config: &RunConfig, field: &HeightField) -> String {
    let mut s = header_block(config, &[("field_seed", field.seed.to_string())]);
    let mut body = Vec::new();
    write_field_csv(&mut body, field, &config.roughness()).expect("writing to memory");
    s.push_str(&String::from_utf8(body).expect("ascii"));
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReport<'a> {
    pub seed: u64,
    pub sigma_nm: f64,
    pub xi_nm: f64,
    pub rms_nm: f64,
    pub mean_nm: f64,
    pub variance_nm2: f64,
    /// Gaussian fit of the radial autocovariance (nm), when it is possible.
    pub fitted_xi_nm: Option<f64>,
    pub statistics: &'a FieldStatistics,
    pub config_sha256: String,
}

impl FieldReport<'_> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

impl OutputEntry {
    pub fn new(file: &str, contents: &[u8]) -> Self {
        OutputEntry { file: file.to_string(), sha256: sha256_hex(contents), bytes: contents.len() as u64 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, workers: usize) -> Self {
        RunManifest {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            config_sha256: config.hash(),
            master_seed: config.ensemble.master_seed,
            workers,
            wall_time_s: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_echo_reparses_to_same_config() {
        let c = RunConfig::paper_defaults().with_seed(99);
        let h = header_block(&c, &[("extra", "1".into())]);
        let line = h.lines().find(|l| l.starts_with("# config: ")).unwrap();
        let back = RunConfig::from_json(line.trim_start_matches("# config: ")).unwrap();
        assert_eq!(back, c);
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# master_seed: 99\n") && h.ends_with("# extra: 1\n"));
    }

    #[test]
    fn output_entry_checksum() {
        let e = OutputEntry::new("a.csv", b"abc");
        assert_eq!(e.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(e.bytes, 3);
    }
}
