//! JSON run configuration consumed by the command-line front end.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{
    validate, FieldNormalization, GridSpec, JunctionParams, RoughnessParams, ValidationError,
    DEFAULT_THICKNESS_FLOOR_NM,
};
use crate::ensemble::EnsembleConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Validation(#[from] ValidationError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSection {
    #[serde(rename = "fermi_energy_eV")]
    pub fermi_energy_ev: f64,
    #[serde(rename = "barrier_height_eV")]
    pub barrier_height_ev: f64,
    pub nominal_thickness_nm: f64,
    #[serde(rename = "gap_meV")]
    pub gap_mev: f64,
    pub width_x_nm: f64,
    pub width_y_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessSection {
    pub sigma_nm: f64,
    pub xi_nm: f64,
    #[serde(default)]
    pub normalization: FieldNormalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_samples: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Transmon charging energy E_C / h (GHz); no transmon estimate when absent.
    #[serde(default)]
    pub e_c_ghz: Option<f64>,
    pub n_bins: usize,
}

/// Complete description of one run. Serializing it back gives the echo
/// written into every output header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub junction: JunctionSection,
    pub roughness: RoughnessSection,
    pub grid: GridSection,
    pub ensemble: EnsembleSection,
    pub analysis: AnalysisSection,
}

impl RunConfig {
    /// 200 x 200 nm Al/AlOx/Al device, sigma = 0.085 nm, xi = 10 nm,
    /// 5000 samples on a 256 x 256 grid, E_C / h = 0.25 GHz.
    pub fn paper_defaults() -> Self {
        let j = JunctionParams::paper_defaults();
        RunConfig {
            junction: JunctionSection {
                fermi_energy_ev: j.fermi_energy_ev,
                barrier_height_ev: j.barrier_height_ev,
                nominal_thickness_nm: j.nominal_thickness_nm,
                gap_mev: j.gap_mev,
                width_x_nm: j.width_x_nm,
                width_y_nm: j.width_y_nm,
            },
            roughness: RoughnessSection {
                sigma_nm: 0.085,
                xi_nm: 10.0,
                normalization: FieldNormalization::default(),
            },
            grid: GridSection { nx: 256, ny: 256 },
            ensemble: EnsembleSection { n_samples: 5000, master_seed: 20_447 },
            analysis: AnalysisSection { e_c_ghz: Some(0.25), n_bins: 50 },
        }
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Runs domain validation plus the checks specific to the file format.
    pub fn check(&self) -> Result<(), ConfigError> {
        validate(self.junction(), self.roughness(), self.grid())?;
        if self.ensemble.n_samples == 0 {
            return Err(ConfigError::Invalid("ensemble.n_samples must be >= 1".into()));
        }
        if self.analysis.n_bins < 2 {
            return Err(ConfigError::Invalid("analysis.n_bins must be >= 2".into()));
        }
        if let Some(e_c) = self.analysis.e_c_ghz {
            if !(e_c.is_finite() && e_c > 0.0) {
                return Err(ConfigError::Invalid(format!("analysis.e_c_ghz must be > 0, got {e_c}")));
            }
        }
        Ok(())
    }

    pub fn junction(&self) -> JunctionParams {
        let j = &self.junction;
        JunctionParams {
            fermi_energy_ev: j.fermi_energy_ev,
            barrier_height_ev: j.barrier_height_ev,
            nominal_thickness_nm: j.nominal_thickness_nm,
            gap_mev: j.gap_mev,
            width_x_nm: j.width_x_nm,
            width_y_nm: j.width_y_nm,
        }
    }

    pub fn roughness(&self) -> RoughnessParams {
        RoughnessParams::new(self.roughness.sigma_nm, self.roughness.xi_nm)
            .with_normalization(self.roughness.normalization)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::for_junction(self.grid.nx, self.grid.ny, &self.junction())
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig {
            junction: self.junction(),
            roughness: self.roughness(),
            grid: self.grid(),
            n_samples: self.ensemble.n_samples,
            master_seed: self.ensemble.master_seed,
            thickness_floor: DEFAULT_THICKNESS_FLOOR_NM,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.ensemble.master_seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.ensemble.n_samples = n;
        self
    }

    pub fn with_roughness(mut self, sigma_nm: f64, xi_nm: f64) -> Self {
        self.roughness.sigma_nm = sigma_nm;
        self.roughness.xi_nm = xi_nm;
        self
    }

    /// Single-line canonical JSON: fixed key order, defaults made explicit.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`RunConfig::canonical_json`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
