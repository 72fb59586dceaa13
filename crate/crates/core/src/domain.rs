//! Physical constants, unit conventions and validated parameter types.
//!
//! Every quantity crossing a public boundary is expressed in eV, meV, nm or
//! GHz. The conversions to SI live in [`units`] and nowhere else.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Default lower bound on the local barrier thickness (nm).
pub const DEFAULT_THICKNESS_FLOOR_NM: f64 = 0.2;

/// CODATA 2018 constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Planck constant (J s).
    pub h: f64,
    /// Elementary charge (C).
    pub e: f64,
    /// Electron mass (kg).
    pub m_e: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 6.626_070_15e-34 / (2.0 * std::f64::consts::PI),
    h: 6.626_070_15e-34,
    e: 1.602_176_634e-19,
    m_e: 9.109_383_701_5e-31,
};

/// Conversions between the external unit system and SI.
pub mod units {
    use super::CONSTANTS;

    pub const NM: f64 = 1e-9;
    pub const GHZ: f64 = 1e9;

    pub fn ev_to_joule(ev: f64) -> f64 {
        ev * CONSTANTS.e
    }

    pub fn joule_to_ev(joule: f64) -> f64 {
        joule / CONSTANTS.e
    }

    pub fn mev_to_joule(mev: f64) -> f64 {
        ev_to_joule(mev * 1e-3)
    }

    pub fn nm_to_m(nm: f64) -> f64 {
        nm * NM
    }

    pub fn m_to_nm(m: f64) -> f64 {
        m / NM
    }

    pub fn hz_to_ghz(hz: f64) -> f64 {
        hz / GHZ
    }

    /// Free-electron wavevector in nm^-1 for a kinetic energy in eV.
    pub fn wavevector_per_nm(kinetic_ev: f64) -> f64 {
        (2.0 * CONSTANTS.m_e * ev_to_joule(kinetic_ev)).sqrt() / CONSTANTS.hbar * NM
    }

    /// Free-electron 2D density of states per spin-degenerate channel,
    /// m / (2 pi hbar^2), expressed per nm^2 per eV.
    pub fn transverse_dos_per_nm2_ev() -> f64 {
        CONSTANTS.m_e / (2.0 * std::f64::consts::PI * CONSTANTS.hbar * CONSTANTS.hbar)
            * CONSTANTS.e
            * NM
            * NM
    }

    /// Conductance quantum 2e^2/h in siemens.
    pub fn conductance_quantum() -> f64 {
        2.0 * CONSTANTS.e * CONSTANTS.e / CONSTANTS.h
    }
}

/// The deterministic device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    /// Fermi energy measured from the lead band bottom (eV).
    pub fermi_energy_ev: f64,
    /// Barrier height measured above the Fermi energy (eV).
    pub barrier_height_ev: f64,
    /// Nominal barrier thickness (nm).
    pub nominal_thickness_nm: f64,
    /// Superconducting gap (meV).
    pub gap_mev: f64,
    pub width_x_nm: f64,
    pub width_y_nm: f64,
}

impl JunctionParams {
    /// Al/AlOx/Al device used for the headline results.
    pub fn paper_defaults() -> Self {
        JunctionParams {
            fermi_energy_ev: 11.7,
            barrier_height_ev: 1.1,
            nominal_thickness_nm: 1.0,
            gap_mev: 0.2,
            width_x_nm: 200.0,
            width_y_nm: 200.0,
        }
    }

    pub fn area_nm2(&self) -> f64 {
        self.width_x_nm * self.width_y_nm
    }

    /// Barrier top measured from the band bottom (eV).
    pub fn barrier_top_ev(&self) -> f64 {
        self.fermi_energy_ev + self.barrier_height_ev
    }
}

/// How each synthesized interface realization is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldNormalization {
    /// Every realization is shifted to zero spatial mean and rescaled to a
    /// spatial RMS of exactly `sigma`.
    #[default]
    Realization,
    /// Only the spectral filter is normalized; the variance equals `sigma^2`
    /// on ensemble average and each realization keeps its own mean offset.
    Spectral,
}

impl fmt::Display for FieldNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldNormalization::Realization => f.write_str("realization"),
            FieldNormalization::Spectral => f.write_str("spectral"),
        }
    }
}

/// Statistical interface model: RMS height and transverse correlation length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoughnessParams {
    pub sigma_nm: f64,
    pub xi_nm: f64,
    #[serde(default)]
    pub normalization: FieldNormalization,
}

impl RoughnessParams {
    pub fn new(sigma_nm: f64, xi_nm: f64) -> Self {
        RoughnessParams { sigma_nm, xi_nm, normalization: FieldNormalization::default() }
    }

    pub fn with_normalization(mut self, normalization: FieldNormalization) -> Self {
        self.normalization = normalization;
        self
    }
}

/// Periodic pixel grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Pixel pitch along x (nm).
    pub dx: f64,
    /// Pixel pitch along y (nm).
    pub dy: f64,
}

impl GridSpec {
    /// Grid of `nx` x `ny` pixels tiling an `lx` x `ly` nm rectangle.
    pub fn covering(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        GridSpec { nx, ny, dx: lx / nx as f64, dy: ly / ny as f64 }
    }

    pub fn for_junction(nx: usize, ny: usize, junction: &JunctionParams) -> Self {
        Self::covering(nx, ny, junction.width_x_nm, junction.width_y_nm)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lx(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn ly(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every invariant a configuration failed, not just the first.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl ValidationError {
    pub fn mentions(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} violation", self.violations.len())?;
        if self.violations.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str(")")?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

/// A configuration that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedConfig {
    pub junction: JunctionParams,
    pub roughness: RoughnessParams,
    pub grid: GridSpec,
}

#[derive(Default)]
struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, ok: bool, field: &'static str, message: impl FnOnce() -> String) {
        if !ok {
            self.0.push(Violation { field, message: message() });
        }
    }

    fn positive(&mut self, field: &'static str, value: f64) {
        self.check(value.is_finite() && value > 0.0, field, || {
            format!("must be finite and > 0, got {value}")
        });
    }
}

const LENGTH_MATCH_RTOL: f64 = 1e-9;

/// Checks every invariant of the three parameter types and their coupling.
pub fn validate(
    junction: JunctionParams,
    roughness: RoughnessParams,
    grid: GridSpec,
) -> Result<ValidatedConfig, ValidationError> {
    let mut c = Collector::default();

    c.positive("fermi_energy", junction.fermi_energy_ev);
    c.positive("barrier_height", junction.barrier_height_ev);
    c.positive("nominal_thickness", junction.nominal_thickness_nm);
    c.positive("gap", junction.gap_mev);
    c.positive("width_x", junction.width_x_nm);
    c.positive("width_y", junction.width_y_nm);
    let gap_ev = junction.gap_mev * 1e-3;
    c.check(gap_ev < 1e-2 * junction.fermi_energy_ev, "gap", || {
        format!(
            "must satisfy gap < 1e-2 * fermi_energy ({} meV >= {} meV)",
            junction.gap_mev,
            10.0 * junction.fermi_energy_ev
        )
    });

    let sigma = roughness.sigma_nm;
    c.check(sigma.is_finite() && sigma >= 0.0, "sigma", || {
        format!("must be finite and >= 0, got {sigma}")
    });
    c.positive("xi", roughness.xi_nm);
    c.check(sigma < junction.nominal_thickness_nm / 2.0, "sigma", || {
        format!(
            "must be below nominal_thickness/2 = {} nm, got {sigma}",
            junction.nominal_thickness_nm / 2.0
        )
    });

    c.check(grid.nx > 0, "grid.nx", || "must be > 0".into());
    c.check(grid.ny > 0, "grid.ny", || "must be > 0".into());
    c.positive("grid.dx", grid.dx);
    c.positive("grid.dy", grid.dy);
    let close = |a: f64, b: f64| (a - b).abs() <= LENGTH_MATCH_RTOL * b.abs().max(1e-300);
    c.check(close(grid.lx(), junction.width_x_nm), "grid.dx", || {
        format!("nx*dx = {} nm must equal width_x = {} nm", grid.lx(), junction.width_x_nm)
    });
    c.check(close(grid.ly(), junction.width_y_nm), "grid.dy", || {
        format!("ny*dy = {} nm must equal width_y = {} nm", grid.ly(), junction.width_y_nm)
    });
    let max_pitch = roughness.xi_nm / 5.0;
    c.check(grid.dx <= max_pitch && grid.dy <= max_pitch, "grid.resolution", || {
        format!(
            "pixel pitch ({}, {}) nm must be <= xi/5 = {max_pitch} nm",
            grid.dx, grid.dy
        )
    });

    if c.0.is_empty() {
        Ok(ValidatedConfig { junction, roughness, grid })
    } else {
        Err(ValidationError { violations: c.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> (JunctionParams, RoughnessParams, GridSpec) {
        let j = JunctionParams::paper_defaults();
        (j, RoughnessParams::new(0.085, 10.0), GridSpec::for_junction(512, 512, &j))
    }

    #[test]
    fn paper_defaults_are_valid() {
        let (j, r, g) = paper();
        assert!(validate(j, r, g).is_ok());
    }

    #[test]
    fn negative_sigma_is_named() {
        let (j, mut r, g) = paper();
        r.sigma_nm = -0.1;
        let err = validate(j, r, g).unwrap_err();
        assert!(err.mentions("sigma"), "{err}");
    }

    #[test]
    fn coarse_grid_is_named() {
        let (j, r, _) = paper();
        let pitch = r.xi_nm / 2.0;
        let n = (j.width_x_nm / pitch).round() as usize;
        let err = validate(j, r, GridSpec::for_junction(n, n, &j)).unwrap_err();
        assert!(err.mentions("grid.resolution"), "{err}");
    }

    #[test]
    fn all_violations_are_reported() {
        let (mut j, mut r, g) = paper();
        j.gap_mev = -1.0;
        j.barrier_height_ev = 0.0;
        r.sigma_nm = 0.6;
        let err = validate(j, r, g).unwrap_err();
        assert!(err.mentions("gap"));
        assert!(err.mentions("barrier_height"));
        assert!(err.mentions("sigma"));
        assert!(err.violations.len() >= 3);
    }

    #[test]
    fn grid_must_tile_the_junction() {
        let (j, r, _) = paper();
        let g = GridSpec { nx: 512, ny: 512, dx: 0.3, dy: 200.0 / 512.0 };
        assert!(validate(j, r, g).unwrap_err().mentions("grid.dx"));
    }

    #[test]
    fn gap_must_be_small_against_fermi_energy() {
        let (mut j, r, g) = paper();
        j.gap_mev = 200.0;
        assert!(validate(j, r, g).unwrap_err().mentions("gap"));
    }

    #[test]
    fn h_is_two_pi_hbar() {
        let c = CONSTANTS;
        assert!((c.h - 2.0 * std::f64::consts::PI * c.hbar).abs() <= 1e-15 * c.h);
    }

    #[test]
    fn unit_round_trips() {
        for x in [1e-3, 0.2, 1.1, 11.7, 1234.5] {
            assert!((units::joule_to_ev(units::ev_to_joule(x)) / x - 1.0).abs() < 1e-12);
            assert!((units::m_to_nm(units::nm_to_m(x)) / x - 1.0).abs() < 1e-12);
            assert!((units::mev_to_joule(x) / units::ev_to_joule(x * 1e-3) - 1.0).abs() < 1e-12);
        }
    }
}
