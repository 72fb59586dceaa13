//! Tunneling through a rectangular barrier between free-electron leads,
//! conductance per unit area, and the Josephson energy of a junction.
//!
//! The normal conductance of a rough junction is the sum of locally uniform
//! barrier conductances over the pixels of a [`ThicknessMap`]. The critical
//! current follows from the Ambegaokar–Baratoff relation
//! `I_c = pi Delta / (2 e R_N)` and `E_J = hbar I_c / (2e)`. A zero-temperature
//! short-junction Andreev-bound-state supercurrent over the same channel
//! distribution serves as an independent cross-check of that relation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::domain::{units, JunctionParams, RoughnessParams, CONSTANTS};
use crate::interp::MonotoneCubic;
use crate::quadrature::{integrate, QuadOptions, QuadratureError};
use crate::randfield::ThicknessMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("longitudinal energy {e_z} eV outside (0, {top}) eV")]
    EnergyOutOfRange { e_z: f64, top: f64 },
    #[error("negative barrier thickness {0} nm")]
    NegativeThickness(f64),
    #[error("thickness {d} nm outside conductance table range [{lo}, {hi}] nm")]
    OutsideTable { d: f64, lo: f64, hi: f64 },
    #[error("conductance density underflowed at d = {0} nm")]
    Underflow(f64),
    #[error("conductance table did not reach the interpolation tolerance with {0} nodes")]
    TableResolution(usize),
    #[error("table built for E_F = {table_fermi} eV, U = {table_barrier} eV used with E_F = {fermi} eV, U = {barrier} eV")]
    TableMismatch { table_fermi: f64, table_barrier: f64, fermi: f64, barrier: f64 },
    #[error("invalid thickness sweep: {0}")]
    InvalidSweep(String),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
}

/// Relative tolerance of every transverse-energy integral.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Target relative interpolation error verified while building a table.
pub const TABLE_REL_TOL: f64 = 1e-5;

/// Characteristic lengths of the leads and the barrier.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LengthScales {
    /// Fermi wavelength (nm).
    pub lambda_f: f64,
    /// Evanescent decay length in the barrier (nm).
    pub lambda_d: f64,
    /// Fermi wavevector (nm^-1).
    pub k_f: f64,
    /// Barrier decay constant at the Fermi energy (nm^-1).
    pub kappa: f64,
}

pub fn length_scales(params: &JunctionParams) -> LengthScales {
    let k_f = units::wavevector_per_nm(params.fermi_energy_ev);
    let kappa = units::wavevector_per_nm(params.barrier_height_ev);
    LengthScales { lambda_f: 2.0 * PI / k_f, lambda_d: 1.0 / kappa, k_f, kappa }
}

// Transmission with squared wavevectors in nm^-2; no range checks.
fn transmission_k2(k2: f64, kappa2: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    let s = (kappa2.sqrt() * d).sinh();
    let shape = (k2 + kappa2) * (k2 + kappa2) / (4.0 * k2 * kappa2);
    1.0 / (1.0 + shape * s * s)
}

/// Precomputed energy-to-wavevector factors for one junction.
#[derive(Debug, Clone, Copy)]
struct Barrier {
    k2_per_ev: f64,
    top_ev: f64,
}

impl Barrier {
    fn new(params: &JunctionParams) -> Self {
        let c = units::wavevector_per_nm(1.0);
        Barrier { k2_per_ev: c * c, top_ev: params.barrier_top_ev() }
    }

    fn transmission(&self, e_z: f64, d: f64) -> f64 {
        transmission_k2(self.k2_per_ev * e_z, self.k2_per_ev * (self.top_ev - e_z), d)
    }
}

/// Transmission probability of the rectangular barrier at longitudinal
/// energy `e_z` (eV, from the band bottom) for thickness `d` (nm).
pub fn barrier_transmission(e_z: f64, d: f64, params: &JunctionParams) -> Result<f64, TransportError> {
    let top = params.barrier_top_ev();
    if !(e_z > 0.0 && e_z < top) {
        return Err(TransportError::EnergyOutOfRange { e_z, top });
    }
    if d.is_nan() || d < 0.0 {
        return Err(TransportError::NegativeThickness(d));
    }
    Ok(Barrier::new(params).transmission(e_z, d))
}

/// Conductance per unit area of a uniform barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductanceDensity {
    /// S / nm^2.
    pub value: f64,
    /// Set when the transmission integral underflowed to (near) zero.
    pub underflow: bool,
}

// Spin-degenerate channels per nm^2 per eV of longitudinal energy, times 2e^2/h.
fn conductance_prefactor() -> f64 {
    units::conductance_quantum() * units::transverse_dos_per_nm2_ev()
}

/// `g(d) = (2e^2/h) (m / 2 pi hbar^2) int_0^E_F T(E_z; d) dE_z`.
pub fn conductance_density(d: f64, params: &JunctionParams) -> Result<ConductanceDensity, TransportError> {
    if d.is_nan() || d < 0.0 {
        return Err(TransportError::NegativeThickness(d));
    }
    let barrier = Barrier::new(params);
    let opts = QuadOptions { rel_tol: QUAD_REL_TOL, ..Default::default() };
    let r = integrate(|e| barrier.transmission(e, d), 0.0, params.fermi_energy_ev, opts)?;
    let value = conductance_prefactor() * r.value;
    Ok(ConductanceDensity { value, underflow: value < f64::MIN_POSITIVE })
}

/// Lookup table of `g(d)` with monotone cubic interpolation in `(d, ln g)`.
#[derive(Debug, Clone)]
pub struct ConductanceTable {
    fermi_energy_ev: f64,
    barrier_height_ev: f64,
    log_g: MonotoneCubic,
    g: Vec<f64>,
}

impl ConductanceTable {
    pub fn range(&self) -> (f64, f64) {
        (self.log_g.x_min(), self.log_g.x_max())
    }

    pub fn thickness_grid(&self) -> Vec<f64> {
        (0..self.g.len()).map(|i| self.log_g.node(i)).collect()
    }

    /// Conductance per unit area at each node (S/nm^2).
    pub fn g_values(&self) -> &[f64] {
        &self.g
    }

    pub fn params(&self) -> (f64, f64) {
        (self.fermi_energy_ev, self.barrier_height_ev)
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `g(d)` in S/nm^2; an error outside the table, never extrapolation.
    pub fn lookup(&self, d: f64) -> Result<f64, TransportError> {
        match self.log_g.locate(d) {
            None => {
                let (lo, hi) = self.range();
                Err(TransportError::OutsideTable { d, lo, hi })
            }
            Some((_, Some(node))) => Ok(self.g[node]),
            Some(_) => Ok(self.log_g.eval(d).expect("located inside").exp()),
        }
    }

    fn check_params(&self, params: &JunctionParams) -> Result<(), TransportError> {
        if self.fermi_energy_ev != params.fermi_energy_ev
            || self.barrier_height_ev != params.barrier_height_ev
        {
            return Err(TransportError::TableMismatch {
                table_fermi: self.fermi_energy_ev,
                table_barrier: self.barrier_height_ev,
                fermi: params.fermi_energy_ev,
                barrier: params.barrier_height_ev,
            });
        }
        Ok(())
    }
}

/// Thickness interval a table must cover: eight combined standard
/// deviations of the two-interface sum around the nominal thickness.
pub fn table_range(params: &JunctionParams, rough: &RoughnessParams, floor: f64) -> (f64, f64) {
    const MIN_HALF_WIDTH: f64 = 0.01;
    let half = (8.0 * std::f64::consts::SQRT_2 * rough.sigma_nm).max(MIN_HALF_WIDTH);
    let d0 = params.nominal_thickness_nm;
    ((d0 - half).max(floor), d0 + half)
}

/// Builds a table over [`table_range`], doubling the node count until the
/// interpolant matches direct quadrature at every interval midpoint.
pub fn build_conductance_table(
    params: &JunctionParams,
    rough: &RoughnessParams,
    floor: f64,
) -> Result<ConductanceTable, TransportError> {
    const MAX_INTERVALS: usize = 1 << 14;
    let (lo, hi) = table_range(params, rough, floor);
    let density = |d: f64| -> Result<f64, TransportError> {
        let g = conductance_density(d, params)?;
        if g.underflow {
            Err(TransportError::Underflow(d))
        } else {
            Ok(g.value)
        }
    };

    let mut intervals = 16usize;
    let mut g: Vec<f64> = (0..=intervals)
        .map(|i| density(lo + (hi - lo) * i as f64 / intervals as f64))
        .collect::<Result<_, _>>()?;
    loop {
        let step = (hi - lo) / intervals as f64;
        let interp = MonotoneCubic::new(lo, step, g.iter().map(|v| v.ln()).collect());
        let mids: Vec<f64> = (0..intervals)
            .map(|i| density(lo + (i as f64 + 0.5) * step))
            .collect::<Result<_, _>>()?;
        let worst = mids
            .iter()
            .enumerate()
            .map(|(i, &exact)| {
                let approx = interp.eval(lo + (i as f64 + 0.5) * step).expect("inside").exp();
                (approx / exact - 1.0).abs()
            })
            .fold(0.0, f64::max);
        if worst <= TABLE_REL_TOL {
            return Ok(ConductanceTable {
                fermi_energy_ev: params.fermi_energy_ev,
                barrier_height_ev: params.barrier_height_ev,
                log_g: interp,
                g,
            });
        }
        if intervals >= MAX_INTERVALS {
            return Err(TransportError::TableResolution(intervals + 1));
        }
        let mut merged = Vec::with_capacity(2 * intervals + 1);
        for i in 0..intervals {
            merged.push(g[i]);
            merged.push(mids[i]);
        }
        merged.push(g[intervals]);
        g = merged;
        intervals *= 2;
    }
}

/// Josephson energy over h (GHz) of a junction with total normal
/// conductance `g_total` (S).
pub fn ej_from_conductance(g_total: f64, params: &JunctionParams) -> f64 {
    let gap = units::mev_to_joule(params.gap_mev);
    let r_n = 1.0 / g_total;
    let i_c = PI * gap / (2.0 * CONSTANTS.e * r_n);
    let e_j = CONSTANTS.hbar / (2.0 * CONSTANTS.e) * i_c;
    units::hz_to_ghz(e_j / CONSTANTS.h)
}

/// E_J/h (GHz) of a junction whose barrier is `d` nm everywhere.
pub fn ej_uniform(d: f64, params: &JunctionParams) -> Result<f64, TransportError> {
    let g = conductance_density(d, params)?;
    Ok(ej_from_conductance(g.value * params.area_nm2(), params))
}

/// Total normal conductance (S) of a thickness map, pixels in parallel.
pub fn map_conductance(map: &ThicknessMap, table: &ConductanceTable) -> Result<f64, TransportError> {
    let mut sum = 0.0;
    for &d in &map.values {
        sum += table.lookup(d)?;
    }
    Ok(sum * map.grid.pixel_area())
}

/// E_J/h (GHz) of a rough junction under the local thickness approximation.
pub fn ej_rough(
    map: &ThicknessMap,
    table: &ConductanceTable,
    params: &JunctionParams,
) -> Result<f64, TransportError> {
    table.check_params(params)?;
    Ok(ej_from_conductance(map_conductance(map, table)?, params))
}

/// Barrier geometry accepted by [`ej_short_junction`].
#[derive(Debug, Clone, Copy)]
pub enum BarrierProfile<'a> {
    /// Uniform thickness (nm) over the full junction area.
    Uniform(f64),
    /// Pixel-resolved thickness. Pixels are integrated one distinct
    /// thickness at a time, so this is meant for small or coarse maps.
    Map(&'a ThicknessMap),
}

/// Andreev-bound-state current-phase factor of one channel,
/// `tau sin(phi) / sqrt(1 - tau sin^2(phi/2))`.
pub fn andreev_phase_factor(tau: f64, phi: f64) -> f64 {
    let (s, c) = (0.5 * phi).sin_cos();
    let den = (c * c + (1.0 - tau) * s * s).sqrt();
    if den == 0.0 {
        // tau = 1 at phi = pi, approached from below.
        2.0 * s
    } else {
        tau * 2.0 * s * c / den
    }
}

/// Maximizes a unimodal function on `[a, b]` by golden-section search.
/// Returns `(argmax, max)`; the endpoints are included as candidates.
fn golden_maximize<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64), TransportError>
where
    F: FnMut(f64) -> Result<f64, TransportError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > rel_tol * b.abs().max(a.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Phase tolerance of the critical-current search.
pub const PHASE_REL_TOL: f64 = 1e-8;

/// `(phi_c, max_phi F(tau, phi))` for a single channel.
pub fn single_channel_critical(tau: f64) -> (f64, f64) {
    golden_maximize(|phi| Ok(andreev_phase_factor(tau, phi)), 0.0, PI, PHASE_REL_TOL)
        .expect("closed-form factor cannot fail")
}

/// E_J/h (GHz) from the maximum over phase of the short-junction
/// supercurrent `I(phi) = (e Delta / 2 hbar) sum_n F(tau_n, phi)`, with the
/// channel sum taken as the transverse-energy integral per unit area.
pub fn ej_short_junction(profile: BarrierProfile<'_>, params: &JunctionParams) -> Result<f64, TransportError> {
    // Distinct thickness -> area (nm^2).
    let mut areas: BTreeMap<u64, f64> = BTreeMap::new();
    match profile {
        BarrierProfile::Uniform(d) => {
            areas.insert(d.to_bits(), params.area_nm2());
        }
        BarrierProfile::Map(map) => {
            let a = map.grid.pixel_area();
            for &d in &map.values {
                *areas.entry(d.to_bits()).or_insert(0.0) += a;
            }
        }
    }
    for &bits in areas.keys() {
        let d = f64::from_bits(bits);
        if d.is_nan() || d < 0.0 {
            return Err(TransportError::NegativeThickness(d));
        }
    }

    let barrier = Barrier::new(params);
    let dos = units::transverse_dos_per_nm2_ev();
    let opts = QuadOptions { rel_tol: QUAD_REL_TOL, ..Default::default() };
    let channel_sum = |phi: f64| -> Result<f64, TransportError> {
        let mut total = 0.0;
        for (&bits, &area) in &areas {
            let d = f64::from_bits(bits);
            let r = integrate(
                |e| andreev_phase_factor(barrier.transmission(e, d), phi),
                0.0,
                params.fermi_energy_ev,
                opts,
            )?;
            total += area * dos * r.value;
        }
        Ok(total)
    };
    let (_, max_sum) = golden_maximize(channel_sum, 0.0, PI, PHASE_REL_TOL)?;

    let gap = units::mev_to_joule(params.gap_mev);
    let i_c = CONSTANTS.e * gap / (2.0 * CONSTANTS.hbar) * max_sum;
    let e_j = CONSTANTS.hbar / (2.0 * CONSTANTS.e) * i_c;
    Ok(units::hz_to_ghz(e_j / CONSTANTS.h))
}

/// One uniform-barrier thickness with both E_J estimates (GHz).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct UniformPoint {
    pub d_nm: f64,
    /// Ambegaokar–Baratoff.
    pub ej_ab_ghz: f64,
    /// Short-junction Andreev bound states.
    pub ej_abs_ghz: f64,
}

impl UniformPoint {
    pub fn ratio(&self) -> f64 {
        self.ej_abs_ghz / self.ej_ab_ghz
    }
}

/// `n_points` equally spaced thicknesses from `d_min` to `d_max`; a single
/// point sits at `d_min`.
pub fn uniform_sweep(
    params: &JunctionParams,
    d_min: f64,
    d_max: f64,
    n_points: usize,
) -> Result<Vec<UniformPoint>, TransportError> {
    if !(d_min > 0.0 && d_max > d_min && d_max.is_finite()) {
        return Err(TransportError::InvalidSweep(format!("need 0 < d_min < d_max, got [{d_min}, {d_max}]")));
    }
    if n_points == 0 {
        return Err(TransportError::InvalidSweep("n_points must be >= 1".into()));
    }
    let step = if n_points > 1 { (d_max - d_min) / (n_points - 1) as f64 } else { 0.0 };
    (0..n_points)
        .map(|i| {
            let d = if i + 1 == n_points && n_points > 1 { d_max } else { d_min + i as f64 * step };
            Ok(UniformPoint {
                d_nm: d,
                ej_ab_ghz: ej_uniform(d, params)?,
                ej_abs_ghz: ej_short_junction(BarrierProfile::Uniform(d), params)?,
            })
        })
        .collect()
}
