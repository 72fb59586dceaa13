//! Gaussian random interface heights with Gaussian autocovariance
//! `C(r) = sigma^2 exp(-r^2 / xi^2)` on a periodic grid.
//!
//! Synthesis draws Hermitian-symmetric complex white noise directly in
//! Fourier space, weights it by the square root of the discretized spectral
//! density `S(k) = sigma^2 pi xi^2 exp(-xi^2 |k|^2 / 4)` and applies one
//! inverse 2D FFT. The discrete weights are normalized so that the spectral
//! variance sums to exactly `sigma^2`, which also absorbs periodic-image and
//! aliasing corrections when `xi` approaches the domain size.

use std::f64::consts::PI;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::domain::{FieldNormalization, GridSpec, RoughnessParams};

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("correlation length {xi} nm is below two pixels ({min_xi} nm); the field would be white noise")]
    UnderResolved { xi: f64, min_xi: f64 },
    #[error("correlation length {xi} nm exceeds the smallest domain side {side} nm")]
    ExceedsDomain { xi: f64, side: f64 },
    #[error("invalid roughness: {0}")]
    InvalidRoughness(String),
    #[error("grid mismatch: {0:?} vs {1:?}")]
    GridMismatch(GridSpec, GridSpec),
    #[error("thickness floor must be > 0, got {0}")]
    BadFloor(f64),
    #[error("malformed field file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One interface realization; `values[iy * nx + ix]` is the height (nm) at
/// `(ix * dx, iy * dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl HeightField {
    pub fn zeros(grid: GridSpec, seed: u64) -> Self {
        HeightField { grid, values: vec![0.0; grid.len()], seed }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        HeightField { grid, values: vec![value; grid.len()], seed: 0 }
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Spatial variance about the realization mean.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len() as f64
    }
}

/// Local barrier thickness (nm) on the same grid as the interface fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessMap {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub floor: f64,
    /// Number of pixels raised to `floor`.
    pub clamped: usize,
}

impl ThicknessMap {
    pub fn uniform(grid: GridSpec, thickness: f64) -> Self {
        ThicknessMap { grid, values: vec![thickness; grid.len()], floor: 0.0, clamped: 0 }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match the grid");
        ThicknessMap { grid, values, floor: 0.0, clamped: 0 }
    }

    pub fn clamped_fraction(&self) -> f64 {
        self.clamped as f64 / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Row/column 2D FFT over a row-major `ny x nx` buffer.
struct Fft2 {
    nx: usize,
    ny: usize,
    along_x: Arc<dyn Fft<f64>>,
    along_y: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(nx: usize, ny: usize, direction: FftDirection) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            along_x: planner.plan_fft(nx, direction),
            along_y: planner.plan_fft(ny, direction),
        }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let (nx, ny) = (self.nx, self.ny);
        let scratch_len = self
            .along_x
            .get_inplace_scratch_len()
            .max(self.along_y.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        self.along_x.process_with_scratch(buf, &mut scratch);
        let mut t = vec![Complex64::default(); buf.len()];
        transpose(buf, &mut t, ny, nx);
        self.along_y.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, buf, nx, ny);
    }
}

// `src` has `rows x cols` layout; `dst` receives `cols x rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const BLOCK: usize = 32;
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn angular_frequency(index: usize, n: usize, length: f64) -> f64 {
    let m = if index <= n / 2 { index as f64 } else { index as f64 - n as f64 };
    2.0 * PI * m / length
}

/// Precomputed spectral filter and FFT plan for one `(grid, roughness)` pair.
/// Cheap to share between threads; each call to [`synthesize`] is pure.
///
/// [`synthesize`]: FieldSynthesizer::synthesize
pub struct FieldSynthesizer {
    grid: GridSpec,
    roughness: RoughnessParams,
    amplitude: Vec<f64>,
    inverse: Fft2,
}

impl FieldSynthesizer {
    pub fn new(grid: GridSpec, roughness: RoughnessParams) -> Result<Self, FieldError> {
        let RoughnessParams { sigma_nm: sigma, xi_nm: xi, .. } = roughness;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(FieldError::InvalidRoughness(format!("sigma = {sigma}")));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(FieldError::InvalidRoughness(format!("xi = {xi}")));
        }
        let min_xi = 2.0 * grid.dx.max(grid.dy);
        if xi < min_xi {
            return Err(FieldError::UnderResolved { xi, min_xi });
        }
        let side = grid.lx().min(grid.ly());
        if xi > side {
            return Err(FieldError::ExceedsDomain { xi, side });
        }
        if xi > side / 4.0 {
            log::warn!(
                "xi = {xi} nm exceeds a quarter of the domain ({side} nm); \
                 periodic wrap-around distorts the long-range statistics"
            );
        }

        let (nx, ny) = (grid.nx, grid.ny);
        let area = grid.lx() * grid.ly();
        let mut amplitude = vec![0.0; grid.len()];
        let mut total = 0.0;
        for iy in 0..ny {
            let ky = angular_frequency(iy, ny, grid.ly());
            for ix in 0..nx {
                let kx = angular_frequency(ix, nx, grid.lx());
                let s = PI * xi * xi * (-xi * xi * (kx * kx + ky * ky) / 4.0).exp() / area;
                amplitude[iy * nx + ix] = s;
                total += s;
            }
        }
        // Unit-variance weights, then scale to sigma.
        for a in amplitude.iter_mut() {
            *a = sigma * (*a / total).sqrt();
        }

        Ok(FieldSynthesizer {
            grid,
            roughness,
            amplitude,
            inverse: Fft2::new(nx, ny, FftDirection::Inverse),
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn roughness(&self) -> RoughnessParams {
        self.roughness
    }

    /// Deterministic in `seed`: the same seed always yields the same bits.
    pub fn synthesize(&self, seed: u64) -> HeightField {
        let sigma = self.roughness.sigma_nm;
        if sigma == 0.0 {
            return HeightField::zeros(self.grid, seed);
        }
        let mut values: Vec<f64> = self.raw_realization(seed).iter().map(|c| c.re).collect();

        if self.roughness.normalization == FieldNormalization::Realization {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let rms = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            let scale = if rms > 0.0 { sigma / rms } else { 0.0 };
            for v in values.iter_mut() {
                *v = (*v - mean) * scale;
            }
        }
        HeightField { grid: self.grid, values, seed }
    }

    // Inverse transform of the filtered Hermitian noise; imaginary part is
    // zero up to rounding.
    fn raw_realization(&self, seed: u64) -> Vec<Complex64> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spectrum = vec![Complex64::default(); self.grid.len()];
        for iy in 0..ny {
            let my = (ny - iy) % ny;
            for ix in 0..nx {
                let mx = (nx - ix) % nx;
                let here = iy * nx + ix;
                let mirror = my * nx + mx;
                match here.cmp(&mirror) {
                    std::cmp::Ordering::Less => {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        let eta = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
                        spectrum[here] = eta * self.amplitude[here];
                        spectrum[mirror] = eta.conj() * self.amplitude[mirror];
                    }
                    std::cmp::Ordering::Equal => {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        spectrum[here] = Complex64::new(re * self.amplitude[here], 0.0);
                    }
                    std::cmp::Ordering::Greater => {}
                }
            }
        }
        self.inverse.process(&mut spectrum);
        spectrum
    }
}

/// One-shot synthesis; prefer [`FieldSynthesizer`] when drawing many fields.
pub fn synthesize_field(
    grid: GridSpec,
    roughness: RoughnessParams,
    seed: u64,
) -> Result<HeightField, FieldError> {
    Ok(FieldSynthesizer::new(grid, roughness)?.synthesize(seed))
}

/// Measured statistics of one field.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FieldStatistics {
    /// sqrt(mean(h^2)), not mean-subtracted.
    pub rms: f64,
    pub mean: f64,
    /// Radially binned `(r, C(r))`, `r` in nm.
    pub radial: Vec<(f64, f64)>,
    /// `C` at lags `0, dx, 2dx, ...` along x, up to half the domain.
    pub along_x: Vec<f64>,
    /// Same along y.
    pub along_y: Vec<f64>,
}

/// Periodic autocovariance `C(lag) = mean_x h(x) h(x + lag)` via
/// Wiener–Khinchin, in the same row-major layout as the field.
pub fn autocovariance(field: &HeightField) -> Vec<f64> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let n = field.values.len() as f64;
    let mut buf: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft2::new(nx, ny, FftDirection::Forward).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    Fft2::new(nx, ny, FftDirection::Inverse).process(&mut buf);
    buf.iter().map(|c| c.re / (n * n)).collect()
}

pub fn estimate_statistics(field: &HeightField) -> FieldStatistics {
    let grid = field.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let n = field.values.len() as f64;
    let rms = (field.values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let mean = field.mean();
    let cov = autocovariance(field);

    let width = grid.dx.min(grid.dy);
    let r_max = grid.lx().min(grid.ly()) / 2.0;
    let n_bins = (r_max / width).floor() as usize + 1;
    let mut sum_r = vec![0.0; n_bins];
    let mut sum_c = vec![0.0; n_bins];
    let mut count = vec![0usize; n_bins];
    for iy in 0..ny {
        let ry = iy.min(ny - iy) as f64 * grid.dy;
        for ix in 0..nx {
            let rx = ix.min(nx - ix) as f64 * grid.dx;
            let r = rx.hypot(ry);
            if r > r_max {
                continue;
            }
            let b = (r / width).round() as usize;
            if b < n_bins {
                sum_r[b] += r;
                sum_c[b] += cov[iy * nx + ix];
                count[b] += 1;
            }
        }
    }
    let radial = (0..n_bins)
        .filter(|&b| count[b] > 0)
        .map(|b| (sum_r[b] / count[b] as f64, sum_c[b] / count[b] as f64))
        .collect();
    let along_x = (0..=nx / 2).map(|ix| cov[ix]).collect();
    let along_y = (0..=ny / 2).map(|iy| cov[iy * nx]).collect();

    FieldStatistics { rms, mean, radial, along_x, along_y }
}

/// Linear interpolation in a radial profile; `None` outside its range.
pub fn radial_value_at(radial: &[(f64, f64)], r: f64) -> Option<f64> {
    let k = radial.iter().position(|&(ri, _)| ri >= r)?;
    if k == 0 {
        return (radial[0].0 == r).then_some(radial[0].1);
    }
    let (r0, c0) = radial[k - 1];
    let (r1, c1) = radial[k];
    Some(c0 + (c1 - c0) * (r - r0) / (r1 - r0))
}

/// Fits `C(r) = C(0) exp(-r^2 / xi^2)` to the leading part of a radial
/// profile (down to `C(0) / e`) by least squares on `-ln(C/C0)` vs `r^2`.
/// Beyond that the constant offset left by removing the sample mean,
/// about `sigma^2 pi xi^2 / area`, biases the tail low.
pub fn fit_correlation_length(radial: &[(f64, f64)]) -> Option<f64> {
    let &(r0, c0) = radial.first()?;
    if r0 != 0.0 || c0 <= 0.0 {
        return None;
    }
    let cutoff = c0 * (-1.0f64).exp();
    let (mut num, mut den) = (0.0, 0.0);
    for &(r, c) in &radial[1..] {
        if c < cutoff {
            break;
        }
        let y = -(c / c0).ln();
        let r2 = r * r;
        num += r2 * y;
        den += r2 * r2;
    }
    (num > 0.0).then(|| (den / num).sqrt())
}

/// Local thickness `max(d + top + bottom, floor)`.
pub fn thickness_map(
    nominal: f64,
    top: &HeightField,
    bottom: &HeightField,
    floor: f64,
) -> Result<ThicknessMap, FieldError> {
    if top.grid != bottom.grid {
        return Err(FieldError::GridMismatch(top.grid, bottom.grid));
    }
    if floor.is_nan() || floor <= 0.0 {
        return Err(FieldError::BadFloor(floor));
    }
    let mut clamped = 0;
    let values = top
        .values
        .iter()
        .zip(&bottom.values)
        .map(|(a, b)| {
            let t = nominal + a + b;
            if t < floor {
                clamped += 1;
                floor
            } else {
                t
            }
        })
        .collect();
    Ok(ThicknessMap { grid: top.grid, values, floor, clamped })
}

pub const FIELD_CSV_HEADER: &str = "nx,ny,dx_nm,dy_nm,sigma_nm,xi_nm,seed";

/// Two header lines (names, values) followed by `ny` rows of `nx` heights.
pub fn write_field_csv<W: Write>(
    out: &mut W,
    field: &HeightField,
    roughness: &RoughnessParams,
) -> io::Result<()> {
    let g = field.grid;
    writeln!(out, "{FIELD_CSV_HEADER}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        g.nx, g.ny, g.dx, g.dy, roughness.sigma_nm, roughness.xi_nm, field.seed
    )?;
    let mut line = String::new();
    for row in field.values.chunks(g.nx) {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Inverse of [`write_field_csv`]; leading `#` comment lines are skipped.
pub fn read_field_csv<R: BufRead>(input: R) -> Result<(HeightField, RoughnessParams), FieldError> {
    let bad = |m: &str| FieldError::Parse(m.to_string());
    let mut lines = input
        .lines()
        .skip_while(|l| l.as_ref().map(|l| l.starts_with('#')).unwrap_or(false));
    let header = lines.next().ok_or_else(|| bad("missing header"))??;
    if header.trim() != FIELD_CSV_HEADER {
        return Err(bad("unexpected header"));
    }
    let meta = lines.next().ok_or_else(|| bad("missing metadata"))??;
    let m: Vec<&str> = meta.trim().split(',').collect();
    if m.len() != 7 {
        return Err(bad("metadata needs 7 columns"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
    let int = |s: &str| s.parse::<u64>().map_err(|_| bad("bad integer"));
    let grid = GridSpec { nx: int(m[0])? as usize, ny: int(m[1])? as usize, dx: num(m[2])?, dy: num(m[3])? };
    let roughness = RoughnessParams::new(num(m[4])?, num(m[5])?);
    let seed = int(m[6])?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for v in line.trim().split(',') {
            values.push(num(v)?);
        }
    }
    if values.len() != grid.len() {
        return Err(bad("value count does not match nx*ny"));
    }
    Ok((HeightField { grid, values, seed }, roughness))
}
