//! C ABI for `jjvar`.
//!
//! Every entry point returns a [`JjvarStatus`]; results are written through
//! out-pointers. On failure, [`jjvar_last_error_message`] describes the error
//! on the calling thread. Ensembles and height fields are exposed as opaque
//! handles that must be released with their `*_free` function. Panics never
//! cross the boundary; they are reported as [`JjvarStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jjvar::ensemble::{run_ensemble, EnsembleConfig, EnsembleResult};
use jjvar::randfield::{FieldSynthesizer, HeightField};
use jjvar::stats::{fit_lognormal, transmon_frequency, LogNormalFit};
use jjvar::transport::{ej_short_junction, ej_uniform, BarrierProfile};
use jjvar::{FieldNormalization, GridSpec, JunctionParams, RoughnessParams, DEFAULT_THICKNESS_FLOOR_NM};

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JjvarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputationError = 3,
    Panic = 4,
}

/// Each realization rescaled to RMS `sigma_nm` exactly.
pub const JJVAR_NORMALIZATION_REALIZATION: u32 = 0;
/// Only the spectral filter normalized.
pub const JJVAR_NORMALIZATION_SPECTRAL: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JjvarJunction {
    pub fermi_energy_ev: f64,
    pub barrier_height_ev: f64,
    pub nominal_thickness_nm: f64,
    pub gap_mev: f64,
    pub width_x_nm: f64,
    pub width_y_nm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JjvarRoughness {
    pub sigma_nm: f64,
    pub xi_nm: f64,
    /// One of the `JJVAR_NORMALIZATION_*` constants.
    pub normalization: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JjvarLogNormalFit {
    pub mu_j: f64,
    pub sigma_j: f64,
    pub mean_ghz: f64,
    pub std_ghz: f64,
    pub n: u64,
    pub ks_statistic: f64,
    pub sample_mean_ghz: f64,
    pub sample_std_ghz: f64,
    pub sample_skewness: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JjvarTransmon {
    pub e_c_ghz: f64,
    pub f01_mean_ghz: f64,
    pub f01_std_ghz: f64,
}

/// Opaque ensemble result.
pub struct JjvarEnsemble {
    result: EnsembleResult,
}

/// Opaque interface height field.
pub struct JjvarField {
    field: HeightField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(JjvarStatus, String);

fn invalid(message: impl Into<String>) -> Failure {
    Failure(JjvarStatus::InvalidArgument, message.into())
}

fn computation(message: impl ToString) -> Failure {
    Failure(JjvarStatus::ComputationError, message.to_string())
}

fn guard<F>(body: F) -> JjvarStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => JjvarStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            JjvarStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(JjvarStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure(JjvarStatus::NullPointer, format!("{name} is NULL")));
    }
    p.write(value);
    Ok(())
}

fn junction_params(j: &JjvarJunction) -> JunctionParams {
    JunctionParams {
        fermi_energy_ev: j.fermi_energy_ev,
        barrier_height_ev: j.barrier_height_ev,
        nominal_thickness_nm: j.nominal_thickness_nm,
        gap_mev: j.gap_mev,
        width_x_nm: j.width_x_nm,
        width_y_nm: j.width_y_nm,
    }
}

fn roughness_params(r: &JjvarRoughness) -> Result<RoughnessParams, Failure> {
    let normalization = match r.normalization {
        JJVAR_NORMALIZATION_REALIZATION => FieldNormalization::Realization,
        JJVAR_NORMALIZATION_SPECTRAL => FieldNormalization::Spectral,
        other => return Err(invalid(format!("unknown normalization {other}"))),
    };
    Ok(RoughnessParams::new(r.sigma_nm, r.xi_nm).with_normalization(normalization))
}

fn fit_to_c(f: &LogNormalFit) -> JjvarLogNormalFit {
    JjvarLogNormalFit {
        mu_j: f.mu_j,
        sigma_j: f.sigma_j,
        mean_ghz: f.mean_ej,
        std_ghz: f.std_ej,
        n: f.n as u64,
        ks_statistic: f.ks_statistic,
        sample_mean_ghz: f.sample_mean,
        sample_std_ghz: f.sample_std,
        sample_skewness: f.sample_skewness,
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call into the
/// library on the same thread.
#[no_mangle]
pub extern "C" fn jjvar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jjvar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Al/AlOx/Al device: E_F = 11.7 eV, U = 1.1 eV, d = 1 nm, gap 0.2 meV,
/// 200 x 200 nm.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_junction_paper_defaults(out: *mut JjvarJunction) -> JjvarStatus {
    guard(|| {
        let j = JunctionParams::paper_defaults();
        write(
            out,
            "out",
            JjvarJunction {
                fermi_energy_ev: j.fermi_energy_ev,
                barrier_height_ev: j.barrier_height_ev,
                nominal_thickness_nm: j.nominal_thickness_nm,
                gap_mev: j.gap_mev,
                width_x_nm: j.width_x_nm,
                width_y_nm: j.width_y_nm,
            },
        )
    })
}

/// E_J / h (GHz) of a uniform barrier of thickness `d_nm`, Ambegaokar–Baratoff.
///
/// # Safety
/// `junction` must be NULL or valid for reads, `out_ghz` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ej_uniform(
    junction: *const JjvarJunction,
    d_nm: f64,
    out_ghz: *mut f64,
) -> JjvarStatus {
    guard(|| {
        let j = junction_params(read(junction, "junction")?);
        let ej = ej_uniform(d_nm, &j).map_err(computation)?;
        write(out_ghz, "out_ghz", ej)
    })
}

/// E_J / h (GHz) of a uniform barrier from the short-junction Andreev
/// bound-state supercurrent.
///
/// # Safety
/// `junction` must be NULL or valid for reads, `out_ghz` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ej_short_junction_uniform(
    junction: *const JjvarJunction,
    d_nm: f64,
    out_ghz: *mut f64,
) -> JjvarStatus {
    guard(|| {
        let j = junction_params(read(junction, "junction")?);
        let ej = ej_short_junction(BarrierProfile::Uniform(d_nm), &j).map_err(computation)?;
        write(out_ghz, "out_ghz", ej)
    })
}

/// First-order transmon frequency and spread from an E_J distribution (GHz).
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_transmon_frequency(
    mean_ej_ghz: f64,
    std_ej_ghz: f64,
    e_c_ghz: f64,
    out: *mut JjvarTransmon,
) -> JjvarStatus {
    guard(|| {
        let t = transmon_frequency(mean_ej_ghz, std_ej_ghz, e_c_ghz).map_err(|e| invalid(e.to_string()))?;
        write(
            out,
            "out",
            JjvarTransmon { e_c_ghz: t.e_c_ghz, f01_mean_ghz: t.f01_mean_ghz, f01_std_ghz: t.f01_std_ghz },
        )
    })
}

/// Maximum-likelihood log-normal fit of `n` positive samples.
///
/// # Safety
/// `samples` must point to `n` readable doubles; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_fit_lognormal(
    samples: *const f64,
    n: usize,
    out: *mut JjvarLogNormalFit,
) -> JjvarStatus {
    guard(|| {
        if samples.is_null() {
            return Err(Failure(JjvarStatus::NullPointer, "samples is NULL".into()));
        }
        let xs = std::slice::from_raw_parts(samples, n);
        let fit = fit_lognormal(xs).map_err(|e| invalid(e.to_string()))?;
        write(out, "out", fit_to_c(&fit))
    })
}

/// Runs a Monte Carlo ensemble on an `nx` x `ny` grid covering the junction.
/// `workers = 0` uses the available parallelism. Results do not depend on
/// the worker count.
///
/// # Safety
/// Input pointers must be NULL or valid for reads; `out` NULL or valid for
/// writes. The handle written to `out` must be released with
/// [`jjvar_ensemble_free`].
#[no_mangle]
pub unsafe extern "C" fn jjvar_ensemble_run(
    junction: *const JjvarJunction,
    roughness: *const JjvarRoughness,
    nx: usize,
    ny: usize,
    n_samples: usize,
    master_seed: u64,
    workers: usize,
    out: *mut *mut JjvarEnsemble,
) -> JjvarStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(JjvarStatus::NullPointer, "out is NULL".into()));
        }
        out.write(ptr::null_mut());
        let j = junction_params(read(junction, "junction")?);
        let r = roughness_params(read(roughness, "roughness")?)?;
        let config = EnsembleConfig {
            junction: j,
            roughness: r,
            grid: GridSpec::for_junction(nx, ny, &j),
            n_samples,
            master_seed,
            thickness_floor: DEFAULT_THICKNESS_FLOOR_NM,
        };
        config.validate().map_err(|e| invalid(e.to_string()))?;
        let result = run_ensemble(config, (workers > 0).then_some(workers)).map_err(computation)?;
        out.write(Box::into_raw(Box::new(JjvarEnsemble { result })));
        Ok(())
    })
}

/// Number of samples held by `ensemble`, or 0 for NULL.
///
/// # Safety
/// `ensemble` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ensemble_len(ensemble: *const JjvarEnsemble) -> usize {
    ensemble.as_ref().map_or(0, |e| e.result.samples.len())
}

/// Copies the E_J / h samples (GHz) in sample-index order. `capacity` must
/// be at least [`jjvar_ensemble_len`].
///
/// # Safety
/// `ensemble` must be NULL or a live handle; `buffer` must hold `capacity`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ensemble_copy_ej(
    ensemble: *const JjvarEnsemble,
    buffer: *mut f64,
    capacity: usize,
) -> JjvarStatus {
    guard(|| {
        let e = read(ensemble, "ensemble")?;
        if buffer.is_null() {
            return Err(Failure(JjvarStatus::NullPointer, "buffer is NULL".into()));
        }
        let n = e.result.samples.len();
        if capacity < n {
            return Err(invalid(format!("buffer holds {capacity} values, need {n}")));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, n);
        for (d, s) in dst.iter_mut().zip(&e.result.samples) {
            *d = s.ej_ghz;
        }
        Ok(())
    })
}

/// Log-normal fit of the ensemble.
///
/// # Safety
/// `ensemble` must be NULL or a live handle; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ensemble_fit(
    ensemble: *const JjvarEnsemble,
    out: *mut JjvarLogNormalFit,
) -> JjvarStatus {
    guard(|| {
        let e = read(ensemble, "ensemble")?;
        let fit = e.result.fit().map_err(computation)?;
        write(out, "out", fit_to_c(&fit))
    })
}

/// Releases an ensemble handle; NULL is ignored.
///
/// # Safety
/// `ensemble` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jjvar_ensemble_free(ensemble: *mut JjvarEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

/// Synthesizes one interface on an `nx` x `ny` grid over `lx_nm` x `ly_nm`.
///
/// # Safety
/// `roughness` must be NULL or valid for reads; `out` NULL or valid for
/// writes. The handle must be released with [`jjvar_field_free`].
#[no_mangle]
pub unsafe extern "C" fn jjvar_field_synthesize(
    nx: usize,
    ny: usize,
    lx_nm: f64,
    ly_nm: f64,
    roughness: *const JjvarRoughness,
    seed: u64,
    out: *mut *mut JjvarField,
) -> JjvarStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(JjvarStatus::NullPointer, "out is NULL".into()));
        }
        out.write(ptr::null_mut());
        let r = roughness_params(read(roughness, "roughness")?)?;
        if nx == 0 || ny == 0 || !(lx_nm > 0.0 && ly_nm > 0.0) {
            return Err(invalid("grid needs nx, ny > 0 and positive side lengths"));
        }
        let synth = FieldSynthesizer::new(GridSpec::covering(nx, ny, lx_nm, ly_nm), r)
            .map_err(|e| invalid(e.to_string()))?;
        out.write(Box::into_raw(Box::new(JjvarField { field: synth.synthesize(seed) })));
        Ok(())
    })
}

/// Grid dimensions of a field.
///
/// # Safety
/// `field` must be NULL or a live handle; `nx`, `ny` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jjvar_field_dims(field: *const JjvarField, nx: *mut usize, ny: *mut usize) -> JjvarStatus {
    guard(|| {
        let f = read(field, "field")?;
        write(nx, "nx", f.field.grid.nx)?;
        write(ny, "ny", f.field.grid.ny)
    })
}

/// Copies heights (nm) row-major, `values[iy * nx + ix]`.
///
/// # Safety
/// `field` must be NULL or a live handle; `buffer` must hold `capacity`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn jjvar_field_copy_values(
    field: *const JjvarField,
    buffer: *mut f64,
    capacity: usize,
) -> JjvarStatus {
    guard(|| {
        let f = read(field, "field")?;
        if buffer.is_null() {
            return Err(Failure(JjvarStatus::NullPointer, "buffer is NULL".into()));
        }
        let n = f.field.values.len();
        if capacity < n {
            return Err(invalid(format!("buffer holds {capacity} values, need {n}")));
        }
        std::slice::from_raw_parts_mut(buffer, n).copy_from_slice(&f.field.values);
        Ok(())
    })
}

/// Releases a field handle; NULL is ignored.
///
/// # Safety
/// `field` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jjvar_field_free(field: *mut JjvarField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}
