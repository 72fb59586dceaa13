//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run a subset by number: `cargo test -p jjvar --test acceptance -- 1 5 7`.

use std::f64::consts::PI;
use std::time::Instant;

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use jjvar::config::RunConfig;
use jjvar::ensemble::{
    bootstrap_paired_difference, fitted_mean, fitted_std, run_ensemble, run_sweep, EnsembleResult,
    SweepResult, SweepSeeds,
};
use jjvar::randfield::{estimate_statistics, radial_value_at, thickness_map, FieldSynthesizer};
use jjvar::report::samples_csv;
use jjvar::stats::{fit_lognormal, ks_critical_value, linear_fit, transmon_frequency};
use jjvar::transport::{
    build_conductance_table, conductance_density, ej_from_conductance, ej_rough, length_scales,
    uniform_sweep,
};
use jjvar::{FieldNormalization, GridSpec, JunctionParams, RoughnessParams, DEFAULT_THICKNESS_FLOOR_NM};

const PAPER_MEAN: f64 = 20.447;
const PAPER_STD: f64 = 2.326;
const BOOTSTRAP_RESAMPLES: usize = 2000;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new(id: u32, title: &'static str) -> Self {
        Outcome { id, title, pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new(1, "transmon frequency from 20.447 +- 2.326 GHz, E_C = 0.25 GHz");
    let t = transmon_frequency(PAPER_MEAN, PAPER_STD, 0.25).expect("transmon regime");
    let r = |x: f64| (x * 1000.0).round() / 1000.0;
    o.check(r(t.f01_mean_ghz) == 6.145, format!("f01 = {:.6} GHz (expect 6.145)", t.f01_mean_ghz));
    o.check(r(t.f01_std_ghz) == 0.364, format!("df01 = {:.6} GHz (expect 0.364)", t.f01_std_ghz));
    o
}

fn paper_ensemble() -> EnsembleResult {
    let config = RunConfig::paper_defaults();
    run_ensemble(config.ensemble_config(), None).expect("paper-default ensemble")
}

fn criterion_2(result: &EnsembleResult) -> Outcome {
    let mut o = Outcome::new(2, "paper-default ensemble mean and std (n = 5000)");
    let fit = result.fit().expect("fit");
    o.check(
        rel(fit.mean_ej, PAPER_MEAN) <= 0.15,
        format!("fitted mean {:.3} GHz vs {PAPER_MEAN} (dev {:.1}%, tol 15%)", fit.mean_ej, 100.0 * rel(fit.mean_ej, PAPER_MEAN)),
    );
    o.check(
        rel(fit.std_ej, PAPER_STD) <= 0.30,
        format!("fitted std {:.3} GHz vs {PAPER_STD} (dev {:.1}%, tol 30%)", fit.std_ej, 100.0 * rel(fit.std_ej, PAPER_STD)),
    );
    o.details.push(format!(
        "info raw sample mean {:.3} GHz, std {:.3} GHz, n = {}, {:.1} s",
        fit.sample_mean,
        fit.sample_std,
        fit.n,
        result.elapsed.as_secs_f64()
    ));
    o
}

/// Adjacent-cell paired bootstrap; `sign` is +1 for an increase along the
/// list and -1 for a decrease.
fn trend(o: &mut Outcome, label: &str, cells: &[&EnsembleResult], stat: fn(&[f64]) -> f64, sign: f64) {
    for (k, w) in cells.windows(2).enumerate() {
        let (a, b) = (w[0].ej_values(), w[1].ej_values());
        let (lo, hi) = bootstrap_paired_difference(&a, &b, stat, BOOTSTRAP_RESAMPLES, 0.95, 1000 + k as u64);
        let ok = if sign > 0.0 { lo > 0.0 } else { hi < 0.0 };
        o.check(
            ok,
            format!(
                "{label} step {k}: {:.3} -> {:.3} GHz, 95% CI of change [{lo:.3}, {hi:.3}]",
                stat(&a),
                stat(&b)
            ),
        );
    }
}

fn sweep(sigmas: &[f64], xis: &[f64], n: usize) -> SweepResult {
    let base = RunConfig::paper_defaults().with_samples(n).ensemble_config();
    run_sweep(base, sigmas, xis, SweepSeeds::Common, None).expect("sweep")
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new(3, "roughness trends (n = 2000 per cell, paired bootstrap 95%)");
    let start = Instant::now();
    let by_sigma = sweep(&[0.08, 0.09, 0.10], &[10.0], 2000);
    let by_xi = sweep(&[0.09], &[10.0, 20.0, 30.0, 40.0, 50.0], 2000);
    let s: Vec<&EnsembleResult> = by_sigma.cells.iter().map(|c| &c.result).collect();
    let x: Vec<&EnsembleResult> = by_xi.cells.iter().map(|c| &c.result).collect();
    trend(&mut o, "mean vs sigma (xi = 10)", &s, fitted_mean, 1.0);
    trend(&mut o, "std vs sigma (xi = 10)", &s, fitted_std, 1.0);
    trend(&mut o, "std vs xi (sigma = 0.09)", &x, fitted_std, 1.0);
    trend(&mut o, "mean vs xi (sigma = 0.09)", &x, fitted_mean, -1.0);
    let f = &by_sigma.cell(0, 0).fit;
    o.check(
        rel(f.mean_ej, 17.92) <= 0.15,
        format!("(0.08, 10) mean {:.3} GHz vs 17.92 (dev {:.1}%, tol 15%)", f.mean_ej, 100.0 * rel(f.mean_ej, 17.92)),
    );
    o.check(
        rel(f.std_ej, 1.70) <= 0.30,
        format!("(0.08, 10) std {:.3} GHz vs 1.70 (dev {:.1}%, tol 30%)", f.std_ej, 100.0 * rel(f.std_ej, 1.70)),
    );
    o.details.push(format!("info {:.1} s", start.elapsed().as_secs_f64()));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new(4, "saturation between xi = 150 and 200 nm at sigma = 0.09 nm");
    let sw = sweep(&[0.09], &[150.0, 200.0], 2000);
    let (a, b) = (&sw.cell(0, 0).fit, &sw.cell(0, 1).fit);
    o.check(
        rel(b.mean_ej, a.mean_ej) < 0.05,
        format!("mean {:.3} -> {:.3} GHz (change {:.2}%, tol 5%)", a.mean_ej, b.mean_ej, 100.0 * rel(b.mean_ej, a.mean_ej)),
    );
    o.check(
        rel(b.std_ej, a.std_ej) < 0.05,
        format!("std {:.3} -> {:.3} GHz (change {:.2}%, tol 5%)", a.std_ej, b.std_ej, 100.0 * rel(b.std_ej, a.std_ej)),
    );
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new(5, "uniform barriers: short-junction / AB ratio and log slope, d in [0.6, 1.5] nm");
    let p = JunctionParams::paper_defaults();
    let pts = uniform_sweep(&p, 0.6, 1.5, 19).expect("uniform sweep");
    let (rmin, rmax) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| (lo.min(q.ratio()), hi.max(q.ratio())));
    o.check(
        rmin >= 1.0 && rmax <= 1.02,
        format!("ratio range [{rmin:.5}, {rmax:.5}] (bound [1, 1.02])"),
    );
    let d: Vec<f64> = pts.iter().map(|q| q.d_nm).collect();
    let ln_ej: Vec<f64> = pts.iter().map(|q| q.ej_ab_ghz.ln()).collect();
    let (slope, _) = linear_fit(&d, &ln_ej);
    let two_kappa = 2.0 * length_scales(&p).kappa;
    o.check(
        rel(slope, -two_kappa) <= 0.05,
        format!("ln E_J slope {slope:.3} /nm vs -2 kappa = {:.3} /nm (dev {:.1}%, tol 5%)", -two_kappa, 100.0 * rel(slope, -two_kappa)),
    );
    let mean_inv_d = d.iter().map(|x| 1.0 / x).sum::<f64>() / d.len() as f64;
    o.details.push(format!(
        "info -(2 kappa + <1/d>) = {:.3} /nm; the energy integral adds a 1/d prefactor to exp(-2 kappa d)",
        -(two_kappa + mean_inv_d)
    ));
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(6, "random-field variance and C(xi) over 200 realizations");
    let (sigma, xi) = (0.085, 10.0);
    let grid = GridSpec::covering(256, 256, 200.0, 200.0);
    for norm in [FieldNormalization::Realization, FieldNormalization::Spectral] {
        let synth = FieldSynthesizer::new(grid, RoughnessParams::new(sigma, xi).with_normalization(norm)).unwrap();
        let (mut var, mut c_xi) = (0.0, 0.0);
        let n = 200;
        for seed in 0..n {
            let f = synth.synthesize(seed);
            let s = estimate_statistics(&f);
            var += s.rms * s.rms;
            c_xi += radial_value_at(&s.radial, xi).expect("r = xi inside the radial profile");
        }
        var /= n as f64;
        c_xi /= n as f64;
        let s2 = sigma * sigma;
        let target = s2 * (-1.0f64).exp();
        o.check(
            rel(var, s2) <= 0.05,
            format!("{norm}: <h^2> = {var:.4e} vs sigma^2 = {s2:.4e} (dev {:.2}%, tol 5%)", 100.0 * rel(var, s2)),
        );
        o.check(
            rel(c_xi, target) <= 0.10,
            format!("{norm}: C(xi) = {c_xi:.4e} vs sigma^2/e = {target:.4e} (dev {:.2}%, tol 10%)", 100.0 * rel(c_xi, target)),
        );
    }
    o
}

// Independent reference for the conductance density: its own constants,
// transmission formula and a fixed 256-node Gauss-Legendre rule.
fn reference_conductance_density(e_f: f64, u: f64, d: f64, rule: &GaussLegendre) -> f64 {
    let hbar = 1.054_571_817e-34;
    let m = 9.109_383_701_5e-31;
    let e = 1.602_176_634e-19;
    let h = 6.626_070_15e-34;
    let k2_per_ev = 2.0 * m * e / (hbar * hbar) * 1e-18;
    let t = |ez: f64| {
        let k2 = k2_per_ev * ez;
        let q2 = k2_per_ev * (e_f + u - ez);
        let s = (q2.sqrt() * d).sinh();
        1.0 / (1.0 + (k2 + q2).powi(2) / (4.0 * k2 * q2) * s * s)
    };
    let dos = m / (2.0 * PI * hbar * hbar) * e * 1e-18;
    2.0 * e * e / h * dos * rule.integrate(0.0, e_f, t)
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new(7, "oracle equivalences");

    // (a) Rough junction against per-pixel direct quadrature.
    let junction = JunctionParams { width_x_nm: 32.0, width_y_nm: 32.0, ..JunctionParams::paper_defaults() };
    let rough = RoughnessParams::new(0.085, 6.0);
    let grid = GridSpec::for_junction(16, 16, &junction);
    let synth = FieldSynthesizer::new(grid, rough).unwrap();
    let map = thickness_map(
        junction.nominal_thickness_nm,
        &synth.synthesize(11),
        &synth.synthesize(12),
        DEFAULT_THICKNESS_FLOOR_NM,
    )
    .unwrap();
    let table = build_conductance_table(&junction, &rough, DEFAULT_THICKNESS_FLOOR_NM).unwrap();
    let fast = ej_rough(&map, &table, &junction).unwrap();
    let g: f64 = map.values.iter().map(|&d| conductance_density(d, &junction).unwrap().value).sum();
    let brute = ej_from_conductance(g * grid.pixel_area(), &junction);
    o.check(
        rel(fast, brute) <= 1e-4,
        format!("(a) 16x16 map: table {fast:.8} vs direct {brute:.8} GHz (rel {:.2e}, tol 1e-4)", rel(fast, brute)),
    );

    // (b) Adaptive quadrature against the fixed-order rule.
    let rule = GaussLegendre::new(256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let e_f = rng.gen_range(5.0..12.0);
        let u = rng.gen_range(0.5..2.0);
        let d = rng.gen_range(0.5..1.5);
        let p = JunctionParams { fermi_energy_ev: e_f, barrier_height_ev: u, ..JunctionParams::paper_defaults() };
        let ours = conductance_density(d, &p).unwrap().value;
        worst = worst.max(rel(ours, reference_conductance_density(e_f, u, d, &rule)));
    }
    o.check(worst <= 1e-6, format!("(b) 50 random (E_F, U, d): worst rel diff {worst:.2e} (tol 1e-6)"));

    // (c) Log-normal MLE recovery.
    let dist = LogNormal::new(3.0, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let xs: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
    let fit = fit_lognormal(&xs).unwrap();
    o.check(
        (fit.mu_j - 3.0).abs() <= 0.002 && (fit.sigma_j - 0.1).abs() <= 0.002,
        format!("(c) recovered mu_J = {:.5}, sigma_J = {:.5} (tol 0.002)", fit.mu_j, fit.sigma_j),
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new(8, "byte-identical sample CSVs across worker counts");
    let config = RunConfig::paper_defaults().with_samples(64);
    let max = workers();
    let mut counts = vec![1, 2, max, 8];
    counts.sort_unstable();
    counts.dedup();
    let render = |w: usize| samples_csv(&config, &run_ensemble(config.ensemble_config(), Some(w)).unwrap());
    let reference = render(1);
    for &w in &counts[1..] {
        o.check(render(w) == reference, format!("workers = {w} matches workers = 1"));
    }
    o.check(render(1) == reference, "repeat run with workers = 1 matches".into());
    o.details.push(format!("info max workers = {max}"));
    o
}

fn criterion_9(result: &EnsembleResult) -> Outcome {
    let mut o = Outcome::new(9, "log-normal shape of the paper-default ensemble");
    let fit = result.fit().expect("fit");
    let crit = ks_critical_value(fit.n, 0.01);
    o.check(
        fit.ks_statistic < crit,
        format!("KS statistic {:.4} vs 1% critical value {crit:.4} (n = {})", fit.ks_statistic, fit.n),
    );
    o.check(fit.sample_skewness > 0.0, format!("sample skewness {:.3} > 0", fit.sample_skewness));
    o.details.push(format!("info fitted log-normal skewness {:.3}", fit.skewness()));
    o
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |id: u32| selected.is_empty() || selected.contains(&id);

    let mut outcomes = Vec::new();
    let mut run = |id: u32, f: &mut dyn FnMut() -> Outcome| {
        if want(id) {
            let start = Instant::now();
            let out = f();
            eprintln!("criterion {id} done in {:.1} s", start.elapsed().as_secs_f64());
            outcomes.push(out);
        }
    };
    run(1, &mut criterion_1);
    run(5, &mut criterion_5);
    run(6, &mut criterion_6);
    run(7, &mut criterion_7);
    run(8, &mut criterion_8);
    let paper = if want(2) || want(9) { Some(paper_ensemble()) } else { None };
    if let Some(p) = &paper {
        run(2, &mut || criterion_2(p));
        run(9, &mut || criterion_9(p));
    }
    run(3, &mut criterion_3);
    run(4, &mut criterion_4);

    outcomes.sort_by_key(|o| o.id);
    println!();
    for o in &outcomes {
        for d in &o.details {
            println!("    {d}");
        }
        println!("{} criterion {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title);
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "\nacceptance: {} passed, {} failed{}",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({failed:?})") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
