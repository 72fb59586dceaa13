use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jjvar::stats::linear_fit;
use jjvar::transport::{
    build_conductance_table, conductance_density, ej_uniform, length_scales, single_channel_critical,
};
use jjvar::{JunctionParams, RoughnessParams, DEFAULT_THICKNESS_FLOOR_NM};

// Free-electron conductance density from scratch: CODATA constants, the
// rectangular-barrier transmission and a 256-node Gauss-Legendre rule.
fn reference_density(e_f: f64, u: f64, d: f64) -> f64 {
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
    let rule = GaussLegendre::new(256).unwrap();
    2.0 * e * e / h * (m / (2.0 * PI * hbar * hbar) * e * 1e-18) * rule.integrate(0.0, e_f, t)
}

#[test]
fn conductance_density_matches_fixed_order_rule_at_paper_point() {
    let g = conductance_density(1.0, &JunctionParams::paper_defaults()).unwrap().value;
    let r = reference_density(11.7, 1.1, 1.0);
    assert!((g / r - 1.0).abs() < 1e-6, "{g} vs {r}");
}

#[test]
fn conductance_density_matches_fixed_order_rule_on_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let (e_f, u, d) = (rng.gen_range(3.0..12.0), rng.gen_range(0.3..3.0), rng.gen_range(0.3..2.0));
        let p = JunctionParams { fermi_energy_ev: e_f, barrier_height_ev: u, ..JunctionParams::paper_defaults() };
        let g = conductance_density(d, &p).unwrap().value;
        let r = reference_density(e_f, u, d);
        assert!((g / r - 1.0).abs() < 1e-6, "E_F {e_f}, U {u}, d {d}: {g} vs {r}");
    }
}

#[test]
fn table_midpoints_match_direct_quadrature() {
    let p = JunctionParams::paper_defaults();
    let table = build_conductance_table(&p, &RoughnessParams::new(0.1, 10.0), DEFAULT_THICKNESS_FLOOR_NM).unwrap();
    let nodes = table.thickness_grid();
    for (i, &d) in nodes.iter().enumerate() {
        if i % 7 == 0 {
            assert_eq!(table.lookup(d).unwrap(), conductance_density(d, &p).unwrap().value);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let i = rng.gen_range(0..nodes.len() - 1);
        let mid = 0.5 * (nodes[i] + nodes[i + 1]);
        let direct = conductance_density(mid, &p).unwrap().value;
        let interp = table.lookup(mid).unwrap();
        assert!((interp / direct - 1.0).abs() < 1e-4, "d = {mid}");
    }
    let (lo, hi) = table.range();
    assert!(table.lookup(lo - 1e-9).is_err() && table.lookup(hi + 1e-9).is_err());
}

#[test]
fn perfect_channel_critical_phase_matches_dense_scan() {
    for tau in [1.0, 0.9, 0.5, 0.05] {
        let f = |phi: f64| tau * phi.sin() / (1.0 - tau * (phi / 2.0).sin().powi(2)).sqrt();
        let (mut best_phi, mut best) = (0.0, f64::NEG_INFINITY);
        let n = 200_000;
        for k in 1..n {
            let phi = PI * k as f64 / n as f64;
            let v = f(phi);
            if v > best {
                best = v;
                best_phi = phi;
            }
        }
        let (phi_c, max) = single_channel_critical(tau);
        assert!((max - best).abs() < 1e-8 * best.max(1.0), "tau {tau}: {max} vs {best}");
        if tau < 1.0 {
            assert!((phi_c - best_phi).abs() < 1e-3, "tau {tau}: {phi_c} vs {best_phi}");
        }
    }
    let (phi_c, max) = single_channel_critical(1.0);
    assert!((max - 2.0).abs() < 1e-12 && (phi_c - PI).abs() < 1e-3);
}

// ln E_J(d) over the tunneling regime: a straight line, whose slope is that
// of the exp(-2 kappa d) / d asymptote rather than -2 kappa alone.
#[test]
fn log_ej_is_linear_with_phase_space_corrected_slope() {
    let p = JunctionParams::paper_defaults();
    let d: Vec<f64> = (0..13).map(|i| 0.8 + 0.05 * i as f64).collect();
    let y: Vec<f64> = d.iter().map(|&x| ej_uniform(x, &p).unwrap().ln()).collect();
    let (slope, intercept) = linear_fit(&d, &y);
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = d.iter().zip(&y).map(|(x, v)| (v - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    assert!(1.0 - ss_res / ss_tot > 0.999, "R^2 = {}", 1.0 - ss_res / ss_tot);

    let two_kappa = 2.0 * length_scales(&p).kappa;
    let mean_inv_d = d.iter().map(|x| 1.0 / x).sum::<f64>() / d.len() as f64;
    let corrected = -(two_kappa + mean_inv_d);
    assert!((slope / corrected - 1.0).abs() < 0.05, "{slope} vs {corrected}");
    assert!((slope / -two_kappa - 1.0).abs() > 0.05, "{slope} vs {}", -two_kappa);

    let y_no_prefactor: Vec<f64> = d.iter().zip(&y).map(|(x, v)| v + x.ln()).collect();
    let (bare, _) = linear_fit(&d, &y_no_prefactor);
    assert!((bare / -two_kappa - 1.0).abs() < 0.05, "{bare} vs {}", -two_kappa);
}
