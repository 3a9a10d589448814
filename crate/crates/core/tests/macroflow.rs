use std::f64::consts::TAU;

use dicke_lab::macroflow::{
    classify_phase_with, eigenvalues, extract_limit_cycle, find_eta1, fixed_point_leading_eigenvalue, integrate_flow,
    integrate_flow_through, jacobian_at, lyapunov_spectrum, macro_rhs, normal_fixed_point, perturbed_start,
    ClassifyOptions, PhaseLabel, Trajectory,
};
use dicke_lab::model::{field_at_site, pack_state, packed_len, unpack_state, MacroState, ModelParams};
use dicke_lab::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_mode() -> ModelParams {
    ModelParams {
        n: 2,
        epsilon: 1.2,
        gamma1: 0.8,
        gamma2: 1.1,
        eta: 0.3,
        omega: vec![0.9, 1.4],
        kappa: vec![0.5, 0.7],
        lambda: vec![1.5, -0.6],
    }
}

fn good_cavity(eta: f64) -> ModelParams {
    ModelParams::single_mode(1.0, 1.0, 1.0, eta, 1.0, 1.0, 4.0)
}

/// The same vector field computed site by site: Fourier-synthesise each
/// site's Bloch data, apply the single-site Bloch equations under the pilot
/// field, and transform back.
fn site_space_rhs(x: &MacroState, p: &ModelParams) -> MacroState {
    let n = p.n;
    let w = |k: i64| Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
    let i = Complex64::i();
    let mut out = MacroState::zeros(n);
    for r in 0..n as i64 {
        let minus: Complex64 = (0..n).map(|l| x.s[l] * w(r * l as i64)).sum();
        let z: Complex64 = (0..n).map(|l| x.p[l] * w(r * l as i64)).sum();
        let phi = field_at_site(r, &x.alpha, &p.lambda);
        let d_minus = -(i * p.epsilon + p.gamma1) * minus + i * phi * z;
        let d_z = -p.gamma2 * (z - p.eta) + 4.0 * (phi * minus.conj()).im;
        for l in 0..n {
            out.s[l] += d_minus * w(-r * l as i64) / n as f64;
            out.p[l] += d_z * w(-r * l as i64) / n as f64;
        }
    }
    for l in 0..n {
        out.alpha[l] = -(i * p.omega[l] + p.kappa[l]) * x.alpha[l] + p.lambda[l] * x.s[l];
    }
    out
}

#[test]
fn rhs_matches_site_space_transcription() {
    let p = two_mode();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let v: Vec<f64> = (0..packed_len(2)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = unpack_state(&v, 2).unwrap();
        let a = pack_state(&macro_rhs(&x, &p)).unwrap();
        let b = pack_state(&site_space_rhs(&x, &p)).unwrap();
        for (u, w) in a.iter().zip(&b) {
            assert!((u - w).abs() < 1e-14, "{u} vs {w}");
        }
    }
}

#[test]
fn rhs_decouples_without_coupling() {
    let p = ModelParams::single_mode(1.3, 0.7, 0.9, 0.4, 2.0, 0.5, 0.0);
    let x = MacroState { alpha: vec![c(1.0, 0.0)], s: vec![c(0.3, -0.2)], p: vec![c(0.1, 0.0)] };
    let f = macro_rhs(&x, &p);
    assert!((f.alpha[0] - c(-0.5, -2.0)).norm() < 1e-15);
    assert!((f.s[0] - c(-0.7, -1.3) * x.s[0]).norm() < 1e-15);
    assert!((f.p[0].re + 0.9 * (0.1 - 0.4)).abs() < 1e-15);
}

#[test]
fn normal_fixed_point_layout() {
    let p = ModelParams { eta: 0.3, ..two_mode() };
    let x = normal_fixed_point(&p);
    assert_eq!(x.alpha, vec![c(0.0, 0.0); 2]);
    assert_eq!(x.s, vec![c(0.0, 0.0); 2]);
    assert_eq!(x.p, vec![c(0.3, 0.0), c(0.0, 0.0)]);
    assert_eq!(pack_state(&x).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0]);
    let zero = normal_fixed_point(&p.with_eta(0.0));
    assert_eq!(zero, MacroState::zeros(2));
}

#[test]
fn field_at_site_examples() {
    assert_eq!(field_at_site(3, &[c(0.0, 0.0)], &[1.0]), c(0.0, 0.0));
    for r in -3..3 {
        assert!((field_at_site(r, &[c(0.0, 1.0)], &[2.0]) - c(2.0, 0.0)).norm() < 1e-15);
    }
    let alpha = [c(0.3, -0.8), c(-1.1, 0.4)];
    for r in -4..4 {
        assert_eq!(field_at_site(r + 2, &alpha, &[0.7, 1.9]), field_at_site(r, &alpha, &[0.7, 1.9]));
    }
}

#[test]
fn fixed_point_trajectory_is_constant() {
    let p = two_mode();
    let traj = integrate_flow(&p, &normal_fixed_point(&p), 20.0, 1e-10).unwrap();
    let x0 = normal_fixed_point(&p);
    assert!(traj.states().all(|x| x.distance(&x0) < 1e-10));
}

#[test]
fn uncoupled_flow_matches_exponential_decay() {
    let tol = 1e-9;
    let p = two_mode().with_lambda(vec![0.0, 0.0]);
    let x0 = MacroState {
        alpha: vec![c(0.7, -0.2), c(-0.4, 0.5)],
        s: vec![c(0.1, 0.3), c(-0.2, 0.1)],
        p: vec![c(-0.6, 0.0), c(0.0, 0.0)],
    };
    let stops = [0.5, 1.7, 3.3, 5.0];
    let traj = integrate_flow_through(&p, &x0, &stops, tol).unwrap();
    let i = Complex64::i();
    for t in stops {
        let x = traj.state_at(t).unwrap();
        for l in 0..2 {
            let a = x0.alpha[l] * (-(i * p.omega[l] + p.kappa[l]) * t).exp();
            let s = x0.s[l] * (-(i * p.epsilon + p.gamma1) * t).exp();
            assert!((x.alpha[l] - a).norm() < 10.0 * tol);
            assert!((x.s[l] - s).norm() < 10.0 * tol);
        }
        let p0 = p.eta + (x0.p[0].re - p.eta) * (-p.gamma2 * t).exp();
        assert!((x.p[0].re - p0).abs() < 10.0 * tol);
    }
}

#[test]
fn flow_below_threshold_relaxes() {
    // half the threshold pump, away from critical slowing down
    let p = good_cavity(0.5 * 0.0625);
    let traj = integrate_flow(&p, &perturbed_start(&p, 1e-2), 50.0, 1e-10).unwrap();
    let d = traj.state_at(50.0).unwrap().distance(&normal_fixed_point(&p));
    assert!(d < 1e-4, "distance {d}");
}

#[test]
fn flow_is_contracting_in_the_normal_phase() {
    let p = two_mode().with_eta(0.0);
    let fp = normal_fixed_point(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let v: Vec<f64> = (0..packed_len(2)).map(|_| rng.random_range(-0.2..0.2)).collect();
        let traj = integrate_flow(&p, &unpack_state(&v, 2).unwrap(), 30.0, 1e-10).unwrap();
        let d: Vec<f64> = (10..=30).map(|t| traj.state_at(t as f64).unwrap().distance(&fp)).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-9), "{d:?}");
    }
}

#[test]
fn jacobian_is_block_diagonal_without_coupling() {
    let p = ModelParams::single_mode(1.3, 0.7, 0.9, 0.4, 2.0, 0.5, 0.0);
    let x = MacroState { alpha: vec![c(0.2, 0.1)], s: vec![c(-0.3, 0.4)], p: vec![c(0.5, 0.0)] };
    let j = jacobian_at(&x, &p);
    #[rustfmt::skip]
    let expected = nalgebra::DMatrix::<f64>::from_row_slice(5, 5, &[
        -0.5, 2.0, 0.0, 0.0, 0.0,
        -2.0, -0.5, 0.0, 0.0, 0.0,
        0.0, 0.0, -0.7, 1.3, 0.0,
        0.0, 0.0, -1.3, -0.7, 0.0,
        0.0, 0.0, 0.0, 0.0, -0.9,
    ]);
    assert!((j - expected).abs().max() < 1e-15);
}

#[test]
fn hopf_threshold_without_coupling_is_absent() {
    let err = find_eta1(&good_cavity(0.0).with_lambda(vec![0.0]), (-1.0, 1.0)).unwrap_err();
    assert!(matches!(err, Error::NoSignChange { .. }), "{err}");
}

#[test]
fn hopf_threshold_matches_resonant_formula() {
    // At resonance with gamma1 = kappa the threshold is kappa gamma1 / lambda^2.
    let p = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 3.0);
    let h = find_eta1(&p, (0.0, 1.0)).unwrap();
    assert!(h.eta1 > 0.0);
    assert!((h.eta1 - 1.0 / 9.0).abs() < 1e-6, "{}", h.eta1);
    assert!(h.crossing.im.abs() > 0.5);
    assert!(fixed_point_leading_eigenvalue(&p.with_eta(h.eta1 - 1e-3)).re < 0.0);
    assert!(fixed_point_leading_eigenvalue(&p.with_eta(h.eta1 + 1e-3)).re > 0.0);

    // trajectories switch from decay to sustained oscillation at the same value
    let amp = |eta: f64| {
        let q = p.with_eta(eta);
        let traj = integrate_flow(&q, &perturbed_start(&q, 1e-2), 600.0, 1e-9).unwrap();
        traj.state_at(600.0).unwrap().alpha[0].norm()
    };
    assert!(amp(h.eta1 - 1e-2) < 1e-6);
    assert!(amp(h.eta1 + 1e-2) > 1e-2);
}

#[test]
fn lyapunov_spectrum_of_linear_flow() {
    let p = ModelParams::single_mode(1.0, 0.7, 1.1, 0.2, 1.5, 0.3, 0.0);
    let spec = lyapunov_spectrum(&p, &perturbed_start(&p, 0.1), 5.0, 300.0).unwrap();
    let expected = [-0.3, -0.3, -0.7, -0.7, -1.1];
    for (a, b) in spec.iter().zip(expected) {
        assert!((a - b).abs() < 1e-3, "{spec:?}");
    }
}

#[test]
fn lyapunov_spectrum_in_the_normal_phase() {
    let p = good_cavity(0.03);
    let spec = lyapunov_spectrum(&p, &perturbed_start(&p, 1e-2), 50.0, 300.0).unwrap();
    let lead = fixed_point_leading_eigenvalue(&p).re;
    assert!(spec.iter().all(|&e| e < 0.0));
    assert!((spec[0] - lead).abs() < 0.05, "{} vs {lead}", spec[0]);
    let all = eigenvalues(&jacobian_at(&normal_fixed_point(&p), &p));
    assert_eq!(all.len(), 5);
}

#[test]
fn limit_cycle_from_synthetic_orbit() {
    let p = good_cavity(0.2);
    let times: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.01).collect();
    let states: Vec<MacroState> = times
        .iter()
        .map(|&t| MacroState {
            alpha: vec![Complex64::from_polar(0.5, -(2.0 * t + 0.3))],
            s: vec![Complex64::from_polar(0.2, -(2.0 * t - 0.4))],
            p: vec![c(0.07, 0.0)],
        })
        .collect();
    let traj = Trajectory::from_states(p, &times, &states).unwrap();
    let cyc = extract_limit_cycle(&traj).unwrap();
    assert!((cyc.nu - 2.0).abs() < 1e-6);
    assert_eq!(cyc.mode, 0);
    assert!((cyc.alpha_amp - 0.5).abs() < 1e-6);
    assert!((cyc.s_amp - 0.2).abs() < 1e-6);
    assert!((cyc.p0 - 0.07).abs() < 1e-6);
}

#[test]
fn limit_cycle_rejects_decaying_trajectory() {
    let p = good_cavity(0.02);
    let traj = integrate_flow(&p, &perturbed_start(&p, 1e-2), 300.0, 1e-9).unwrap();
    let err = extract_limit_cycle(&traj.segment(200.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::NotPeriodic(_)), "{err}");
}

#[test]
fn coherent_orbit_sits_at_threshold_inversion() {
    let p = good_cavity(0.2);
    let h = find_eta1(&p, (0.0, 1.0)).unwrap();
    let traj = integrate_flow(&p, &perturbed_start(&p, 1e-2), 400.0, 1e-9).unwrap();
    let cyc = extract_limit_cycle(&traj.segment(300.0).unwrap()).unwrap();
    assert!((cyc.p0 - h.eta1).abs() < 1e-2, "{} vs {}", cyc.p0, h.eta1);
}

#[test]
fn classification_examples() {
    let opts = ClassifyOptions { t_transient: 300.0, t_sample: 200.0, tol: 1e-9 };
    let normal = good_cavity(0.0);
    assert_eq!(classify_phase_with(&normal, &perturbed_start(&normal, 1e-2), opts).unwrap().label, PhaseLabel::Normal);
    let coh = good_cavity(0.08);
    let portrait = classify_phase_with(&coh, &perturbed_start(&coh, 1e-2), opts).unwrap();
    assert_eq!(portrait.label, PhaseLabel::Coherent);
    assert!(portrait.limit_cycle.unwrap().nu.abs() > 0.1);
    let chaos = ModelParams::single_mode(1.0, 1.0, 1.0, 0.7, 1.0, 10.0, 20.0);
    let opts = ClassifyOptions { t_transient: 100.0, t_sample: 300.0, tol: 1e-9 };
    let portrait = classify_phase_with(&chaos, &perturbed_start(&chaos, 1e-2), opts).unwrap();
    assert_eq!(portrait.label, PhaseLabel::Chaotic, "{:?}", portrait.notes);
    assert!(portrait.largest_lyapunov() > 0.02);
}

#[test]
fn invalid_parameters_are_named() {
    let bad = ModelParams::single_mode(1.0, 1.0, 3.0, 0.5, 1.0, 0.5, 1.0);
    assert!(bad.validate().unwrap_err().to_string().contains("gamma2 exceeds 2*gamma1"));
    let bad = ModelParams::single_mode(1.0, 1.0, 1.0, 1.5, 1.0, 0.5, 1.0);
    assert!(bad.validate().unwrap_err().to_string().contains("eta outside [-1,1]"));
    // boundary values are admissible
    assert!(ModelParams::single_mode(1.0, 1.0, 2.0, -1.0, 1.0, 0.5, 1.0).validate().is_ok());
    assert!(ModelParams::single_mode(1.0, 1.0, 1.0, 0.5, 1.0, 0.5, 1.0).validate().is_ok());
}
