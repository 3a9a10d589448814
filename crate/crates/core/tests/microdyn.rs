use dicke_lab::macroflow::{extract_limit_cycle, integrate_flow, normal_fixed_point, perturbed_start};
use dicke_lab::microdyn::{
    asymptotic_theta, closed_form_state, evolve_site, generator_for_field, integrate_theta, propagate_affine,
    site_series, theta_fourier, AsymptoticPhase, BlochAffine, BlochVector, PilotField,
};
use dicke_lab::model::ModelParams;
use dicke_lab::Error;
use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params() -> ModelParams {
    ModelParams::single_mode(1.3, 0.8, 1.2, 0.35, 1.0, 0.6, 1.4)
}

fn wobbling_field(rng: &mut ChaCha8Rng) -> PilotField<'static> {
    let a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let w = rng.random_range(0.2..2.0);
    PilotField::from_modes(vec![rng.random_range(0.5..2.0)], move |t| {
        vec![a * Complex64::from_polar(1.0, -w * t) + b * (1.3 * t).cos()]
    })
}

#[test]
fn generator_without_field_decouples() {
    let p = params();
    let b = generator_for_field(c(0.0, 0.0), &p);
    let expected = Matrix3::new(-0.8, -1.3, 0.0, 1.3, -0.8, 0.0, 0.0, 0.0, -1.2);
    assert!((b - expected).abs().max() < 1e-15);
}

#[test]
fn generator_reproduces_complex_component_form() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let phi = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let v = BlochVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let d = BlochVector(generator_for_field(phi, &p) * v.0);
        let i = Complex64::i();
        let d_minus = -(i * p.epsilon + p.gamma1) * v.minus() + i * phi * v.z();
        let d_z = -p.gamma2 * v.z() + 4.0 * (phi * v.minus().conj()).im;
        assert!((d.minus() - d_minus).norm() < 1e-14);
        assert!((d.z() - d_z).abs() < 1e-14);
    }
}

#[test]
fn generator_symmetric_part_is_dissipative() {
    let p = params();
    let gamma = p.bloch_decay_rate();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let phi = c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let b = generator_for_field(phi, &p);
        let top = SymmetricEigen::new((b + b.transpose()) * 0.5).eigenvalues.max();
        assert!(top <= -gamma + 1e-10, "{top}");
    }
}

#[test]
fn zero_interval_propagator_is_identity() {
    let field = PilotField::constant(vec![1.0], vec![c(0.4, 0.2)]);
    let g = propagate_affine(2, 3.0, 3.0, &field, &params(), 1e-10).unwrap();
    assert_eq!(g.green, Matrix3::identity());
    assert_eq!(g.drift, Vector3::zeros());
}

#[test]
fn free_propagator_closed_form() {
    let p = params();
    let field = PilotField::constant(vec![1.0], vec![c(0.0, 0.0)]);
    let (t0, t1) = (0.7, 3.2);
    let g = propagate_affine(0, t0, t1, &field, &p, 1e-11).unwrap();
    let dt = t1 - t0;
    let (s, co) = (p.epsilon * dt).sin_cos();
    let e1 = (-p.gamma1 * dt).exp();
    let e2 = (-p.gamma2 * dt).exp();
    let green = Matrix3::new(e1 * co, -e1 * s, 0.0, e1 * s, e1 * co, 0.0, 0.0, 0.0, e2);
    assert!((g.green - green).abs().max() < 1e-9);
    assert!((g.drift - Vector3::new(0.0, 0.0, p.eta * (1.0 - e2))).abs().max() < 1e-9);
}

#[test]
fn propagator_cocycle() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let field = wobbling_field(&mut rng);
        let t0 = rng.random_range(0.0..2.0);
        let u = t0 + rng.random_range(0.0..3.0);
        let t1 = u + rng.random_range(0.0..3.0);
        let r = rng.random_range(-3..3);
        let whole = propagate_affine(r, t0, t1, &field, &p, 1e-11).unwrap();
        let split = propagate_affine(r, t0, u, &field, &p, 1e-11)
            .unwrap()
            .then(&propagate_affine(r, u, t1, &field, &p, 1e-11).unwrap());
        assert!((whole.green - split.green).abs().max() < 1e-6);
        assert!((whole.drift - split.drift).abs().max() < 1e-6);
    }
}

#[test]
fn evolve_site_examples() {
    let v = BlochVector::new(0.3, -0.2, 0.5);
    assert_eq!(evolve_site(&v, &BlochAffine::identity(0, 1.0)), v);

    let p = params();
    let field = PilotField::constant(vec![1.0], vec![c(0.0, 0.0)]);
    let g = propagate_affine(0, 0.0, 40.0, &field, &p, 1e-10).unwrap();
    let end = evolve_site(&BlochVector::new(0.0, 0.0, 0.0), &g);
    assert!(end.distance(&BlochVector::new(0.0, 0.0, p.eta)) < 1e-12);
}

#[test]
fn evolutions_contract_at_the_decay_rate() {
    let p = params();
    let gamma = p.bloch_decay_rate();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..30 {
        let field = wobbling_field(&mut rng);
        let dt = rng.random_range(0.1..6.0);
        let g = propagate_affine(1, 0.5, 0.5 + dt, &field, &p, 1e-11).unwrap();
        let a = BlochVector::new(0.5, 0.5, -0.5);
        let b = BlochVector::new(-0.2, 0.1, 0.9);
        let shrink = evolve_site(&a, &g).distance(&evolve_site(&b, &g)) / a.distance(&b);
        assert!(shrink <= (-gamma * dt).exp() + 1e-9, "{shrink}");
    }
}

#[test]
fn site_series_agrees_with_direct_integration() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let field = wobbling_field(&mut rng);
    let theta0 = BlochVector::new(0.1, 0.6, -0.3);
    let times = [0.5, 1.0, 2.5, 4.0];
    let series = site_series(2, theta0, 0.0, &times, &field, &p, 1e-11).unwrap();
    for (v, &t) in series.iter().zip(&times) {
        let direct = integrate_theta(2, theta0, 0.0, t, &field, &p, 1e-11).unwrap();
        assert!(v.distance(&direct) < 1e-8);
    }
}

#[test]
fn normal_phase_asymptotics() {
    let p = ModelParams::single_mode(1.0, 1.0, 1.0, 0.4, 1.0, 1.0, 0.5);
    let traj = integrate_flow(&p, &normal_fixed_point(&p), 40.0, 1e-10).unwrap();
    let target = BlochVector::new(0.0, 0.0, 0.4);
    for r in [-2, 0, 5] {
        assert!(theta_fourier(r, 30.0, &traj).unwrap().distance(&target) < 1e-12);
        assert!(asymptotic_theta(r, 30.0, &traj).unwrap().distance(&target) < 1e-8);
    }
    let fam = closed_form_state(AsymptoticPhase::Normal, &p, None, 7.0).unwrap();
    assert_eq!(fam, vec![target]);
}

#[test]
fn asymptotic_window_is_enforced() {
    let p = params();
    let traj = integrate_flow(&p, &normal_fixed_point(&p), 40.0, 1e-10).unwrap();
    let err = asymptotic_theta(0, 5.0, &traj).unwrap_err();
    assert!(matches!(err, Error::InsufficientHorizon { .. }), "{err}");
}

#[test]
fn single_mode_fourier_route_is_site_independent() {
    let p = ModelParams::single_mode(1.0, 1.0, 1.0, 0.3, 1.0, 1.0, 4.0);
    let traj = integrate_flow(&p, &perturbed_start(&p, 1e-2), 60.0, 1e-10).unwrap();
    let x = traj.state_at(50.0).unwrap();
    for r in -3..4 {
        let th = theta_fourier(r, 50.0, &traj).unwrap();
        assert!((th.minus() - x.s[0]).norm() < 1e-15);
        assert_eq!(th.z(), x.p[0].re);
    }
}

#[test]
fn coherent_phase_asymptotics() {
    let p = ModelParams {
        n: 2,
        epsilon: 1.0,
        gamma1: 1.0,
        gamma2: 1.0,
        eta: 0.3,
        omega: vec![1.0, 1.0],
        kappa: vec![1.0, 1.0],
        lambda: vec![2.0, 4.0],
    };
    let traj = integrate_flow(&p, &perturbed_start(&p, 1e-2), 300.0, 1e-10).unwrap();
    let cyc = extract_limit_cycle(&traj.segment(200.0).unwrap()).unwrap();
    assert_eq!(cyc.mode, 1);
    let t = 230.0;
    let fam = closed_form_state(AsymptoticPhase::Coherent, &p, Some(&cyc), t).unwrap();
    let later = closed_form_state(AsymptoticPhase::Coherent, &p, Some(&cyc), t + cyc.period()).unwrap();
    for (r, v) in fam.iter().enumerate() {
        assert!(v.distance(&later[r]) < 1e-12);
        let a = asymptotic_theta(r as i64, t, &traj).unwrap();
        assert!(a.distance(v) < 1e-3, "site {r}: {}", a.distance(v));
        assert!(a.norm() <= 1.0 + 1e-9);
    }
    let amps: Vec<f64> =
        (0..40).map(|k| asymptotic_theta(0, 210.0 + k as f64, &traj).unwrap().minus().norm()).collect();
    let spread = amps.iter().copied().fold(f64::MIN, f64::max) - amps.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread < 1e-4, "{spread}");
}
