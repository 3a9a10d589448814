use std::f64::consts::LN_2;

use dicke_lab::entropy::{
    binary_entropy, bloch_density_matrix, entropy_density, max_entropy_audit, von_neumann_entropy,
    von_neumann_entropy_with_unit, AuditOptions, BlockState, PeriodicProductState,
};
use dicke_lab::microdyn::BlochVector;
use dicke_lab::Error;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn one_site(theta: BlochVector) -> BlockState {
    let s = bloch_density_matrix(&theta).unwrap();
    BlockState::product(vec![0], &[s]).unwrap()
}

#[test]
fn density_matrix_examples() {
    let half = bloch_density_matrix(&BlochVector::new(0.0, 0.0, 0.0)).unwrap();
    assert!((half.rho - Matrix2::identity() * c(0.5)).camax() < 1e-15);
    let up = bloch_density_matrix(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
    assert!((up.rho - Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0))).camax() < 1e-15);
    let eta = 0.37;
    let st = bloch_density_matrix(&BlochVector::new(0.0, 0.0, eta)).unwrap();
    assert!((st.rho[(0, 0)].re - (1.0 + eta) / 2.0).abs() < 1e-15);
    assert!((st.rho[(1, 1)].re - (1.0 - eta) / 2.0).abs() < 1e-15);
    let back = st.expectations();
    assert!(back.distance(&BlochVector::new(0.0, 0.0, eta)) < 1e-15);
}

#[test]
fn density_matrix_rejects_long_vectors() {
    let err = bloch_density_matrix(&BlochVector::new(0.8, 0.7, 0.1)).unwrap_err();
    assert!(matches!(err, Error::BlochNorm { .. }), "{err}");
}

#[test]
fn entropy_examples() {
    assert!((von_neumann_entropy(&one_site(BlochVector::new(0.0, 0.0, 0.0))).unwrap() - LN_2).abs() < 1e-14);
    assert!(von_neumann_entropy(&one_site(BlochVector::new(0.6, 0.0, 0.8))).unwrap().abs() < 1e-12);
    let s = von_neumann_entropy(&one_site(BlochVector::new(0.0, 0.0, 0.6))).unwrap();
    let expected = -(0.8f64 * 0.8f64.ln() + 0.2 * 0.2f64.ln());
    assert!((s - expected).abs() < 1e-14);
    assert!((s - 0.5004).abs() < 1e-4);
    assert!((binary_entropy(0.8) - expected).abs() < 1e-15);
    let in_bits = von_neumann_entropy_with_unit(&one_site(BlochVector::new(0.0, 0.0, 0.0)), 1.0 / LN_2).unwrap();
    assert!((in_bits - 1.0).abs() < 1e-14);
}

#[test]
fn entropy_density_examples() {
    let mixed = PeriodicProductState::new(vec![BlochVector::new(0.0, 0.0, 0.0); 3]).unwrap();
    assert!((entropy_density(&mixed) - LN_2).abs() < 1e-14);
    let eta = 0.45;
    let normal = PeriodicProductState::new(vec![BlochVector::new(0.0, 0.0, eta)]).unwrap();
    assert!((entropy_density(&normal) - binary_entropy((1.0 + eta) / 2.0)).abs() < 1e-14);

    // a rotating coherent family has the same density at every time
    let (amp, z, nu) = (0.3, 0.0625, 1.7);
    let at = |t: f64| {
        let fam = (0..2)
            .map(|r| BlochVector::from_minus(Complex64::from_polar(amp, std::f64::consts::PI * r as f64 - nu * t), z))
            .collect();
        PeriodicProductState::new(fam).unwrap()
    };
    let norm = (z * z + 4.0 * amp * amp).sqrt();
    let expected = binary_entropy((1.0 + norm) / 2.0);
    for t in [0.0, 0.4, 2.9, 11.0] {
        assert!((entropy_density(&at(t)) - expected).abs() < 1e-13);
    }
}

#[test]
fn product_entropy_is_additive_across_blocks() {
    let state =
        PeriodicProductState::new(vec![BlochVector::new(0.2, -0.1, 0.5), BlochVector::new(0.0, 0.3, -0.4)]).unwrap();
    let density = entropy_density(&state);
    for periods in 1..=3 {
        let block = state.block(periods).unwrap();
        let s = von_neumann_entropy(&block).unwrap();
        assert!((s / block.len() as f64 - density).abs() < 1e-12, "periods {periods}");
    }
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

#[test]
fn entropy_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let state =
        PeriodicProductState::new(vec![BlochVector::new(0.3, 0.1, 0.4), BlochVector::new(-0.5, 0.2, 0.1)]).unwrap();
    let block = state.block(1).unwrap();
    let s0 = von_neumann_entropy(&block).unwrap();
    for _ in 0..20 {
        let u = random_unitary(4, &mut rng);
        let rotated = &u * block.rho() * u.adjoint();
        let rotated = BlockState::new(block.sites().to_vec(), (&rotated + rotated.adjoint()) * c(0.5)).unwrap();
        assert!((von_neumann_entropy(&rotated).unwrap() - s0).abs() < 1e-10);
    }
}

#[test]
fn audit_of_the_maximally_mixed_chain() {
    let target = PeriodicProductState::new(vec![BlochVector::new(0.0, 0.0, 0.0)]).unwrap();
    let rep = max_entropy_audit(&target, AuditOptions { trials: 1000, block_size: 2, seed: 17 }).unwrap();
    assert!(rep.pass);
    assert!((rep.target_density - LN_2).abs() < 1e-14);
    for t in &rep.samples {
        assert!(t.marginal_deviation < 1e-10);
        if t.amplitude > 1e-6 {
            assert!(t.density < LN_2, "trial {} density {}", t.index, t.density);
        }
    }
}

#[test]
fn audit_is_reproducible_from_its_seed() {
    let target =
        PeriodicProductState::new(vec![BlochVector::new(0.1, 0.0, 0.3), BlochVector::new(-0.1, 0.0, 0.3)]).unwrap();
    let opts = AuditOptions { trials: 50, block_size: 1, seed: 99 };
    let a = max_entropy_audit(&target, opts).unwrap();
    let b = max_entropy_audit(&target, opts).unwrap();
    let dens = |r: &dicke_lab::entropy::AuditReport| r.samples.iter().map(|t| t.density).collect::<Vec<_>>();
    assert_eq!(dens(&a), dens(&b));
    assert_eq!(a.seed, 99);
}

#[test]
fn audit_rejects_oversized_blocks() {
    let target = PeriodicProductState::new(vec![BlochVector::new(0.0, 0.0, 0.2)]).unwrap();
    assert!(max_entropy_audit(&target, AuditOptions { trials: 1, block_size: 4, seed: 0 }).is_err());
}
