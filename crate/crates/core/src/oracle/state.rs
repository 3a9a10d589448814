use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::bloch_density_matrix;
use crate::error::{Error, Result};
use crate::microdyn::BlochVector;

use super::system::{sigma_minus, OracleSystem, SpinComponent};

/// Density matrix of the finite system at a given time, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    dim: usize,
    rho: Vec<Complex64>,
    time: f64,
}

impl OracleState {
    pub fn from_row_major(dim: usize, rho: Vec<Complex64>, time: f64) -> Result<Self> {
        if rho.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, got: rho.len() });
        }
        Ok(Self { dim, rho, time })
    }

    pub fn from_matrix(rho: &DMatrix<Complex64>, time: f64) -> Result<Self> {
        let dim = rho.nrows();
        Self::from_row_major(dim, rho.transpose().iter().copied().collect(), time)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn row_major(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.rho)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.rho[i * self.dim + i].re).sum()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.rho[i * self.dim + i].re
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.rho[i * d + j] - self.rho[j * d + i].conj()).norm());
            }
        }
        dev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        crate::entropy::min_eigenvalue(&h)
    }
}

fn coherent_amplitudes(beta: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(cutoff);
    let mut cur = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for k in 0..cutoff {
        v.push(cur);
        cur *= beta / ((k + 1) as f64).sqrt();
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

/// Product of identical atoms with Bloch vector `atom_bloch` and truncated
/// coherent modes of amplitude `alpha_l * sqrt(2N+1)`.
pub fn build_initial_state(sys: &OracleSystem, atom_bloch: &BlochVector, alpha: &[Complex64]) -> Result<OracleState> {
    let n = sys.cutoffs().len();
    if alpha.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: alpha.len() });
    }
    let atoms = sys.atoms();
    let scale = (atoms as f64).sqrt();
    let mut modes = vec![Complex64::new(1.0, 0.0)];
    for (l, (&a, &cut)) in alpha.iter().zip(sys.cutoffs()).enumerate() {
        let mean_photons = (a * scale).norm_sqr();
        if mean_photons > cut as f64 / 3.0 {
            return Err(Error::CutoffTooSmall { mode: l, cutoff: cut, mean_photons });
        }
        let amps = coherent_amplitudes(a * scale, cut);
        modes = modes.iter().flat_map(|m| amps.iter().map(move |c| m * c)).collect();
    }
    let site = bloch_density_matrix(atom_bloch)?.rho;
    let mut atom_rho = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let site = DMatrix::from_iterator(2, 2, site.iter().copied());
    for _ in 0..atoms {
        atom_rho = atom_rho.kronecker(&site);
    }
    let md = modes.len();
    let dim = sys.dim();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        let (ai, mi) = (i / md, i % md);
        for j in 0..dim {
            let (aj, mj) = (j / md, j % md);
            rho[i * dim + j] = atom_rho[(ai, aj)] * modes[mi] * modes[mj].conj();
        }
    }
    OracleState::from_row_major(dim, rho, 0.0)
}

/// Expectations of the intensive observables at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacroExpectations {
    pub time: f64,
    pub s: Vec<Complex64>,
    pub p: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
    /// `<a_l^dag a_l> / (2N+1)`.
    pub scaled_photons: Vec<f64>,
}

pub fn macro_expectations(sys: &OracleSystem, state: &OracleState) -> MacroExpectations {
    let n = sys.cutoffs().len();
    let atoms = sys.atoms();
    let nh = sys.n_half() as i64;
    let rho = state.row_major();
    let sm: Vec<Complex64> = (0..atoms).map(|j| sys.atom_operator(j, &sigma_minus()).trace_with(rho)).collect();
    let sz: Vec<Complex64> =
        (0..atoms).map(|j| sys.atom_operator(j, &SpinComponent::Z.matrix()).trace_with(rho)).collect();
    let fourier = |v: &[Complex64], l: usize| -> Complex64 {
        let sum: Complex64 = v
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let m = (l as i64 * (j as i64 - nh)).rem_euclid(n as i64);
                x * Complex64::from_polar(1.0, -TAU * m as f64 / n as f64)
            })
            .sum();
        sum / atoms as f64
    };
    MacroExpectations {
        time: state.time(),
        s: (0..n).map(|l| fourier(&sm, l)).collect(),
        p: (0..n).map(|l| fourier(&sz, l)).collect(),
        alpha: (0..n).map(|l| sys.annihilation(l).trace_with(rho) / (atoms as f64).sqrt()).collect(),
        scaled_photons: (0..n).map(|l| sys.number(l).trace_with(rho).re / atoms as f64).collect(),
    }
}

/// `<A B> - <A><B>` for spin components on two distinct sites.
pub fn connected_correlator(
    sys: &OracleSystem,
    state: &OracleState,
    (r, u): (i64, SpinComponent),
    (r2, v): (i64, SpinComponent),
) -> Result<Complex64> {
    if r == r2 {
        return Err(Error::SameSite(r));
    }
    let a = sys.site_operator(r, u)?;
    let b = sys.site_operator(r2, v)?;
    let rho = state.row_major();
    let mut b_rho = vec![Complex64::new(0.0, 0.0); rho.len()];
    b.apply_dense(rho, &mut b_rho);
    Ok(a.trace_with(&b_rho) - a.trace_with(rho) * b.trace_with(rho))
}
