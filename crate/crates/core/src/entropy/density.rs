use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::microdyn::BlochVector;

/// Slack allowed on `|theta| <= 1` before an input is rejected as non-physical.
pub const BLOCH_NORM_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

/// `diag(1, -1)`: the excited state is the first basis vector.
pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleSiteState {
    pub rho: Matrix2<Complex64>,
    pub bloch: BlochVector,
}

impl SingleSiteState {
    /// `Tr(rho sigma_u)` for `u = x, y, z`.
    pub fn expectations(&self) -> BlochVector {
        let e = |s: Matrix2<Complex64>| (self.rho * s).trace().re;
        BlochVector::new(e(pauli_x()), e(pauli_y()), e(pauli_z()))
    }

    pub fn entropy(&self) -> f64 {
        binary_entropy((1.0 + self.bloch.norm()) / 2.0)
    }
}

/// `rho = (I + theta . sigma) / 2`, clipping `|theta|` to one when it overshoots
/// by no more than [`BLOCH_NORM_TOL`].
pub fn bloch_density_matrix(theta: &BlochVector) -> Result<SingleSiteState> {
    let norm = theta.norm();
    if norm > 1.0 + BLOCH_NORM_TOL || !norm.is_finite() {
        return Err(Error::BlochNorm { norm });
    }
    let bloch = if norm > 1.0 { BlochVector(theta.0 / norm) } else { *theta };
    let (x, y, z) = (bloch.x(), bloch.y(), bloch.z());
    let rho = Matrix2::new(c(1.0 + z, 0.0), c(x, -y), c(x, y), c(1.0 - z, 0.0)) * c(0.5, 0.0);
    Ok(SingleSiteState { rho, bloch })
}

/// `-p ln p - (1-p) ln(1-p)` with `0 ln 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    xlnx_neg(p) + xlnx_neg(1.0 - p)
}

fn xlnx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Density matrix of a finite block of sites. Site `sites[j]` is tensor
/// factor `j`, with factor 0 the most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    sites: Vec<i64>,
    rho: DMatrix<Complex64>,
}

impl BlockState {
    pub fn new(sites: Vec<i64>, rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << sites.len();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::LengthMismatch { expected: dim, got: rho.nrows() });
        }
        let trace = rho.trace();
        if (trace - c(1.0, 0.0)).norm() > HERMITIAN_TOL * dim as f64 {
            return Err(Error::Invalid(format!("block density matrix has trace {trace}")));
        }
        let asym = (&rho - rho.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::Invalid(format!("block density matrix is not Hermitian (deviation {asym:.3e})")));
        }
        let min = min_eigenvalue(&rho);
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { sites, rho })
    }

    /// Tensor product of single-site states in the given site order.
    pub fn product(sites: Vec<i64>, factors: &[SingleSiteState]) -> Result<Self> {
        if sites.len() != factors.len() {
            return Err(Error::LengthMismatch { expected: sites.len(), got: factors.len() });
        }
        let mut rho = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for f in factors {
            let m = DMatrix::from_iterator(2, 2, f.rho.iter().copied());
            rho = rho.kronecker(&m);
        }
        Self::new(sites, rho)
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Reduced state of tensor factor `j`.
    pub fn marginal(&self, j: usize) -> Matrix2<Complex64> {
        single_site_trace(&self.rho, self.sites.len(), j)
    }
}

/// Partial trace of a `K`-qubit operator onto qubit `j`.
pub fn single_site_trace(m: &DMatrix<Complex64>, k: usize, j: usize) -> Matrix2<Complex64> {
    let shift = k - 1 - j;
    let mut out = Matrix2::zeros();
    for a in 0..m.nrows() {
        let rest = a & !(1 << shift);
        for bit in 0..2 {
            let b = rest | (bit << shift);
            out[((a >> shift) & 1, bit)] += m[(a, b)];
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `-k Tr(rho ln rho)` in units of `k = 1`.
pub fn von_neumann_entropy(block: &BlockState) -> Result<f64> {
    von_neumann_entropy_with_unit(block, 1.0)
}

pub fn von_neumann_entropy_with_unit(block: &BlockState, k: f64) -> Result<f64> {
    let eig = block.rho.clone().symmetric_eigenvalues();
    let mut s = 0.0;
    for &l in eig.iter() {
        if l < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: l });
        }
        s += xlnx_neg(l);
    }
    Ok(k * s.max(0.0))
}
