use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::{pauli_x, pauli_y, pauli_z};
use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::sparse::SparseOp;

/// Default bound on the oracle Hilbert-space dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;
const SELF_CHECK_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sigma_minus() -> Matrix2<Complex64> {
    // excited state first: sigma_- maps column 0 to row 1
    Matrix2::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn sigma_plus() -> Matrix2<Complex64> {
    sigma_minus().adjoint()
}

/// Single-site operator labels usable in correlators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinComponent {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl SpinComponent {
    pub const ALL: [SpinComponent; 5] =
        [SpinComponent::X, SpinComponent::Y, SpinComponent::Z, SpinComponent::Plus, SpinComponent::Minus];

    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            SpinComponent::X => pauli_x(),
            SpinComponent::Y => pauli_y(),
            SpinComponent::Z => pauli_z(),
            SpinComponent::Plus => sigma_plus(),
            SpinComponent::Minus => sigma_minus(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomChannel {
    pub label: &'static str,
    pub op: Matrix2<Complex64>,
    pub rate: f64,
}

/// Single-atom Lindblad channels: decay `sigma_-`, pumping `sigma_+` and dephasing `sigma_z`.
///
/// The Heisenberg action of the channels plus `(epsilon/2) sigma_z` is
/// compared against the target atomic generator before returning.
pub fn assemble_atom_dissipator(params: &ModelParams) -> Result<Vec<AtomChannel>> {
    let (g1, g2, eta) = (params.gamma1, params.gamma2, params.eta);
    let channels = vec![
        AtomChannel { label: "sigma_minus", op: sigma_minus(), rate: g2 * (1.0 - eta) / 2.0 },
        AtomChannel { label: "sigma_plus", op: sigma_plus(), rate: g2 * (1.0 + eta) / 2.0 },
        AtomChannel { label: "sigma_z", op: pauli_z(), rate: (2.0 * g1 - g2) / 4.0 },
    ];
    for ch in &channels {
        if ch.rate < -SELF_CHECK_TOL {
            return Err(Error::Constraint(format!("negative rate {} for channel {}", ch.rate, ch.label)));
        }
    }
    let h = pauli_z() * c(params.epsilon / 2.0, 0.0);
    let gen = |x: Matrix2<Complex64>| {
        let mut out = (h * x - x * h) * c(0.0, 1.0);
        for ch in &channels {
            let l = ch.op;
            let ld = l.adjoint();
            out += (ld * x * l - (ld * l * x + x * ld * l) * c(0.5, 0.0)) * c(ch.rate, 0.0);
        }
        out
    };
    let eps = params.epsilon;
    let checks = [
        (sigma_plus(), sigma_plus() * c(-g1, eps)),
        (sigma_minus(), sigma_minus() * c(-g1, -eps)),
        (pauli_z(), (pauli_z() - Matrix2::identity() * c(eta, 0.0)) * c(-g2, 0.0)),
    ];
    for (x, expected) in checks {
        let dev = (gen(x) - expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > SELF_CHECK_TOL {
            return Err(Error::Invalid(format!("atomic dissipator self-check failed (deviation {dev:.3e})")));
        }
    }
    Ok(channels)
}

/// A jump operator with its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub label: String,
    pub op: SparseOp,
    pub rate: f64,
}

/// Finite system of `2N+1` atoms and `n` truncated modes.
///
/// Basis index is `atom_index * prod(cutoffs) + mode_index`; atom `j` (site
/// `j - N`) is bit `atoms - 1 - j` of `atom_index` with bit value 0 = excited;
/// mode 0 is the most significant digit of `mode_index`.
#[derive(Debug, Clone)]
pub struct OracleSystem {
    n_half: usize,
    cutoffs: Vec<usize>,
    params: ModelParams,
    hamiltonian: SparseOp,
    jumps: Vec<Jump>,
    h_eff: SparseOp,
}

impl OracleSystem {
    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn atoms(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &SparseOp {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// `H - (i/2) sum_k rate_k L_k^dag L_k`.
    pub fn effective_hamiltonian(&self) -> &SparseOp {
        &self.h_eff
    }

    fn mode_dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    fn mode_stride(&self, l: usize) -> usize {
        self.cutoffs[l + 1..].iter().product()
    }

    /// Qubit index of site `r` in `-N..=N`.
    pub fn qubit(&self, r: i64) -> Result<usize> {
        let j = r + self.n_half as i64;
        if j < 0 || j >= self.atoms() as i64 {
            return Err(Error::Invalid(format!("site {r} outside -{0}..={0}", self.n_half)));
        }
        Ok(j as usize)
    }

    /// Embeds a single-atom operator acting on qubit `j`.
    pub fn atom_operator(&self, j: usize, m: &Matrix2<Complex64>) -> SparseOp {
        let md = self.mode_dim();
        let shift = self.atoms() - 1 - j;
        let mut e = Vec::new();
        for col in 0..self.dim() {
            let atom = col / md;
            let b = (atom >> shift) & 1;
            for a in 0..2 {
                let v = m[(a, b)];
                if v != c(0.0, 0.0) {
                    let row_atom = (atom & !(1 << shift)) | (a << shift);
                    e.push((row_atom * md + col % md, col, v));
                }
            }
        }
        SparseOp::from_triplets(self.dim(), e)
    }

    pub fn site_operator(&self, r: i64, u: SpinComponent) -> Result<SparseOp> {
        Ok(self.atom_operator(self.qubit(r)?, &u.matrix()))
    }

    /// Truncated annihilation operator of mode `l`.
    pub fn annihilation(&self, l: usize) -> SparseOp {
        let stride = self.mode_stride(l);
        let cut = self.cutoffs[l];
        SparseOp::from_columns(self.dim(), |col| {
            let k = (col / stride) % cut;
            (k > 0).then(|| (col - stride, c((k as f64).sqrt(), 0.0)))
        })
    }

    pub fn number(&self, l: usize) -> SparseOp {
        let stride = self.mode_stride(l);
        let cut = self.cutoffs[l];
        SparseOp::from_columns(self.dim(), |col| {
            let k = (col / stride) % cut;
            (k > 0).then(|| (col, c(k as f64, 0.0)))
        })
    }

    /// Basis indices whose mode-`l` occupation is the highest kept Fock level.
    pub fn top_level_indices(&self, l: usize) -> Vec<usize> {
        let stride = self.mode_stride(l);
        let cut = self.cutoffs[l];
        (0..self.dim()).filter(|&i| (i / stride) % cut == cut - 1).collect()
    }

    /// Occupation of mode `l` at basis index `i`.
    pub fn fock_level(&self, l: usize, i: usize) -> usize {
        (i / self.mode_stride(l)) % self.cutoffs[l]
    }

    /// Atom configuration bits of basis index `i`.
    pub fn atom_index(&self, i: usize) -> usize {
        i / self.mode_dim()
    }

    /// Heisenberg-picture generator applied to a dense observable.
    pub fn heisenberg_action(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let h = self.hamiltonian.to_dense();
        let mut out = (&h * x - x * &h) * c(0.0, 1.0);
        for jump in &self.jumps {
            let l = jump.op.to_dense();
            let ld = l.adjoint();
            let ldl = &ld * &l;
            out += (&ld * x * &l - (&ldl * x + x * &ldl) * c(0.5, 0.0)) * c(jump.rate, 0.0);
        }
        out
    }
}

/// Mode cutoff large enough for coherent amplitude `alpha * sqrt(2N+1)`.
pub fn default_cutoff(n_half: usize, alpha: &[Complex64]) -> usize {
    let max_sq = alpha.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    (3.0 * (2 * n_half + 1) as f64 * max_sq + 10.0).ceil() as usize
}

/// Full Hamiltonian and jump list for `2N+1` atoms and the given mode cutoffs.
pub fn assemble_system(n_half: usize, cutoffs: &[usize], params: &ModelParams, cap: usize) -> Result<OracleSystem> {
    let params = params.clone().validate()?;
    if cutoffs.len() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, got: cutoffs.len() });
    }
    if let Some(&bad) = cutoffs.iter().find(|&&k| k < 2) {
        return Err(Error::Invalid(format!("mode cutoffs must be at least 2, got {bad}")));
    }
    let atoms = 2 * n_half + 1;
    let dim = if atoms >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        cutoffs.iter().try_fold(1usize << atoms, |acc, &k| acc.checked_mul(k)).unwrap_or(usize::MAX)
    };
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let mut sys = OracleSystem {
        n_half,
        cutoffs: cutoffs.to_vec(),
        params: params.clone(),
        hamiltonian: SparseOp::zero(dim),
        jumps: Vec::new(),
        h_eff: SparseOp::zero(dim),
    };

    let n = params.n;
    let mut h = SparseOp::zero(dim);
    for l in 0..n {
        h = h.add(&sys.number(l).scale(c(params.omega[l], 0.0)));
    }
    let channels = assemble_atom_dissipator(&params)?;
    let prefactor = 1.0 / (atoms as f64).sqrt();
    for j in 0..atoms {
        let r = j as i64 - n_half as i64;
        h = h.add(&sys.atom_operator(j, &pauli_z()).scale(c(params.epsilon / 2.0, 0.0)));
        let sm = sys.atom_operator(j, &sigma_minus());
        for l in 0..n {
            if params.lambda[l] == 0.0 {
                continue;
            }
            let m = (l as i64 * r).rem_euclid(n as i64);
            let phase = Complex64::from_polar(1.0, -TAU * m as f64 / n as f64);
            let term = sm.mul(&sys.annihilation(l).adjoint()).scale(phase * c(0.0, params.lambda[l] * prefactor));
            h = h.add(&term).add(&term.adjoint());
        }
        for ch in &channels {
            if ch.rate > 0.0 {
                sys.jumps.push(Jump {
                    label: format!("{}[{r}]", ch.label),
                    op: sys.atom_operator(j, &ch.op),
                    rate: ch.rate,
                });
            }
        }
    }
    for l in 0..n {
        if params.kappa[l] > 0.0 {
            sys.jumps.push(Jump { label: format!("a[{l}]"), op: sys.annihilation(l), rate: 2.0 * params.kappa[l] });
        }
    }
    let mut h_eff = h.clone();
    for jump in &sys.jumps {
        let ldl = jump.op.adjoint().mul(&jump.op);
        h_eff = h_eff.add(&ldl.scale(c(0.0, -0.5 * jump.rate)));
    }
    sys.hamiltonian = h;
    sys.h_eff = h_eff;
    Ok(sys)
}
