use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeOptions};

use super::sparse::SparseOp;
use super::state::OracleState;
use super::system::OracleSystem;

/// Largest dimension for which evolution uses the exact matrix exponential
/// of the superoperator instead of adaptive Runge–Kutta.
pub const EXACT_PROPAGATOR_MAX_DIM: usize = 16;
/// Top-Fock-level population that aborts an evolution.
pub const LEAK_TOL: f64 = 1e-4;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct Workspace {
    rho: Vec<Complex64>,
    rho_dag: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = vec![ZERO; dim * dim];
        Self { rho: z.clone(), rho_dag: z.clone(), a: z.clone(), b: z }
    }
}

fn adjoint_into(m: &[Complex64], dim: usize, out: &mut [Complex64]) {
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = m[i * dim + j].conj();
        }
    }
}

/// `out = -i(H_eff rho - rho H_eff^dag) + sum_k rate_k L_k rho L_k^dag`.
fn lindblad_into(h_eff: &SparseOp, jumps: &[(SparseOp, f64)], ws: &mut Workspace, out: &mut [Complex64]) {
    let dim = h_eff.dim();
    adjoint_into(&ws.rho, dim, &mut ws.rho_dag);
    h_eff.apply_dense(&ws.rho, &mut ws.a);
    for (o, a) in out.iter_mut().zip(&ws.a) {
        *o = Complex64::new(a.im, -a.re);
    }
    // rho H_eff^dag = (H_eff rho^dag)^dag
    h_eff.apply_dense(&ws.rho_dag, &mut ws.b);
    for i in 0..dim {
        for j in 0..dim {
            let v = ws.b[j * dim + i].conj();
            out[i * dim + j] += Complex64::new(-v.im, v.re);
        }
    }
    for (l, rate) in jumps {
        // L rho L^dag = L (L rho^dag)^dag
        l.apply_dense(&ws.rho_dag, &mut ws.a);
        adjoint_into(&ws.a, dim, &mut ws.b);
        l.apply_dense(&ws.b, &mut ws.a);
        for (o, a) in out.iter_mut().zip(&ws.a) {
            *o += a * rate;
        }
    }
}

fn to_real(rho: &[Complex64]) -> Vec<f64> {
    rho.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_real(y: &[f64], out: &mut [Complex64]) {
    for (o, p) in out.iter_mut().zip(y.chunks_exact(2)) {
        *o = Complex64::new(p[0], p[1]);
    }
}

/// Applies the Lindblad generator to an arbitrary (not necessarily Hermitian) operator.
pub fn apply_generator(sys: &OracleSystem, rho: &[Complex64]) -> Vec<Complex64> {
    let jumps: Vec<_> = sys.jumps().iter().map(|j| (j.op.clone(), j.rate)).collect();
    let mut ws = Workspace::new(sys.dim());
    ws.rho.copy_from_slice(rho);
    let mut out = vec![ZERO; rho.len()];
    lindblad_into(sys.effective_hamiltonian(), &jumps, &mut ws, &mut out);
    out
}

/// Generator as a `dim^2 x dim^2` matrix on row-major vectorised operators.
pub fn superoperator(sys: &OracleSystem) -> Result<DMatrix<Complex64>> {
    let dim = sys.dim();
    if dim > EXACT_PROPAGATOR_MAX_DIM {
        return Err(Error::DimensionOverflow { dim, cap: EXACT_PROPAGATOR_MAX_DIM });
    }
    let d2 = dim * dim;
    let mut s = DMatrix::zeros(d2, d2);
    let mut basis = vec![ZERO; d2];
    for k in 0..d2 {
        basis[k] = Complex64::new(1.0, 0.0);
        for (i, v) in apply_generator(sys, &basis).into_iter().enumerate() {
            s[(i, k)] = v;
        }
        basis[k] = ZERO;
    }
    Ok(s)
}

fn check_state(state: &OracleState, leak_rows: &[Vec<usize>], positivity: bool) -> Result<()> {
    let t = state.time();
    let trace = state.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceDrift { trace, t });
    }
    for (mode, rows) in leak_rows.iter().enumerate() {
        let population: f64 = rows.iter().map(|&i| state.population(i)).sum();
        if population > LEAK_TOL {
            return Err(Error::TruncationLeak { mode, population, t });
        }
    }
    if positivity {
        let min = state.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterOptions {
    pub tol: f64,
    /// Eigenvalue check at every sample time.
    pub check_positivity: bool,
    /// Use the matrix exponential when the dimension allows it.
    pub exact_when_small: bool,
}

impl MasterOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, check_positivity: true, exact_when_small: true }
    }
}

/// Evolves `state` to `t_end`.
pub fn evolve_master(sys: &OracleSystem, state: &OracleState, t_end: f64, tol: f64) -> Result<OracleState> {
    evolve_master_sampled(sys, state, &[t_end], MasterOptions::with_tol(tol), |_| Ok(()))
}

/// Evolves through increasing sample `times`, calling `observe` at each one.
pub fn evolve_master_sampled<F>(
    sys: &OracleSystem,
    state: &OracleState,
    times: &[f64],
    opts: MasterOptions,
    mut observe: F,
) -> Result<OracleState>
where
    F: FnMut(&OracleState) -> Result<()>,
{
    let dim = sys.dim();
    if state.dim() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: state.dim() });
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < state.time()) {
        return Err(Error::Invalid("sample times must be increasing and not before the state time".into()));
    }
    let leak_rows: Vec<Vec<usize>> = (0..sys.cutoffs().len()).map(|l| sys.top_level_indices(l)).collect();
    check_state(state, &leak_rows, false)?;

    if opts.exact_when_small && dim <= EXACT_PROPAGATOR_MAX_DIM {
        let s = superoperator(sys)?;
        let mut cur = state.clone();
        for &t in times {
            let dt = t - cur.time();
            let v = nalgebra::DVector::from_column_slice(cur.row_major());
            let next = (&s * Complex64::new(dt, 0.0)).exp() * v;
            cur = OracleState::from_row_major(dim, next.iter().copied().collect(), t)?;
            check_state(&cur, &leak_rows, opts.check_positivity)?;
            observe(&cur)?;
        }
        return Ok(cur);
    }

    let jumps: Vec<_> = sys.jumps().iter().map(|j| (j.op.clone(), j.rate)).collect();
    let h_eff = sys.effective_hamiltonian().clone();
    let mut ws = Workspace::new(dim);
    let mut out = vec![ZERO; dim * dim];
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        from_real(y, &mut ws.rho);
        lindblad_into(&h_eff, &jumps, &mut ws, &mut out);
        for (d, z) in dy.chunks_exact_mut(2).zip(&out) {
            d[0] = z.re;
            d[1] = z.im;
        }
    };
    let mut solver = Dopri5::new(rhs, state.time(), &to_real(state.row_major()), OdeOptions::with_tol(opts.tol));
    let mut buf = vec![ZERO; dim * dim];
    let mut cur = state.clone();
    for &t in times {
        while solver.t() < t {
            solver.step_until(t)?;
            from_real(solver.y(), &mut buf);
            let step_state = OracleState::from_row_major(dim, buf.clone(), solver.t())?;
            check_state(&step_state, &leak_rows, false)?;
        }
        from_real(solver.y(), &mut buf);
        cur = OracleState::from_row_major(dim, buf.clone(), t)?;
        check_state(&cur, &leak_rows, opts.check_positivity)?;
        observe(&cur)?;
    }
    Ok(cur)
}
