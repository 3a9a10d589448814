use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::model::{pack_unchecked, packed_len, unpack_into, MacroState, ModelParams};

/// Vector field of the classical flow.
///
/// ```text
/// d alpha_l/dt = -(i omega_l + kappa_l) alpha_l + lambda_l s_l
/// d s_l/dt     = -(i eps + gamma1) s_l + sum_m lambda_m p_[l-m] alpha_m
/// d p_l/dt     = -gamma2 (p_l - eta delta_l0)
///                - 2 sum_m lambda_m (conj(alpha_m) s_[l+m] + alpha_m conj(s_[m-l]))
/// ```
/// with indices taken mod n.
pub fn macro_rhs(state: &MacroState, params: &ModelParams) -> MacroState {
    let n = state.n();
    let mut out = MacroState::zeros(n);
    rhs_into(state, params, &mut out);
    out
}

pub(crate) fn rhs_into(x: &MacroState, params: &ModelParams, out: &mut MacroState) {
    let n = x.n();
    let i = Complex64::i();
    for l in 0..n {
        out.alpha[l] = -(i * params.omega[l] + params.kappa[l]) * x.alpha[l] + params.lambda[l] * x.s[l];

        let mut ds = -(i * params.epsilon + params.gamma1) * x.s[l];
        for m in 0..n {
            ds += params.lambda[m] * x.p[(l + n - m) % n] * x.alpha[m];
        }
        out.s[l] = ds;

        let source = if l == 0 { params.eta } else { 0.0 };
        let mut dp = -params.gamma2 * (x.p[l] - source);
        for m in 0..n {
            let term = x.alpha[m].conj() * x.s[(l + m) % n] + x.alpha[m] * x.s[(m + n - l) % n].conj();
            dp -= 2.0 * params.lambda[m] * term;
        }
        out.p[l] = dp;
    }
}

/// Exact linearisation of [`macro_rhs`] at `x` applied to the perturbation `dx`.
pub(crate) fn tangent_into(x: &MacroState, dx: &MacroState, params: &ModelParams, out: &mut MacroState) {
    let n = x.n();
    let i = Complex64::i();
    for l in 0..n {
        out.alpha[l] = -(i * params.omega[l] + params.kappa[l]) * dx.alpha[l] + params.lambda[l] * dx.s[l];

        let mut ds = -(i * params.epsilon + params.gamma1) * dx.s[l];
        for m in 0..n {
            let q = (l + n - m) % n;
            ds += params.lambda[m] * (dx.p[q] * x.alpha[m] + x.p[q] * dx.alpha[m]);
        }
        out.s[l] = ds;

        let mut dp = -params.gamma2 * dx.p[l];
        for m in 0..n {
            let a = (l + m) % n;
            let b = (m + n - l) % n;
            let term = dx.alpha[m].conj() * x.s[a]
                + x.alpha[m].conj() * dx.s[a]
                + dx.alpha[m] * x.s[b].conj()
                + x.alpha[m] * dx.s[b].conj();
            dp -= 2.0 * params.lambda[m] * term;
        }
        out.p[l] = dp;
    }
}

/// Packed-coordinate vector field, `dx/dt = F(x)`, evaluated with scratch buffers.
pub(crate) struct PackedField<'a> {
    pub params: &'a ModelParams,
    x: MacroState,
    dx: MacroState,
    buf: Vec<f64>,
}

impl<'a> PackedField<'a> {
    pub fn new(params: &'a ModelParams) -> Self {
        let n = params.n;
        Self { params, x: MacroState::zeros(n), dx: MacroState::zeros(n), buf: Vec::with_capacity(5 * n) }
    }

    pub fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        unpack_into(y, &mut self.x);
        rhs_into(&self.x, self.params, &mut self.dx);
        crate::model::pack_into(&self.dx, &mut self.buf);
        dy.copy_from_slice(&self.buf);
    }

    /// Evaluates the field at `y` and the tangent map on each of `tangents`
    /// (stored column after column).
    pub fn eval_with_tangents(&mut self, y: &[f64], tangents: &[f64], dy: &mut [f64], dtangents: &mut [f64]) {
        let d = y.len();
        self.eval(y, dy);
        let mut v = MacroState::zeros(self.params.n);
        let mut w = MacroState::zeros(self.params.n);
        for (col, dcol) in tangents.chunks(d).zip(dtangents.chunks_mut(d)) {
            unpack_into(col, &mut v);
            tangent_into(&self.x, &v, self.params, &mut w);
            crate::model::pack_into(&w, &mut self.buf);
            dcol.copy_from_slice(&self.buf);
        }
    }
}

/// The trivial stationary state: no field, no polarisation, uniform inversion `eta`.
pub fn normal_fixed_point(params: &ModelParams) -> MacroState {
    let mut x = MacroState::zeros(params.n);
    x.p[0] = Complex64::new(params.eta, 0.0);
    x
}

/// Jacobian of the packed vector field, assembled column by column from the
/// exact linearisation (the field is quadratic, so this is exact).
pub fn jacobian_at(state: &MacroState, params: &ModelParams) -> DMatrix<f64> {
    let n = state.n();
    let d = packed_len(n);
    let mut jac = DMatrix::zeros(d, d);
    let mut e = vec![0.0; d];
    let mut dx = MacroState::zeros(n);
    let mut out = MacroState::zeros(n);
    for j in 0..d {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        unpack_into(&e, &mut dx);
        tangent_into(state, &dx, params, &mut out);
        let col = pack_unchecked(&out);
        jac.set_column(j, &nalgebra::DVector::from_vec(col));
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_linear_decay() {
        let params = ModelParams::single_mode(1.3, 0.7, 0.9, 0.4, 2.0, 0.5, 0.0);
        let x = MacroState {
            alpha: vec![Complex64::new(1.0, 0.0)],
            s: vec![Complex64::new(0.2, -0.1)],
            p: vec![Complex64::new(0.1, 0.0)],
        };
        let f = macro_rhs(&x, &params);
        assert_eq!(f.alpha[0], -Complex64::new(0.5, 2.0));
        assert_eq!(f.s[0], -Complex64::new(0.7, 1.3) * x.s[0]);
        assert!((f.p[0] - Complex64::new(-0.9 * (0.1 - 0.4), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn fixed_point_values() {
        let params = ModelParams {
            n: 2,
            epsilon: 1.0,
            gamma1: 1.0,
            gamma2: 1.0,
            eta: 0.3,
            omega: vec![1.0, 2.0],
            kappa: vec![0.5, 0.5],
            lambda: vec![1.0, 0.5],
        };
        let x0 = normal_fixed_point(&params);
        assert_eq!(x0.p, vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(x0.alpha.iter().chain(&x0.s).all(|z| *z == Complex64::new(0.0, 0.0)));
        assert_eq!(macro_rhs(&x0, &params).norm(), 0.0);
        assert_eq!(normal_fixed_point(&params.with_eta(0.0)).norm(), 0.0);
    }

    #[test]
    fn jacobian_block_structure_without_coupling() {
        let params = ModelParams::single_mode(1.5, 0.8, 1.1, 0.2, 2.5, 0.3, 0.0);
        let x = MacroState {
            alpha: vec![Complex64::new(0.3, 0.1)],
            s: vec![Complex64::new(-0.2, 0.4)],
            p: vec![Complex64::new(0.5, 0.0)],
        };
        let j = jacobian_at(&x, &params);
        // alpha block: -(i omega + kappa) as a real 2x2
        assert_eq!(j[(0, 0)], -0.3);
        assert_eq!(j[(0, 1)], 2.5);
        assert_eq!(j[(1, 0)], -2.5);
        assert_eq!(j[(1, 1)], -0.3);
        assert_eq!(j[(2, 2)], -0.8);
        assert_eq!(j[(2, 3)], 1.5);
        assert_eq!(j[(3, 2)], -1.5);
        assert_eq!(j[(4, 4)], -1.1);
        let off: f64 = (0..5)
            .flat_map(|r| (0..5).map(move |c| (r, c)))
            .filter(|&(r, c)| r / 2 != c / 2)
            .map(|(r, c)| j[(r, c)].abs())
            .sum();
        assert_eq!(off, 0.0);
    }
}
