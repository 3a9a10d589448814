use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the conjugation symmetry `p_l = conj(p_{n-l})` when packing.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A point of the macroscopic phase space: field amplitudes `alpha`,
/// polarisations `s` and inversion Fourier components `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    pub alpha: Vec<Complex64>,
    pub s: Vec<Complex64>,
    pub p: Vec<Complex64>,
}

impl MacroState {
    pub fn zeros(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self { alpha: z.clone(), s: z.clone(), p: z }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// Largest deviation from `p_0` real and `p_l = conj(p_{n-l})`.
    pub fn symmetry_deviation(&self) -> f64 {
        let n = self.p.len();
        let mut dev = self.p.first().map_or(0.0, |p0| p0.im.abs());
        for l in 1..n {
            dev = dev.max((self.p[l] - self.p[n - l].conj()).norm());
        }
        dev
    }

    /// Rotates `alpha` and `s` by the common phase `exp(i theta)`; `p` is untouched.
    pub fn rephase(&self, theta: f64) -> Self {
        let u = Complex64::from_polar(1.0, theta);
        Self {
            alpha: self.alpha.iter().map(|a| a * u).collect(),
            s: self.s.iter().map(|s| s * u).collect(),
            p: self.p.clone(),
        }
    }

    /// Euclidean distance in the packed coordinates.
    pub fn distance(&self, other: &MacroState) -> f64 {
        let a = pack_unchecked(self);
        let b = pack_unchecked(other);
        a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    pub fn norm(&self) -> f64 {
        pack_unchecked(self).iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Number of real coordinates for `n` modes.
pub fn packed_len(n: usize) -> usize {
    5 * n
}

/// Packs a state into `5n` reals.
///
/// Layout: `[Re a_0, Im a_0, .., Re s_0, Im s_0, .., p_0, Re p_1, Im p_1, ..]`
/// where the `p` block holds `p_0`, then `(Re p_l, Im p_l)` for `0 < l < n - l`,
/// then `p_{n/2}` (real) when `n` is even. The remaining `p_l` are conjugates.
pub fn pack_state(state: &MacroState) -> Result<Vec<f64>> {
    let n = state.alpha.len();
    if state.s.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: state.s.len() });
    }
    if state.p.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: state.p.len() });
    }
    let deviation = state.symmetry_deviation();
    if deviation > SYMMETRY_TOL {
        return Err(Error::Symmetry { deviation });
    }
    Ok(pack_unchecked(state))
}

/// Packs without checking symmetry; the dependent half of `p` is ignored.
pub(crate) fn pack_unchecked(state: &MacroState) -> Vec<f64> {
    let n = state.alpha.len();
    let mut out = Vec::with_capacity(5 * n);
    pack_into(state, &mut out);
    out
}

pub(crate) fn pack_into(state: &MacroState, out: &mut Vec<f64>) {
    let n = state.alpha.len();
    out.clear();
    for a in &state.alpha {
        out.push(a.re);
        out.push(a.im);
    }
    for s in &state.s {
        out.push(s.re);
        out.push(s.im);
    }
    out.push(state.p[0].re);
    let mut l = 1;
    while l < n - l {
        out.push(state.p[l].re);
        out.push(state.p[l].im);
        l += 1;
    }
    if n.is_multiple_of(2) && n > 1 {
        out.push(state.p[n / 2].re);
    }
}

/// Inverse of [`pack_state`]; the dependent half of `p` is rebuilt by conjugation.
pub fn unpack_state(x: &[f64], n: usize) -> Result<MacroState> {
    if x.len() != packed_len(n) || n == 0 {
        return Err(Error::LengthMismatch { expected: packed_len(n), got: x.len() });
    }
    let mut state = MacroState::zeros(n);
    unpack_into(x, &mut state);
    Ok(state)
}

pub(crate) fn unpack_into(x: &[f64], state: &mut MacroState) {
    let n = state.alpha.len();
    for l in 0..n {
        state.alpha[l] = Complex64::new(x[2 * l], x[2 * l + 1]);
        state.s[l] = Complex64::new(x[2 * n + 2 * l], x[2 * n + 2 * l + 1]);
    }
    let mut k = 4 * n;
    state.p[0] = Complex64::new(x[k], 0.0);
    k += 1;
    let mut l = 1;
    while l < n - l {
        let v = Complex64::new(x[k], x[k + 1]);
        state.p[l] = v;
        state.p[n - l] = v.conj();
        k += 2;
        l += 1;
    }
    if n.is_multiple_of(2) && n > 1 {
        state.p[n / 2] = Complex64::new(x[k], 0.0);
    }
}

/// Column names of the packed layout, used for CSV headers.
pub fn packed_labels(n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(5 * n);
    for l in 0..n {
        out.push(format!("re_alpha_{l}"));
        out.push(format!("im_alpha_{l}"));
    }
    for l in 0..n {
        out.push(format!("re_s_{l}"));
        out.push(format!("im_s_{l}"));
    }
    out.push("p_0".into());
    let mut l = 1;
    while l < n - l {
        out.push(format!("re_p_{l}"));
        out.push(format!("im_p_{l}"));
        l += 1;
    }
    if n.is_multiple_of(2) && n > 1 {
        out.push(format!("p_{}", n / 2));
    }
    out
}

/// `exp(2 pi i k / n)` with the exponent reduced mod `n`, so that results are
/// bit-identical for indices congruent mod `n`.
pub(crate) fn root_of_unity(k: i64, n: usize) -> Complex64 {
    let m = k.rem_euclid(n as i64);
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, TAU * m as f64 / n as f64)
}

/// Classical pilot field at site `r`: `-i * sum_l lambda_l alpha_l exp(2 pi i r l / n)`.
pub fn field_at_site(r: i64, alpha: &[Complex64], lambda: &[f64]) -> Complex64 {
    let n = alpha.len();
    let sum: Complex64 =
        alpha.iter().zip(lambda).enumerate().map(|(l, (a, &lam))| a * lam * root_of_unity(r * l as i64, n)).sum();
    Complex64::new(sum.im, -sum.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_point_layout() {
        let st = MacroState { alpha: vec![c(0.0, 0.0)], s: vec![c(0.0, 0.0)], p: vec![c(0.3, 0.0)] };
        assert_eq!(pack_state(&st).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 0.3]);
    }

    #[test]
    fn self_conjugate_mode_for_even_n() {
        let st = MacroState {
            alpha: vec![c(1.0, 2.0), c(3.0, 4.0)],
            s: vec![c(5.0, 6.0), c(7.0, 8.0)],
            p: vec![c(0.1, 0.0), c(0.2, 0.0)],
        };
        let x = pack_state(&st).unwrap();
        assert_eq!(x.len(), 10);
        assert_eq!(unpack_state(&x, 2).unwrap(), st);
        assert_eq!(packed_labels(2).len(), 10);
    }

    #[test]
    fn rejects_asymmetric_p() {
        let st = MacroState {
            alpha: vec![c(0.0, 0.0); 3],
            s: vec![c(0.0, 0.0); 3],
            p: vec![c(0.1, 0.0), c(0.2, 0.1), c(0.2, 0.1)],
        };
        assert!(matches!(pack_state(&st), Err(Error::Symmetry { .. })));
        let st = MacroState { p: vec![c(0.1, 1e-9)], ..MacroState::zeros(1) };
        assert!(pack_state(&st).is_err());
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(matches!(unpack_state(&[0.0; 7], 2), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn zero_field() {
        let a = vec![c(0.0, 0.0); 3];
        for r in -4..4 {
            assert_eq!(field_at_site(r, &a, &[1.0, 2.0, 3.0]), c(0.0, 0.0));
        }
    }

    #[test]
    fn single_mode_field_is_site_independent() {
        for r in -3..3 {
            let phi = field_at_site(r, &[c(0.0, 1.0)], &[2.0]);
            assert!((phi - c(2.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn field_is_periodic_in_site() {
        let a = vec![c(0.3, -1.2), c(0.7, 0.4)];
        let lam = [0.9, -1.3];
        for r in -6..6 {
            assert_eq!(field_at_site(r + 2, &a, &lam), field_at_site(r, &a, &lam));
        }
    }
}
