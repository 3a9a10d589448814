use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::rhs::{jacobian_at, normal_fixed_point};

/// Width at which the threshold bisection stops.
pub const ETA1_BRACKET_WIDTH: f64 = 1e-8;

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(jac: &DMatrix<f64>) -> Vec<Complex64> {
    jac.clone().complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

/// The eigenvalue with the largest real part (ties broken towards the
/// non-negative imaginary half).
pub fn leading_eigenvalue(jac: &DMatrix<f64>) -> Complex64 {
    eigenvalues(jac)
        .into_iter()
        .max_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .expect("non-empty matrix")
}

/// Leading eigenvalue of the linearisation at the normal fixed point.
pub fn fixed_point_leading_eigenvalue(params: &ModelParams) -> Complex64 {
    leading_eigenvalue(&jacobian_at(&normal_fixed_point(params), params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfPoint {
    pub eta1: f64,
    pub bracket: (f64, f64),
    /// Leading eigenvalue at the unstable end of the final bracket.
    pub crossing: Complex64,
}

/// Locates the pump value at which the normal fixed point loses stability,
/// by bisection on the leading real part of its Jacobian spectrum.
///
/// The `eta` stored in `params` is ignored.
pub fn find_eta1(params: &ModelParams, bracket: (f64, f64)) -> Result<HopfPoint> {
    let (mut lo, mut hi) = bracket;
    let margin = |eta: f64| fixed_point_leading_eigenvalue(&params.with_eta(eta)).re;
    let (f_lo, f_hi) = (margin(lo), margin(hi));
    if f_lo.signum() == f_hi.signum() || f_lo == 0.0 && f_hi == 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let rising = f_lo < 0.0;
    while hi - lo >= ETA1_BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        let f = margin(mid);
        if (f < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let unstable_end = if rising { hi } else { lo };
    let crossing = fixed_point_leading_eigenvalue(&params.with_eta(unstable_end));
    let eta1 = 0.5 * (lo + hi);
    let scale = params.epsilon.max(params.omega.iter().copied().fold(0.0, f64::max));
    if crossing.im.abs() <= 1e-9 * scale {
        return Err(Error::RealCrossing { eta: eta1, imag: crossing.im });
    }
    Ok(HopfPoint { eta1, bracket: (lo, hi), crossing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_system_never_crosses() {
        let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 0.5, 0.0);
        assert!(matches!(find_eta1(&params, (-1.0, 1.0)), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn resonant_single_mode_threshold() {
        // at resonance the threshold is kappa * gamma1 / lambda^2
        let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 0.5, 1.0);
        let hopf = find_eta1(&params, (0.0, 1.0)).unwrap();
        assert!((hopf.eta1 - 0.5).abs() < 1e-8, "{hopf:?}");
        assert!(hopf.bracket.1 - hopf.bracket.0 < ETA1_BRACKET_WIDTH);
        assert!(hopf.crossing.im.abs() > 0.5);
    }
}
