use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macroflow::{LimitCycle, Trajectory};
use crate::model::{root_of_unity, ModelParams};
use crate::ode::{solve, OdeOptions};

use super::bloch::{generator_for_field, pump_vector, BlochVector};
use super::field::PilotField;

/// `gamma * t` needed before transients fall below `1e-8`.
pub const ASYMPTOTIC_HORIZON: f64 = 18.4;

/// Default integration tolerance for site evolutions.
pub const SITE_TOL: f64 = 1e-10;

/// Integrates one site's Bloch vector from `theta0` at `t0` up to `t1`.
pub fn integrate_theta(
    r: i64,
    theta0: BlochVector,
    t0: f64,
    t1: f64,
    field: &PilotField<'_>,
    params: &ModelParams,
    tol: f64,
) -> Result<BlochVector> {
    if t1 < t0 {
        return Err(Error::Invalid(format!("need t1 >= t0, got [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(theta0);
    }
    let c = pump_vector(params);
    let mut failure = None;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let phi = field.at(r, t).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        });
        let v = generator_for_field(phi, params) * Vector3::new(y[0], y[1], y[2]) + c;
        dy.copy_from_slice(v.as_slice());
    };
    let sol = solve(rhs, t0, theta0.0.as_slice(), t1, OdeOptions::with_tol(tol))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let y = sol.y_at_index(sol.len() - 1);
    Ok(BlochVector::new(y[0], y[1], y[2]))
}

/// Transient-free Bloch vector of site `r` at time `t`, driven by the field of
/// `traj` from `theta = 0` at the start of the trajectory.
pub fn asymptotic_theta(r: i64, t: f64, traj: &Trajectory) -> Result<BlochVector> {
    asymptotic_theta_with(r, t, traj, SITE_TOL)
}

pub fn asymptotic_theta_with(r: i64, t: f64, traj: &Trajectory, tol: f64) -> Result<BlochVector> {
    let params = traj.params();
    let gamma_t = params.bloch_decay_rate() * (t - traj.t_start());
    if gamma_t < ASYMPTOTIC_HORIZON {
        return Err(Error::InsufficientHorizon { gamma_t, required: ASYMPTOTIC_HORIZON });
    }
    let field = PilotField::from_trajectory(traj);
    integrate_theta(r, BlochVector::new(0.0, 0.0, 0.0), traj.t_start(), t, &field, params, tol)
}

/// Bloch vector read off the macroscopic `s` and `p` by Fourier synthesis at site `r`.
pub fn theta_fourier(r: i64, t: f64, traj: &Trajectory) -> Result<BlochVector> {
    let x = traj.state_at(t)?;
    let n = x.n();
    let phase = |l: usize| root_of_unity(r * l as i64, n);
    let minus: Complex64 = (0..n).map(|l| x.s[l] * phase(l)).sum();
    let z: Complex64 = (0..n).map(|l| x.p[l] * phase(l)).sum();
    if z.im.abs() > 1e-10 {
        return Err(Error::Symmetry { deviation: z.im.abs() });
    }
    Ok(BlochVector::from_minus(minus, z.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoticPhase {
    Normal,
    Coherent,
}

/// Explicit asymptotic product-state data for sites `0..n` at time `t`.
///
/// Normal: `(0, 0, eta)` on every site. Coherent: `theta_-` rotates as
/// `S exp(i(2 pi k r / n - nu t - phase))` and `theta_z` is the cycle's `p0`.
pub fn closed_form_state(
    phase: AsymptoticPhase,
    params: &ModelParams,
    cycle: Option<&LimitCycle>,
    t: f64,
) -> Result<Vec<BlochVector>> {
    let n = params.n;
    match phase {
        AsymptoticPhase::Normal => Ok(vec![BlochVector::new(0.0, 0.0, params.eta); n]),
        AsymptoticPhase::Coherent => {
            let c = cycle.ok_or(Error::MissingCycle)?;
            Ok((0..n)
                .map(|r| {
                    let m = (r * c.mode) % n;
                    let angle = TAU * m as f64 / n as f64 - c.nu * t - c.s_phase;
                    BlochVector::from_minus(Complex64::from_polar(c.s_amp, angle), c.p0)
                })
                .collect())
        }
    }
}
