use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::{solve, OdeOptions};

use super::field::PilotField;

/// Single-site spin expectations `(theta_x, theta_y, theta_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    /// From the lowering component `theta_- = (theta_x - i theta_y) / 2` and `theta_z`.
    pub fn from_minus(minus: Complex64, z: f64) -> Self {
        Self::new(2.0 * minus.re, -2.0 * minus.im, z)
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn minus(&self) -> Complex64 {
        Complex64::new(0.5 * self.0.x, -0.5 * self.0.y)
    }

    pub fn plus(&self) -> Complex64 {
        self.minus().conj()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// Homogeneous part of the piloted Bloch equations in `(x, y, z)` components
/// for a given local field value `phi`.
pub fn generator_for_field(phi: Complex64, params: &ModelParams) -> Matrix3<f64> {
    let (g1, g2, eps) = (params.gamma1, params.gamma2, params.epsilon);
    let (fr, fi) = (phi.re, phi.im);
    Matrix3::new(
        -g1,
        -eps,
        -2.0 * fi, //
        eps,
        -g1,
        -2.0 * fr, //
        2.0 * fi,
        2.0 * fr,
        -g2,
    )
}

/// `b_r(t)`: the Bloch generator at site `r` and time `t`.
pub fn bloch_generator(r: i64, t: f64, field: &PilotField<'_>, params: &ModelParams) -> Result<Matrix3<f64>> {
    Ok(generator_for_field(field.at(r, t)?, params))
}

/// Inhomogeneous pumping term `(0, 0, gamma2 eta)`.
pub fn pump_vector(params: &ModelParams) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, params.gamma2 * params.eta)
}

/// Affine single-site propagator over `[t0, t1]`: `theta(t1) = green theta(t0) + drift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffine {
    pub green: Matrix3<f64>,
    pub drift: Vector3<f64>,
    pub site: i64,
    pub interval: (f64, f64),
}

impl BlochAffine {
    pub fn identity(site: i64, t: f64) -> Self {
        Self { green: Matrix3::identity(), drift: Vector3::zeros(), site, interval: (t, t) }
    }

    /// Composition: `later` after `self`.
    pub fn then(&self, later: &BlochAffine) -> BlochAffine {
        BlochAffine {
            green: later.green * self.green,
            drift: later.green * self.drift + later.drift,
            site: self.site,
            interval: (self.interval.0, later.interval.1),
        }
    }

    /// Spectral norm of the Green matrix.
    pub fn green_norm(&self) -> f64 {
        self.green.singular_values().max()
    }
}

/// Integrates the Green matrix and the drift integral from `t0` to `t1`.
pub fn propagate_affine(
    r: i64,
    t0: f64,
    t1: f64,
    field: &PilotField<'_>,
    params: &ModelParams,
    tol: f64,
) -> Result<BlochAffine> {
    if !(t1 >= t0 && t0 >= 0.0) {
        return Err(Error::Invalid(format!("need t1 >= t0 >= 0, got [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(BlochAffine::identity(r, t0));
    }
    let c = pump_vector(params);
    let mut y0 = vec![0.0; 12];
    y0[0] = 1.0;
    y0[4] = 1.0;
    y0[8] = 1.0;
    let mut failure = None;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let phi = match field.at(r, t) {
            Ok(phi) => phi,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        let b = generator_for_field(phi, params);
        // green stored row-major in y[0..9]
        for i in 0..3 {
            for j in 0..3 {
                dy[3 * i + j] = (0..3).map(|k| b[(i, k)] * y[3 * k + j]).sum();
            }
            dy[9 + i] = (0..3).map(|k| b[(i, k)] * y[9 + k]).sum::<f64>() + c[i];
        }
    };
    let sol = solve(rhs, t0, &y0, t1, OdeOptions::with_tol(tol))?;
    if let Some(e) = failure {
        return Err(e);
    }
    let y = sol.y_at_index(sol.len() - 1);
    Ok(BlochAffine {
        green: Matrix3::from_row_slice(&y[..9]),
        drift: Vector3::new(y[9], y[10], y[11]),
        site: r,
        interval: (t0, t1),
    })
}

pub fn evolve_site(theta0: &BlochVector, affine: &BlochAffine) -> BlochVector {
    BlochVector(affine.green * theta0.0 + affine.drift)
}

/// Bloch vector of site `r` at each of `times` (increasing, starting at or
/// after `t0`), evolved from `theta0` at `t0`.
pub fn site_series(
    r: i64,
    theta0: BlochVector,
    t0: f64,
    times: &[f64],
    field: &PilotField<'_>,
    params: &ModelParams,
    tol: f64,
) -> Result<Vec<BlochVector>> {
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut theta) = (t0, theta0);
    for &tn in times {
        let aff = propagate_affine(r, t, tn, field, params, tol)?;
        theta = evolve_site(&theta, &aff);
        t = tn;
        out.push(theta);
    }
    Ok(out)
}
