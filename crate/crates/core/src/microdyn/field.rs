use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::macroflow::Trajectory;
use crate::model::field_at_site;

type ModeFn<'a> = dyn Fn(f64) -> Vec<Complex64> + Send + Sync + 'a;

enum Source<'a> {
    Trajectory(&'a Trajectory),
    Modes(Box<ModeFn<'a>>),
}

/// Classical field `phi_{r,t}` seen by site `r`, synthesised from mode amplitudes.
///
/// Backed either by a macroscopic trajectory (dense-output interpolation) or
/// by an arbitrary function `t -> alpha_t`.
pub struct PilotField<'a> {
    lambda: Vec<f64>,
    source: Source<'a>,
}

impl<'a> PilotField<'a> {
    pub fn from_trajectory(traj: &'a Trajectory) -> Self {
        Self { lambda: traj.params().lambda.clone(), source: Source::Trajectory(traj) }
    }

    pub fn from_modes<F>(lambda: Vec<f64>, alpha: F) -> Self
    where
        F: Fn(f64) -> Vec<Complex64> + Send + Sync + 'a,
    {
        Self { lambda, source: Source::Modes(Box::new(alpha)) }
    }

    /// A time-independent field.
    pub fn constant(lambda: Vec<f64>, alpha: Vec<Complex64>) -> Self {
        Self::from_modes(lambda, move |_| alpha.clone())
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Mode amplitudes `alpha_t`.
    pub fn alpha_at(&self, t: f64) -> Result<Vec<Complex64>> {
        let n = self.n();
        match &self.source {
            Source::Trajectory(traj) => {
                let x = traj.packed_at(t)?;
                Ok((0..n).map(|l| Complex64::new(x[2 * l], x[2 * l + 1])).collect())
            }
            Source::Modes(f) => {
                let alpha = f(t);
                if alpha.len() != n {
                    return Err(Error::LengthMismatch { expected: n, got: alpha.len() });
                }
                Ok(alpha)
            }
        }
    }

    pub fn at(&self, r: i64, t: f64) -> Result<Complex64> {
        Ok(field_at_site(r, &self.alpha_at(t)?, &self.lambda))
    }
}

impl std::fmt::Debug for PilotField<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.source {
            Source::Trajectory(_) => "trajectory",
            Source::Modes(_) => "modes",
        };
        f.debug_struct("PilotField").field("lambda", &self.lambda).field("source", &kind).finish()
    }
}
