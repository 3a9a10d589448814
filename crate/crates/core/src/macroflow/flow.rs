use crate::error::{Error, Result};
use crate::model::{pack_state, packed_len, unpack_state, MacroState, ModelParams};
use crate::ode::{DenseOutput, Dopri5, OdeOptions};

use super::rhs::PackedField;

/// Symmetry drift tolerated on stored trajectory points.
pub const TRAJECTORY_SYMMETRY_TOL: f64 = 1e-8;

/// A solution of the classical flow, stored at the integrator's step points
/// together with the vector field there, so that intermediate times are
/// reconstructed by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: ModelParams,
    dense: DenseOutput,
}

impl Trajectory {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn times(&self) -> &[f64] {
        self.dense.times()
    }

    pub fn len(&self) -> usize {
        self.dense.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.dense.t_start()
    }

    pub fn t_end(&self) -> f64 {
        self.dense.t_end()
    }

    pub fn packed(&self, i: usize) -> &[f64] {
        self.dense.y_at_index(i)
    }

    pub fn state(&self, i: usize) -> MacroState {
        unpack_state(self.dense.y_at_index(i), self.params.n).expect("stored state has packed length")
    }

    pub fn states(&self) -> impl Iterator<Item = MacroState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }

    pub fn packed_at(&self, t: f64) -> Result<Vec<f64>> {
        self.dense.eval(t)
    }

    pub fn state_at(&self, t: f64) -> Result<MacroState> {
        unpack_state(&self.dense.eval(t)?, self.params.n)
    }

    /// Interpolated states at the given times.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<MacroState>> {
        times.iter().map(|&t| self.state_at(t)).collect()
    }

    /// Uniform sample times `t_start, t_start + dt, ..` up to and including `t_end`.
    pub fn uniform_times(&self, dt: f64) -> Vec<f64> {
        uniform_grid(self.t_start(), self.t_end(), dt)
    }

    /// The part of the trajectory with `t >= t_from`, starting with an
    /// interpolated point at `t_from`.
    pub fn segment(&self, t_from: f64) -> Result<Trajectory> {
        let n = packed_len(self.params.n);
        let mut dense = DenseOutput::new(n);
        let y0 = self.dense.eval(t_from)?;
        let mut field = PackedField::new(&self.params);
        let mut dy0 = vec![0.0; n];
        field.eval(&y0, &mut dy0);
        dense.push(t_from, &y0, &dy0);
        for i in 0..self.len() {
            let t = self.times()[i];
            if t > t_from {
                dense.push(t, self.dense.y_at_index(i), self.dense.dy_at_index(i));
            }
        }
        Ok(Trajectory { params: self.params.clone(), dense })
    }

    /// Builds a trajectory from samples of a flow solution; derivatives are
    /// taken from the vector field.
    pub fn from_flow_samples(params: ModelParams, times: &[f64], states: &[MacroState]) -> Result<Self> {
        let mut field = PackedField::new(&params);
        Self::build(&params, times, states, |_, y, dy| field.eval(y, dy))
    }

    /// Builds a trajectory from arbitrary samples (not necessarily a flow
    /// solution); derivatives are estimated by finite differences.
    pub fn from_states(params: ModelParams, times: &[f64], states: &[MacroState]) -> Result<Self> {
        let packed: Vec<Vec<f64>> = states.iter().map(pack_state).collect::<Result<_>>()?;
        let m = times.len();
        Self::build(&params, times, states, |i, y, dy| {
            if m < 2 {
                dy.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            let (a, b) = match i {
                0 => (0, 1),
                i if i == m - 1 => (m - 2, m - 1),
                i => (i - 1, i + 1),
            };
            let h = times[b] - times[a];
            for k in 0..y.len() {
                dy[k] = (packed[b][k] - packed[a][k]) / h;
            }
        })
    }

    fn build<D>(params: &ModelParams, times: &[f64], states: &[MacroState], mut deriv: D) -> Result<Self>
    where
        D: FnMut(usize, &[f64], &mut [f64]),
    {
        if times.len() != states.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: states.len() });
        }
        if times.is_empty() {
            return Err(Error::Invalid("empty trajectory".into()));
        }
        if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("trajectory times must be non-negative and strictly increasing".into()));
        }
        let d = packed_len(params.n);
        let mut dense = DenseOutput::new(d);
        let mut dy = vec![0.0; d];
        for (i, (t, st)) in times.iter().zip(states).enumerate() {
            if st.n() != params.n {
                return Err(Error::LengthMismatch { expected: params.n, got: st.n() });
            }
            let deviation = st.symmetry_deviation();
            if deviation > TRAJECTORY_SYMMETRY_TOL {
                return Err(Error::Symmetry { deviation });
            }
            let y = crate::model::pack_unchecked(st);
            deriv(i, &y, &mut dy);
            dense.push(*t, &y, &dy);
        }
        Ok(Self { params: params.clone(), dense })
    }
}

/// Points `start, start + dt, ..` up to `end`, with `end` appended when the
/// spacing does not land on it.
pub fn uniform_grid(start: f64, end: f64, dt: f64) -> Vec<f64> {
    let steps = ((end - start) / dt + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=steps).map(|k| (start + k as f64 * dt).min(end)).collect();
    if end - out.last().copied().unwrap_or(start) > 1e-9 * dt {
        out.push(end);
    }
    out
}

/// Integrates the flow from `x0` at `t = 0` up to `t_end` with relative
/// (and absolute) local error `tol` per step.
pub fn integrate_flow(params: &ModelParams, x0: &MacroState, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_flow_through(params, x0, &[t_end], tol)
}

/// Like [`integrate_flow`], but lands a step exactly on every time in `stops`
/// (increasing; the last one is the end time), so that sampling there
/// involves no interpolation.
pub fn integrate_flow_through(params: &ModelParams, x0: &MacroState, stops: &[f64], tol: f64) -> Result<Trajectory> {
    let t_end = stops.last().copied().unwrap_or(0.0);
    if !(t_end > 0.0) {
        return Err(Error::Invalid(format!("t_end must be positive, got {t_end}")));
    }
    if stops.windows(2).any(|w| w[1] <= w[0]) || stops[0] < 0.0 {
        return Err(Error::Invalid("stop times must be non-negative and strictly increasing".into()));
    }
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Invalid(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    let y0 = pack_state(x0)?;
    let mut field = PackedField::new(params);
    let mut solver = Dopri5::new(|_, y, dy| field.eval(y, dy), 0.0, &y0, OdeOptions::with_tol(tol));
    let mut dense = DenseOutput::new(y0.len());
    dense.push(0.0, solver.y(), solver.dy());
    for &stop in stops {
        solver.run_to(stop, |t, y, dy| {
            dense.push(t, y, dy);
            Ok(())
        })?;
    }
    Ok(Trajectory { params: params.clone(), dense })
}
