//! Adaptive Dormand–Prince 5(4) integrator with cubic Hermite dense output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    /// Mixed error control with the same relative and absolute tolerance.
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }

    pub fn h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-8, h_init: None, h_max: f64::INFINITY, max_steps: 20_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Step-by-step driver. Each call to [`Dopri5::step_until`] performs exactly
/// one accepted step, never stepping past the requested stop time.
pub struct Dopri5<F> {
    f: F,
    opts: OdeOptions,
    t: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
    h: f64,
    k: [Vec<f64>; 7],
    ytmp: Vec<f64>,
    steps: usize,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Dopri5<F> {
    pub fn new(mut f: F, t0: f64, y0: &[f64], opts: OdeOptions) -> Self {
        let dim = y0.len();
        let mut dy = vec![0.0; dim];
        f(t0, y0, &mut dy);
        let h = opts.h_init.unwrap_or_else(|| {
            let d0 = rms(y0);
            let d1 = rms(&dy);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.max(1e-6)
        });
        Self {
            f,
            opts,
            t: t0,
            y: y0.to_vec(),
            dy,
            h: h.min(opts.h_max),
            k: std::array::from_fn(|_| vec![0.0; dim]),
            ytmp: vec![0.0; dim],
            steps: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Replaces the current state (e.g. after reorthonormalising tangent vectors).
    pub fn set_state(&mut self, y: &[f64]) {
        self.y.copy_from_slice(y);
        (self.f)(self.t, &self.y, &mut self.dy);
    }

    pub fn step_until(&mut self, t_stop: f64) -> Result<()> {
        let dim = self.y.len();
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(Error::TooManySteps { t: self.t, steps: self.steps });
            }
            let remaining = t_stop - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let floor = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if h < floor && !last {
                return Err(Error::StepUnderflow { t: self.t, h });
            }

            self.k[0].copy_from_slice(&self.dy);
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, a) in A[s][..s].iter().enumerate() {
                        acc += a * self.k[j][i];
                    }
                    self.ytmp[i] = self.y[i] + h * acc;
                }
                (self.f)(self.t + C[s] * h, &self.ytmp, &mut self.k[s]);
            }
            // ytmp now holds the fifth-order solution (stage 7 is FSAL)
            let mut err = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (j, ej) in E.iter().enumerate() {
                    e += ej * self.k[j][i];
                }
                let sc = self.opts.atol + self.opts.rtol * self.y[i].abs().max(self.ytmp[i].abs());
                err += (h * e / sc).powi(2);
            }
            let err = (err / dim.max(1) as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                self.t = if last { t_stop } else { self.t + h };
                std::mem::swap(&mut self.y, &mut self.ytmp);
                self.dy.copy_from_slice(&self.k[6]);
                self.steps += 1;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || factor < 1.0 {
                    self.h = (h * factor).min(self.opts.h_max);
                }
                return Ok(());
            }
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            self.h = h * factor;
            if self.h < 16.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t, h: self.h });
            }
        }
    }

    /// Integrates to `t_end`, calling `on_step` after every accepted step.
    pub fn run_to<G>(&mut self, t_end: f64, mut on_step: G) -> Result<()>
    where
        G: FnMut(f64, &[f64], &[f64]) -> Result<()>,
    {
        while self.t < t_end {
            self.step_until(t_end)?;
            on_step(self.t, &self.y, &self.dy)?;
        }
        Ok(())
    }
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt()
}

/// Accepted step points with derivatives; evaluates between them by cubic
/// Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOutput {
    dim: usize,
    t: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl DenseOutput {
    pub fn new(dim: usize) -> Self {
        Self { dim, t: Vec::new(), y: Vec::new(), dy: Vec::new() }
    }

    pub fn push(&mut self, t: f64, y: &[f64], dy: &[f64]) {
        debug_assert!(self.t.last().is_none_or(|&last| t > last));
        self.t.push(t);
        self.y.extend_from_slice(y);
        self.dy.extend_from_slice(dy);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn y_at_index(&self, i: usize) -> &[f64] {
        &self.y[i * self.dim..(i + 1) * self.dim]
    }

    pub fn dy_at_index(&self, i: usize) -> &[f64] {
        &self.dy[i * self.dim..(i + 1) * self.dim]
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Index `i` with `t[i] <= t <= t[i+1]` (clamped to the valid range).
    fn interval(&self, t: f64) -> usize {
        let i = self.t.partition_point(|&ti| ti <= t);
        i.saturating_sub(1).min(self.t.len().saturating_sub(2))
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (start, end) = (self.t_start(), self.t_end());
        let slack = 1e-12 * end.abs().max(1.0);
        if t < start - slack || t > end + slack {
            return Err(Error::OutOfRange { t, start, end });
        }
        if self.t.len() == 1 {
            out.copy_from_slice(self.y_at_index(0));
            return Ok(());
        }
        let i = self.interval(t);
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (self.y_at_index(i), self.y_at_index(i + 1));
        let (d0, d1) = (self.dy_at_index(i), self.dy_at_index(i + 1));
        for k in 0..self.dim {
            out[k] = h00 * y0[k] + h * h10 * d0[k] + h01 * y1[k] + h * h11 * d1[k];
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }
}

/// Integrates from `t0` to `t_end`, recording every accepted step.
pub fn solve<F>(f: F, t0: f64, y0: &[f64], t_end: f64, opts: OdeOptions) -> Result<DenseOutput>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut stepper = Dopri5::new(f, t0, y0, opts);
    let mut dense = DenseOutput::new(y0.len());
    dense.push(t0, stepper.y(), stepper.dy());
    stepper.run_to(t_end, |t, y, dy| {
        dense.push(t, y, dy);
        Ok(())
    })?;
    Ok(dense)
}
