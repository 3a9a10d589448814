use crate::error::{Error, Result};
use crate::model::{pack_state, packed_len, MacroState, ModelParams};
use crate::ode::{Dopri5, OdeOptions};

use super::rhs::PackedField;

/// Reorthonormalise after this much time or this many steps, whichever comes first.
pub const REORTHO_INTERVAL: f64 = 1.0;
pub const REORTHO_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    pub t_transient: f64,
    pub t_sample: f64,
    pub tol: f64,
}

impl LyapunovOptions {
    pub fn new(t_transient: f64, t_sample: f64) -> Self {
        Self { t_transient, t_sample, tol: 1e-9 }
    }
}

/// Full Lyapunov spectrum (descending) of the flow started at `x0`, by
/// evolving `5n` tangent vectors alongside the state and periodically
/// reorthonormalising them. Stretching rates are averaged over
/// `[t_transient, t_transient + t_sample]`.
pub fn lyapunov_spectrum(params: &ModelParams, x0: &MacroState, t_transient: f64, t_sample: f64) -> Result<Vec<f64>> {
    lyapunov_spectrum_with(params, x0, LyapunovOptions::new(t_transient, t_sample))
}

pub fn lyapunov_spectrum_with(params: &ModelParams, x0: &MacroState, opts: LyapunovOptions) -> Result<Vec<f64>> {
    if !(opts.t_transient >= 0.0) || !(opts.t_sample > 0.0) {
        return Err(Error::Invalid("t_transient must be >= 0 and t_sample > 0".into()));
    }
    let d = packed_len(params.n);
    let mut y = pack_state(x0)?;
    y.resize(d + d * d, 0.0);
    for j in 0..d {
        y[d + j * d + j] = 1.0;
    }

    let mut field = PackedField::new(params);
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (x, v) = y.split_at(d);
        let (dx, dv) = dy.split_at_mut(d);
        field.eval_with_tangents(x, v, dx, dv);
    };
    let mut stepper = Dopri5::new(rhs, 0.0, &y, OdeOptions::with_tol(opts.tol));

    let t_end = opts.t_transient + opts.t_sample;
    let mut sums = vec![0.0; d];
    let mut last_ortho = 0.0;
    let mut steps_since = 0;
    let mut sampling = opts.t_transient == 0.0;
    let mut buf = stepper.y().to_vec();

    while stepper.t() < t_end {
        let stop = if sampling { t_end } else { opts.t_transient };
        stepper.step_until(stop)?;
        steps_since += 1;
        let t = stepper.t();
        let at_boundary = !sampling && t >= opts.t_transient;
        if steps_since >= REORTHO_STEPS || t - last_ortho >= REORTHO_INTERVAL || at_boundary || t >= t_end {
            buf.copy_from_slice(stepper.y());
            let norms = gram_schmidt(&mut buf[d..], d);
            if sampling {
                for (s, r) in sums.iter_mut().zip(&norms) {
                    *s += r.ln();
                }
            }
            stepper.set_state(&buf);
            last_ortho = t;
            steps_since = 0;
            if at_boundary {
                sampling = true;
            }
        }
    }

    let mut exps: Vec<f64> = sums.iter().map(|s| s / opts.t_sample).collect();
    exps.sort_by(|a, b| b.total_cmp(a));
    if exps.iter().any(|e| !e.is_finite()) {
        return Err(Error::Invalid("tangent vectors degenerated".into()));
    }
    Ok(exps)
}

/// Modified Gram–Schmidt on `d` column vectors stored consecutively; returns
/// the norms removed from each column.
fn gram_schmidt(cols: &mut [f64], d: usize) -> Vec<f64> {
    let mut norms = Vec::with_capacity(d);
    for j in 0..d {
        let (done, rest) = cols.split_at_mut(j * d);
        let v = &mut rest[..d];
        for k in 0..j {
            let q = &done[k * d..(k + 1) * d];
            let dot: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        norms.push(norm);
    }
    norms
}
