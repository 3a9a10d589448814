use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MacroState;

use super::flow::Trajectory;

/// Relative fluctuation allowed in `|alpha_k|`, `|s_k|` and `p_0` on a cycle.
pub const CYCLE_REL_TOL: f64 = 1e-3;
/// Amplitude below which a mode (or a `p_l`, `l != 0`) counts as inactive.
pub const INACTIVE_TOL: f64 = 1e-6;

/// Rotating-wave orbit `alpha_k(t) = A exp(-i(nu t + phi_a))`,
/// `s_k(t) = S exp(-i(nu t + phi_s))`, `p_l = p0 delta_l0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    pub nu: f64,
    pub mode: usize,
    pub alpha_amp: f64,
    pub s_amp: f64,
    pub alpha_phase: f64,
    pub s_phase: f64,
    pub p0: f64,
}

impl LimitCycle {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.nu.abs()
    }

    /// The orbit point at time `t` for `n` modes.
    pub fn state_at(&self, n: usize, t: f64) -> MacroState {
        let mut x = MacroState::zeros(n);
        x.alpha[self.mode] = Complex64::from_polar(self.alpha_amp, -(self.nu * t + self.alpha_phase));
        x.s[self.mode] = Complex64::from_polar(self.s_amp, -(self.nu * t + self.s_phase));
        x.p[0] = Complex64::new(self.p0, 0.0);
        x
    }
}

struct Stats {
    min: f64,
    max: f64,
    mean: f64,
}

fn stats(values: impl Iterator<Item = f64>) -> Stats {
    let (mut min, mut max, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
        count += 1;
    }
    Stats { min, max, mean: sum / count.max(1) as f64 }
}

/// Detects a single-mode rotating-wave orbit in a post-transient trajectory
/// segment and recovers its parameters.
pub fn extract_limit_cycle(traj: &Trajectory) -> Result<LimitCycle> {
    let n = traj.params().n;
    let times = sample_times(traj.times());
    let states = traj.sample(&times)?;

    let active: Vec<usize> = (0..n)
        .filter(|&l| states.iter().any(|x| x.alpha[l].norm() > INACTIVE_TOL || x.s[l].norm() > INACTIVE_TOL))
        .collect();
    let k = match active.as_slice() {
        [] => return Err(Error::NotPeriodic("all mode amplitudes vanish".into())),
        [k] => *k,
        _ => return Err(Error::MultiMode { modes: active }),
    };

    let a = stats(states.iter().map(|x| x.alpha[k].norm()));
    let s = stats(states.iter().map(|x| x.s[k].norm()));
    for (name, st) in [("alpha", &a), ("s", &s)] {
        let fluct = (st.max - st.min) / st.mean;
        if !(fluct < CYCLE_REL_TOL) {
            return Err(Error::NotPeriodic(format!("|{name}_{k}| fluctuates by {fluct:.3e} (relative)")));
        }
    }
    let p0 = stats(states.iter().map(|x| x.p[0].re));
    if p0.max - p0.min > CYCLE_REL_TOL * p0.mean.abs().max(1e-9) {
        return Err(Error::NotPeriodic(format!("p_0 varies by {:.3e}", p0.max - p0.min)));
    }
    let p_rest = states.iter().flat_map(|x| x.p.iter().skip(1).map(|z| z.norm())).fold(0.0, f64::max);
    if p_rest > INACTIVE_TOL {
        return Err(Error::NotPeriodic(format!("p_l (l != 0) reaches {p_rest:.3e}")));
    }

    // unwrap arg(alpha_k) and fit arg = -nu t - phase
    let mut phases = Vec::with_capacity(states.len());
    let mut prev = states[0].alpha[k].arg();
    let mut offset = 0.0;
    for x in &states {
        let raw = x.alpha[k].arg();
        let mut delta = raw - prev;
        if delta > PI {
            offset -= 2.0 * PI;
            delta -= 2.0 * PI;
        } else if delta < -PI {
            offset += 2.0 * PI;
            delta += 2.0 * PI;
        }
        if delta.abs() > 0.5 * PI {
            return Err(Error::NotPeriodic("phase winding not resolved by the samples".into()));
        }
        phases.push(raw + offset);
        prev = raw;
    }
    let (slope, _) = linear_fit(&times, &phases);
    let nu = -slope;

    let alpha_phase = circular_mean(states.iter().zip(&times).map(|(x, t)| x.alpha[k].arg() + nu * t));
    let s_phase = circular_mean(states.iter().zip(&times).map(|(x, t)| x.s[k].arg() + nu * t));

    Ok(LimitCycle {
        nu,
        mode: k,
        alpha_amp: a.mean,
        s_amp: s.mean,
        alpha_phase: -alpha_phase,
        s_phase: -s_phase,
        p0: p0.mean,
    })
}

/// Step points plus three interior points per step.
fn sample_times(steps: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * steps.len());
    for w in steps.windows(2) {
        let h = w[1] - w[0];
        out.extend((0..4).map(|j| w[0] + h * j as f64 / 4.0));
    }
    out.extend(steps.last());
    out
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn circular_mean(angles: impl Iterator<Item = f64>) -> f64 {
    let z: Complex64 = angles.map(|a| Complex64::from_polar(1.0, a)).sum();
    z.arg()
}
