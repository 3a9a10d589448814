use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{MacroState, ModelParams};

use super::cycle::{extract_limit_cycle, LimitCycle};
use super::flow::integrate_flow;
use super::lyapunov::{lyapunov_spectrum_with, LyapunovOptions};
use super::rhs::normal_fixed_point;
use super::stability::fixed_point_leading_eigenvalue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseLabel {
    Normal,
    Coherent,
    Chaotic,
    Undetermined,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Normal => "normal",
            PhaseLabel::Coherent => "coherent",
            PhaseLabel::Chaotic => "chaotic",
            PhaseLabel::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhasePortrait {
    pub label: PhaseLabel,
    /// Descending Lyapunov spectrum.
    pub lyapunov: Vec<f64>,
    pub limit_cycle: Option<LimitCycle>,
    pub fixed_point: Option<MacroState>,
    /// Why the label was chosen, or which tests disagreed.
    pub notes: Vec<String>,
}

impl PhasePortrait {
    pub fn largest_lyapunov(&self) -> f64 {
        self.lyapunov[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub t_transient: f64,
    pub t_sample: f64,
    pub tol: f64,
}

impl ClassifyOptions {
    /// Transient of twenty slowest relaxation times, then ten times that for sampling.
    pub fn default_for(params: &ModelParams) -> Self {
        let t_transient = 20.0 / params.slowest_rate();
        Self { t_transient, t_sample: 10.0 * t_transient, tol: 1e-9 }
    }
}

/// Threshold separating zero from positive Lyapunov exponents.
pub fn zero_tolerance(params: &ModelParams) -> f64 {
    0.02 * params.gamma2
}

/// A small kick off the normal fixed point, in every mode.
pub fn perturbed_start(params: &ModelParams, amplitude: f64) -> MacroState {
    let mut x = normal_fixed_point(params);
    for l in 0..params.n {
        x.alpha[l] = Complex64::new(amplitude, 0.0);
        x.s[l] = Complex64::new(0.0, amplitude);
    }
    x
}

pub fn classify_phase(params: &ModelParams, x0: &MacroState) -> Result<PhasePortrait> {
    classify_phase_with(params, x0, ClassifyOptions::default_for(params))
}

/// Labels the long-time behaviour starting from `x0`.
///
/// The fixed-point test takes precedence over the cycle test, which takes
/// precedence over the chaos test; disagreeing evidence gives `Undetermined`.
pub fn classify_phase_with(params: &ModelParams, x0: &MacroState, opts: ClassifyOptions) -> Result<PhasePortrait> {
    let t_end = opts.t_transient + opts.t_sample;
    let traj = integrate_flow(params, x0, t_end, opts.tol)?;
    let seg = traj.segment(opts.t_transient)?;
    let fp = normal_fixed_point(params);
    let zero_tol = zero_tolerance(params);
    let mut notes = Vec::new();

    let t_mid = 0.5 * (seg.t_start() + seg.t_end());
    let d_start = seg.state_at(seg.t_start())?.distance(&fp);
    let d_mid = seg.state_at(t_mid)?.distance(&fp);
    let d_end = seg.state_at(seg.t_end())?.distance(&fp);
    let d_max = seg.states().map(|x| x.distance(&fp)).fold(0.0, f64::max);
    let stable = fixed_point_leading_eigenvalue(params).re < 0.0;
    // Below this the distance is integrator noise and need not shrink any further.
    let noise_floor = 100.0 * opts.tol;
    let converging = d_end <= noise_floor || (d_end < d_mid && d_mid < d_start);
    let fixed_ok = stable && converging;
    if converging && !stable {
        notes.push("trajectory approaches an unstable fixed point".into());
    }

    let cycle = match extract_limit_cycle(&seg) {
        Ok(c) => Some(c),
        Err(Error::NotPeriodic(msg)) => {
            notes.push(format!("cycle test: {msg}"));
            None
        }
        Err(Error::MultiMode { modes }) => {
            notes.push(format!("cycle test: several active modes {modes:?}"));
            None
        }
        Err(e) => return Err(e),
    };

    let lyapunov = lyapunov_spectrum_with(
        params,
        x0,
        LyapunovOptions { t_transient: opts.t_transient, t_sample: opts.t_sample, tol: opts.tol },
    )?;
    let top = lyapunov[0];

    let label = if fixed_ok {
        if cycle.is_some() || top > zero_tol {
            notes.push("fixed-point evidence conflicts with cycle or Lyapunov test".into());
            PhaseLabel::Undetermined
        } else {
            PhaseLabel::Normal
        }
    } else if cycle.is_some() {
        if top.abs() <= zero_tol {
            PhaseLabel::Coherent
        } else {
            notes.push(format!("cycle found but largest Lyapunov exponent is {top:.4}"));
            PhaseLabel::Undetermined
        }
    } else if top > zero_tol && d_max > 1e-6 {
        PhaseLabel::Chaotic
    } else {
        notes.push("no test conclusive".into());
        PhaseLabel::Undetermined
    };

    let fixed_point = (label == PhaseLabel::Normal).then_some(fp);
    let limit_cycle = if label == PhaseLabel::Coherent { cycle } else { None };
    Ok(PhasePortrait { label, lyapunov, limit_cycle, fixed_point, notes })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub eta: f64,
    pub label: PhaseLabel,
    pub largest_lyapunov: f64,
    pub nu: Option<f64>,
    pub mode: Option<usize>,
}

/// Classifies every pump value on `etas` independently (in parallel).
pub fn scan_eta<F>(params: &ModelParams, etas: &[f64], start: F, opts: ClassifyOptions) -> Result<Vec<ScanRow>>
where
    F: Fn(&ModelParams) -> MacroState + Sync,
{
    etas.par_iter()
        .map(|&eta| {
            let p = params.with_eta(eta).validate()?;
            let portrait = classify_phase_with(&p, &start(&p), opts)?;
            Ok(ScanRow {
                eta,
                label: portrait.label,
                largest_lyapunov: portrait.largest_lyapunov(),
                nu: portrait.limit_cycle.map(|c| c.nu),
                mode: portrait.limit_cycle.map(|c| c.mode),
            })
        })
        .collect()
}

/// First adjacent pair `(last normal, first coherent)` along an increasing scan.
pub fn normal_to_coherent(rows: &[ScanRow]) -> Option<(f64, f64)> {
    rows.windows(2).find_map(|w| {
        (w[0].label == PhaseLabel::Normal && w[1].label == PhaseLabel::Coherent).then_some((w[0].eta, w[1].eta))
    })
}
