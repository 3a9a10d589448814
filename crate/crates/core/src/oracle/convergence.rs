use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::macroflow::integrate_flow_through;
use crate::microdyn::BlochVector;
use crate::model::{MacroState, ModelParams};

use super::evolve::{evolve_master_sampled, MasterOptions};
use super::state::{build_initial_state, macro_expectations, MacroExpectations};
use super::system::{assemble_system, default_cutoff};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOptions {
    pub n_list: Vec<usize>,
    /// Per-mode cutoffs shared by every `N`; `None` picks a default per `N`.
    pub cutoffs: Option<Vec<usize>>,
    pub t_grid: Vec<f64>,
    pub tol: f64,
    pub dimension_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n_half: usize,
    pub atoms: usize,
    pub cutoffs: Vec<usize>,
    pub dim: usize,
    pub error_s: f64,
    pub error_p: f64,
    pub error_alpha: f64,
    /// Largest of the three component errors.
    pub error: f64,
    pub max_scaled_photons: f64,
    #[serde(skip)]
    pub series: Vec<MacroExpectations>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub t_grid: Vec<f64>,
    /// `sup_t |alpha_t|^2 + 1` over the classical trajectory.
    pub photon_bound: f64,
    pub photon_bound_holds: bool,
    #[serde(skip)]
    pub macro_series: Vec<MacroState>,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

/// Site-uniform atomic Bloch vector encoded in a classical state, which must
/// have `s_l = p_l = 0` for `l != 0`.
pub fn uniform_bloch(x0: &MacroState) -> Result<BlochVector> {
    let off = (1..x0.n()).map(|l| x0.s[l].norm().max(x0.p[l].norm())).fold(0.0, f64::max);
    if off > 0.0 {
        return Err(Error::Invalid("oracle initial states need identical atoms (s_l = p_l = 0 for l > 0)".into()));
    }
    if x0.p[0].im != 0.0 {
        return Err(Error::Symmetry { deviation: x0.p[0].im.abs() });
    }
    Ok(BlochVector::from_minus(x0.s[0], x0.p[0].re))
}

/// Compares finite-`N` first moments with the classical flow from `x0`.
pub fn convergence_report(
    params: &ModelParams,
    x0: &MacroState,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    let bloch = uniform_bloch(x0)?;
    if opts.t_grid.is_empty() || opts.t_grid.iter().any(|&t| t <= 0.0) {
        return Err(Error::Invalid("time grid must be non-empty and positive".into()));
    }
    if opts.t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("time grid must be strictly increasing".into()));
    }
    let traj = integrate_flow_through(params, x0, &opts.t_grid, opts.tol)?;
    let macro_series = traj.sample(&opts.t_grid)?;
    let photon_bound =
        traj.states().map(|x| x.alpha.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max)).fold(0.0, f64::max) + 1.0;

    let rows = opts
        .n_list
        .par_iter()
        .map(|&n_half| {
            let cutoffs = match &opts.cutoffs {
                Some(c) => c.clone(),
                None => vec![default_cutoff(n_half, &x0.alpha); params.n],
            };
            let sys = assemble_system(n_half, &cutoffs, params, opts.dimension_cap)?;
            let init = build_initial_state(&sys, &bloch, &x0.alpha)?;
            let mut series = Vec::with_capacity(opts.t_grid.len());
            evolve_master_sampled(&sys, &init, &opts.t_grid, MasterOptions::with_tol(opts.tol), |st| {
                series.push(macro_expectations(&sys, st));
                Ok(())
            })?;
            let diff =
                |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let (mut es, mut ep, mut ea, mut photons) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for (q, x) in series.iter().zip(&macro_series) {
                es = es.max(diff(&q.s, &x.s));
                ep = ep.max(diff(&q.p, &x.p));
                ea = ea.max(diff(&q.alpha, &x.alpha));
                photons = q.scaled_photons.iter().copied().fold(photons, f64::max);
            }
            Ok(ConvergenceRow {
                n_half,
                atoms: sys.atoms(),
                cutoffs,
                dim: sys.dim(),
                error_s: es,
                error_p: ep,
                error_alpha: ea,
                error: es.max(ep).max(ea),
                max_scaled_photons: photons,
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let photon_bound_holds = rows.iter().all(|r| r.max_scaled_photons < photon_bound);
    Ok(ConvergenceReport { rows, t_grid: opts.t_grid.clone(), photon_bound, photon_bound_holds, macro_series })
}

/// `true` when `errors` is non-increasing apart from at most one rise no
/// larger than `slack * errors[0]`.
pub fn non_increasing_trend(errors: &[f64], slack: f64) -> bool {
    let Some(&first) = errors.first() else { return true };
    let rises: Vec<f64> = errors.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 0.0).collect();
    rises.is_empty() || (rises.len() == 1 && rises[0] <= slack * first)
}
