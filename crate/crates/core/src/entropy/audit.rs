use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::density::{min_eigenvalue, single_site_trace, von_neumann_entropy, BlockState};
use super::periodic::{entropy_density, PeriodicProductState};

/// Largest number of periods per audit block.
pub const MAX_BLOCK_PERIODS: usize = 3;
/// Slack on "never exceeds the product entropy density".
pub const AUDIT_TOL: f64 = 1e-10;
/// Perturbation amplitudes below this count as a collapse onto the product state.
pub const COLLAPSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuditOptions {
    pub trials: usize,
    /// Periods per block.
    pub block_size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditTrial {
    pub index: usize,
    pub amplitude: f64,
    pub density: f64,
    pub marginal_deviation: f64,
    pub subadditivity_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub trials: usize,
    pub block_size: usize,
    pub period: usize,
    pub seed: u64,
    pub target_density: f64,
    pub max_trial_density: f64,
    pub collapsed: usize,
    pub max_marginal_deviation: f64,
    pub max_subadditivity_excess: f64,
    pub pass: bool,
    #[serde(skip)]
    pub samples: Vec<AuditTrial>,
}

/// Removes every Pauli component of weight at most one, so that all
/// single-site partial traces (and the trace) of the result vanish.
pub fn strip_local_part(x: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let dim = x.nrows();
    let mut out = x.clone();
    let half = Complex64::new(0.5, 0.0);
    for j in 0..k {
        let shift = k - 1 - j;
        let local = single_site_trace(x, k, j);
        let scale = half.powi(k as i32 - 1);
        for a in 0..dim {
            let rest = a & !(1 << shift);
            for bit in 0..2 {
                let b = rest | (bit << shift);
                out[(a, b)] -= local[((a >> shift) & 1, bit)] * scale;
            }
        }
    }
    let id_coeff = x.trace() * Complex64::new((k as f64 - 1.0) / dim as f64, 0.0);
    for a in 0..dim {
        out[(a, a)] += id_coeff;
    }
    out
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest `t` with `rho + t x` positive semidefinite, by bisection.
fn psd_limit(rho: &DMatrix<Complex64>, x: &DMatrix<Complex64>) -> f64 {
    let psd = |t: f64| min_eigenvalue(&(rho + x * Complex64::new(t, 0.0))) >= 0.0;
    if !psd(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while psd(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Samples block states whose single-site marginals all match `target` and
/// checks that none has a larger entropy density than the product state.
pub fn max_entropy_audit(target: &PeriodicProductState, opts: AuditOptions) -> Result<AuditReport> {
    if opts.trials == 0 {
        return Err(Error::Invalid("audit needs at least one trial".into()));
    }
    if opts.block_size == 0 || opts.block_size > MAX_BLOCK_PERIODS {
        return Err(Error::Invalid(format!(
            "block size must be in 1..={MAX_BLOCK_PERIODS} periods, got {}",
            opts.block_size
        )));
    }
    let n = target.period();
    let k = n * opts.block_size;
    let product = target.block(opts.block_size)?;
    let rho0 = product.rho().clone();
    let marginals: Vec<_> = (0..k).map(|j| product.marginal(j)).collect();
    let site_entropy: f64 = (0..k as i64).map(|r| target.site_state(r).entropy()).sum();
    let target_density = entropy_density(target);

    let samples = (0..opts.trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(index as u64);
            let x = strip_local_part(&random_hermitian(rho0.nrows(), &mut rng), k);
            let x = &x / Complex64::new(x.norm(), 0.0);
            let u: f64 = 1.0 - rng.random::<f64>();
            let amplitude = u * psd_limit(&rho0, &x);
            let mut rho = &rho0 + &x * Complex64::new(amplitude, 0.0);
            rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
            let block = BlockState::new(product.sites().to_vec(), rho)?;
            let s = von_neumann_entropy(&block)?;
            let marginal_deviation = (0..k).map(|j| (block.marginal(j) - marginals[j]).camax()).fold(0.0, f64::max);
            Ok(AuditTrial {
                index,
                amplitude,
                density: s / k as f64,
                marginal_deviation,
                subadditivity_excess: s - site_entropy,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_trial_density = samples.iter().map(|t| t.density).fold(f64::NEG_INFINITY, f64::max);
    Ok(AuditReport {
        trials: opts.trials,
        block_size: opts.block_size,
        period: n,
        seed: opts.seed,
        target_density,
        max_trial_density,
        collapsed: samples.iter().filter(|t| t.amplitude < COLLAPSE_TOL).count(),
        max_marginal_deviation: samples.iter().map(|t| t.marginal_deviation).fold(0.0, f64::max),
        max_subadditivity_excess: samples.iter().map(|t| t.subadditivity_excess).fold(f64::NEG_INFINITY, f64::max),
        pass: max_trial_density <= target_density + AUDIT_TOL,
        samples,
    })
}

/// The two-site singlet: both marginals are maximally mixed, the block is pure.
pub fn bell_block() -> BlockState {
    let h = Complex64::new(0.5, 0.0);
    let mut rho = DMatrix::zeros(4, 4);
    for &(a, b, v) in &[(1, 1, h), (2, 2, h), (1, 2, -h), (2, 1, -h)] {
        rho[(a, b)] = v;
    }
    BlockState::new(vec![0, 1], rho).expect("singlet is a valid state")
}
