use serde::Serialize;

use crate::error::{Error, Result};
use crate::microdyn::BlochVector;

use super::density::{bloch_density_matrix, BlockState, SingleSiteState, BLOCH_NORM_TOL};

/// Product state repeating one period of single-site Bloch vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicProductState {
    thetas: Vec<BlochVector>,
}

impl PeriodicProductState {
    pub fn new(thetas: Vec<BlochVector>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::Invalid("periodic state needs at least one site".into()));
        }
        for t in &thetas {
            if t.norm() > 1.0 + BLOCH_NORM_TOL {
                return Err(Error::BlochNorm { norm: t.norm() });
            }
        }
        Ok(Self { thetas })
    }

    pub fn period(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[BlochVector] {
        &self.thetas
    }

    pub fn theta(&self, r: i64) -> BlochVector {
        self.thetas[r.rem_euclid(self.period() as i64) as usize]
    }

    pub fn site_state(&self, r: i64) -> SingleSiteState {
        bloch_density_matrix(&self.theta(r)).expect("norm checked on construction")
    }

    /// Density matrix of sites `0..periods * n`.
    pub fn block(&self, periods: usize) -> Result<BlockState> {
        let sites: Vec<i64> = (0..(periods * self.period()) as i64).collect();
        let factors: Vec<_> = sites.iter().map(|&r| self.site_state(r)).collect();
        BlockState::product(sites, &factors)
    }
}

/// Mean single-site entropy over one period.
pub fn entropy_density(state: &PeriodicProductState) -> f64 {
    let n = state.period();
    (0..n as i64).map(|r| state.site_state(r).entropy()).sum::<f64>() / n as f64
}
