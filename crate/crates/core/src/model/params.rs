use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the n-mode laser model.
///
/// Rates are in inverse time units; `epsilon` is the atomic level splitting
/// (with hbar = 1 it doubles as the atomic transition frequency).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n: usize,
    pub epsilon: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eta: f64,
    pub omega: Vec<f64>,
    pub kappa: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl ModelParams {
    pub fn single_mode(epsilon: f64, gamma1: f64, gamma2: f64, eta: f64, omega: f64, kappa: f64, lambda: f64) -> Self {
        Self { n: 1, epsilon, gamma1, gamma2, eta, omega: vec![omega], kappa: vec![kappa], lambda: vec![lambda] }
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda: Vec<f64>) -> Self {
        Self { lambda, ..self.clone() }
    }

    /// Decay rate of the Bloch Green function, `min(gamma1, gamma2)`.
    pub fn bloch_decay_rate(&self) -> f64 {
        self.gamma1.min(self.gamma2)
    }

    /// Slowest linear relaxation rate among atoms and modes.
    pub fn slowest_rate(&self) -> f64 {
        self.kappa.iter().copied().fold(self.gamma1.min(self.gamma2), f64::min)
    }

    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }
}

/// Checks every structural and physical constraint on the parameters.
///
/// The boundary cases `gamma2 == 2 * gamma1` and `|eta| == 1` are accepted.
pub fn validate_params(params: ModelParams) -> Result<ModelParams> {
    let fail = |msg: String| Err(Error::Constraint(msg));
    if params.n == 0 {
        return fail("n must be at least 1".into());
    }
    for (name, arr) in [("omega", &params.omega), ("kappa", &params.kappa), ("lambda", &params.lambda)] {
        if arr.len() != params.n {
            return fail(format!("{name} has length {} but n = {}", arr.len(), params.n));
        }
        if arr.iter().any(|v| !v.is_finite()) {
            return fail(format!("{name} contains a non-finite value"));
        }
    }
    for (name, v) in
        [("epsilon", params.epsilon), ("gamma1", params.gamma1), ("gamma2", params.gamma2), ("eta", params.eta)]
    {
        if !v.is_finite() {
            return fail(format!("{name} is not finite"));
        }
    }
    if params.epsilon <= 0.0 {
        return fail("epsilon must be positive".into());
    }
    if params.gamma2 <= 0.0 {
        return fail("gamma2 must be positive".into());
    }
    if params.gamma2 > 2.0 * params.gamma1 {
        return fail("gamma2 exceeds 2*gamma1".into());
    }
    if !(-1.0..=1.0).contains(&params.eta) {
        return fail("eta outside [-1,1]".into());
    }
    if let Some(l) = params.omega.iter().position(|&w| w <= 0.0) {
        return fail(format!("omega[{l}] must be positive"));
    }
    if let Some(l) = params.kappa.iter().position(|&k| k <= 0.0) {
        return fail(format!("kappa[{l}] must be positive"));
    }
    Ok(params)
}
