use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

fn default_t_end() -> f64 {
    100.0
}
fn default_macro_tol() -> f64 {
    1e-8
}
fn default_sample_dt() -> f64 {
    0.01
}
fn default_scan_tol() -> f64 {
    1e-9
}
fn default_perturbation() -> f64 {
    1e-2
}
fn default_site_tol() -> f64 {
    1e-10
}
fn default_micro_dt() -> f64 {
    0.1
}
fn default_checks() -> usize {
    20
}
fn default_oracle_tol() -> f64 {
    1e-10
}
fn default_cap() -> usize {
    crate::oracle::DEFAULT_DIMENSION_CAP
}
fn default_directory() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroSection {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_macro_tol")]
    pub tol: f64,
    #[serde(default = "default_sample_dt")]
    pub sample_dt: f64,
    /// Packed initial state; the normal fixed point when absent.
    pub x0: Option<Vec<f64>>,
}

impl Default for MacroSection {
    fn default() -> Self {
        Self { t_end: default_t_end(), tol: default_macro_tol(), sample_dt: default_sample_dt(), x0: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub eta_min: f64,
    pub eta_max: f64,
    pub points: usize,
    /// Defaults to twenty slowest relaxation times.
    pub t_transient: Option<f64>,
    /// Defaults to ten transients.
    pub t_sample: Option<f64>,
    #[serde(default = "default_scan_tol")]
    pub tol: f64,
    /// Size of the kick away from the normal fixed point at every grid point.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicroSection {
    pub sites: Vec<i64>,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default = "default_micro_dt")]
    pub sample_dt: f64,
    #[serde(default = "default_site_tol")]
    pub tol: f64,
    /// Random `(r, t)` points for the two-route agreement check.
    #[serde(default = "default_checks")]
    pub checks: usize,
    /// Packed macroscopic initial state; a small kick off the fixed point when absent.
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropySection {
    pub trials: usize,
    pub block_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// One period of target Bloch vectors; the normal-phase state `(0, 0, eta)` when absent.
    pub thetas: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub n_list: Vec<usize>,
    pub cutoffs: Option<Vec<usize>>,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
    /// Packed initial state with identical atoms; falls back to `macro.x0`.
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: default_directory(), format: OutputFormat::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default, rename = "macro")]
    pub macro_run: MacroSection,
    pub scan: Option<ScanSection>,
    pub micro: Option<MicroSection>,
    pub entropy: Option<EntropySection>,
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// SHA-256 of the source text.
    #[serde(skip)]
    pub hash: String,
}

fn constraint_path(message: &str) -> String {
    const FIELDS: [&str; 8] = ["gamma2", "gamma1", "epsilon", "omega", "kappa", "lambda", "eta", "n "];
    let field = FIELDS.iter().find(|f| message.starts_with(*f) || message.contains(&format!(" {f}")));
    format!("model.{}", field.map_or("", |f| f.trim()))
}

/// Parses and validates a TOML run configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: e.span().map_or_else(String::new, |s| format!("line {}", 1 + text[..s.start].matches('\n').count())),
        message: e.message().to_string(),
    })?;
    cfg.model = validate_params(cfg.model).map_err(|e| match e {
        Error::Constraint(message) => Error::Config { path: constraint_path(&message), message },
        other => other,
    })?;
    let m = &cfg.macro_run;
    if !(m.t_end > 0.0) || !(m.sample_dt > 0.0) || !(m.tol > 0.0 && m.tol <= 1e-3) {
        return Err(Error::Config {
            path: "macro".into(),
            message: "t_end and sample_dt must be positive and tol in (0, 1e-3]".into(),
        });
    }
    let digest = Sha256::digest(text.as_bytes());
    cfg.hash = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(cfg)
}

pub fn read_config(path: &std::path::Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
n = 1
epsilon = 1.0
gamma1 = 1.0
gamma2 = 1.0
eta = 0.5
omega = [1.0]
kappa = [0.5]
lambda = [1.0]
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.macro_run.tol, 1e-8);
        assert_eq!(cfg.macro_run.sample_dt, 0.01);
        assert_eq!(cfg.output.format, OutputFormat::Csv);
        assert_eq!(cfg.hash.len(), 64);
    }

    #[test]
    fn constraint_violation_names_field() {
        let text = MINIMAL.replace("gamma2 = 1.0", "gamma2 = 3.0");
        match parse_config(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "model.gamma2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("eta = 0.5", "eta = 0.5\ngamma3 = 1.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("gamma3"), "{err}");
    }
}
