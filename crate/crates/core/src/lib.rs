//! Numerical laboratory for the dissipative multi-mode Dicke laser model.
//!
//! * [`model`]: parameters, phase-space coordinates, pilot field.
//! * [`macroflow`]: the classical flow, its fixed point, Hopf threshold,
//!   Lyapunov spectrum and phase classification.
//! * [`microdyn`]: single-site Bloch dynamics piloted by the classical field.
//! * [`entropy`]: density matrices, von Neumann entropy and the
//!   constrained maximum-entropy audit.
//! * [`oracle`]: exact finite-size Lindblad evolution for validating the
//!   mean-field limit.
//! * [`io`]: configuration, command orchestration and CSV/JSON output.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod io;
pub mod macroflow;
pub mod microdyn;
pub mod model;
pub mod ode;
pub mod oracle;

pub use error::{Error, Result};
