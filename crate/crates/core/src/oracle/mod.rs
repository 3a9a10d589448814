//! Exact finite-size reference: `2N+1` atoms coupled to truncated bosonic
//! modes under the full Lindblad master equation.

mod convergence;
mod evolve;
mod sparse;
mod state;
mod system;

pub use convergence::{
    convergence_report, non_increasing_trend, uniform_bloch, ConvergenceOptions, ConvergenceReport, ConvergenceRow,
};
pub use evolve::{
    apply_generator, evolve_master, evolve_master_sampled, superoperator, MasterOptions, EXACT_PROPAGATOR_MAX_DIM,
    LEAK_TOL, POSITIVITY_TOL, TRACE_TOL,
};
pub use sparse::SparseOp;
pub use state::{build_initial_state, connected_correlator, macro_expectations, MacroExpectations, OracleState};
pub use system::{
    assemble_atom_dissipator, assemble_system, default_cutoff, sigma_minus, sigma_plus, AtomChannel, Jump,
    OracleSystem, SpinComponent, DEFAULT_DIMENSION_CAP,
};
