//! Density matrices, von Neumann entropy, entropy density of periodic
//! product states and the marginal-constrained maximum-entropy audit.

mod audit;
mod density;
mod periodic;

pub use audit::{
    bell_block, max_entropy_audit, strip_local_part, AuditOptions, AuditReport, AuditTrial, AUDIT_TOL, COLLAPSE_TOL,
    MAX_BLOCK_PERIODS,
};
pub use density::{
    binary_entropy, bloch_density_matrix, min_eigenvalue, pauli_x, pauli_y, pauli_z, single_site_trace,
    von_neumann_entropy, von_neumann_entropy_with_unit, BlockState, SingleSiteState, BLOCH_NORM_TOL, PSD_TOL,
};
pub use periodic::{entropy_density, PeriodicProductState};
