//! The classical macroscopic flow: vector field, integration, linear
//! stability, Lyapunov spectra, limit cycles and phase labelling.

mod cycle;
mod flow;
mod lyapunov;
mod phase;
mod rhs;
mod stability;

pub use cycle::{extract_limit_cycle, LimitCycle, CYCLE_REL_TOL, INACTIVE_TOL};
pub use flow::{integrate_flow, integrate_flow_through, Trajectory, TRAJECTORY_SYMMETRY_TOL};
pub use lyapunov::{lyapunov_spectrum, lyapunov_spectrum_with, LyapunovOptions, REORTHO_INTERVAL, REORTHO_STEPS};
pub use phase::{
    classify_phase, classify_phase_with, normal_to_coherent, perturbed_start, scan_eta, zero_tolerance,
    ClassifyOptions, PhaseLabel, PhasePortrait, ScanRow,
};
pub use rhs::{jacobian_at, macro_rhs, normal_fixed_point};
pub use stability::{
    eigenvalues, find_eta1, fixed_point_leading_eigenvalue, leading_eigenvalue, HopfPoint, ETA1_BRACKET_WIDTH,
};

pub use flow::uniform_grid;
