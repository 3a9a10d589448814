//! Single-site Bloch dynamics driven by the classical pilot field, and the
//! asymptotic product states they relax to.

mod asymptotic;
mod bloch;
mod field;

pub use asymptotic::{
    asymptotic_theta, asymptotic_theta_with, closed_form_state, integrate_theta, theta_fourier, AsymptoticPhase,
    ASYMPTOTIC_HORIZON, SITE_TOL,
};
pub use bloch::{
    bloch_generator, evolve_site, generator_for_field, propagate_affine, pump_vector, site_series, BlochAffine,
    BlochVector,
};
pub use field::PilotField;
