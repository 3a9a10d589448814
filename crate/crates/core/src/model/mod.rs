//! Model parameters, phase-space coordinates and the classical pilot field.

mod params;
mod state;

pub use params::{validate_params, ModelParams};
pub use state::{field_at_site, pack_state, packed_labels, packed_len, unpack_state, MacroState, SYMMETRY_TOL};
pub(crate) use state::{pack_into, pack_unchecked, root_of_unity, unpack_into};
