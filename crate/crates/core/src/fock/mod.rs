//! Multimode bosonic Fock space: basis labels, sparse states, passive
//! transformations, photon-number measurement and the permanent oracle.

mod measure;
mod occupation;
mod ops;
mod permanent;
mod serial;
mod state;

pub use measure::{measure_modes, split_by_outcome, MeasurementBranch};
pub use occupation::{enumerate_sector, fock_dim, Occupation};
pub(crate) use ops::two_mode_unchecked;
pub use ops::{apply_element, apply_interferometer, apply_phase, apply_two_mode};
pub use permanent::{permanent, transition_amplitude};
pub use serial::{read_state, write_state};
pub use state::{SparseState, PRUNE_THRESHOLD};
