//! Qudits carried by one photon over `d` modes, their Bell states, and the
//! C-SWAP / C-SHIFT gates built on a C-SIGN backend.

mod cshift;
mod cswap;
mod network;
mod register;

pub use cshift::{apply_cshift, cshift_reference, COALESCE_TOL};
pub use cswap::{cswap, cswap_rail, cswap_reference, rail_is_exact, Rail};
pub use network::{cshift_network, rotation_target, search_minimal_network, ControlledSwap, SwapNetwork};
pub use register::{bell_state, generalized_bell, hadamard_d, logical_state, QuditRegister};
