//! Nondeterministic linear-optics primitives: NS, C-SIGN and its
//! teleportation-boosted variant.

mod ancilla;
mod csign;
mod ns;
mod teleport;

pub use ancilla::{ancilla_phi, AncillaSpec};
pub use csign::{csign_basic, csign_ideal};
pub use ns::{apply_ns, ns_conditional_amplitudes, ns_unitary, solve_ns_unitary, NS_HERALD};
pub use teleport::{correction_table, csign_teleported, side_counts, CorrectionTable, PhaseCorrection};

use std::fmt;
use std::str::FromStr;

use crate::conditional::ConditionalResult;
use crate::error::{OpticsError, Result};
use crate::fock::SparseState;

/// Which C-SIGN realization a composite gate uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Unit-probability logical gate; isolates encoding logic from heralding.
    Ideal,
    /// Two NS devices, success 1/16.
    Basic,
    /// Teleportation-boosted with ancilla order `n`, success `(n/(n+1))^2`.
    Teleported(usize),
}

impl Backend {
    pub fn csign(&self, state: &SparseState, a: usize, b: usize) -> Result<ConditionalResult> {
        match *self {
            Backend::Ideal => csign_ideal(state, a, b),
            Backend::Basic => csign_basic(state, a, b),
            Backend::Teleported(n) => csign_teleported(state, a, b, n),
        }
    }

    /// Success probability of one C-SIGN on this backend.
    pub fn csign_probability(&self) -> f64 {
        match *self {
            Backend::Ideal => 1.0,
            Backend::Basic => 1.0 / 16.0,
            Backend::Teleported(n) => {
                let r = n as f64 / (n as f64 + 1.0);
                r * r
            }
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Ideal => f.write_str("ideal"),
            Backend::Basic => f.write_str("basic"),
            Backend::Teleported(n) => write!(f, "teleported:{n}"),
        }
    }
}

impl FromStr for Backend {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Backend::Ideal),
            "basic" => Ok(Backend::Basic),
            _ => {
                let n = s
                    .strip_prefix("teleported:")
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| OpticsError::InvalidParameter(format!("unknown backend {s:?}")))?;
                Ok(Backend::Teleported(n))
            }
        }
    }
}
