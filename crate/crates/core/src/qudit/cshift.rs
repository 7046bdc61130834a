use crate::conditional::ConditionalResult;
use crate::error::{OpticsError, Result};
use crate::fock::SparseState;
use crate::klm::Backend;

use super::cswap::cswap;
use super::network::SwapNetwork;
use super::register::QuditRegister;

/// Amplitude tolerance for merging success branches that carry the same state.
pub const COALESCE_TOL: f64 = 1e-12;

/// `|x>|y> -> |x>|(y - x) mod d>` by running `network` one C-SWAP at a time.
///
/// Success branches are merged between C-SWAPs when their states agree, so
/// the branch count stays bounded for teleported backends; failure branches
/// stop the circuit and keep their probability mass.
pub fn apply_cshift(
    state: &SparseState,
    control: &QuditRegister,
    target: &QuditRegister,
    network: &SwapNetwork,
    backend: Backend,
) -> Result<ConditionalResult> {
    if control.d() != target.d() || network.d != control.d() {
        return Err(OpticsError::ShapeMismatch(format!(
            "registers of dimension {} and {} with a d={} network",
            control.d(),
            target.d(),
            network.d
        )));
    }
    if control.overlaps(target) {
        return Err(OpticsError::InvalidParameter("control and target registers overlap".into()));
    }
    for &m in control.modes().iter().chain(target.modes()) {
        if m >= state.modes() {
            return Err(OpticsError::ModeOutOfRange { mode: m, modes: state.modes() });
        }
    }
    let mut result = ConditionalResult::deterministic(state.clone());
    for s in &network.swaps {
        let (c, p, q) = (control.mode(s.control), target.mode(s.p), target.mode(s.q));
        result = result.then(|st| cswap(st, c, p, q, backend))?.coalesce_successes(COALESCE_TOL);
    }
    Ok(result)
}

/// Logical reference for the C-SHIFT on basis terms (validly encoded registers only).
pub fn cshift_reference(state: &SparseState, control: &QuditRegister, target: &QuditRegister) -> Result<SparseState> {
    let d = control.d();
    let mut out = SparseState::empty(state.modes());
    for (occ, amp) in state.iter() {
        let (Some(x), Some(y)) = (control.decode(occ), target.decode(occ)) else {
            return Err(OpticsError::InvalidParameter(format!("term {occ} is not validly encoded")));
        };
        let mut counts = occ.counts().to_vec();
        counts[target.mode(y)] = 0;
        counts[target.mode((y + d - x) % d)] = 1;
        out.add(counts.into(), *amp)?;
    }
    Ok(out)
}
