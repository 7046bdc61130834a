//! Photon-controlled swap of two modes: a balanced splitter on the targets, a
//! C-SIGN between the control and one target rail, and the inverse splitter.

use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use crate::conditional::ConditionalResult;
use crate::error::{OpticsError, Result};
use crate::fock::{two_mode_unchecked, Occupation, SparseState};
use crate::interferometer::beam_splitter;
use crate::klm::Backend;
use crate::unitary::check_distinct;

/// Which target mode meets the C-SIGN.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rail {
    P,
    Q,
}

fn run(
    state: &SparseState,
    control: usize,
    p: usize,
    q: usize,
    rail: Rail,
    backend: Backend,
) -> Result<ConditionalResult> {
    let spread = two_mode_unchecked(state, &beam_splitter(FRAC_PI_4), p, q);
    let rail_mode = match rail {
        Rail::P => p,
        Rail::Q => q,
    };
    backend
        .csign(&spread, control, rail_mode)?
        .map_success(|s| Ok(two_mode_unchecked(&s, &beam_splitter(-FRAC_PI_4), p, q)))
}

/// True when `rail` realizes the swap with phase +1 on all four control/target
/// configurations (photon in p or q, control empty or occupied).
pub fn rail_is_exact(rail: Rail) -> bool {
    let configs = [[0u32, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [1, 0, 0], [0, 0, 0]];
    configs.iter().all(|c| {
        let input = SparseState::basis(Occupation(c.to_vec()));
        let expected = if c[0] == 1 { SparseState::basis(Occupation(vec![c[0], c[2], c[1]])) } else { input.clone() };
        run(&input, 0, 1, 2, rail, Backend::Ideal)
            .ok()
            .and_then(|r| r.branches.into_iter().next())
            .is_some_and(|b| b.state.approx_eq(&expected, 1e-12))
    })
}

/// The rail choice, fixed once by the amplitude-exact truth table.
pub fn cswap_rail() -> Rail {
    static RAIL: OnceLock<Rail> = OnceLock::new();
    *RAIL.get_or_init(|| {
        [Rail::P, Rail::Q].into_iter().find(|&r| rail_is_exact(r)).expect("one rail reproduces the C-SWAP table")
    })
}

/// Swaps modes `p` and `q` when `control` holds a photon. Success probability
/// equals that of the backend's C-SIGN.
pub fn cswap(state: &SparseState, control: usize, p: usize, q: usize, backend: Backend) -> Result<ConditionalResult> {
    let modes = state.modes();
    for m in [control, p, q] {
        if m >= modes {
            return Err(OpticsError::ModeOutOfRange { mode: m, modes });
        }
    }
    check_distinct(&[control, p, q])?;
    for (occ, _) in state.iter() {
        let c = occ.counts();
        if c[control] > 1 || c[p] + c[q] > 1 {
            return Err(OpticsError::InvalidParameter(format!(
                "term {occ}: C-SWAP needs <= 1 photon in the control and <= 1 across the targets"
            )));
        }
    }
    run(state, control, p, q, cswap_rail(), backend)
}

/// Deterministic logical reference: swap `p`/`q` counts on terms whose control is occupied.
pub fn cswap_reference(state: &SparseState, control: usize, p: usize, q: usize) -> SparseState {
    let mut out = SparseState::empty(state.modes());
    for (occ, amp) in state.iter() {
        let mut c = occ.counts().to_vec();
        if c[control] == 1 {
            c.swap(p, q);
        }
        out.add_unchecked(Occupation(c), *amp);
    }
    out
}
