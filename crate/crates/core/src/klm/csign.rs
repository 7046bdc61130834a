use std::f64::consts::FRAC_PI_4;

use crate::conditional::{Branch, ConditionalResult};
use crate::error::{OpticsError, Result};
use crate::fock::{apply_interferometer, measure_modes, two_mode_unchecked, Occupation, SparseState};
use crate::interferometer::beam_splitter;

use super::ns::{ns_unitary, NS_HERALD};

pub(crate) fn check_pair(state: &SparseState, a: usize, b: usize) -> Result<()> {
    let m = state.modes();
    for mode in [a, b] {
        if mode >= m {
            return Err(OpticsError::ModeOutOfRange { mode, modes: m });
        }
    }
    if a == b {
        return Err(OpticsError::DuplicateMode(a));
    }
    Ok(())
}

/// Rejects states with more than one photon in any of `modes`.
pub(crate) fn check_single_occupancy(state: &SparseState, modes: &[usize]) -> Result<()> {
    for (occ, _) in state.iter() {
        if let Some(&m) = modes.iter().find(|&&m| occ.counts()[m] > 1) {
            return Err(OpticsError::InvalidParameter(format!(
                "mode {m} holds {} photons in term {occ}; the gate accepts at most one",
                occ.counts()[m]
            )));
        }
    }
    Ok(())
}

/// Unit-probability reference gate: `|1,1> -> -|1,1>` on modes `(a, b)`.
pub fn csign_ideal(state: &SparseState, a: usize, b: usize) -> Result<ConditionalResult> {
    check_pair(state, a, b)?;
    let out =
        state.clone().map_amplitudes(|occ, amp| if occ.counts()[a] == 1 && occ.counts()[b] == 1 { -amp } else { amp });
    Ok(ConditionalResult::deterministic(out))
}

/// C-SIGN from a pair of NS devices between two balanced splitters
/// (`theta = pi/4` before, `-pi/4` after). Success needs both NS heralds.
pub fn csign_basic(state: &SparseState, a: usize, b: usize) -> Result<ConditionalResult> {
    check_pair(state, a, b)?;
    check_single_occupancy(state, &[a, b])?;
    let m = state.modes();
    let herald: Vec<u32> = NS_HERALD.iter().chain(NS_HERALD.iter()).copied().collect();
    let ext = state.tensor(&SparseState::basis(Occupation(herald.clone())));

    let mut s = two_mode_unchecked(&ext, &beam_splitter(FRAC_PI_4), a, b);
    s = apply_interferometer(&s, &ns_unitary().on_modes(vec![a, m, m + 1])?)?;
    s = apply_interferometer(&s, &ns_unitary().on_modes(vec![b, m + 2, m + 3])?)?;
    s = two_mode_unchecked(&s, &beam_splitter(-FRAC_PI_4), a, b);

    let branches = measure_modes(&s, &[m, m + 1, m + 2, m + 3])?
        .into_iter()
        .map(|br| Branch {
            success: br.outcome.counts() == herald.as_slice(),
            outcome: br.outcome,
            probability: br.probability,
            state: br.post_state,
            correction: String::new(),
        })
        .collect();
    Ok(ConditionalResult { branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn truth_table() {
        for (x, y, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            let input = SparseState::basis(Occupation(vec![x, y]));
            let r = csign_basic(&input, 0, 1).unwrap();
            assert!((r.success_probability() - 1.0 / 16.0).abs() < 1e-12);
            assert!((r.total_probability() - 1.0).abs() < 1e-12);
            let expected = input.clone().scaled(c(sign));
            let got = &r.successes().next().unwrap().state;
            assert!(got.approx_eq(&expected, 1e-12), "{x}{y}: {got:?}");
        }
    }

    #[test]
    fn product_superposition() {
        let terms = [[0, 0], [0, 1], [1, 0], [1, 1]];
        let input = SparseState::from_terms(2, terms.map(|t| (Occupation(t.to_vec()), c(0.5)))).unwrap();
        let r = csign_basic(&input, 0, 1).unwrap();
        assert!((r.success_probability() - 1.0 / 16.0).abs() < 1e-12);
        let expected = SparseState::from_terms(
            2,
            terms.map(|t| (Occupation(t.to_vec()), c(if t == [1, 1] { -0.5 } else { 0.5 }))),
        )
        .unwrap();
        assert!(r.successes().next().unwrap().state.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn rejects_collisions_and_overfull_modes() {
        let s = SparseState::basis(Occupation(vec![1, 1]));
        assert!(matches!(csign_basic(&s, 1, 1), Err(OpticsError::DuplicateMode(1))));
        let s2 = SparseState::basis(Occupation(vec![2, 0]));
        assert!(csign_basic(&s2, 0, 1).is_err());
    }

    #[test]
    fn ideal_flips_only_double_occupancy() {
        let s = SparseState::basis(Occupation(vec![1, 0, 1]));
        let r = csign_ideal(&s, 0, 2).unwrap();
        assert_eq!(r.success_probability(), 1.0);
        assert!(r.branches[0].state.approx_eq(&s.clone().scaled(c(-1.0)), 0.0));
        let r = csign_ideal(&s, 0, 1).unwrap();
        assert!(r.branches[0].state.approx_eq(&s, 0.0));
    }
}
