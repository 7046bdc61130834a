use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Occupation, SparseState};
use crate::error::{OpticsError, Result};
use crate::unitary::check_distinct;

/// One photon-number outcome on the measured modes.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBranch {
    /// Counts on the measured modes, in the order they were requested.
    pub outcome: Occupation,
    pub probability: f64,
    /// Renormalized state on the surviving modes (ascending original order).
    pub post_state: SparseState,
}

/// Groups terms by their counts on `measured` and returns one branch per outcome,
/// in descending outcome order. Probabilities are relative to the input norm.
pub fn measure_modes(state: &SparseState, measured: &[usize]) -> Result<Vec<MeasurementBranch>> {
    let parts = split_by_outcome(state, measured)?;
    let total = state.norm_sqr();
    Ok(parts
        .into_iter()
        .rev()
        .map(|(outcome, post)| {
            let p = post.norm_sqr();
            MeasurementBranch {
                outcome,
                probability: if total > 0.0 { p / total } else { 0.0 },
                post_state: post.normalized(),
            }
        })
        .collect())
}

/// Unnormalized projections keyed by outcome; squared norms are absolute branch weights.
pub fn split_by_outcome(state: &SparseState, measured: &[usize]) -> Result<BTreeMap<Occupation, SparseState>> {
    check_distinct(measured)?;
    let modes = state.modes();
    let mut is_measured = vec![false; modes];
    for &m in measured {
        if m >= modes {
            return Err(OpticsError::ModeOutOfRange { mode: m, modes });
        }
        is_measured[m] = true;
    }
    let survivors: Vec<usize> = (0..modes).filter(|m| !is_measured[*m]).collect();
    let mut groups: BTreeMap<Occupation, BTreeMap<Occupation, Complex64>> = BTreeMap::new();
    for (occ, amp) in state.terms_map() {
        let outcome = Occupation(measured.iter().map(|&m| occ.0[m]).collect());
        let rest = Occupation(survivors.iter().map(|&m| occ.0[m]).collect());
        *groups.entry(outcome).or_default().entry(rest).or_default() += *amp;
    }
    Ok(groups
        .into_iter()
        .map(|(k, terms)| (k, SparseState::from_map(survivors.len(), terms)))
        .filter(|(_, s)| s.norm_sqr() > 0.0)
        .collect())
}
