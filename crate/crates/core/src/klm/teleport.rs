//! C-SIGN boosted by teleporting both inputs into a pre-entangled ancilla.
//!
//! Each input joins the `n` teleport modes of its half of the ancilla, the
//! `n+1` modes pass through a Fourier interferometer and are counted. With
//! `k` photons detected (`0 < k < n+1`) the gate output sits in output mode
//! `k-1` of that half. The remaining output modes are in a definite state and
//! are discarded. Each herald pattern needs fixed output phase shifts, which
//! are calibrated once per order and cached.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::ancilla::ancilla_phi;
use super::csign::{check_pair, check_single_occupancy};
use crate::conditional::{Branch, ConditionalResult};
use crate::error::{OpticsError, Result};
use crate::fock::{apply_interferometer, split_by_outcome, Occupation, SparseState};
use crate::interferometer::{dft_matrix, wrap_angle};
use crate::unitary::ModeUnitary;

/// Phase feed-forward for one herald pattern: `exp(i(global + phase_a n_a + phase_b n_b))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCorrection {
    pub global: f64,
    pub phase_a: f64,
    pub phase_b: f64,
}

pub type CorrectionTable = HashMap<Occupation, PhaseCorrection>;

struct RawBranch {
    pattern: Occupation,
    probability: f64,
    state: SparseState,
    success: bool,
    outputs: Option<(usize, usize)>,
}

/// Photons counted on each side for a herald pattern of length `2(n+1)`.
pub fn side_counts(pattern: &Occupation, n: usize) -> (u32, u32) {
    let c = pattern.counts();
    (c[..=n].iter().sum(), c[n + 1..].iter().sum())
}

fn teleport_raw(state: &SparseState, a: usize, b: usize, n: usize) -> Result<Vec<RawBranch>> {
    check_pair(state, a, b)?;
    if n < 1 {
        return Err(OpticsError::InvalidParameter("teleportation order n must be >= 1".into()));
    }
    check_single_occupancy(state, &[a, b])?;
    let m = state.modes();
    let mut ext = state.tensor(&ancilla_phi(n)?.state);

    let side_a: Vec<usize> = std::iter::once(a).chain(m..m + n).collect();
    let side_b: Vec<usize> = std::iter::once(b).chain(m + 2 * n..m + 3 * n).collect();
    for side in [&side_a, &side_b] {
        ext = apply_interferometer(&ext, &ModeUnitary::new(dft_matrix(n + 1), side.clone())?)?;
    }
    let detectors: Vec<usize> = side_a.iter().chain(&side_b).copied().collect();
    let total = ext.norm_sqr();

    // Survivors: originals without a, b (ascending), then both output blocks.
    let originals: Vec<usize> = (0..m).filter(|&i| i != a && i != b).collect();
    let base = originals.len();

    let mut out = Vec::new();
    for (pattern, post) in split_by_outcome(&ext, &detectors)?.into_iter().rev() {
        let probability = post.norm_sqr() / total;
        let (ka, kb) = side_counts(&pattern, n);
        let ok = |k: u32| k >= 1 && k as usize <= n;
        if !(ok(ka) && ok(kb)) {
            out.push(RawBranch { pattern, probability, state: post.normalized(), success: false, outputs: None });
            continue;
        }
        let chosen_a = base + ka as usize - 1;
        let chosen_b = base + n + kb as usize - 1;
        let spare: Vec<usize> = (base..base + 2 * n).filter(|&i| i != chosen_a && i != chosen_b).collect();
        for (_, reduced) in split_by_outcome(&post, &spare)?.into_iter().rev() {
            let p = reduced.norm_sqr() / total;
            let mut perm: Vec<usize> = originals.clone();
            perm.push(a);
            perm.push(b);
            let placed = reduced.permute_modes(&perm)?.normalized();
            out.push(RawBranch {
                pattern: pattern.clone(),
                probability: p,
                state: placed,
                success: true,
                outputs: Some((ka as usize - 1, kb as usize - 1)),
            });
        }
    }
    Ok(out)
}

fn calibrate(n: usize) -> Result<CorrectionTable> {
    let probe = SparseState::from_terms(
        2,
        [[0, 0], [0, 1], [1, 0], [1, 1]].map(|t| (Occupation(t.to_vec()), Complex64::new(0.5, 0.0))),
    )?;
    let mut table = CorrectionTable::new();
    for br in teleport_raw(&probe, 0, 1, n)?.into_iter().filter(|b| b.success) {
        let amp = |t: [u32; 2]| br.state.amplitude(&Occupation(t.to_vec()));
        let (c00, c01, c10) = (amp([0, 0]), amp([0, 1]), amp([1, 0]));
        if c00.norm() < 1e-9 {
            return Err(OpticsError::MissingCorrection(br.pattern.to_string()));
        }
        table.insert(
            br.pattern,
            PhaseCorrection {
                global: wrap_angle(-c00.arg()),
                phase_a: wrap_angle(c00.arg() - c10.arg()),
                phase_b: wrap_angle(c00.arg() - c01.arg()),
            },
        );
    }
    Ok(table)
}

/// Phase corrections for order `n`, computed on first use.
pub fn correction_table(n: usize) -> Result<Arc<CorrectionTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CorrectionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("correction cache poisoned").get(&n) {
        return Ok(t.clone());
    }
    let table = Arc::new(calibrate(n)?);
    let mut guard = cache.lock().expect("correction cache poisoned");
    Ok(guard.entry(n).or_insert(table).clone())
}

/// Teleportation-boosted C-SIGN on modes `(a, b)` with ancilla order `n`.
/// Success probability is `(n/(n+1))^2`.
pub fn csign_teleported(state: &SparseState, a: usize, b: usize, n: usize) -> Result<ConditionalResult> {
    let raw = teleport_raw(state, a, b, n)?;
    let table = correction_table(n)?;
    let mut branches = Vec::with_capacity(raw.len());
    for br in raw {
        if !br.success {
            branches.push(Branch {
                outcome: br.pattern,
                probability: br.probability,
                state: br.state,
                success: false,
                correction: String::new(),
            });
            continue;
        }
        let corr = table.get(&br.pattern).ok_or_else(|| OpticsError::MissingCorrection(br.pattern.to_string()))?;
        let state = br.state.map_amplitudes(|occ, amp| {
            let c = occ.counts();
            let phase = corr.global + corr.phase_a * c[a] as f64 + corr.phase_b * c[b] as f64;
            amp * Complex64::from_polar(1.0, phase)
        });
        let (oa, ob) = br.outputs.expect("success branches record their outputs");
        branches.push(Branch {
            correction: format!(
                "out{oa}->{a} out{ob}->{b} phase_a={:.6} phase_b={:.6} global={:.6}",
                corr.phase_a, corr.phase_b, corr.global
            ),
            outcome: br.pattern,
            probability: br.probability,
            state,
            success: true,
        });
    }
    Ok(ConditionalResult { branches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_probability_and_table() {
        for (x, y, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            let input = SparseState::basis(Occupation(vec![x, y]));
            let r = csign_teleported(&input, 0, 1, 1).unwrap();
            assert!((r.success_probability() - 0.25).abs() < 1e-12, "{x}{y}");
            assert!((r.total_probability() - 1.0).abs() < 1e-12);
            let expected = input.clone().scaled(Complex64::new(sign, 0.0));
            for br in r.successes() {
                assert!(br.state.approx_eq(&expected, 1e-9), "{x}{y} {:?}", br.state);
            }
        }
    }

    #[test]
    fn reversed_and_embedded_modes() {
        // Spectator mode 1 carries a photon; gate acts on (2, 0).
        let input = SparseState::from_terms(
            3,
            [
                (Occupation(vec![1, 1, 1]), Complex64::new(0.6, 0.0)),
                (Occupation(vec![0, 1, 1]), Complex64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        let r = csign_teleported(&input, 2, 0, 1).unwrap();
        let expected = SparseState::from_terms(
            3,
            [
                (Occupation(vec![1, 1, 1]), Complex64::new(-0.6, 0.0)),
                (Occupation(vec![0, 1, 1]), Complex64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        assert!((r.success_probability() - 0.25).abs() < 1e-12);
        for br in r.successes() {
            assert!(br.state.approx_eq(&expected, 1e-9));
        }
    }

    #[test]
    fn rejects_bad_order() {
        let s = SparseState::basis(Occupation(vec![1, 1]));
        assert!(csign_teleported(&s, 0, 1, 0).is_err());
    }
}
