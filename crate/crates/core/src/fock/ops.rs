use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::state::PRUNE_THRESHOLD;
use super::{Occupation, SparseState};
use crate::error::{OpticsError, Result};
use crate::interferometer::{beam_splitter, reck_decompose, Element};
use crate::unitary::{unitarity_deviation, CMatrix, ModeUnitary, UNITARY_TOL};

const TABLE: usize = 128;

fn sqrt_factorials() -> &'static [f64; TABLE] {
    static CELL: OnceLock<[f64; TABLE]> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut t = [1.0; TABLE];
        for n in 1..TABLE {
            t[n] = t[n - 1] * (n as f64).sqrt();
        }
        t
    })
}

fn binomials(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

fn check_mode(state: &SparseState, mode: usize) -> Result<()> {
    if mode >= state.modes() {
        return Err(OpticsError::ModeOutOfRange { mode, modes: state.modes() });
    }
    Ok(())
}

fn powers(base: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(acc);
        acc *= base;
    }
    out
}

/// Applies a 2x2 mode transformation to modes `(i, j)`.
pub fn apply_two_mode(state: &SparseState, u: &CMatrix, i: usize, j: usize) -> Result<SparseState> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(OpticsError::ShapeMismatch(format!("expected 2x2, got {}x{}", u.nrows(), u.ncols())));
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARY_TOL {
        return Err(OpticsError::NotUnitary { deviation });
    }
    check_mode(state, i)?;
    check_mode(state, j)?;
    if i == j {
        return Err(OpticsError::DuplicateMode(i));
    }
    Ok(two_mode_unchecked(state, u, i, j))
}

pub(crate) fn two_mode_unchecked(state: &SparseState, u: &CMatrix, i: usize, j: usize) -> SparseState {
    let sf = sqrt_factorials();
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, &amp) in state.terms_map() {
        let p = occ.0[i] as usize;
        let q = occ.0[j] as usize;
        if p == 0 && q == 0 {
            *out.entry(occ.clone()).or_default() += amp;
            continue;
        }
        // (u00 a_i + u10 a_j)^p (u01 a_i + u11 a_j)^q, expanded binomially.
        let (bp, bq) = (binomials(p), binomials(q));
        let (p00, p10) = (powers(u00, p), powers(u10, p));
        let (p01, p11) = (powers(u01, q), powers(u11, q));
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p + q + 1];
        for r in 0..=p {
            let a = p00[r] * p10[p - r] * bp[r];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for s in 0..=q {
                let b = p01[s] * p11[q - s] * bq[s];
                coeffs[r + s] += a * b;
            }
        }
        let norm_in = sf[p] * sf[q];
        let total = p + q;
        let mut key = occ.clone();
        for (ni, c) in coeffs.into_iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            key.0[i] = ni as u32;
            key.0[j] = (total - ni) as u32;
            let factor = sf[ni] * sf[total - ni] / norm_in;
            *out.entry(key.clone()).or_default() += amp * c * factor;
        }
    }
    let mut result = SparseState::from_map(state.modes(), out);
    result.prune(PRUNE_THRESHOLD);
    result
}

/// Multiplies each term by `exp(i * phi * n_mode)`.
pub fn apply_phase(state: &SparseState, mode: usize, phi: f64) -> Result<SparseState> {
    check_mode(state, mode)?;
    if !phi.is_finite() {
        return Err(OpticsError::InvalidParameter(format!("phase {phi}")));
    }
    Ok(phase_unchecked(state, mode, phi))
}

fn phase_unchecked(state: &SparseState, mode: usize, phi: f64) -> SparseState {
    state.clone().map_amplitudes(|occ, a| a * Complex64::from_polar(1.0, phi * occ.0[mode] as f64))
}

/// Applies one decomposition element; its local mode indices are mapped through `targets`.
pub fn apply_element(state: &SparseState, element: &Element, targets: &[usize]) -> Result<SparseState> {
    let map = |m: usize| targets.get(m).copied().ok_or(OpticsError::ModeOutOfRange { mode: m, modes: targets.len() });
    match *element {
        Element::BeamSplitter { i, j, theta } => apply_two_mode(state, &beam_splitter(theta), map(i)?, map(j)?),
        Element::PhaseShifter { mode, phi } => apply_phase(state, map(mode)?, phi),
    }
}

/// Applies `u` as a sequence of elementary splitters and phase shifters.
pub fn apply_interferometer(state: &SparseState, u: &ModeUnitary) -> Result<SparseState> {
    for &t in u.targets() {
        check_mode(state, t)?;
    }
    let elements = reck_decompose(u.matrix())?;
    let mut current = state.clone();
    for e in &elements {
        current = apply_element(&current, e, u.targets())?;
    }
    Ok(current)
}
