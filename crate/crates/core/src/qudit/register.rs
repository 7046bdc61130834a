use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{OpticsError, Result};
use crate::fock::{Occupation, SparseState};
use crate::unitary::{check_distinct, CMatrix};

/// A qudit carried by one photon over `d` modes; logical `j` is a photon in `modes[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditRegister {
    modes: Vec<usize>,
}

impl QuditRegister {
    pub fn new(modes: Vec<usize>) -> Result<Self> {
        if modes.len() < 2 {
            return Err(OpticsError::InvalidParameter("a qudit needs at least 2 modes".into()));
        }
        check_distinct(&modes)?;
        Ok(QuditRegister { modes })
    }

    /// Register on modes `start..start + d`.
    pub fn contiguous(d: usize, start: usize) -> Result<Self> {
        Self::new((start..start + d).collect())
    }

    pub fn d(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn mode(&self, logical: usize) -> usize {
        self.modes[logical]
    }

    pub fn overlaps(&self, other: &QuditRegister) -> bool {
        self.modes.iter().any(|m| other.modes.contains(m))
    }

    /// Logical value carried by this register in `occ`, if validly encoded.
    pub fn decode(&self, occ: &Occupation) -> Option<usize> {
        let counts: Vec<u32> = self.modes.iter().map(|&m| occ.counts()[m]).collect();
        if counts.iter().sum::<u32>() != 1 {
            return None;
        }
        counts.iter().position(|&c| c == 1)
    }
}

fn check_value(d: usize, v: usize, what: &str) -> Result<()> {
    if d < 2 {
        return Err(OpticsError::InvalidParameter(format!("qudit dimension {d} < 2")));
    }
    if v >= d {
        return Err(OpticsError::InvalidParameter(format!("{what}={v} out of range for d={d}")));
    }
    Ok(())
}

/// `|j>` as a photon in mode `j` of `d`.
pub fn logical_state(d: usize, j: usize) -> Result<SparseState> {
    check_value(d, j, "j")?;
    Ok(SparseState::basis(Occupation::single(d, j)))
}

/// `(1/sqrt d) sum_j exp(2 pi i j k_1 / d) |j>_1 prod_{i>=2} |(j + k_i) mod d>_i`.
pub fn generalized_bell(d: usize, labels: &[usize]) -> Result<SparseState> {
    if labels.len() < 2 {
        return Err(OpticsError::InvalidParameter("need at least two parties".into()));
    }
    for (i, &k) in labels.iter().enumerate() {
        check_value(d, k, &format!("k{}", i + 1))?;
    }
    let parties = labels.len();
    let norm = 1.0 / (d as f64).sqrt();
    let mut state = SparseState::empty(parties * d);
    for j in 0..d {
        let mut counts = vec![0u32; parties * d];
        counts[j] = 1;
        for (i, &k) in labels.iter().enumerate().skip(1) {
            counts[i * d + (j + k) % d] = 1;
        }
        let phase = 2.0 * PI * ((j * labels[0]) % d) as f64 / d as f64;
        state.add(Occupation(counts), Complex64::from_polar(norm, phase))?;
    }
    Ok(state)
}

/// Two-qudit Bell state `|psi_{mn}>` on `2d` modes.
pub fn bell_state(d: usize, m: usize, n: usize) -> Result<SparseState> {
    check_value(d, m, "m")?;
    check_value(d, n, "n")?;
    generalized_bell(d, &[n, m])
}

/// Single-qudit Fourier transform `|x> -> (1/sqrt d) sum_k exp(-2 pi i k x / d) |k>`.
pub fn hadamard_d(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |k, x| Complex64::from_polar(norm, -2.0 * PI * ((k * x) % d) as f64 / d as f64))
}
