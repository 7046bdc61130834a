//! Permanent-based transition amplitudes, used as an independent oracle for the
//! sequential interferometer path.

use num_complex::Complex64;

use super::Occupation;
use crate::error::{OpticsError, Result};
use crate::unitary::{CMatrix, ModeUnitary};

/// Permanent by Ryser's formula with Gray-code subset updates, O(2^n n).
pub fn permanent(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent of a non-square matrix");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let changed = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << changed) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, changed)];
            } else {
                *s -= m[(i, changed)];
            }
        }
        gray = next;
        let prod: Complex64 = row_sums.iter().product();
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

fn sqrt_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).sqrt()).product()
}

/// `<out| U |in>` for occupations over the unitary's own (local) modes.
///
/// Differing photon totals give zero.
pub fn transition_amplitude(u: &ModeUnitary, input: &Occupation, output: &Occupation) -> Result<Complex64> {
    let d = u.dim();
    if input.modes() != d || output.modes() != d {
        return Err(OpticsError::ShapeMismatch(format!(
            "occupations of {} and {} modes for a {d}-mode unitary",
            input.modes(),
            output.modes()
        )));
    }
    if input.total() != output.total() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cols: Vec<usize> = expand(input);
    let rows: Vec<usize> = expand(output);
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |r, c| u.matrix()[(rows[r], cols[c])]);
    let norm: f64 = input.counts().iter().chain(output.counts()).map(|&n| sqrt_factorial(n)).product();
    Ok(permanent(&sub) / norm)
}

fn expand(occ: &Occupation) -> Vec<usize> {
    occ.counts().iter().enumerate().flat_map(|(mode, &n)| std::iter::repeat_n(mode, n as usize)).collect()
}
