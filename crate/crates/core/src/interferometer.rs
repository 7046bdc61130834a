//! Elementary optical matrices and the triangular (Reck) decomposition of an
//! arbitrary unitary into beam splitters and phase shifters.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{OpticsError, Result};
use crate::unitary::{unitarity_deviation, CMatrix, UNITARY_TOL};

/// Real rotation `[[cos t, -sin t], [sin t, cos t]]` on creation operators.
pub fn beam_splitter(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    )
}

pub fn phase_shifter(phi: f64) -> CMatrix {
    CMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi))
}

/// `n`-point Fourier matrix with entries `exp(2 pi i jk / n) / sqrt(n)`.
pub fn dft_matrix(n: usize) -> CMatrix {
    assert!(n >= 1, "dft_matrix needs n >= 1");
    let norm = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |j, k| {
        let e = ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(norm, 2.0 * PI * e)
    })
}

/// A single beam splitter or phase shifter on local mode indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    BeamSplitter { i: usize, j: usize, theta: f64 },
    PhaseShifter { mode: usize, phi: f64 },
}

impl Element {
    pub fn is_splitter(&self) -> bool {
        matches!(self, Element::BeamSplitter { .. })
    }

    /// The element embedded as a `d x d` matrix.
    pub fn matrix(&self, d: usize) -> CMatrix {
        let mut m = CMatrix::identity(d, d);
        match *self {
            Element::BeamSplitter { i, j, theta } => {
                let bs = beam_splitter(theta);
                m[(i, i)] = bs[(0, 0)];
                m[(i, j)] = bs[(0, 1)];
                m[(j, i)] = bs[(1, 0)];
                m[(j, j)] = bs[(1, 1)];
            }
            Element::PhaseShifter { mode, phi } => m[(mode, mode)] = Complex64::from_polar(1.0, phi),
        }
        m
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Element::BeamSplitter { i, j, theta } => write!(f, "BS {i} {j} {theta:.16e}"),
            Element::PhaseShifter { mode, phi } => write!(f, "PS {mode} {phi:.16e}"),
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

const PHASE_EPS: f64 = 1e-15;

/// Decomposes `u` into elements listed in application order.
///
/// Entries of `u^dagger` are eliminated column by column, bottom row upward,
/// each by a phase shifter on the lower row followed by a splitter on the
/// adjacent pair. The leftover diagonal becomes a final phase layer, so the
/// recomposition matches `u` including its global phase.
pub fn reck_decompose(u: &CMatrix) -> Result<Vec<Element>> {
    if u.nrows() != u.ncols() {
        return Err(OpticsError::NotSquare { rows: u.nrows(), cols: u.ncols() });
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARY_TOL {
        return Err(OpticsError::NotUnitary { deviation });
    }
    let d = u.nrows();
    let mut v = u.adjoint();
    let mut elements = Vec::new();
    for col in 0..d.saturating_sub(1) {
        for j in (col + 1..d).rev() {
            let i = j - 1;
            let (a, b) = (v[(i, col)], v[(j, col)]);
            if b.norm() == 0.0 {
                continue;
            }
            let phi = if a.norm() > 0.0 { wrap_angle(a.arg() - b.arg()) } else { wrap_angle(-b.arg()) };
            if phi.abs() > PHASE_EPS {
                let ph = Complex64::from_polar(1.0, phi);
                for c in 0..d {
                    v[(j, c)] *= ph;
                }
                elements.push(Element::PhaseShifter { mode: j, phi });
            }
            let theta = (-b.norm()).atan2(a.norm());
            let (s, c) = theta.sin_cos();
            for k in 0..d {
                let (ri, rj) = (v[(i, k)], v[(j, k)]);
                v[(i, k)] = ri * c - rj * s;
                v[(j, k)] = ri * s + rj * c;
            }
            v[(j, col)] = Complex64::new(0.0, 0.0);
            elements.push(Element::BeamSplitter { i, j, theta });
        }
    }
    for k in 0..d {
        let phi = wrap_angle(-v[(k, k)].arg());
        if phi.abs() > PHASE_EPS {
            elements.push(Element::PhaseShifter { mode: k, phi });
        }
    }
    Ok(elements)
}

/// Multiplies the elements back together (first element applied first).
pub fn recompose(elements: &[Element], d: usize) -> CMatrix {
    elements.iter().fold(CMatrix::identity(d, d), |acc, e| e.matrix(d) * acc)
}

pub fn write_netlist(elements: &[Element]) -> String {
    elements.iter().map(|e| format!("{e}\n")).collect()
}

/// Parses `BS i j theta` / `PS i phi` lines; blank lines and `#` comments are skipped.
pub fn parse_netlist(text: &str) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: String| OpticsError::Parse { line: idx + 1, msg };
        let f: Vec<&str> = line.split_whitespace().collect();
        let idx_of = |s: &str| s.parse::<usize>().map_err(|e| perr(format!("mode {s:?}: {e}")));
        let angle = |s: &str| {
            let a = s.parse::<f64>().map_err(|e| perr(format!("angle {s:?}: {e}")))?;
            if a.is_finite() {
                Ok(a)
            } else {
                Err(perr(format!("non-finite angle {s}")))
            }
        };
        match f.as_slice() {
            ["BS", i, j, t] => {
                let (i, j) = (idx_of(i)?, idx_of(j)?);
                if i == j {
                    return Err(perr("splitter on a single mode".into()));
                }
                out.push(Element::BeamSplitter { i, j, theta: angle(t)? })
            }
            ["PS", m, p] => out.push(Element::PhaseShifter { mode: idx_of(m)?, phi: angle(p)? }),
            _ => return Err(perr(format!("unrecognized element {line:?}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::{max_abs_diff, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn splitter_values() {
        assert!(max_abs_diff(&beam_splitter(0.0), &CMatrix::identity(2, 2)) < 1e-16);
        let q = beam_splitter(FRAC_PI_4);
        let h = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(h, 0.), c(-h, 0.), c(h, 0.), c(h, 0.)]);
        assert!(max_abs_diff(&q, &expected) < 1e-15);
        let half = beam_splitter(FRAC_PI_2);
        let expected = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]);
        assert!(max_abs_diff(&half, &expected) < 1e-16);
    }

    #[test]
    fn phase_values() {
        assert!((phase_shifter(0.0)[(0, 0)] - c(1., 0.)).norm() < 1e-16);
        assert!((phase_shifter(PI)[(0, 0)] - c(-1., 0.)).norm() < 1e-15);
        assert!((phase_shifter(FRAC_PI_2)[(0, 0)] - c(0., 1.)).norm() < 1e-16);
    }

    #[test]
    fn dft_values() {
        assert!((dft_matrix(1)[(0, 0)] - c(1., 0.)).norm() < 1e-16);
        let h = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]);
        assert!(max_abs_diff(&dft_matrix(2), &expected) < 1e-15);
        let d3 = dft_matrix(3);
        for k in 0..3 {
            assert!((d3[(0, k)] - c(1.0 / 3f64.sqrt(), 0.)).norm() < 1e-15);
        }
        for n in 1..10 {
            assert!(unitarity_deviation(&dft_matrix(n)) < 1e-12);
        }
    }

    #[test]
    fn identity_decomposes_to_nothing() {
        assert!(reck_decompose(&CMatrix::identity(4, 4)).unwrap().is_empty());
    }

    #[test]
    fn splitter_is_a_fixed_point_up_to_gauge() {
        for theta in [0.3, -1.1, FRAC_PI_4, 2.5] {
            let bs = beam_splitter(theta);
            let els = reck_decompose(&bs).unwrap();
            assert_eq!(els.iter().filter(|e| e.is_splitter()).count(), 1);
            assert!(max_abs_diff(&recompose(&els, 2), &bs) < 1e-12);
        }
    }

    #[test]
    fn random_five_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(5, &mut rng);
        let els = reck_decompose(&u).unwrap();
        assert!(els.iter().filter(|e| e.is_splitter()).count() <= 10);
        assert!(max_abs_diff(&recompose(&els, 5), &u) < 1e-10);
    }

    #[test]
    fn non_unitary_reports_deviation() {
        let m = CMatrix::from_element(3, 3, c(0.5, 0.));
        match reck_decompose(&m) {
            Err(OpticsError::NotUnitary { deviation }) => assert!(deviation > 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn netlist_errors() {
        assert!(parse_netlist("BS 0 0 1.0").is_err());
        assert!(parse_netlist("XX 1").is_err());
        assert!(parse_netlist("PS 0 inf").is_err());
        assert_eq!(parse_netlist("# c\n\nPS 1 0.5\n").unwrap(), vec![Element::PhaseShifter { mode: 1, phi: 0.5 }]);
    }

    proptest! {
        #[test]
        fn decomposition_recomposes(seed in any::<u64>(), d in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(d, &mut rng);
            let els = reck_decompose(&u).unwrap();
            prop_assert!(els.iter().filter(|e| e.is_splitter()).count() <= d * (d - 1) / 2);
            prop_assert!(max_abs_diff(&recompose(&els, d), &u) < 1e-10);
            for e in &els {
                match *e {
                    Element::BeamSplitter { theta, .. } => prop_assert!(theta > -PI && theta <= PI),
                    Element::PhaseShifter { phi, .. } => prop_assert!(phi > -PI && phi <= PI),
                }
            }
        }

        #[test]
        fn netlist_round_trips_exactly(seed in any::<u64>(), d in 2usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let els = reck_decompose(&random_unitary(d, &mut rng)).unwrap();
            prop_assert_eq!(parse_netlist(&write_netlist(&els)).unwrap(), els);
        }
    }
}
