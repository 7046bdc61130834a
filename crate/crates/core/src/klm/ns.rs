//! Heralded nonlinear sign shift on one mode: `|2> -> -|2>`, identity on `|0>`, `|1>`.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::conditional::{Branch, ConditionalResult};
use crate::error::{OpticsError, Result};
use crate::fock::{apply_interferometer, measure_modes, transition_amplitude, Occupation, SparseState};
use crate::unitary::{CMatrix, ModeUnitary};

/// Herald pattern on the two ancilla modes that marks success.
pub const NS_HERALD: [u32; 2] = [1, 0];

/// Conditional amplitudes for signal photon numbers 0, 1, 2.
const TARGET: [f64; 3] = [0.5, 0.5, -0.5];

/// The 3x3 real orthogonal NS device (signal, ancilla-with-photon, empty ancilla).
pub fn ns_unitary() -> &'static ModeUnitary {
    static CELL: OnceLock<ModeUnitary> = OnceLock::new();
    CELL.get_or_init(|| {
        let r2 = 2f64.sqrt();
        let q = 2f64.powf(-0.25);
        let w = (3.0 / r2 - 2.0).sqrt();
        let v = 0.5 - 1.0 / r2;
        let rows = [1.0 - r2, q, w, q, 0.5, v, w, v, r2 - 0.5];
        let m = CMatrix::from_row_slice(3, 3, &rows.map(|x| Complex64::new(x, 0.0)));
        ModeUnitary::local(m).expect("NS constants are orthogonal")
    })
}

/// `<n,1,0| U |n,1,0>` for `n = 0, 1, 2`.
pub fn ns_conditional_amplitudes(u: &ModeUnitary) -> [Complex64; 3] {
    [0u32, 1, 2].map(|n| {
        let occ = Occupation(vec![n, 1, 0]);
        transition_amplitude(u, &occ, &occ).expect("3-mode occupations")
    })
}

fn rotation(x: &Vector3<f64>) -> Matrix3<f64> {
    let angle = x.norm();
    let k = if angle > 0.0 { x / angle } else { Vector3::zeros() };
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn embed(signs: [f64; 3], x: &Vector3<f64>) -> ModeUnitary {
    let r = Matrix3::from_diagonal(&Vector3::from(signs)) * rotation(x);
    let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(r[(i, j)], 0.0));
    ModeUnitary::local(m).expect("rotation is orthogonal")
}

fn residual(u: &ModeUnitary) -> Vector3<f64> {
    let a = ns_conditional_amplitudes(u);
    Vector3::new(a[0].re - TARGET[0], a[1].re - TARGET[1], a[2].re - TARGET[2])
}

/// Finds a real orthogonal NS device from the three heralding constraints by
/// damped Newton iteration over `diag(signs) * exp(skew(x))`.
pub fn solve_ns_unitary() -> Result<ModeUnitary> {
    let sign_patterns = [
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [-1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ];
    let starts = [[0.3, 0.2, 0.1], [1.0, -0.5, 0.7], [-0.8, 0.9, 0.4], [0.1, 1.3, -1.0], [2.0, 0.5, -0.3]];
    for signs in sign_patterns {
        for start in starts {
            let mut x = Vector3::from(start);
            let mut f = residual(&embed(signs, &x));
            for _ in 0..100 {
                if f.norm() < 1e-14 {
                    break;
                }
                let h = 1e-7;
                let mut jac = Matrix3::zeros();
                for k in 0..3 {
                    let mut xp = x;
                    xp[k] += h;
                    let mut xm = x;
                    xm[k] -= h;
                    let col = (residual(&embed(signs, &xp)) - residual(&embed(signs, &xm))) / (2.0 * h);
                    jac.set_column(k, &col);
                }
                let Some(step) = jac.lu().solve(&(-f)) else { break };
                let mut t = 1.0;
                let mut accepted = false;
                while t > 1e-6 {
                    let xn = x + step * t;
                    let fnew = residual(&embed(signs, &xn));
                    if fnew.norm() < f.norm() {
                        x = xn;
                        f = fnew;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            if f.norm() < 1e-12 {
                return Ok(embed(signs, &x));
            }
        }
    }
    Err(OpticsError::InvalidParameter("NS constraint solve did not converge".into()))
}

/// Attaches ancillas `|1,0>`, applies the NS device to `signal_mode`, and
/// measures the ancillas. Success is the herald `(1,0)`.
pub fn apply_ns(state: &SparseState, signal_mode: usize) -> Result<ConditionalResult> {
    let m = state.modes();
    if signal_mode >= m {
        return Err(OpticsError::ModeOutOfRange { mode: signal_mode, modes: m });
    }
    let ancilla = SparseState::basis(Occupation(NS_HERALD.to_vec()));
    let extended = state.tensor(&ancilla);
    let device = ns_unitary().on_modes(vec![signal_mode, m, m + 1])?;
    let evolved = apply_interferometer(&extended, &device)?;
    let branches = measure_modes(&evolved, &[m, m + 1])?
        .into_iter()
        .map(|b| Branch {
            success: b.outcome.counts() == NS_HERALD,
            outcome: b.outcome,
            probability: b.probability,
            state: b.post_state,
            correction: String::new(),
        })
        .collect();
    Ok(ConditionalResult { branches })
}
