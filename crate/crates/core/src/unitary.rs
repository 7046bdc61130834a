use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{OpticsError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Default tolerance for the unitarity check on caller-supplied matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// Complex unitary acting on the creation operators of an ordered mode subset.
///
/// Convention: the input creation operator of local mode `k` maps to
/// `sum_j matrix[(j, k)] * a_j^dagger`, i.e. column `k` is the image of mode `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: CMatrix,
    targets: Vec<usize>,
}

impl ModeUnitary {
    /// Builds a unitary on `targets`, checking unitarity at [`UNITARY_TOL`].
    pub fn new(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        Self::with_tolerance(matrix, targets, UNITARY_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, targets: Vec<usize>, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(OpticsError::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() != targets.len() {
            return Err(OpticsError::ShapeMismatch(format!(
                "{}x{} matrix on {} target modes",
                matrix.nrows(),
                matrix.ncols(),
                targets.len()
            )));
        }
        check_distinct(&targets)?;
        let deviation = unitarity_deviation(&matrix);
        if deviation > tol {
            return Err(OpticsError::NotUnitary { deviation });
        }
        Ok(ModeUnitary { matrix, targets })
    }

    /// Matrix acting on modes `0..d` in order.
    pub fn local(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(matrix, (0..d).collect())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    /// Same matrix placed on a different set of modes.
    pub fn on_modes(&self, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != self.targets.len() {
            return Err(OpticsError::ShapeMismatch(format!(
                "{} targets for a {}-mode unitary",
                targets.len(),
                self.targets.len()
            )));
        }
        check_distinct(&targets)?;
        Ok(ModeUnitary { matrix: self.matrix.clone(), targets })
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary { matrix: self.matrix.adjoint(), targets: self.targets.clone() }
    }

    pub fn into_parts(self) -> (CMatrix, Vec<usize>) {
        (self.matrix, self.targets)
    }
}

pub(crate) fn check_distinct(modes: &[usize]) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(OpticsError::DuplicateMode(*m));
        }
    }
    Ok(())
}

/// Largest entry modulus of `U U^dagger - I`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let prod = m * m.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Haar-ish random unitary from the QR factorization of a complex Gaussian matrix,
/// with the R diagonal phases folded back in.
pub fn random_unitary<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    use rand::distributions::Distribution;
    let normal = GaussianPair;
    let z = CMatrix::from_fn(d, d, |_, _| normal.sample(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Standard complex normal via Box-Muller.
struct GaussianPair;

impl rand::distributions::Distribution<Complex64> for GaussianPair {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * t.cos(), r * t.sin()) / std::f64::consts::SQRT_2
    }
}
