use num_complex::Complex64;

use crate::error::{OpticsError, Result};
use crate::fock::{Occupation, SparseState};

/// The `2n`-photon, `4n`-mode entangled resource consumed by the boosted C-SIGN.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaSpec {
    pub n: usize,
    pub state: SparseState,
}

/// `1/(n+1) * sum_{j,k} (-1)^{(n-j)(n-k)} |1^j 0^{n-j} 0^j 1^{n-j}> |1^k 0^{n-k} 0^k 1^{n-k}>`.
///
/// Layout per side: `n` teleport modes, then `n` output modes.
pub fn ancilla_phi(n: usize) -> Result<AncillaSpec> {
    if n < 1 {
        return Err(OpticsError::InvalidParameter("ancilla order n must be >= 1".into()));
    }
    let half = |j: usize| -> Vec<u32> {
        let mut v = vec![0u32; 2 * n];
        v[..j].fill(1);
        v[n + j..].fill(1);
        v
    };
    let amp = 1.0 / (n as f64 + 1.0);
    let mut state = SparseState::empty(4 * n);
    for j in 0..=n {
        for k in 0..=n {
            let sign = if ((n - j) * (n - k)).is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut counts = half(j);
            counts.extend(half(k));
            state.add(Occupation(counts), Complex64::new(sign * amp, 0.0))?;
        }
    }
    Ok(AncillaSpec { n, state })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_terms() {
        let a = ancilla_phi(1).unwrap();
        let amp = |v: [u32; 4]| a.state.amplitude(&Occupation(v.to_vec())).re;
        assert_eq!(a.state.len(), 4);
        assert_eq!(amp([0, 1, 0, 1]), -0.5);
        assert_eq!(amp([0, 1, 1, 0]), 0.5);
        assert_eq!(amp([1, 0, 0, 1]), 0.5);
        assert_eq!(amp([1, 0, 1, 0]), 0.5);
        assert!((a.state.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_shape() {
        let a = ancilla_phi(2).unwrap();
        assert_eq!(a.state.len(), 9);
        assert_eq!(a.state.modes(), 8);
        assert_eq!(a.state.photons(), Some(4));
        assert!(a.state.iter().all(|(_, c)| (c.norm() - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn zero_order_rejected() {
        assert!(ancilla_phi(0).is_err());
    }
}
