use std::collections::BTreeMap;

use num_complex::Complex64;

use super::Occupation;
use crate::error::{OpticsError, Result};

/// Amplitudes below this modulus are dropped after each elementary operation.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Pure state stored sparsely by occupation.
///
/// Passive operations conserve the photon total of every term. Gate-level
/// inputs such as `(|0> + |1> + |2>)/sqrt3` span several sectors, so the state
/// itself is not restricted to one; [`SparseState::photons`] reports the
/// sector when it is unique.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    modes: usize,
    terms: BTreeMap<Occupation, Complex64>,
}

impl SparseState {
    /// Zero vector on `modes` modes.
    pub fn empty(modes: usize) -> Self {
        SparseState { modes, terms: BTreeMap::new() }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::basis(Occupation::vacuum(modes))
    }

    pub fn basis(occ: Occupation) -> Self {
        let modes = occ.modes();
        let mut terms = BTreeMap::new();
        terms.insert(occ, Complex64::new(1.0, 0.0));
        SparseState { modes, terms }
    }

    /// Builds a state from explicit terms; repeated keys are summed.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut state = SparseState::empty(modes);
        for (occ, amp) in terms {
            state.add(occ, amp)?;
        }
        Ok(state)
    }

    /// Adds `amp` to the amplitude of `occ`, checking the mode count.
    pub fn add(&mut self, occ: Occupation, amp: Complex64) -> Result<()> {
        if occ.modes() != self.modes {
            return Err(OpticsError::ShapeMismatch(format!(
                "occupation {occ} has {} modes, state has {}",
                occ.modes(),
                self.modes
            )));
        }
        *self.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
        Ok(())
    }

    /// Inserts without validation; callers guarantee shape and sector.
    pub(crate) fn add_unchecked(&mut self, occ: Occupation, amp: Complex64) {
        *self.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Photon total shared by every term; `None` for the zero vector or a
    /// superposition across sectors.
    pub fn photons(&self) -> Option<u32> {
        let mut totals = self.terms.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Distinct photon totals present, ascending.
    pub fn sectors(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(Occupation::total).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    /// Terms in canonical (lexicographically descending) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter().rev()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; the zero vector is returned unchanged.
    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in self.terms.values_mut() {
                *a /= n;
            }
        }
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for a in self.terms.values_mut() {
            *a *= factor;
        }
        self
    }

    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, a| a.norm() >= threshold);
    }

    /// Maps every amplitude through `f`, keeping the support.
    pub fn map_amplitudes(mut self, mut f: impl FnMut(&Occupation, Complex64) -> Complex64) -> Self {
        for (k, a) in self.terms.iter_mut() {
            *a = f(k, *a);
        }
        self
    }

    /// Tensor product; modes of `other` follow the modes of `self`.
    pub fn tensor(&self, other: &SparseState) -> SparseState {
        let mut out = SparseState::empty(self.modes + other.modes);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.terms.insert(a.concat(b), x * y);
            }
        }
        out
    }

    /// Relabels modes: old mode `i` becomes new mode `perm[i]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<SparseState> {
        if perm.len() != self.modes {
            return Err(OpticsError::ShapeMismatch(format!(
                "permutation of length {} for {} modes",
                perm.len(),
                self.modes
            )));
        }
        let mut seen = vec![false; self.modes];
        for &p in perm {
            if p >= self.modes {
                return Err(OpticsError::ModeOutOfRange { mode: p, modes: self.modes });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(OpticsError::DuplicateMode(p));
            }
        }
        let mut out = SparseState::empty(self.modes);
        for (occ, amp) in &self.terms {
            let mut counts = vec![0; self.modes];
            for (i, &n) in occ.counts().iter().enumerate() {
                counts[perm[i]] = n;
            }
            out.terms.insert(Occupation(counts), *amp);
        }
        Ok(out)
    }

    /// Hermitian inner product `<self|other>`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(OpticsError::ShapeMismatch(format!(
                "inner product of {}-mode and {}-mode states",
                self.modes, other.modes
            )));
        }
        let (small, large, conj_small) =
            if self.terms.len() <= other.terms.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in &small.terms {
            if let Some(b) = large.terms.get(k) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// `|<self|other>|^2 / (|self|^2 |other|^2)`.
    pub fn fidelity(&self, other: &SparseState) -> Result<f64> {
        let ip = self.inner_product(other)?;
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok(ip.norm_sqr() / denom)
    }

    /// Largest amplitude difference over the union of supports.
    pub fn max_amplitude_diff(&self, other: &SparseState) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, a) in &self.terms {
            worst = worst.max((a - other.amplitude(k)).norm());
        }
        for (k, b) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &SparseState, tol: f64) -> bool {
        self.modes == other.modes && self.max_amplitude_diff(other) <= tol
    }

    pub(crate) fn terms_map(&self) -> &BTreeMap<Occupation, Complex64> {
        &self.terms
    }

    pub(crate) fn from_map(modes: usize, terms: BTreeMap<Occupation, Complex64>) -> Self {
        SparseState { modes, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_concatenates_modes() {
        let a = SparseState::basis(vec![1].into());
        let b = SparseState::basis(vec![0, 1].into());
        assert_eq!(a.tensor(&b), SparseState::basis(vec![1, 0, 1].into()));
    }

    #[test]
    fn reverse_permutation() {
        let s = SparseState::basis(vec![1, 0, 2].into());
        let r = s.permute_modes(&[2, 1, 0]).unwrap();
        assert_eq!(r, SparseState::basis(vec![2, 0, 1].into()));
        assert!(s.permute_modes(&[0, 0, 1]).is_err());
        assert!(s.permute_modes(&[0, 1]).is_err());
    }

    #[test]
    fn singlet_self_overlap() {
        let singlet = SparseState::from_terms(
            4,
            [(Occupation(vec![1, 0, 0, 1]), c(FRAC_1_SQRT_2)), (Occupation(vec![0, 1, 1, 0]), c(-FRAC_1_SQRT_2))],
        )
        .unwrap();
        let ip = singlet.inner_product(&singlet).unwrap();
        assert!((ip - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut s = SparseState::basis(vec![1, 0].into());
        assert!(s.add(Occupation(vec![1]), c(1.0)).is_err());
        s.add(Occupation(vec![1, 1]), c(1.0)).unwrap();
        assert_eq!(s.photons(), None);
        assert_eq!(s.sectors(), vec![1, 2]);
        let other = SparseState::vacuum(3);
        assert!(s.inner_product(&other).is_err());
    }

    #[test]
    fn canonical_iteration_is_descending() {
        let s = SparseState::from_terms(
            2,
            [(Occupation(vec![0, 2]), c(1.0)), (Occupation(vec![2, 0]), c(1.0)), (Occupation(vec![1, 1]), c(1.0))],
        )
        .unwrap();
        let keys: Vec<String> = s.iter().map(|(k, _)| k.to_string()).collect();
        assert_eq!(keys, ["2,0", "1,1", "0,2"]);
    }
}
