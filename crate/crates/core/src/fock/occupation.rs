use std::fmt;

use crate::error::{OpticsError, Result};

/// Photon counts per mode; the label of a Fock basis state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    /// Single photon in `mode` out of `modes`.
    pub fn single(modes: usize, mode: usize) -> Self {
        let mut counts = vec![0; modes];
        counts[mode] = 1;
        Occupation(counts)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut counts = self.0.clone();
        counts.extend_from_slice(&other.0);
        Occupation(counts)
    }
}

impl fmt::Debug for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}>")
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl std::str::FromStr for Occupation {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Occupation(Vec::new()));
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| OpticsError::Parse { line: 0, msg: format!("bad occupation entry {p:?}: {e}") })
            })
            .collect::<Result<Vec<_>>>()
            .map(Occupation)
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl From<&[u32]> for Occupation {
    fn from(v: &[u32]) -> Self {
        Occupation(v.to_vec())
    }
}

/// Size of the `photons`-photon sector over `modes` modes, C(N+M-1, N).
pub fn fock_dim(modes: usize, photons: usize) -> Result<u64> {
    if modes == 0 {
        return Err(OpticsError::InvalidParameter("mode count must be >= 1".into()));
    }
    let overflow = || OpticsError::Overflow(format!("fock_dim({modes}, {photons})"));
    // C(n+m-1, k) with k = min(photons, modes-1) to keep the running product small.
    let top = (photons + modes - 1) as u128;
    let k = photons.min(modes - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(top - k + i).ok_or_else(overflow)? / i;
    }
    u64::try_from(acc).map_err(|_| overflow())
}

/// All occupation vectors of the sector in lexicographically descending order.
pub fn enumerate_sector(modes: usize, photons: usize) -> Result<Vec<Occupation>> {
    let dim = fock_dim(modes, photons)?;
    let mut out = Vec::with_capacity(dim as usize);
    let mut current = vec![0u32; modes];
    fill(&mut current, 0, photons as u32, &mut out);
    Ok(out)
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Occupation(current.to_vec()));
        return;
    }
    for n in (0..=remaining).rev() {
        current[pos] = n;
        fill(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_oracle(n: u64, k: u64) -> u64 {
        // Pascal's triangle, independent of the multiplicative formula.
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k as usize]
    }

    #[test]
    fn dims() {
        assert_eq!(fock_dim(2, 2).unwrap(), 3);
        assert_eq!(fock_dim(1, 5).unwrap(), 1);
        assert_eq!(fock_dim(10, 6).unwrap(), 5005);
        assert_eq!(binomial_oracle(15, 6), 5005);
        for m in 1..8u64 {
            for n in 0..8u64 {
                assert_eq!(fock_dim(m as usize, n as usize).unwrap(), binomial_oracle(n + m - 1, n));
            }
        }
    }

    #[test]
    fn dim_overflow_is_an_error() {
        assert!(matches!(fock_dim(200, 200), Err(OpticsError::Overflow(_))));
        assert!(fock_dim(0, 1).is_err());
    }

    #[test]
    fn sector_order() {
        let occ = |v: &[u32]| Occupation(v.to_vec());
        assert_eq!(enumerate_sector(2, 1).unwrap(), vec![occ(&[1, 0]), occ(&[0, 1])]);
        assert_eq!(enumerate_sector(3, 0).unwrap(), vec![occ(&[0, 0, 0])]);
        assert_eq!(enumerate_sector(2, 2).unwrap(), vec![occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
    }

    #[test]
    fn sector_is_sorted_and_complete() {
        let s = enumerate_sector(4, 3).unwrap();
        assert_eq!(s.len() as u64, fock_dim(4, 3).unwrap());
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        assert!(s.iter().all(|o| o.total() == 3));
    }

    #[test]
    fn parse_display() {
        let o: Occupation = "1, 0,2".parse().unwrap();
        assert_eq!(o.to_string(), "1,0,2");
        assert!("1,x".parse::<Occupation>().is_err());
    }
}
