//! C-SWAP networks realizing the controlled rotation `y -> (y - x) mod d`.

use std::fmt;

use crate::error::{OpticsError, Result};

/// One C-SWAP: exchange target positions `p`, `q` when the control qudit has value `control`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ControlledSwap {
    pub control: usize,
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapNetwork {
    pub d: usize,
    pub swaps: Vec<ControlledSwap>,
}

/// Target position reached from `y` under rotation by control value `v`.
pub fn rotation_target(d: usize, v: usize, y: usize) -> usize {
    (y + d - v % d) % d
}

impl SwapNetwork {
    pub fn swap_count(&self) -> usize {
        self.swaps.len()
    }

    /// Classical action on the target value `y` for control value `x`.
    pub fn permute(&self, x: usize, y: usize) -> usize {
        self.swaps.iter().filter(|s| s.control == x).fold(y, |pos, s| {
            if pos == s.p {
                s.q
            } else if pos == s.q {
                s.p
            } else {
                pos
            }
        })
    }

    /// True when every control value (including 0) produces the required rotation.
    pub fn realizes_cshift(&self) -> bool {
        (0..self.d).all(|x| (0..self.d).all(|y| self.permute(x, y) == rotation_target(self.d, x, y)))
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses `CSWAP control p q` lines after a `# d=D` header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut d = None;
        let mut swaps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let perr = |msg: String| OpticsError::Parse { line: idx + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("d=") {
                    d = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?);
                }
                continue;
            }
            let dim = d.ok_or_else(|| perr("missing `# d=` header".into()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let [kw, c, p, q] = f.as_slice() else {
                return Err(perr(format!("expected `CSWAP control p q`, got {line:?}")));
            };
            if *kw != "CSWAP" {
                return Err(perr(format!("unknown keyword {kw:?}")));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|e| perr(format!("{s:?}: {e}")));
            let s = ControlledSwap { control: num(c)?, p: num(p)?, q: num(q)? };
            if s.control == 0 || s.control >= dim || s.p >= dim || s.q >= dim || s.p == s.q {
                return Err(perr(format!("swap {line:?} out of range for d={dim}")));
            }
            swaps.push(s);
        }
        let d = d.ok_or(OpticsError::Parse { line: 1, msg: "missing `# d=` header".into() })?;
        Ok(SwapNetwork { d, swaps })
    }
}

impl fmt::Display for SwapNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# d={}", self.d)?;
        for s in &self.swaps {
            writeln!(f, "CSWAP {} {} {}", s.control, s.p, s.q)?;
        }
        Ok(())
    }
}

/// Generic network: each rotation is sorted into place by transpositions,
/// `d - gcd(v, d)` of them for control value `v`.
pub fn cshift_network(d: usize) -> Result<SwapNetwork> {
    if d < 2 {
        return Err(OpticsError::InvalidParameter(format!("C-SHIFT needs d >= 2, got {d}")));
    }
    let mut swaps = Vec::new();
    for v in 1..d {
        // contents[pos] = original value now sitting at pos
        let mut contents: Vec<usize> = (0..d).collect();
        for pos in 0..d {
            let want = (pos + v) % d;
            if contents[pos] != want {
                let j = (pos + 1..d).find(|&j| contents[j] == want).expect("value still unplaced");
                contents.swap(pos, j);
                swaps.push(ControlledSwap { control: v, p: pos, q: j });
            }
        }
    }
    let net = SwapNetwork { d, swaps };
    debug_assert!(net.realizes_cshift());
    Ok(net)
}

fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if !seen[start] {
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
    }
    cycles
}

struct Search {
    d: usize,
    candidates: Vec<ControlledSwap>,
    targets: Vec<Vec<usize>>,
}

impl Search {
    /// Lower bound on swaps still needed: transpositions to turn `current` into the target rotation.
    fn lower_bound(&self, current: &[Vec<usize>]) -> usize {
        (1..self.d)
            .map(|v| {
                // residual = target o current^{-1}
                let mut residual = vec![0; self.d];
                for y in 0..self.d {
                    residual[current[v][y]] = self.targets[v][y];
                }
                self.d - cycle_count(&residual)
            })
            .sum()
    }

    fn dfs(&self, current: &mut Vec<Vec<usize>>, path: &mut Vec<ControlledSwap>, budget: usize) -> bool {
        let lb = self.lower_bound(current);
        if lb == 0 {
            return path.len() == budget;
        }
        if path.len() + lb > budget {
            return false;
        }
        for &c in &self.candidates {
            let saved = current[c.control].clone();
            for pos in current[c.control].iter_mut() {
                if *pos == c.p {
                    *pos = c.q;
                } else if *pos == c.q {
                    *pos = c.p;
                }
            }
            path.push(c);
            if self.dfs(current, path, budget) {
                return true;
            }
            path.pop();
            current[c.control] = saved;
        }
        false
    }
}

/// Exhaustive search, shortest first, over ordered C-SWAP lists whose
/// composition is the C-SHIFT. Ties break by lexicographic candidate order.
/// Bounded branches are pruned with an admissible transposition-count bound.
pub fn search_minimal_network(d: usize, max_swaps: usize) -> Result<Option<SwapNetwork>> {
    if d < 2 {
        return Err(OpticsError::InvalidParameter(format!("C-SHIFT needs d >= 2, got {d}")));
    }
    let mut candidates = Vec::new();
    for control in 1..d {
        for p in 0..d {
            for q in p + 1..d {
                candidates.push(ControlledSwap { control, p, q });
            }
        }
    }
    let targets = (0..d).map(|v| (0..d).map(|y| rotation_target(d, v, y)).collect()).collect();
    let search = Search { d, candidates, targets };
    for budget in 0..=max_swaps {
        let mut current: Vec<Vec<usize>> = vec![(0..d).collect(); d];
        let mut path = Vec::new();
        if search.dfs(&mut current, &mut path, budget) {
            let net = SwapNetwork { d, swaps: path };
            debug_assert!(net.realizes_cshift());
            return Ok(Some(net));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn generic_counts() {
        assert_eq!(cshift_network(2).unwrap().swap_count(), 1);
        let n3 = cshift_network(3).unwrap();
        assert_eq!(n3.swap_count(), 4);
        assert_eq!(n3.swaps.iter().filter(|s| s.control == 1).count(), 2);
        assert!(cshift_network(4).unwrap().swap_count() <= 9);
        for d in 2..10 {
            let net = cshift_network(d).unwrap();
            assert!(net.realizes_cshift());
            assert!(net.swap_count() <= (d - 1) * (d - 1));
            for v in 1..d {
                assert!(net.swaps.iter().filter(|s| s.control == v).count() < d);
            }
        }
    }

    /// Plain enumeration of every ordered list of a given length, no pruning.
    fn brute_force(d: usize, len: usize) -> Option<SwapNetwork> {
        let mut candidates = Vec::new();
        for control in 1..d {
            for p in 0..d {
                for q in p + 1..d {
                    candidates.push(ControlledSwap { control, p, q });
                }
            }
        }
        let total = candidates.len().pow(len as u32);
        (0..total).find_map(|mut idx| {
            let mut swaps = vec![candidates[0]; len];
            for slot in (0..len).rev() {
                swaps[slot] = candidates[idx % candidates.len()];
                idx /= candidates.len();
            }
            let net = SwapNetwork { d, swaps };
            net.realizes_cshift().then_some(net)
        })
    }

    #[test]
    fn search_results() {
        assert_eq!(search_minimal_network(2, 1).unwrap(), cshift_network(2).ok());
        assert_eq!(search_minimal_network(3, 3).unwrap(), None);
        let found = search_minimal_network(3, 4).unwrap().unwrap();
        assert_eq!(found.swap_count(), 4);
        assert!(found.realizes_cshift());
        // pruned search agrees with unpruned enumeration
        for len in 0..=4 {
            let brute = brute_force(3, len);
            if let Some(b) = brute {
                assert_eq!(found, b);
                break;
            }
        }
        assert_eq!(brute_force(3, 3), None);
    }

    #[test]
    fn d4_minimum() {
        assert_eq!(search_minimal_network(4, 6).unwrap(), None);
        let net = search_minimal_network(4, 9).unwrap().unwrap();
        assert_eq!(net.swap_count(), cshift_network(4).unwrap().swap_count());
    }

    #[test]
    fn text_errors() {
        assert!(SwapNetwork::parse("CSWAP 1 0 1").is_err());
        assert!(SwapNetwork::parse("# d=2\nCSWAP 0 0 1").is_err());
        assert!(SwapNetwork::parse("# d=2\nCSWAP 1 0 0").is_err());
        assert!(SwapNetwork::parse("# d=2\nSWAP 1 0 1").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(d in 2usize..8) {
            let net = cshift_network(d).unwrap();
            prop_assert_eq!(SwapNetwork::parse(&net.to_text()).unwrap(), net);
        }
    }
}
