use crate::error::Result;
use crate::fock::{Occupation, SparseState};

/// One heralded outcome of a nondeterministic operation.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Detector record; concatenated across chained gates.
    pub outcome: Occupation,
    pub probability: f64,
    /// Normalized post-measurement state.
    pub state: SparseState,
    pub success: bool,
    /// Human-readable description of the feed-forward applied on this branch.
    pub correction: String,
}

/// Every measurement branch of a heralded operation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionalResult {
    pub branches: Vec<Branch>,
}

impl ConditionalResult {
    /// A unit-probability success carrying `state`.
    pub fn deterministic(state: SparseState) -> Self {
        ConditionalResult {
            branches: vec![Branch {
                outcome: Occupation::default(),
                probability: 1.0,
                state,
                success: true,
                correction: String::new(),
            }],
        }
    }

    pub fn success_probability(&self) -> f64 {
        self.branches.iter().filter(|b| b.success).map(|b| b.probability).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn successes(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| b.success)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| !b.success)
    }

    /// Transforms the state of each success branch.
    pub fn map_success<F>(mut self, mut f: F) -> Result<Self>
    where
        F: FnMut(SparseState) -> Result<SparseState>,
    {
        for b in self.branches.iter_mut().filter(|b| b.success) {
            let state = std::mem::replace(&mut b.state, SparseState::empty(0));
            b.state = f(state)?;
        }
        Ok(self)
    }

    /// Monte Carlo counts per branch, in branch order.
    pub fn sample_counts(&self, trials: u64, seed: u64) -> Vec<u64> {
        let weights: Vec<f64> = self.branches.iter().map(|b| b.probability).collect();
        crate::sampling::draw_counts(&weights, trials, seed).0
    }

    /// Merges success branches whose states agree amplitude-wise within `tol`,
    /// summing probabilities. The merged branch keeps the first detector record.
    pub fn coalesce_successes(self, tol: f64) -> Self {
        let mut merged: Vec<(Branch, usize)> = Vec::new();
        let mut failures = Vec::new();
        for b in self.branches {
            if !b.success {
                failures.push(b);
                continue;
            }
            match merged.iter_mut().find(|(m, _)| m.state.approx_eq(&b.state, tol)) {
                Some((m, count)) => {
                    m.probability += b.probability;
                    *count += 1;
                }
                None => merged.push((b, 1)),
            }
        }
        let mut branches: Vec<Branch> = merged
            .into_iter()
            .map(|(mut b, count)| {
                if count > 1 {
                    b.correction = format!("coalesced {count} heralds");
                }
                b
            })
            .collect();
        branches.extend(failures);
        ConditionalResult { branches }
    }

    /// Runs `next` on every success branch; failures pass through untouched.
    /// Probabilities multiply and detector records concatenate.
    pub fn then<F>(self, mut next: F) -> Result<Self>
    where
        F: FnMut(&SparseState) -> Result<ConditionalResult>,
    {
        let mut out = Vec::with_capacity(self.branches.len());
        for b in self.branches {
            if !b.success {
                out.push(b);
                continue;
            }
            for nb in next(&b.state)?.branches {
                let correction = match (b.correction.is_empty(), nb.correction.is_empty()) {
                    (true, _) => nb.correction,
                    (false, true) => b.correction.clone(),
                    (false, false) => format!("{}; {}", b.correction, nb.correction),
                };
                out.push(Branch {
                    outcome: b.outcome.concat(&nb.outcome),
                    probability: b.probability * nb.probability,
                    state: nb.state,
                    success: nb.success,
                    correction,
                });
            }
        }
        Ok(ConditionalResult { branches: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch(outcome: Vec<u32>, p: f64, success: bool) -> Branch {
        Branch {
            outcome: outcome.into(),
            probability: p,
            state: SparseState::vacuum(1),
            success,
            correction: String::new(),
        }
    }

    #[test]
    fn chaining_multiplies_and_keeps_failures() {
        let first = ConditionalResult { branches: vec![branch(vec![1], 0.25, true), branch(vec![0], 0.75, false)] };
        let chained = first
            .then(|_| Ok(ConditionalResult { branches: vec![branch(vec![2], 0.5, true), branch(vec![3], 0.5, false)] }))
            .unwrap();
        assert_eq!(chained.branches.len(), 3);
        assert!((chained.success_probability() - 0.125).abs() < 1e-15);
        assert!((chained.total_probability() - 1.0).abs() < 1e-15);
        assert_eq!(chained.branches[2].outcome, Occupation(vec![0]));
        assert!(!chained.branches[1].success);
        assert_eq!(chained.branches[0].outcome, Occupation(vec![1, 2]));
    }
}
