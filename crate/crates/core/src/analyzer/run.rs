use std::collections::BTreeMap;

use super::plan::{CircuitPlan, Step};
use crate::error::{OpticsError, Result};
use crate::fock::{apply_interferometer, measure_modes, SparseState};
use crate::qudit::{cswap, COALESCE_TOL};
use crate::sampling::draw_counts;

/// Decoded label per register; `None` when some register does not hold exactly one photon.
pub type Decoded = Option<Vec<usize>>;

/// Exact outcome law of one analyzer run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactOutcome {
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Absolute probability of each decoded label on success.
    pub decoded: BTreeMap<Decoded, f64>,
    /// Gate-level measurement branches enumerated along the way.
    pub branches: usize,
}

impl ExactOutcome {
    /// Decoded distribution conditioned on success.
    pub fn conditional(&self) -> BTreeMap<Decoded, f64> {
        let s = self.success_probability;
        self.decoded.iter().map(|(k, p)| (k.clone(), if s > 0.0 { p / s } else { 0.0 })).collect()
    }
}

fn check_input(plan: &CircuitPlan, input: &SparseState) -> Result<()> {
    if input.modes() != plan.modes() {
        return Err(OpticsError::ShapeMismatch(format!(
            "input has {} modes, plan expects {}",
            input.modes(),
            plan.modes()
        )));
    }
    for (occ, _) in input.iter() {
        if plan.registers.iter().any(|r| r.decode(occ).is_none()) {
            return Err(OpticsError::InvalidParameter(format!("input term {occ} is not a valid qudit encoding")));
        }
    }
    Ok(())
}

fn merge_into(live: &mut Vec<(f64, SparseState)>, p: f64, state: SparseState) {
    match live.iter_mut().find(|(_, s)| s.approx_eq(&state, COALESCE_TOL)) {
        Some((q, _)) => *q += p,
        None => live.push((p, state)),
    }
}

/// Enumerates every heralded branch of the plan. Failure branches stop at the
/// gate that failed; their mass is kept in `failure_probability`.
pub fn run_exact(plan: &CircuitPlan, input: &SparseState) -> Result<ExactOutcome> {
    check_input(plan, input)?;
    let mut live: Vec<(f64, SparseState)> = vec![(1.0, input.clone().normalized())];
    let mut failure = 0.0;
    let mut branches = 0usize;
    let mut decoded: BTreeMap<Decoded, f64> = BTreeMap::new();
    for step in &plan.steps {
        match step {
            Step::CSwap { control, p, q } => {
                let mut next = Vec::new();
                for (weight, state) in &live {
                    let r = cswap(state, *control, *p, *q, plan.backend)?;
                    branches += r.branches.len();
                    if branches > plan.branch_cap {
                        return Err(OpticsError::BudgetExceeded { branches, cap: plan.branch_cap });
                    }
                    for b in r.branches {
                        if b.success {
                            merge_into(&mut next, weight * b.probability, b.state);
                        } else {
                            failure += weight * b.probability;
                        }
                    }
                }
                live = next;
            }
            Step::Unitary(u) => {
                live = live
                    .into_iter()
                    .map(|(w, s)| apply_interferometer(&s, u).map(|s| (w, s)))
                    .collect::<Result<_>>()?;
            }
            Step::Detect(modes) => {
                for (weight, state) in &live {
                    let outcomes = measure_modes(state, modes)?;
                    branches += outcomes.len();
                    for b in outcomes {
                        let mut full = vec![0u32; plan.modes()];
                        for (&m, &c) in modes.iter().zip(b.outcome.counts()) {
                            full[m] = c;
                        }
                        let occ = full.into();
                        let label: Decoded = plan.registers.iter().map(|r| r.decode(&occ)).collect();
                        *decoded.entry(label).or_default() += weight * b.probability;
                    }
                }
            }
        }
    }
    let success_probability = decoded.values().sum();
    Ok(ExactOutcome { success_probability, failure_probability: failure, decoded, branches })
}

/// Monte Carlo counts drawn from the exact law.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledOutcome {
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub decoded: BTreeMap<Decoded, u64>,
}

/// Draws `trials` runs; trial `t` uses ChaCha8 stream `t` of `seed`, so counts do
/// not depend on evaluation order.
pub fn run_sampled(plan: &CircuitPlan, input: &SparseState, trials: u64, seed: u64) -> Result<SampledOutcome> {
    if trials == 0 {
        return Err(OpticsError::InvalidParameter("trials must be >= 1".into()));
    }
    let exact = run_exact(plan, input)?;
    Ok(sample_from(&exact, trials, seed))
}

pub fn sample_from(exact: &ExactOutcome, trials: u64, seed: u64) -> SampledOutcome {
    // outcomes beyond the success mass fall through to failure
    let weights: Vec<f64> = exact.decoded.values().copied().collect();
    let (counts, failures) = draw_counts(&weights, trials, seed);
    let decoded: BTreeMap<Decoded, u64> = exact.decoded.keys().cloned().zip(counts).filter(|(_, c)| *c > 0).collect();
    SampledOutcome { trials, seed, successes: trials - failures, decoded }
}
