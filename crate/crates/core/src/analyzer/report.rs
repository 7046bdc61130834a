use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::plan::{build_analyzer, AnalyzerConfig, NetworkChoice, RunMode, MAX_SEARCH_D};
use super::run::{run_exact, sample_from, Decoded};
use crate::error::{OpticsError, Result};
use crate::klm::Backend;
use crate::qudit::{generalized_bell, search_minimal_network};

/// Tolerance for every probability invariant checked on a report.
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ShorterSearch {
    pub max_swaps: usize,
    pub found: bool,
}

/// Compares the measured success with `(n/(n+1))^e` and the alternative base `(n/(n-1))^e`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseAudit {
    pub n: usize,
    pub exponent: usize,
    pub used_value: f64,
    pub alt_value: f64,
    pub measured: f64,
    pub alt_consistent: bool,
}

impl BaseAudit {
    pub fn new(n: usize, exponent: usize, measured: f64) -> Self {
        let n_f = n as f64;
        let used_value = (n_f / (n_f + 1.0)).powi(exponent as i32);
        let alt_value = if n == 1 { f64::INFINITY } else { (n_f / (n_f - 1.0)).powi(exponent as i32) };
        let alt_consistent = alt_value.is_finite() && alt_value <= 1.0 && (alt_value - measured).abs() <= INVARIANT_TOL;
        BaseAudit { n, exponent, used_value, alt_value, measured, alt_consistent }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleCounts {
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub decoded: Vec<(Decoded, u64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelRow {
    /// Generalized label `(k1, ..., kN)`; for two parties this is `(n, m)`.
    pub label: Vec<usize>,
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Decoded distribution conditioned on success.
    pub decoded: Vec<(Decoded, f64)>,
    pub branches: usize,
    pub sampled: Option<SampleCounts>,
}

impl LabelRow {
    pub fn correct_probability(&self) -> f64 {
        self.decoded.iter().filter(|(k, _)| k.as_deref() == Some(&self.label[..])).map(|(_, p)| p).sum()
    }

    pub fn misidentified(&self) -> f64 {
        self.decoded.iter().filter(|(k, _)| k.as_deref() != Some(&self.label[..])).map(|(_, p)| p).sum()
    }

    /// Total-variation distance between sampled and exact outcome laws (decoded
    /// labels plus failure), with its 5-sigma bound `5/2 * sum_i sqrt(p_i (1 - p_i) / T)`.
    pub fn sample_distance(&self, sc: &SampleCounts) -> (f64, f64) {
        let t = sc.trials as f64;
        let mut law: Vec<(f64, f64)> = self
            .decoded
            .iter()
            .map(|(k, p)| {
                let c = sc.decoded.iter().find(|(d, _)| d == k).map_or(0, |(_, c)| *c);
                (p * self.success_probability, c as f64 / t)
            })
            .collect();
        law.push((self.failure_probability, (sc.trials - sc.successes) as f64 / t));
        let tv = 0.5 * law.iter().map(|(p, f)| (p - f).abs()).sum::<f64>();
        let bound = 2.5 * law.iter().map(|(p, _)| (p * (1.0 - p) / t).max(0.0).sqrt()).sum::<f64>();
        (tv, bound)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzerReport {
    pub d: usize,
    pub parties: usize,
    pub backend: Backend,
    pub network: NetworkChoice,
    pub swaps_per_shift: usize,
    pub shifts: usize,
    pub csign_probability: f64,
    pub theoretical_success: f64,
    pub shorter_search: Option<ShorterSearch>,
    pub base_audit: Option<BaseAudit>,
    pub rows: Vec<LabelRow>,
}

/// All `d^N` labels in lexicographic order.
pub fn all_labels(d: usize, parties: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..parties {
        out = out.into_iter().flat_map(|prefix| (0..d).map(move |k| [prefix.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Runs the analyzer on every generalized Bell state of the configuration.
/// Sampled rows use seed `seed + row index`.
pub fn analyze_all(config: &AnalyzerConfig) -> Result<AnalyzerReport> {
    let plan = build_analyzer(config)?;
    let mut rows = Vec::new();
    for (idx, label) in all_labels(config.d, config.parties).into_iter().enumerate() {
        let input = generalized_bell(config.d, &label)?;
        let exact = run_exact(&plan, &input)?;
        let sampled = match config.mode {
            RunMode::Exact => None,
            RunMode::Sample { trials, seed } => {
                let s = sample_from(&exact, trials, seed.wrapping_add(idx as u64));
                Some(SampleCounts {
                    trials,
                    seed: s.seed,
                    successes: s.successes,
                    decoded: s.decoded.into_iter().collect(),
                })
            }
        };
        rows.push(LabelRow {
            label,
            success_probability: exact.success_probability,
            failure_probability: exact.failure_probability,
            decoded: exact.conditional().into_iter().collect(),
            branches: exact.branches,
            sampled,
        });
    }
    let swaps_per_shift = plan.network.swap_count();
    let shorter_search = if config.d <= MAX_SEARCH_D && swaps_per_shift > 0 {
        let max_swaps = swaps_per_shift - 1;
        let found = search_minimal_network(config.d, max_swaps)?.is_some();
        Some(ShorterSearch { max_swaps, found })
    } else {
        None
    };
    let measured = rows.iter().map(|r| r.success_probability).fold(f64::INFINITY, f64::min);
    let base_audit = match config.backend {
        Backend::Teleported(n) => Some(BaseAudit::new(n, 2 * plan.cswap_count(), measured)),
        _ => None,
    };
    Ok(AnalyzerReport {
        d: config.d,
        parties: config.parties,
        backend: config.backend,
        network: config.network,
        swaps_per_shift,
        shifts: config.parties - 1,
        csign_probability: config.backend.csign_probability(),
        theoretical_success: plan.theoretical_success(),
        shorter_search,
        base_audit,
        rows,
    })
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn label_str(l: &[usize]) -> String {
    l.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn decoded_str(d: &Decoded) -> String {
    d.as_deref().map_or_else(|| "invalid".to_string(), label_str)
}

impl AnalyzerReport {
    /// Violated invariants, one message each; empty when the analyzer behaved.
    pub fn invariant_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            let k = label_str(&r.label);
            let total: f64 = r.decoded.iter().map(|(_, p)| p).sum();
            if r.success_probability > 0.0 && (total - 1.0).abs() > INVARIANT_TOL {
                out.push(format!("k={k}: conditional distribution sums to {total}"));
            }
            if (r.success_probability + r.failure_probability - 1.0).abs() > INVARIANT_TOL {
                out.push(format!("k={k}: success + failure = {}", r.success_probability + r.failure_probability));
            }
            if r.misidentified() > INVARIANT_TOL {
                out.push(format!("k={k}: misidentified mass {}", r.misidentified()));
            }
            if (r.success_probability - self.theoretical_success).abs() > INVARIANT_TOL {
                out.push(format!("k={k}: success {} != theory {}", r.success_probability, self.theoretical_success));
            }
            if let Some(sc) = &r.sampled {
                let (tv, bound) = r.sample_distance(sc);
                if tv > bound + INVARIANT_TOL {
                    out.push(format!("k={k}: sampled distribution at total-variation distance {tv} > {bound}"));
                }
            }
        }
        if let Some(a) = &self.base_audit {
            if (a.measured - a.used_value).abs() > INVARIANT_TOL {
                out.push(format!("measured success {} != (n/(n+1))^{} = {}", a.measured, a.exponent, a.used_value));
            }
        }
        out
    }

    pub fn all_invariants_hold(&self) -> bool {
        self.invariant_failures().is_empty()
    }

    /// Line-oriented `key=value` records, floats at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "record=summary d={} parties={} backend={} network={} swaps_per_shift={} shifts={} csign_probability={} theoretical_success={}",
            self.d,
            self.parties,
            self.backend,
            self.network,
            self.swaps_per_shift,
            self.shifts,
            f(self.csign_probability),
            f(self.theoretical_success)
        );
        if let Some(x) = &self.shorter_search {
            let _ = writeln!(s, "record=search max_swaps={} found={}", x.max_swaps, x.found);
        }
        if let Some(a) = &self.base_audit {
            let _ = writeln!(
                s,
                "record=audit n={} exponent={} used_base=n/(n+1) used_value={} alt_base=n/(n-1) alt_value={} measured={} alt_consistent={}",
                a.n,
                a.exponent,
                f(a.used_value),
                f(a.alt_value),
                f(a.measured),
                a.alt_consistent
            );
        }
        for r in &self.rows {
            let k = label_str(&r.label);
            let _ = writeln!(
                s,
                "record=row k={k} success_probability={} failure_probability={} branches={}",
                f(r.success_probability),
                f(r.failure_probability),
                r.branches
            );
            for (dec, p) in &r.decoded {
                let _ = writeln!(s, "record=decoded k={k} decoded={} probability={}", decoded_str(dec), f(*p));
            }
            if let Some(sc) = &r.sampled {
                let _ =
                    writeln!(s, "record=sample k={k} trials={} seed={} successes={}", sc.trials, sc.seed, sc.successes);
                for (dec, c) in &sc.decoded {
                    let _ = writeln!(s, "record=sample_decoded k={k} decoded={} count={c}", decoded_str(dec));
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut report: Option<AnalyzerReport> = None;
        for (idx, line) in text.lines().enumerate() {
            let ln = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let perr = |msg: String| OpticsError::Parse { line: ln, msg };
            let kv: BTreeMap<&str, &str> = line
                .split_whitespace()
                .map(|t| t.split_once('=').ok_or_else(|| perr(format!("token {t:?} is not key=value"))))
                .collect::<Result<_>>()?;
            let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(format!("missing {k}")));
            let num = |k: &str| -> Result<f64> { get(k)?.parse::<f64>().map_err(|e| perr(format!("{k}: {e}"))) };
            let int = |k: &str| -> Result<u64> { get(k)?.parse::<u64>().map_err(|e| perr(format!("{k}: {e}"))) };
            let flag = |k: &str| -> Result<bool> { get(k)?.parse::<bool>().map_err(|e| perr(format!("{k}: {e}"))) };
            let label = |k: &str| -> Result<Vec<usize>> {
                get(k)?.split(',').map(|t| t.parse::<usize>().map_err(|e| perr(format!("{k}: {e}")))).collect()
            };
            let decoded = |k: &str| -> Result<Decoded> {
                if get(k)? == "invalid" {
                    Ok(None)
                } else {
                    label(k).map(Some)
                }
            };
            let record = get("record")?;
            if record == "summary" {
                report = Some(AnalyzerReport {
                    d: int("d")? as usize,
                    parties: int("parties")? as usize,
                    backend: get("backend")?.parse()?,
                    network: get("network")?.parse()?,
                    swaps_per_shift: int("swaps_per_shift")? as usize,
                    shifts: int("shifts")? as usize,
                    csign_probability: num("csign_probability")?,
                    theoretical_success: num("theoretical_success")?,
                    shorter_search: None,
                    base_audit: None,
                    rows: Vec::new(),
                });
                continue;
            }
            let rep = report.as_mut().ok_or_else(|| perr("record before summary".into()))?;
            let row_for = |rep: &mut AnalyzerReport, k: Vec<usize>| -> Result<usize> {
                rep.rows.iter().position(|r| r.label == k).ok_or_else(|| perr("record for unknown row".into()))
            };
            match record {
                "search" => {
                    rep.shorter_search =
                        Some(ShorterSearch { max_swaps: int("max_swaps")? as usize, found: flag("found")? })
                }
                "audit" => {
                    rep.base_audit = Some(BaseAudit {
                        n: int("n")? as usize,
                        exponent: int("exponent")? as usize,
                        used_value: num("used_value")?,
                        alt_value: num("alt_value")?,
                        measured: num("measured")?,
                        alt_consistent: flag("alt_consistent")?,
                    })
                }
                "row" => rep.rows.push(LabelRow {
                    label: label("k")?,
                    success_probability: num("success_probability")?,
                    failure_probability: num("failure_probability")?,
                    decoded: Vec::new(),
                    branches: int("branches")? as usize,
                    sampled: None,
                }),
                "decoded" => {
                    let i = row_for(rep, label("k")?)?;
                    rep.rows[i].decoded.push((decoded("decoded")?, num("probability")?));
                }
                "sample" => {
                    let i = row_for(rep, label("k")?)?;
                    rep.rows[i].sampled = Some(SampleCounts {
                        trials: int("trials")?,
                        seed: int("seed")?,
                        successes: int("successes")?,
                        decoded: Vec::new(),
                    });
                }
                "sample_decoded" => {
                    let i = row_for(rep, label("k")?)?;
                    let sc = rep.rows[i].sampled.as_mut().ok_or_else(|| perr("sample_decoded before sample".into()))?;
                    sc.decoded.push((decoded("decoded")?, int("count")?));
                }
                other => return Err(perr(format!("unknown record {other:?}"))),
            }
        }
        report.ok_or(OpticsError::Parse { line: 1, msg: "no summary record".into() })
    }

    /// Confusion matrix conditioned on success: one row per input label, one
    /// column per decodable label plus `invalid`. Labels are written `k1:k2:...`.
    pub fn confusion_csv(&self) -> String {
        let labels = all_labels(self.d, self.parties);
        let name = |l: &[usize]| l.iter().map(usize::to_string).collect::<Vec<_>>().join(":");
        let mut s = String::from("input");
        for l in &labels {
            s.push(',');
            s.push_str(&name(l));
        }
        s.push_str(",invalid\n");
        for r in &self.rows {
            s.push_str(&name(&r.label));
            let lookup = |k: &Decoded| r.decoded.iter().find(|(d, _)| d == k).map_or(0.0, |(_, p)| *p);
            for l in &labels {
                s.push(',');
                s.push_str(&f(lookup(&Some(l.clone()))));
            }
            s.push(',');
            s.push_str(&f(lookup(&None)));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_enumeration() {
        assert_eq!(all_labels(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_labels(3, 3).len(), 27);
    }

    #[test]
    fn audit_flags_alternative_base() {
        let a = BaseAudit::new(1, 2, 0.25);
        assert!(a.alt_value.is_infinite());
        assert!(!a.alt_consistent);
        assert!((a.used_value - 0.25).abs() < 1e-15);
        let b = BaseAudit::new(2, 2, 4.0 / 9.0);
        assert!((b.alt_value - 4.0).abs() < 1e-12);
        assert!(!b.alt_consistent);
    }
}
