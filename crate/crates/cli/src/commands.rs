use std::fs;
use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use linopt_core::analyzer::{all_labels, analyze_all, AnalyzerConfig, NetworkChoice, RunMode, DEFAULT_BRANCH_CAP};
use linopt_core::fock::write_state;
use linopt_core::interferometer::{reck_decompose, recompose, write_netlist};
use linopt_core::klm::apply_ns;
use linopt_core::qudit::{
    apply_cshift, bell_state, cshift_network, cshift_reference, cswap, cswap_reference, search_minimal_network,
    QuditRegister, COALESCE_TOL,
};
use linopt_core::unitary::{max_abs_diff, unitarity_deviation, UNITARY_TOL};
use linopt_core::{ConditionalResult, SparseState};

use crate::parse;
use crate::{AnalyzeArgs, DecomposeArgs, GateArgs, GateKind, NetworkCommand};

const TOL: f64 = 1e-9;

type Violations = Vec<String>;

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(path: Option<&std::path::Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn flip_where(state: &SparseState, pred: impl Fn(&[u32]) -> bool) -> SparseState {
    state.clone().map_amplitudes(|o, a| if pred(o.counts()) { -a } else { a })
}

fn modes_or(args: &GateArgs, default: &[usize]) -> Result<Vec<usize>> {
    let m = args.modes.clone().unwrap_or_else(|| default.to_vec());
    if m.len() != default.len() {
        bail!("{:?} needs {} modes, got {}", args.kind, default.len(), m.len());
    }
    Ok(m)
}

/// Runs the gate and returns the branch law, the ideal output and the expected success probability.
fn run_gate(args: &GateArgs) -> Result<(ConditionalResult, SparseState, f64)> {
    let backend = parse::backend(&args.backend, args.n)?;
    let input = |default: &str| parse::input_state(args.input.as_deref().unwrap_or(default));
    Ok(match args.kind {
        GateKind::Ns => {
            let m = modes_or(args, &[0])?;
            let s = input("0;1;2")?;
            let reference = flip_where(&s, |c| c.get(m[0]) == Some(&2));
            (apply_ns(&s, m[0])?, reference, 0.25)
        }
        GateKind::Csign => {
            let m = modes_or(args, &[0, 1])?;
            let s = input("0,0;0,1;1,0;1,1")?;
            let reference = flip_where(&s, |c| c.get(m[0]) == Some(&1) && c.get(m[1]) == Some(&1));
            (backend.csign(&s, m[0], m[1])?, reference, backend.csign_probability())
        }
        GateKind::Cswap => {
            let m = modes_or(args, &[0, 1, 2])?;
            let s = input("0,1,0;0,0,1;1,1,0;1,0,1")?;
            let reference = cswap_reference(&s, m[0], m[1], m[2]);
            (cswap(&s, m[0], m[1], m[2], backend)?, reference, backend.csign_probability())
        }
        GateKind::Cshift => {
            let d = args.d;
            let control = QuditRegister::contiguous(d, 0)?;
            let target = QuditRegister::contiguous(d, d)?;
            let s = match (&args.bell, &args.input) {
                (Some(b), _) => {
                    let v: Vec<usize> = b.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
                    let [m, n] = v[..] else { bail!("--bell expects M,N") };
                    bell_state(d, m, n)?
                }
                (None, Some(spec)) => parse::input_state(spec)?,
                // uniform superposition of all logical |x>|y>
                (None, None) => {
                    let labels = all_labels(d, 2);
                    let mut s = SparseState::empty(2 * d);
                    for l in labels {
                        let mut occ = vec![0u32; 2 * d];
                        occ[l[0]] = 1;
                        occ[d + l[1]] = 1;
                        s.add(occ.into(), 1.0.into())?;
                    }
                    s.normalized()
                }
            };
            let net = cshift_network(d)?;
            let reference = cshift_reference(&s, &control, &target)?;
            let p = backend.csign_probability().powi(net.swap_count() as i32);
            (apply_cshift(&s, &control, &target, &net, backend)?, reference, p)
        }
    })
}

pub fn gate(args: &GateArgs) -> Result<Violations> {
    let (result, reference, expected) = run_gate(args)?;
    let mut violations = Vec::new();
    let total = result.total_probability();
    let success = result.success_probability();
    if (total - 1.0).abs() > TOL {
        violations.push(format!("branch probabilities sum to {total}"));
    }
    if (success - expected).abs() > TOL {
        violations.push(format!("success probability {success} != {expected}"));
    }
    let merged = result.clone().coalesce_successes(COALESCE_TOL);
    let mut min_fidelity = 1.0f64;
    let mut lines = String::new();
    for b in &merged.branches {
        if b.success {
            let fid = b.state.fidelity(&reference)?;
            min_fidelity = min_fidelity.min(fid);
            lines += &format!(
                "record=branch outcome={} probability={} success=true fidelity={}",
                b.outcome,
                f(b.probability),
                f(fid)
            );
            if !b.correction.is_empty() {
                lines += &format!(" correction=\"{}\"", b.correction);
            }
            lines.push('\n');
        } else if args.branches {
            lines += &format!("record=branch outcome={} probability={} success=false\n", b.outcome, f(b.probability));
        }
    }
    if min_fidelity < 1.0 - TOL {
        violations.push(format!("heralded output fidelity {min_fidelity}"));
    }
    let kind = format!("{:?}", args.kind).to_lowercase();
    let backend =
        if args.kind == GateKind::Ns { "ns".to_string() } else { parse::backend(&args.backend, args.n)?.to_string() };
    let mut out = format!(
        "record=gate gate={kind} backend={backend} modes={} success_probability={} expected_success={} total_probability={} min_fidelity={} branches={} success_branches={}\n",
        reference.modes(),
        f(success),
        f(expected),
        f(total),
        f(min_fidelity),
        result.branches.len(),
        result.successes().count()
    );
    out += &lines;
    if let Some(trials) = args.sample {
        if trials == 0 {
            bail!("--sample needs at least one trial");
        }
        let counts = result.sample_counts(trials, args.seed);
        let hits: u64 = result.branches.iter().zip(&counts).filter(|(b, _)| b.success).map(|(_, c)| c).sum();
        let freq = hits as f64 / trials as f64;
        let sigma = (success * (1.0 - success) / trials as f64).sqrt();
        let ok = (freq - success).abs() <= 5.0 * sigma + TOL;
        out += &format!(
            "record=sample trials={trials} seed={} successes={hits} frequency={} expected={} sigma={} within_5sigma={ok}\n",
            args.seed,
            f(freq),
            f(success),
            f(sigma)
        );
        if !ok {
            violations.push(format!("sampled frequency {freq} is more than 5 sigma from {success}"));
        }
    }
    if let Some(path) = &args.dump_state {
        let best = merged
            .successes()
            .max_by(|a, b| a.probability.total_cmp(&b.probability))
            .ok_or_else(|| anyhow!("no heralded success branch to dump"))?;
        fs::write(path, write_state(&best.state)).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(None, &out)?;
    Ok(violations)
}

fn analyzer_config(args: &AnalyzeArgs) -> Result<AnalyzerConfig> {
    let file = match &args.config {
        Some(p) => parse::config_file(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => Default::default(),
    };
    for key in file.keys() {
        if !["d", "parties", "backend", "n", "network", "sample", "seed", "branch_cap"].contains(&key.as_str()) {
            bail!("unknown config key {key:?}");
        }
    }
    fn pick<T: std::str::FromStr>(flag: Option<T>, file: Option<&String>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match (flag, file) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s.parse().map(Some).map_err(|e| anyhow!("config {key}: {e}")),
            (None, None) => Ok(None),
        }
    }
    let d = pick(args.d, file.get("d"), "d")?.ok_or_else(|| anyhow!("--d is required"))?;
    let parties = pick(args.parties, file.get("parties"), "parties")?.unwrap_or(2);
    let backend_name: String =
        pick(args.backend.clone(), file.get("backend"), "backend")?.unwrap_or_else(|| "basic".into());
    let n = pick(args.n, file.get("n"), "n")?;
    let mut cfg = AnalyzerConfig::new(d, parties, parse::backend(&backend_name, n)?);
    if let Some(net) = pick::<String>(args.network.clone(), file.get("network"), "network")? {
        cfg.network = net.parse::<NetworkChoice>()?;
    }
    if let Some(trials) = pick(args.sample, file.get("sample"), "sample")? {
        let seed = pick(args.seed, file.get("seed"), "seed")?.unwrap_or(0);
        cfg.mode = RunMode::Sample { trials, seed };
    }
    cfg.branch_cap = pick(args.branch_cap, file.get("branch_cap"), "branch_cap")?.unwrap_or(DEFAULT_BRANCH_CAP);
    Ok(cfg)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Violations> {
    let cfg = analyzer_config(args)?;
    let report = analyze_all(&cfg)?;
    emit(args.report.as_deref(), &report.to_text())?;
    if let Some(path) = &args.confusion {
        emit(Some(path), &report.confusion_csv())?;
    }
    let violations = report.invariant_failures();
    eprintln!(
        "analyzed {} labels: d={} parties={} backend={} swaps_per_shift={} theoretical_success={} invariants={}",
        report.rows.len(),
        report.d,
        report.parties,
        report.backend,
        report.swaps_per_shift,
        f(report.theoretical_success),
        if violations.is_empty() { "ok" } else { "violated" }
    );
    Ok(violations)
}

pub fn network(cmd: &NetworkCommand) -> Result<Violations> {
    let mut violations = Vec::new();
    let (header, net) = match *cmd {
        NetworkCommand::Search { d, max_swaps } => {
            let found = search_minimal_network(d, max_swaps)?;
            let header = format!(
                "record=search d={d} max_swaps={max_swaps} found={}{}\n",
                found.is_some(),
                found.as_ref().map_or(String::new(), |n| format!(" swaps={}", n.swap_count()))
            );
            (header, found)
        }
        NetworkCommand::Generic { d } => {
            let net = cshift_network(d)?;
            (format!("record=generic d={d} swaps={}\n", net.swap_count()), Some(net))
        }
    };
    let mut out = header;
    if let Some(net) = net {
        if !net.realizes_cshift() {
            violations.push("network does not realize the C-SHIFT".to_string());
        }
        out += &net.to_text();
    }
    emit(None, &out)?;
    Ok(violations)
}

pub fn decompose(args: &DecomposeArgs) -> Result<Violations> {
    let text = fs::read_to_string(&args.unitary).with_context(|| format!("reading {}", args.unitary.display()))?;
    let u = parse::unitary_file(&text)?;
    let deviation = unitarity_deviation(&u);
    if deviation > UNITARY_TOL {
        bail!("matrix is not unitary (deviation {deviation:.3e})");
    }
    let d = u.nrows();
    let elements = reck_decompose(&u)?;
    let splitters = elements.iter().filter(|e| e.is_splitter()).count();
    let error = max_abs_diff(&recompose(&elements, d), &u);
    let mut violations = Vec::new();
    if error >= 1e-10 {
        violations.push(format!("recomposition error {error}"));
    }
    if splitters > d * (d - 1) / 2 {
        violations.push(format!("{splitters} beam splitters exceed {}", d * (d - 1) / 2));
    }
    let out = format!(
        "# d={d} splitters={splitters} phases={} recomposition_error={}\n{}",
        elements.len() - splitters,
        f(error),
        write_netlist(&elements)
    );
    emit(args.out.as_deref(), &out)?;
    Ok(violations)
}
