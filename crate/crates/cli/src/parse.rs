use std::collections::BTreeMap;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use linopt_core::fock::read_state;
use linopt_core::{Backend, CMatrix, Complex64, Occupation, SparseState};

/// Parses `--input`: either `@PATH` (serialized state file) or terms
/// `OCC:RE[:IM]` separated by `;`, e.g. `1,0:0.6;0,1:0:0.8`. A term without
/// an amplitude gets 1. The result is normalized.
pub fn input_state(spec: &str) -> Result<SparseState> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(read_state(&text)?);
    }
    let mut terms = Vec::new();
    for term in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let mut parts = term.split(':');
        let occ: Occupation = parts.next().unwrap_or_default().parse()?;
        let re = parts.next().map(str::parse::<f64>).transpose().with_context(|| format!("term {term:?}"))?;
        let im = parts.next().map(str::parse::<f64>).transpose().with_context(|| format!("term {term:?}"))?;
        if parts.next().is_some() {
            bail!("term {term:?} has too many fields");
        }
        terms.push((occ, Complex64::new(re.unwrap_or(1.0), im.unwrap_or(0.0))));
    }
    let modes = terms.first().map(|(o, _)| o.modes()).ok_or_else(|| anyhow!("empty input spec"))?;
    let state = SparseState::from_terms(modes, terms)?;
    if state.norm() == 0.0 {
        bail!("input state has zero norm");
    }
    Ok(state.normalized())
}

/// Reads a square complex matrix: one row per line, entries separated by
/// whitespace, each entry `RE` or `RE,IM`. Lines starting with `#` are ignored.
pub fn unitary_file(text: &str) -> Result<CMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|e| {
                let (re, im) = e.split_once(',').unwrap_or((e, "0"));
                Ok(Complex64::new(re.parse()?, im.parse()?))
            })
            .collect::<Result<Vec<_>>>()
            .with_context(|| format!("line {}", idx + 1))?;
        rows.push(row);
    }
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        bail!("matrix must be square and non-empty");
    }
    Ok(CMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// Combines `--backend` and `--n`; `teleported:K` is accepted as well.
pub fn backend(name: &str, n: Option<usize>) -> Result<Backend> {
    match (name, n) {
        ("teleported", Some(k)) => Ok(format!("teleported:{k}").parse()?),
        ("teleported", None) => bail!("--backend teleported needs --n K"),
        (other, _) => Ok(other.parse()?),
    }
}

/// Plain `key = value` file; `#` starts a comment.
pub fn config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key = value", idx + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_terms() {
        let s = input_state("1,0:0.6;0,1:0:0.8").unwrap();
        assert_eq!(s.modes(), 2);
        assert!((s.amplitude(&Occupation(vec![0, 1])) - Complex64::new(0.0, 0.8)).norm() < 1e-15);
        let b = input_state("1,1").unwrap();
        assert_eq!(b.len(), 1);
        assert!(input_state("").is_err());
        assert!(input_state("1,0:1;1:1").is_err());
    }

    #[test]
    fn matrix_and_backend() {
        let m = unitary_file("# swap\n0 1\n1 0,0\n").unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(1.0, 0.0));
        assert!(unitary_file("1 0\n0").is_err());
        assert_eq!(backend("teleported", Some(2)).unwrap(), Backend::Teleported(2));
        assert_eq!(backend("basic", None).unwrap(), Backend::Basic);
        assert!(backend("teleported", None).is_err());
    }

    #[test]
    fn config_lines() {
        let c = config_file("d = 3 # qutrits\n\nbackend=basic\n").unwrap();
        assert_eq!(c["d"], "3");
        assert_eq!(c["backend"], "basic");
    }
}
