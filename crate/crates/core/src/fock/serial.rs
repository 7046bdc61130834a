//! Text form of a sparse state: a `# modes=M photons=N` header (`N1+N2` when
//! the state spans several sectors), then one
//! `counts re im` record per term in canonical order, floats at 17 significant digits.

use num_complex::Complex64;

use super::{Occupation, SparseState};
use crate::error::{OpticsError, Result};

pub fn write_state(state: &SparseState) -> String {
    let photons = match state.sectors().as_slice() {
        [] => "none".to_string(),
        sectors => sectors.iter().map(u32::to_string).collect::<Vec<_>>().join("+"),
    };
    let mut out = format!("# modes={} photons={}\n", state.modes(), photons);
    for (occ, amp) in state.iter() {
        out.push_str(&format!("{} {:.16e} {:.16e}\n", occ, amp.re, amp.im));
    }
    out
}

pub fn read_state(text: &str) -> Result<SparseState> {
    let perr = |line: usize, msg: String| OpticsError::Parse { line, msg };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
    let mut modes = None;
    let mut photons: Option<Vec<u32>> = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("modes", v)) => modes = Some(v.parse::<usize>().map_err(|e| perr(1, e.to_string()))?),
            Some(("photons", "none")) => {}
            Some(("photons", v)) => {
                let parsed = v.split('+').map(|t| t.parse::<u32>()).collect::<std::result::Result<Vec<_>, _>>();
                photons = Some(parsed.map_err(|e| perr(1, e.to_string()))?);
            }
            _ => return Err(perr(1, format!("unknown header field {field:?}"))),
        }
    }
    let modes = modes.ok_or_else(|| perr(1, "header lacks modes=".into()))?;
    let mut state = SparseState::empty(modes);
    for (idx, line) in lines {
        let ln = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(perr(ln, format!("expected 3 fields, got {}", fields.len())));
        }
        let occ: Occupation = fields[0].parse().map_err(|e: OpticsError| perr(ln, e.to_string()))?;
        let re: f64 = fields[1].parse().map_err(|e| perr(ln, format!("{e}")))?;
        let im: f64 = fields[2].parse().map_err(|e| perr(ln, format!("{e}")))?;
        if photons.as_ref().is_some_and(|p| !p.contains(&occ.total())) {
            return Err(perr(ln, format!("{occ} outside the declared sector")));
        }
        state.add(occ, Complex64::new(re, im)).map_err(|e| perr(ln, e.to_string()))?;
    }
    Ok(state)
}
