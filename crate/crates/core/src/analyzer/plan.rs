use std::fmt;
use std::str::FromStr;

use crate::error::{OpticsError, Result};
use crate::fock::fock_dim;
use crate::klm::Backend;
use crate::qudit::{cshift_network, hadamard_d, search_minimal_network, QuditRegister, SwapNetwork};
use crate::unitary::ModeUnitary;

/// Default cap on enumerated measurement branches per run.
pub const DEFAULT_BRANCH_CAP: usize = 1_000_000;

/// Largest dimension for which the exhaustive network search is offered.
pub const MAX_SEARCH_D: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetworkChoice {
    Generic,
    Searched,
}

impl fmt::Display for NetworkChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkChoice::Generic => "generic",
            NetworkChoice::Searched => "searched",
        })
    }
}

impl FromStr for NetworkChoice {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(NetworkChoice::Generic),
            "searched" => Ok(NetworkChoice::Searched),
            _ => Err(OpticsError::InvalidParameter(format!("unknown network {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Exact,
    Sample { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzerConfig {
    pub d: usize,
    pub parties: usize,
    pub backend: Backend,
    pub network: NetworkChoice,
    pub mode: RunMode,
    pub branch_cap: usize,
}

impl AnalyzerConfig {
    pub fn new(d: usize, parties: usize, backend: Backend) -> Self {
        AnalyzerConfig {
            d,
            parties,
            backend,
            network: NetworkChoice::Generic,
            mode: RunMode::Exact,
            branch_cap: DEFAULT_BRANCH_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(OpticsError::InvalidParameter(format!("d={} < 2", self.d)));
        }
        if self.parties < 2 {
            return Err(OpticsError::InvalidParameter(format!("parties={} < 2", self.parties)));
        }
        if let RunMode::Sample { trials: 0, .. } = self.mode {
            return Err(OpticsError::InvalidParameter("sampling needs trials >= 1".into()));
        }
        if let Backend::Teleported(0) = self.backend {
            return Err(OpticsError::InvalidParameter("teleported backend needs n >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// Photon-controlled swap of modes `p`, `q` (global indices).
    CSwap {
        control: usize,
        p: usize,
        q: usize,
    },
    Unitary(ModeUnitary),
    Detect(Vec<usize>),
}

/// Ordered analyzer circuit over `parties * d` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitPlan {
    pub d: usize,
    pub parties: usize,
    pub backend: Backend,
    pub network_choice: NetworkChoice,
    pub network: SwapNetwork,
    pub registers: Vec<QuditRegister>,
    pub steps: Vec<Step>,
    pub branch_cap: usize,
}

impl CircuitPlan {
    pub fn modes(&self) -> usize {
        self.d * self.parties
    }

    pub fn cswap_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::CSwap { .. })).count()
    }

    /// `p^(total C-SWAPs)` with `p` the backend C-SIGN probability.
    pub fn theoretical_success(&self) -> f64 {
        self.backend.csign_probability().powi(self.cswap_count() as i32)
    }
}

/// Detector patterns one C-SIGN invocation can produce on this backend.
pub fn herald_patterns(backend: Backend) -> Result<u64> {
    match backend {
        Backend::Ideal => Ok(1),
        // four ancilla detectors, 2..=4 photons
        Backend::Basic => (2..=4).map(|k| fock_dim(4, k)).sum(),
        Backend::Teleported(n) => {
            // per side: n+1 detectors holding 0..=n+1 photons
            let side = fock_dim(n + 2, n + 1)?;
            side.checked_mul(side).ok_or_else(|| OpticsError::Overflow(format!("herald patterns at n={n}")))
        }
    }
}

/// C-SHIFTs from the first register onto registers N, N-1, ..., 2, then the
/// Fourier transform on the first register, then photon counting on every mode.
pub fn build_analyzer(config: &AnalyzerConfig) -> Result<CircuitPlan> {
    config.validate()?;
    let d = config.d;
    let patterns = herald_patterns(config.backend)?;
    if patterns > config.branch_cap as u64 {
        return Err(OpticsError::BudgetExceeded {
            branches: patterns.min(usize::MAX as u64) as usize,
            cap: config.branch_cap,
        });
    }
    let network = match config.network {
        NetworkChoice::Generic => cshift_network(d)?,
        NetworkChoice::Searched => {
            if d > MAX_SEARCH_D {
                return Err(OpticsError::InvalidParameter(format!("network search is limited to d <= {MAX_SEARCH_D}")));
            }
            let generic = cshift_network(d)?;
            search_minimal_network(d, generic.swap_count())?.unwrap_or(generic)
        }
    };
    let registers: Vec<QuditRegister> =
        (0..config.parties).map(|i| QuditRegister::contiguous(d, i * d)).collect::<Result<_>>()?;
    let mut steps = Vec::new();
    let first = &registers[0];
    for target in registers[1..].iter().rev() {
        for s in &network.swaps {
            steps.push(Step::CSwap { control: first.mode(s.control), p: target.mode(s.p), q: target.mode(s.q) });
        }
    }
    steps.push(Step::Unitary(ModeUnitary::new(hadamard_d(d), first.modes().to_vec())?));
    steps.push(Step::Detect((0..d * config.parties).collect()));
    Ok(CircuitPlan {
        d,
        parties: config.parties,
        backend: config.backend,
        network_choice: config.network,
        network,
        registers,
        steps,
        branch_cap: config.branch_cap,
    })
}
