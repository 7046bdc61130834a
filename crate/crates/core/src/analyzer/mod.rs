//! The Bell-state analyzer: C-SHIFT networks, a Fourier transform on the
//! first qudit and photon counting, evaluated by exact branch enumeration or
//! by sampling.

mod plan;
mod report;
mod run;

pub use plan::{
    build_analyzer, herald_patterns, AnalyzerConfig, CircuitPlan, NetworkChoice, RunMode, Step, DEFAULT_BRANCH_CAP,
    MAX_SEARCH_D,
};
pub use report::{all_labels, analyze_all, AnalyzerReport, BaseAudit, LabelRow, SampleCounts, ShorterSearch};
pub use run::{run_exact, run_sampled, sample_from, Decoded, ExactOutcome, SampledOutcome};
