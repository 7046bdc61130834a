//! Linear-optics simulation: sparse Fock states, interferometers, heralded
//! KLM gates, qudit C-SHIFT networks and a generalized Bell-state analyzer.

pub mod analyzer;
pub mod conditional;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod klm;
pub mod qudit;
pub mod sampling;
pub mod unitary;

pub use analyzer::{analyze_all, AnalyzerConfig, AnalyzerReport, NetworkChoice, RunMode};
pub use conditional::{Branch, ConditionalResult};
pub use error::{OpticsError, Result};
pub use fock::{Occupation, SparseState};
pub use klm::Backend;
pub use num_complex::Complex64;
pub use unitary::{CMatrix, ModeUnitary};
