//! Classical stochastic-signal simulator of fourfold polarization
//! coincidences on a two-source / polarizing-beam-splitter bench, with a
//! quantum-mechanical reference prediction for comparison.
//!
//! The crate is organized along the signal path:
//!
//! - [`jones`]: real polarization vectors, analyzer angles, polarizer
//!   projectors;
//! - [`bench`]: source pulse pairs, beam-splitter wiring, detector fields,
//!   and the two route amplitudes behind every coincidence;
//! - [`estimators`]: exact and Monte Carlo coincidence estimators with an
//!   adjustable pulse-overlap weight;
//! - [`scans`]: regime tables, skew curves, and overlap sweeps;
//! - [`ghz`]: the entangled-state projection probability the classical
//!   model is compared against;
//! - [`benchfile`]: a line-oriented description format for bench runs;
//! - [`cli`]: the `polbench` command-line front end.

pub mod bench;
pub mod benchfile;
pub mod cli;
pub mod estimators;
pub mod ghz;
pub mod jones;
mod report;
pub mod scans;

pub use bench::{AnalyzerSettings, PathwayAmplitudes, SourceState};
pub use estimators::{
    CorrelationResult, Estimator, EstimatorKind, InterferenceFlag, RngSpec,
    COINCIDENCE_MAX,
};
pub use jones::{PolAngle, PolVector, PolarizerOp};
