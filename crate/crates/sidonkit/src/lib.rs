//! Arithmetic of finite integer sets under addition: Sidon and B_h systems.
//!
//! A family of k-element integer sets is a Sidon system when the pairwise
//! sumsets A + B determine the unordered pair {A, B}; B_h systems are the
//! h-fold analogue. The crate provides the set arithmetic (`groundset`),
//! family-level verification (`systems`), a threshold-filtered construction
//! (`construct`), replayable structural certificates (`certify`), exact and
//! greedy extremal search (`extremal`), and seeded random-family experiments
//! around a density threshold (`experiment`).

pub mod binom;
pub mod certify;
pub mod construct;
mod error;
pub mod experiment;
pub mod extremal;
pub mod groundset;
pub mod systems;

pub use certify::{EllParameters, LemmaOutcome, TraceReport, TraceVerdict};
pub use construct::{ConstructStats, K2FamilyReport};
pub use error::{Error, Result};
pub use experiment::{ExpectationBracket, ExperimentConfig, ExperimentRecord, ExtractionStats};
pub use extremal::SearchOutcome;
pub use groundset::{BhCollision, KSet};
pub use systems::{AdditiveTuple, DetectOptions, Family, SumsetKey};

/// Default ceiling on the number of enumerated sum tuples during family
/// verification. Instances near the cap also need memory proportional to
/// the number of distinct sumsets; lower the cap when that matters.
pub const DEFAULT_WORK_CAP: u128 = 1_000_000_000;
