//! Parent selection laboratory for program synthesis benchmarks.
//!
//! The crate couples a small generational evolution engine with pluggable
//! selection strategies (lexicase, epsilon-lexicase, tournament), an elitist
//! survival pre-filter, and the analytics needed to compare how much
//! selection pressure each strategy puts on low-total-error individuals:
//! rank distributions, per-case usage, behavioral diversity, and the
//! closed-form tournament rank probabilities.
//!
//! Everything is deterministic given a seed. Random decisions draw from
//! counter-derived ChaCha streams keyed by purpose (see [`rng`]), so runs
//! serialize bit-identically regardless of thread count.

pub mod analytics;
pub mod engine;
pub mod individual;
pub mod problems;
pub mod rank;
pub mod rng;
pub mod selection;
pub mod survival;
pub mod value;
