//! Experiment harness around the `lexilab` core: plans, a resumable runner,
//! summary statistics, and figure-data emission. The `lexilab` binary in
//! this crate is a thin CLI over these modules.

pub mod plan;
pub mod plots;
pub mod runner;
pub mod summary;
pub mod svg;
