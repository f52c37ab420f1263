//! Experiment harness for exponential congruences.

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::run;
