//! Exponential congruences `a_1 g_1^(x_1) + ... + a_m g_m^(x_m) = b` over
//! finite fields: exact solution counts, a density census over all targets,
//! a classical solver and a query-cost model for quantum search.

pub mod arith;
pub mod census;
pub mod dlog;
pub mod error;
pub mod ff;
pub mod fmt;
pub mod qmodel;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};

/// Exact per-target values.
pub type Rational = num_rational::Ratio<i128>;

pub type UnitComplex = ff::UnitComplex<f64>;
pub type CharacterTable<'f> = ff::CharacterTable<'f, f64>;
pub type CharSumCounter<'f> = census::CharSumCounter<'f, f64>;

/// Size caps past which operations return [`Error::Capacity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest q for all-target counting.
    pub counting_q: u64,
    /// Largest number of tuples enumerated by brute force.
    pub brute_tuples: u128,
    /// Largest search space simulated exhaustively.
    pub quantum_grid: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { counting_q: 1 << 20, brute_tuples: 100_000_000, quantum_grid: 1_000_000 }
    }
}
