//! Query-cost model for quantum search over the solver's grid.
//!
//! Order finding and discrete logarithms are priced symbolically; the search
//! itself is simulated exactly through its two-dimensional rotation.

mod cost;
mod grover;
mod scan;

pub use cost::{cost_figures, cost_report, cost_report_with, CostReport, LargeOrderSearch, MSource, SearchChain, ShorEntry};
pub use grover::{
    derive_seed, grover_closed_form, grover_search, optimal_iterations, GroverMode, GroverRun, GroverSearch, MonteCarlo,
    BBHT_BUDGET_FACTOR, BBHT_LAMBDA,
};
pub use scan::{fit_slope, log_spaced_primes, ratio_scan, OrderPolicy, RatioScan, ScanFit, SCAN_CSV_HEADER};

use serde::Serialize;

use crate::census::EquationInstance;
use crate::error::{Error, Result};
use crate::solver::{build_table, plan, verify, SolvePlan, SolveStatus, TailGrid};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumSolve {
    pub status: SolveStatus,
    pub plan: SolvePlan,
    /// Size of the searched grid.
    pub grid_size: u64,
    pub oracle_queries: u64,
    pub run: GroverRun,
}

pub fn quantum_solve_simulated(
    instance: &EquationInstance,
    delta: f64,
    mode: GroverMode,
    seed: u64,
    full_scan: bool,
) -> Result<QuantumSolve> {
    quantum_solve_simulated_with(instance, delta, mode, seed, full_scan, &Limits::default())
}

/// Search over the solver's grid with the oracle "the discrete logarithm of
/// the right-hand side exists", one query per call.
pub fn quantum_solve_simulated_with(
    instance: &EquationInstance,
    delta: f64,
    mode: GroverMode,
    seed: u64,
    full_scan: bool,
    limits: &Limits,
) -> Result<QuantumSolve> {
    let plan = plan(instance, delta)?;
    let grid_size = plan.grid_size(full_scan);
    if grid_size > limits.quantum_grid as u128 {
        return Err(Error::capacity("quantum search grid", grid_size, limits.quantum_grid));
    }
    let grid = TailGrid::new(instance, &plan, full_scan)?;
    let table = build_table(grid.sorted())?;
    let field = instance.field();
    let x1_of = |idx: u64| -> Option<u64> {
        let h = grid.rhs(&grid.split(idx));
        if h.is_zero() {
            return None;
        }
        table.dlog(field, h).expect("h is nonzero")
    };
    let t = grid.size();
    let search = GroverSearch::from_oracle(|i| x1_of(i).is_some(), t, limits)?;
    let run = search.run(mode, seed)?;
    let covered_all = full_scan || plan.r >= *plan.orders.last().expect("nonempty");
    let status = match run.found {
        Some(idx) => {
            let mut sorted_xs = vec![x1_of(idx).expect("marked index has a logarithm")];
            sorted_xs.extend(grid.split(idx));
            let xs = grid.unpermute(&plan.perm, &sorted_xs);
            assert!(verify(instance, &xs)?, "search returned a non-solution {xs:?}");
            SolveStatus::Found(xs)
        }
        None if run.proved_absent() && covered_all => SolveStatus::NoSolution,
        None => SolveStatus::Inconclusive,
    };
    Ok(QuantumSolve { status, plan, grid_size: t, oracle_queries: run.oracle_queries, run })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::tests::f7_canonical;
    use crate::census::DeltaPolicy;
    use crate::ff::FieldElement;

    #[test]
    fn finds_verified_solution() {
        let inst = f7_canonical(3);
        let d = DeltaPolicy::SqrtLog.value(7);
        for seed in 0..50 {
            let out = quantum_solve_simulated(&inst, d, GroverMode::Bbht, seed, false).unwrap();
            let SolveStatus::Found(xs) = &out.status else { panic!("seed {seed}: {:?}", out.status) };
            assert!(verify(&inst, xs).unwrap());
            assert!(out.oracle_queries <= (4.5 * 6f64.sqrt()).ceil() as u64);
            assert!(out.oracle_queries <= out.grid_size);
        }
    }

    #[test]
    fn absent_solution_is_proved() {
        let f = std::sync::Arc::new(crate::ff::Field::prime(7).unwrap());
        let one = FieldElement::ONE;
        let inst = EquationInstance::new(f, &[(one, one); 3], FieldElement::new(4)).unwrap();
        let out = quantum_solve_simulated(&inst, 1.0, GroverMode::Bbht, 1, true).unwrap();
        assert_eq!(out.status, SolveStatus::NoSolution);
    }
}
