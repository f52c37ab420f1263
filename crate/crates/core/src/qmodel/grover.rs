//! Exact simulation of amplitude amplification.
//!
//! After `k` iterations the state lives in the plane spanned by the uniform
//! superpositions over marked and unmarked items, so a measurement returns a
//! uniformly random marked item with probability `sin^2((2k+1) theta)`,
//! `theta = asin(sqrt(m/t))`, and a uniformly random unmarked item otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Limits;

/// Growth factor of the iteration cutoff in the unknown-count schedule.
pub const BBHT_LAMBDA: f64 = 6.0 / 5.0;
/// Query budget of the unknown-count schedule, in units of `sqrt(t)`.
pub const BBHT_BUDGET_FACTOR: f64 = 4.5;

/// `sin^2((2k+1) asin(sqrt(m/t)))`.
pub fn grover_closed_form<T: Scalar>(t: u64, m: u64, k: u64) -> Result<T> {
    if m == 0 || m > t {
        return Err(Error::domain(format!("marked count {m} must lie in [1, {t}]")));
    }
    let ratio = <T as Scalar>::from_u64(m) / <T as Scalar>::from_u64(t);
    let theta = ratio.sqrt().asin();
    let angle = <T as Scalar>::from_u64(2 * k + 1) * theta;
    let s = angle.sin();
    Ok(s * s)
}

/// `floor(pi / (4 theta))`, which puts `(2k+1) theta` within `theta` of
/// `pi/2` and so guarantees success at least `1 - m/t`. Agrees with
/// `floor((pi/4) sqrt(t/m))` when `m << t`.
pub fn optimal_iterations(t: u64, m: u64) -> u64 {
    let theta = (m as f64 / t as f64).sqrt().asin();
    (std::f64::consts::FRAC_PI_4 / theta).floor() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "m", rename_all = "kebab-case")]
pub enum GroverMode {
    /// A single run with the iteration count tuned for `m` marked items.
    KnownM(u64),
    /// Randomised iteration counts under a growing cutoff, for unknown `m`.
    Bbht,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverRun {
    pub t: u64,
    /// Number of marked items the oracle actually accepts.
    pub marked: u64,
    pub mode: GroverMode,
    /// Grover iterations over all rounds.
    pub iterations: u64,
    pub rounds: u64,
    /// Success probability of the single shot in known-count mode.
    pub success_prob: Option<f64>,
    /// Oracle calls, verification included.
    pub oracle_queries: u64,
    pub found: Option<u64>,
    /// The query budget ran out before a marked item was seen.
    pub timed_out: bool,
    /// Classical evaluations spent confirming absence after a timeout.
    pub fallback_evaluations: u64,
    pub seed: u64,
}

impl GroverRun {
    /// Whether the run proves that no item is marked.
    pub fn proved_absent(&self) -> bool {
        self.found.is_none() && self.fallback_evaluations == self.t
    }
}

/// A search space `[0, t)` with its marked set resolved up front.
#[derive(Debug, Clone)]
pub struct GroverSearch {
    t: u64,
    // Sorted ascending.
    marked: Vec<u64>,
    fallback_limit: u64,
}

impl GroverSearch {
    /// Evaluates the oracle on every index; the simulation needs the marked
    /// set, the query count does not.
    pub fn from_oracle<F>(oracle: F, t: u64, limits: &Limits) -> Result<Self>
    where
        F: Fn(u64) -> bool + Sync,
    {
        if t as u128 > limits.brute_tuples {
            return Err(Error::capacity("search space", t, limits.brute_tuples as u64));
        }
        let marked: Vec<u64> = (0..t).into_par_iter().filter(|&i| oracle(i)).collect();
        Self::with_marked(t, marked, limits)
    }

    pub fn with_marked(t: u64, mut marked: Vec<u64>, limits: &Limits) -> Result<Self> {
        if t == 0 {
            return Err(Error::domain("empty search space"));
        }
        marked.sort_unstable();
        marked.dedup();
        if marked.last().is_some_and(|&x| x >= t) {
            return Err(Error::parameter("marked index outside the search space"));
        }
        Ok(GroverSearch { t, marked, fallback_limit: limits.quantum_grid })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn marked_count(&self) -> u64 {
        self.marked.len() as u64
    }

    fn is_marked(&self, i: u64) -> bool {
        self.marked.binary_search(&i).is_ok()
    }

    fn success_prob(&self, k: u64) -> f64 {
        if self.marked.is_empty() {
            0.0
        } else {
            grover_closed_form::<f64>(self.t, self.marked_count(), k).expect("m in range")
        }
    }

    // One measurement after k iterations.
    fn measure(&self, k: u64, rng: &mut ChaCha8Rng) -> u64 {
        let p = self.success_prob(k);
        if rng.random::<f64>() < p {
            return self.marked[rng.random_range(0..self.marked.len())];
        }
        let unmarked = self.t - self.marked_count();
        if unmarked == 0 {
            return self.marked[rng.random_range(0..self.marked.len())];
        }
        // The u-th unmarked index.
        let mut idx = rng.random_range(0..unmarked);
        for &m in &self.marked {
            if m <= idx {
                idx += 1;
            } else {
                break;
            }
        }
        idx
    }

    pub fn run(&self, mode: GroverMode, seed: u64) -> Result<GroverRun> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = GroverRun {
            t: self.t,
            marked: self.marked_count(),
            mode,
            iterations: 0,
            rounds: 0,
            success_prob: None,
            oracle_queries: 0,
            found: None,
            timed_out: false,
            fallback_evaluations: 0,
            seed,
        };
        match mode {
            GroverMode::KnownM(m) => {
                if m == 0 || m > self.t {
                    return Err(Error::domain(format!("marked count {m} must lie in [1, {}]", self.t)));
                }
                let k = optimal_iterations(self.t, m);
                let x = self.measure(k, &mut rng);
                out.iterations = k;
                out.rounds = 1;
                out.success_prob = Some(self.success_prob(k));
                out.oracle_queries = k + 1;
                out.found = self.is_marked(x).then_some(x);
            }
            GroverMode::Bbht => self.run_bbht(&mut rng, &mut out),
        }
        Ok(out)
    }

    fn run_bbht(&self, rng: &mut ChaCha8Rng, out: &mut GroverRun) {
        let t = self.t;
        let budget = ((BBHT_BUDGET_FACTOR * (t as f64).sqrt()).ceil() as u64).min(t).max(1);
        let cap = (t as f64).sqrt();
        let mut cutoff = 1.0f64;
        while out.oracle_queries < budget {
            let left = budget - out.oracle_queries;
            let j = (rng.random_range(0..cutoff.ceil() as u64)).min(left - 1);
            let x = self.measure(j, rng);
            out.iterations += j;
            out.rounds += 1;
            out.oracle_queries += j + 1;
            if self.is_marked(x) {
                out.found = Some(x);
                return;
            }
            cutoff = (cutoff * BBHT_LAMBDA).min(cap);
        }
        out.timed_out = true;
        if t <= self.fallback_limit {
            out.fallback_evaluations = t;
            out.found = self.marked.first().copied();
        }
    }

    /// Aggregate statistics over `trials` runs with seeds split from `root_seed`.
    pub fn monte_carlo(&self, mode: GroverMode, root_seed: u64, trials: u64) -> Result<MonteCarlo> {
        // Validate the mode once so trials cannot fail.
        self.run(mode, root_seed)?;
        let stats = (0..trials)
            .into_par_iter()
            .map(|i| {
                let run = self.run(mode, derive_seed(root_seed, i)).expect("mode validated");
                MonteCarlo {
                    trials: 1,
                    successes: run.found.is_some() as u64,
                    total_queries: run.oracle_queries,
                    max_queries: run.oracle_queries,
                    timeouts: run.timed_out as u64,
                }
            })
            .reduce(MonteCarlo::default, MonteCarlo::merge);
        Ok(stats)
    }
}

/// Integer counters, so aggregation order cannot change the result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub successes: u64,
    pub total_queries: u64,
    pub max_queries: u64,
    pub timeouts: u64,
}

impl MonteCarlo {
    fn merge(self, o: MonteCarlo) -> MonteCarlo {
        MonteCarlo {
            trials: self.trials + o.trials,
            successes: self.successes + o.successes,
            total_queries: self.total_queries + o.total_queries,
            max_queries: self.max_queries.max(o.max_queries),
            timeouts: self.timeouts + o.timeouts,
        }
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn mean_queries(&self) -> f64 {
        self.total_queries as f64 / self.trials as f64
    }
}

/// Seed of trial `index`: splitmix64 of `root + (index + 1) * golden`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One run over `[0, t)` against `oracle`.
pub fn grover_search<F>(oracle: F, t: u64, mode: GroverMode, seed: u64) -> Result<GroverRun>
where
    F: Fn(u64) -> bool + Sync,
{
    if t == 0 {
        return Err(Error::domain("empty search space"));
    }
    GroverSearch::from_oracle(oracle, t, &Limits::default())?.run(mode, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert!((grover_closed_form::<f64>(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((grover_closed_form::<f64>(10, 3, 0).unwrap() - 0.3).abs() < 1e-12);
        assert!((grover_closed_form::<f64>(5, 5, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(grover_closed_form::<f64>(4, 0, 1).is_err());
        assert!(grover_closed_form::<f64>(4, 5, 1).is_err());
        assert!((grover_closed_form::<f32>(4, 1, 1).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn optimal_iterations_guarantee() {
        for t in 1..=400u64 {
            for m in 1..=t {
                let p = grover_closed_form::<f64>(t, m, optimal_iterations(t, m)).unwrap();
                assert!(p >= 1.0 - m as f64 / t as f64 - 1e-12, "t={t} m={m} p={p}");
            }
        }
    }

    #[test]
    fn known_m_on_four_items() {
        let run = grover_search(|i| i == 2, 4, GroverMode::KnownM(1), 7).unwrap();
        assert_eq!(run.found, Some(2));
        assert_eq!((run.iterations, run.oracle_queries), (1, 2));
    }

    #[test]
    fn bbht_without_marked_items() {
        let run = grover_search(|_| false, 100, GroverMode::Bbht, 3).unwrap();
        assert_eq!(run.found, None);
        assert!(run.timed_out && run.proved_absent());
        assert!(run.oracle_queries <= 45);
    }

    #[test]
    fn queries_never_exceed_t() {
        for t in 1..60u64 {
            for seed in 0..20 {
                let run = grover_search(|i| i == t - 1, t, GroverMode::Bbht, seed).unwrap();
                assert!(run.oracle_queries <= t);
                assert_eq!(run.found, Some(t - 1));
            }
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let s = GroverSearch::with_marked(1024, vec![5], &Limits::default()).unwrap();
        assert_eq!(s.run(GroverMode::Bbht, 11).unwrap(), s.run(GroverMode::Bbht, 11).unwrap());
        let a = s.monte_carlo(GroverMode::Bbht, 1, 200).unwrap();
        let b = s.monte_carlo(GroverMode::Bbht, 1, 200).unwrap();
        assert_eq!(a, b);
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
    }
}
