//! Classical solver: fix the trailing exponents, recover the first by a
//! discrete logarithm.
//!
//! Terms are re-indexed so that `s_1 >= s_2 >= s_3`. For every
//! `(x_2, x_3) in X_2 x X_3(min(r, s_3))` the right-hand side
//! `h = a_1^(-1) (b - a_2 g_2^(x_2) - a_3 g_3^(x_3))` is looked up in a
//! baby-step table for `<g_1>`. Two-term instances scan `X_2(min(r, s_2))`.

use serde::Serialize;

use crate::census::{min_r, EquationInstance};
use crate::dlog::DlogTable;
use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::Limits;

/// Largest baby-step table the solver will build.
pub const BABY_TABLE_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveCase {
    /// The truncated region fits inside the last period.
    RLeS3,
    /// The last exponent ranges over its whole period.
    RGtS3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvePlan {
    /// `perm[k]` is the original index of the k-th largest order.
    pub perm: Vec<usize>,
    /// Orders after re-indexing, descending.
    pub orders: Vec<u64>,
    /// Truncation length, clamped to `[1, s_last]`.
    pub r: u64,
    /// Truncation length before clamping.
    pub raw_r: u64,
    pub case: SolveCase,
    /// `s_2 min(r, s_3)` pairs, or `min(r, s_2)` for two terms.
    pub search_set_size: u128,
}

impl SolvePlan {
    fn last(&self) -> u64 {
        *self.orders.last().expect("nonempty")
    }

    /// Size of the grid actually scanned.
    pub fn grid_size(&self, full_scan: bool) -> u128 {
        if full_scan {
            self.orders[1..].iter().map(|&s| s as u128).product()
        } else {
            self.search_set_size
        }
    }
}

fn check_arity(instance: &EquationInstance) -> Result<()> {
    match instance.m() {
        2 | 3 => Ok(()),
        m => Err(Error::parameter(format!("the solver handles 2 or 3 terms, got {m}"))),
    }
}

pub fn plan(instance: &EquationInstance, delta: f64) -> Result<SolvePlan> {
    check_arity(instance)?;
    let perm = instance.descending_permutation();
    let sorted = instance.permuted(&perm);
    let mr = min_r(&sorted, delta);
    let orders = sorted.orders();
    let last = *orders.last().expect("nonempty");
    let case = if mr.raw_r <= last { SolveCase::RLeS3 } else { SolveCase::RGtS3 };
    let middle: u128 = orders[1..orders.len() - 1].iter().map(|&s| s as u128).product();
    Ok(SolvePlan {
        perm,
        r: mr.region.r,
        raw_r: mr.raw_r,
        case,
        search_set_size: middle * mr.region.r as u128,
        orders,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "solution")]
pub enum SolveStatus {
    /// Exponents in the caller's term order.
    Found(Vec<u64>),
    /// The whole grid was scanned.
    NoSolution,
    /// Nothing in the truncated grid; solutions outside it are possible.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub plan: SolvePlan,
    pub dlog_queries: u64,
    pub giant_steps: u64,
    /// Largest giant-step count of a single query.
    pub max_giant_steps: u64,
    pub pairs_scanned: u64,
    /// Baby-step table size `ceil(sqrt(s_1))`.
    pub baby_steps: u64,
}

/// Walks `X_2 x ... x X_last(range)` with the last exponent outermost and
/// yields `(tail exponents, h)` where `h = a_1^(-1)(b - sum_{i>=2} a_i g_i^(x_i))`.
pub(crate) struct TailGrid {
    sorted: EquationInstance,
    a1_inv: FieldElement,
    last_range: u64,
}

impl TailGrid {
    pub(crate) fn new(instance: &EquationInstance, plan: &SolvePlan, full_scan: bool) -> Result<Self> {
        let sorted = instance.permuted(&plan.perm);
        let a1_inv = sorted.field().inv(sorted.terms()[0].a)?;
        let last_range = if full_scan { plan.last() } else { plan.r.min(plan.last()) };
        Ok(TailGrid { sorted, a1_inv, last_range })
    }

    pub(crate) fn sorted(&self) -> &EquationInstance {
        &self.sorted
    }

    fn middle_range(&self) -> u64 {
        if self.sorted.m() == 3 {
            self.sorted.terms()[1].order
        } else {
            1
        }
    }

    pub(crate) fn size(&self) -> u64 {
        self.middle_range() * self.last_range
    }

    /// Exponents `(x_2, x_last)` of flat index `idx = x_last * s_2 + x_2`;
    /// for two terms `x_2` is absent.
    pub(crate) fn split(&self, idx: u64) -> Vec<u64> {
        let mid = self.middle_range();
        if self.sorted.m() == 3 {
            vec![idx % mid, idx / mid]
        } else {
            vec![idx]
        }
    }

    pub(crate) fn rhs(&self, tail: &[u64]) -> FieldElement {
        let f = self.sorted.field();
        let partial = self.sorted.terms()[1..]
            .iter()
            .zip(tail)
            .fold(FieldElement::ZERO, |acc, (t, &x)| f.add(acc, f.mul(t.a, f.pow(t.g, x))));
        f.mul(self.a1_inv, f.sub(self.sorted.b(), partial))
    }

    /// Visits the grid in scan order, stopping when `visit` returns true.
    pub(crate) fn scan(&self, mut visit: impl FnMut(&[u64], FieldElement) -> bool) {
        let f = self.sorted.field();
        let terms = self.sorted.terms();
        let (last, mids) = terms[1..].split_last().expect("at least two terms");
        let mid = mids.first();
        let mut last_val = last.a;
        for x_last in 0..self.last_range {
            let base = f.sub(self.sorted.b(), last_val);
            match mid {
                Some(t2) => {
                    let mut mid_val = t2.a;
                    for x2 in 0..t2.order {
                        let h = f.mul(self.a1_inv, f.sub(base, mid_val));
                        if visit(&[x2, x_last], h) {
                            return;
                        }
                        mid_val = f.mul(mid_val, t2.g);
                    }
                }
                None => {
                    if visit(&[x_last], f.mul(self.a1_inv, base)) {
                        return;
                    }
                }
            }
            last_val = f.mul(last_val, last.g);
        }
    }

    /// Sorted-order exponents mapped back to the caller's term order.
    pub(crate) fn unpermute(&self, perm: &[usize], sorted_xs: &[u64]) -> Vec<u64> {
        let mut xs = vec![0; perm.len()];
        for (k, &i) in perm.iter().enumerate() {
            xs[i] = sorted_xs[k];
        }
        xs
    }
}

pub(crate) fn build_table(sorted: &EquationInstance) -> Result<DlogTable> {
    let t1 = sorted.terms()[0];
    let side = crate::arith::ceil_sqrt(t1.order);
    if side > BABY_TABLE_LIMIT {
        return Err(Error::capacity("baby-step table", side, BABY_TABLE_LIMIT));
    }
    DlogTable::build(sorted.field(), t1.g, t1.order)
}

pub fn solve_classical(instance: &EquationInstance, delta: f64, full_scan: bool) -> Result<SolveOutcome> {
    solve_classical_with(instance, delta, full_scan, &Limits::default())
}

/// First solution in scan order, or a certificate of absence when the whole
/// grid was covered.
pub fn solve_classical_with(
    instance: &EquationInstance,
    delta: f64,
    full_scan: bool,
    limits: &Limits,
) -> Result<SolveOutcome> {
    let plan = plan(instance, delta)?;
    let grid_size = plan.grid_size(full_scan);
    if grid_size > limits.brute_tuples {
        return Err(Error::capacity("solver grid", grid_size, limits.brute_tuples));
    }
    let grid = TailGrid::new(instance, &plan, full_scan)?;
    let table = build_table(grid.sorted())?;
    let field = instance.field();

    let mut found = None;
    let (mut queries, mut giant, mut max_giant, mut pairs) = (0u64, 0u64, 0u64, 0u64);
    let mut failure = None;
    grid.scan(|tail, h| {
        pairs += 1;
        if h.is_zero() {
            return false;
        }
        match table.lookup(field, h) {
            Ok(l) => {
                queries += 1;
                giant += l.giant_steps;
                max_giant = max_giant.max(l.giant_steps);
                if let Some(x1) = l.log {
                    let mut sorted_xs = vec![x1];
                    sorted_xs.extend_from_slice(tail);
                    found = Some(grid.unpermute(&plan.perm, &sorted_xs));
                    return true;
                }
                false
            }
            Err(e) => {
                failure = Some(e);
                true
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let covered_all = full_scan || plan.r >= plan.last();
    let status = match found {
        Some(xs) => {
            assert!(verify(instance, &xs)?, "solver returned a non-solution {xs:?}");
            SolveStatus::Found(xs)
        }
        None if covered_all => SolveStatus::NoSolution,
        None => SolveStatus::Inconclusive,
    };
    Ok(SolveOutcome {
        status,
        baby_steps: table.m(),
        plan,
        dlog_queries: queries,
        giant_steps: giant,
        max_giant_steps: max_giant,
        pairs_scanned: pairs,
    })
}

/// Whether `xs` (caller's term order) solves the equation.
pub fn verify(instance: &EquationInstance, xs: &[u64]) -> Result<bool> {
    if xs.len() != instance.m() {
        return Err(Error::parameter(format!("expected {} exponents, got {}", instance.m(), xs.len())));
    }
    for (i, (&x, t)) in xs.iter().zip(instance.terms()).enumerate() {
        if x >= t.order {
            return Err(Error::domain(format!("x_{} = {x} is outside [0, {})", i + 1, t.order)));
        }
    }
    Ok(instance.evaluate(xs) == instance.b())
}
