//! Work and query counts of the classical scan and the two quantum searches.
//!
//! Classical units are giant steps; quantum units are oracle queries. The
//! polylogarithmic factors are carried separately in `log_q` and never
//! folded into the counts.

use serde::Serialize;

use crate::arith::ceil_sqrt;
use crate::census::{count_all_b_with, density_ratio, saturating_ceil, ConvolutionMethod, EquationInstance};
use crate::error::Result;
use crate::solver::{plan, SolveCase};
use crate::Limits;

/// Where the solution count of the large-order search comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MSource {
    /// Exact count over the truncated region.
    #[default]
    Census,
    /// `s_1 s_2 r / q`.
    MainTerm,
}

/// `s_2 min(r, s_3) <= (s_1^2 s_2^2 min(r, s_3))^(2/5)`, the step that
/// brings the search below `q^(3/5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchChain {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// The search for large orders, `(s_1 s_2)^2 s_3 > q^3 ln q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeOrderSearch {
    /// `max(1, floor(q^3 (s_1 s_2)^(-2) ln q))`.
    pub r_floor: u64,
    pub r_floor_le_s3: bool,
    /// `s_1 s_2 r_floor / q`.
    pub m_estimate: f64,
    /// Exact solution count in `X_1 x X_2 x X_3(r_floor)` when counted.
    pub m_exact: Option<u64>,
    pub m_source: MSource,
    /// `ceil(sqrt(s_2 r_floor / M))`; absent when `M = 0`.
    pub t3_queries: Option<u64>,
    /// `q^(1/2) (s_1^2 s_2^2 s_3)^(-1/10)`.
    pub t3_bound: f64,
    /// The same with a `q^2` prefactor, as the statement of the result reads.
    pub t3_bound_stated: f64,
}

/// Quantum order finding and discrete logarithms, priced symbolically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShorEntry {
    pub order_findings: u64,
    pub dlogs_per_query: u64,
    pub unit_cost: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub q: u64,
    /// Orders sorted descending.
    pub orders: Vec<u64>,
    pub r: u64,
    pub case: SolveCase,
    pub search_set_size: u128,
    /// `search_set_size * ceil(sqrt(s_1))`.
    pub classical_cost: u128,
    /// `q^(3/2)` for three terms, `q` for two.
    pub classical_bound: f64,
    /// `ceil(sqrt(search_set_size))`.
    pub t2_queries: u64,
    /// `q^(3/5)` for three terms, `q^(1/3)` for two.
    pub t2_bound: f64,
    pub chain: Option<SearchChain>,
    pub t3_applicable: bool,
    pub t3: Option<LargeOrderSearch>,
    pub shor: ShorEntry,
    pub log_q: f64,
}

fn ceil_sqrt_u128(n: u128) -> u64 {
    if let Ok(n) = u64::try_from(n) {
        return ceil_sqrt(n);
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x < n {
        x += 1;
    }
    while x > 0 && (x - 1) * (x - 1) >= n {
        x -= 1;
    }
    x as u64
}

/// Cost figures from the orders alone; the large-order count uses the
/// main-term estimate.
pub fn cost_figures(q: u64, orders: &[u64], delta: f64) -> CostReport {
    let mut orders = orders.to_vec();
    orders.sort_unstable_by(|a, b| b.cmp(a));
    let m = orders.len();
    let last = *orders.last().expect("nonempty");
    let raw_r = saturating_ceil(density_ratio(q, &orders) * delta * delta);
    let r = raw_r.min(last);
    let case = if raw_r <= last { SolveCase::RLeS3 } else { SolveCase::RGtS3 };
    let middle: u128 = orders[1..m - 1].iter().map(|&s| s as u128).product();
    let search_set_size = middle * r as u128;
    let classical_cost = search_set_size.saturating_mul(ceil_sqrt(orders[0]) as u128);
    let qf = q as f64;
    let lq = qf.ln();

    let (chain, t3) = if m == 3 {
        let (s1, s2, s3) = (orders[0] as f64, orders[1] as f64, orders[2] as f64);
        let lhs = s2 * r as f64;
        let rhs = (s1 * s1 * s2 * s2 * r as f64).powf(0.4);
        let chain = SearchChain { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) };
        let heavy = s1 * s1 * s2 * s2 * s3;
        let t3 = (heavy > qf.powi(3) * lq).then(|| {
            let raw = (qf.powi(3) / (s1 * s2).powi(2) * lq).floor();
            let r_floor = if raw < 1.0 { 1 } else { raw as u64 };
            let m_estimate = s1 * s2 * r_floor as f64 / qf;
            let t3_bound = qf.sqrt() * heavy.powf(-0.1);
            LargeOrderSearch {
                r_floor,
                r_floor_le_s3: r_floor <= orders[2],
                m_estimate,
                m_exact: None,
                m_source: MSource::MainTerm,
                t3_queries: Some(((s2 * r_floor as f64 / m_estimate).sqrt().ceil()) as u64),
                t3_bound,
                t3_bound_stated: qf * qf * heavy.powf(-0.1),
            }
        });
        (Some(chain), t3)
    } else {
        (None, None)
    };

    let (classical_bound, t2_bound) = if m == 3 { (qf.powf(1.5), qf.powf(0.6)) } else { (qf, qf.cbrt()) };
    CostReport {
        q,
        r,
        case,
        search_set_size,
        classical_cost,
        classical_bound,
        t2_queries: ceil_sqrt_u128(search_set_size),
        t2_bound,
        chain,
        t3_applicable: t3.is_some(),
        t3,
        shor: ShorEntry {
            order_findings: m as u64,
            dlogs_per_query: 1,
            unit_cost: "(log q)^O(1)".to_string(),
        },
        log_q: lq,
        orders,
    }
}

pub fn cost_report(instance: &EquationInstance, delta: f64, source: MSource) -> Result<CostReport> {
    cost_report_with(instance, delta, source, &Limits::default())
}

/// Cost figures for one instance. With [`MSource::Census`] the large-order
/// count is the exact number of solutions for the instance's `b`.
pub fn cost_report_with(
    instance: &EquationInstance,
    delta: f64,
    source: MSource,
    limits: &Limits,
) -> Result<CostReport> {
    let p = plan(instance, delta)?;
    let mut report = cost_figures(instance.field().q(), &instance.orders(), delta);
    debug_assert_eq!(report.r, p.r);
    if let (Some(t3), MSource::Census) = (report.t3.as_mut(), source) {
        let sorted = instance.permuted(&p.perm);
        let region = sorted.region(t3.r_floor.min(p.orders[2]))?;
        let counts = count_all_b_with(&sorted, &region, ConvolutionMethod::Auto, limits)?;
        let m = counts[instance.b().enc() as usize];
        t3.m_exact = Some(m);
        t3.m_source = MSource::Census;
        let s2 = p.orders[1] as f64;
        t3.t3_queries = (m > 0).then(|| (s2 * t3.r_floor as f64 / m as f64).sqrt().ceil() as u64);
    }
    Ok(report)
}
