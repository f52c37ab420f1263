//! Growth of classical work and quantum queries across prime fields.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cost::{cost_figures, CostReport};
use crate::arith::{factorize, is_prime, next_prime};
use crate::census::DeltaPolicy;
use crate::error::{Error, Result};
use crate::fmt::sig12;

pub const SCAN_CSV_HEADER: &str = "q,s1,s2,s3,r,classical_cost,t2_queries,t3_queries,t2_bound,t3_bound";

/// How the orders are chosen for each prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrderPolicy {
    /// Every base a primitive root: `s_i = q - 1`.
    #[default]
    MaxOrder,
    /// The divisors of `q - 1` that maximise the quantum query count, ties
    /// broken by classical work.
    WorstCase,
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderPolicy::MaxOrder => "max-order",
            OrderPolicy::WorstCase => "worst-case",
        })
    }
}

impl FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-order" => Ok(OrderPolicy::MaxOrder),
            "worst-case" => Ok(OrderPolicy::WorstCase),
            _ => Err(Error::parse(s, "expected max-order or worst-case")),
        }
    }
}

/// Least-squares exponents of cost against `q` on a log-log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanFit {
    pub classical_exp: f64,
    pub quantum_exp: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioScan {
    pub policy: OrderPolicy,
    pub terms: usize,
    pub rows: Vec<CostReport>,
    pub fit: ScanFit,
    pub warnings: Vec<String>,
}

impl RatioScan {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::parameter(format!("CSV output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SCAN_CSV_HEADER.split(',')).map_err(io)?;
        for row in &self.rows {
            let s = |i: usize| row.orders.get(i).map(u64::to_string).unwrap_or_default();
            let t3 = row.t3.as_ref();
            w.write_record([
                row.q.to_string(),
                s(0),
                s(1),
                s(2),
                row.r.to_string(),
                row.classical_cost.to_string(),
                row.t2_queries.to_string(),
                t3.and_then(|t| t.t3_queries).map(|v| v.to_string()).unwrap_or_default(),
                sig12(row.t2_bound),
                t3.map(|t| sig12(t.t3_bound)).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::parameter(format!("CSV output failed: {e}")))?;
        Ok(())
    }

    /// `classical_exp=<x> quantum_exp=<y> ratio=<x/y>`
    pub fn summary_line(&self) -> String {
        format!(
            "classical_exp={} quantum_exp={} ratio={}",
            sig12(self.fit.classical_exp),
            sig12(self.fit.quantum_exp),
            sig12(self.fit.ratio)
        )
    }
}

/// Slope of the least-squares line through `(x_i, y_i)`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn choose_orders(q: u64, policy: OrderPolicy, terms: usize, delta: f64) -> Result<CostReport> {
    match policy {
        OrderPolicy::MaxOrder => Ok(cost_figures(q, &vec![q - 1; terms], delta)),
        OrderPolicy::WorstCase => {
            let divisors = factorize(q - 1)?.divisors();
            let mut best: Option<CostReport> = None;
            let mut consider = |orders: &[u64]| {
                let rep = cost_figures(q, orders, delta);
                let key = (rep.t2_queries, rep.classical_cost);
                if best.as_ref().is_none_or(|b| key > (b.t2_queries, b.classical_cost)) {
                    best = Some(rep);
                }
            };
            // Divisors ascend; enumerate s_1 >= s_2 >= s_3.
            for (i, &s1) in divisors.iter().enumerate().rev() {
                for (j, &s2) in divisors[..=i].iter().enumerate().rev() {
                    if terms == 2 {
                        consider(&[s1, s2]);
                        continue;
                    }
                    for &s3 in divisors[..=j].iter().rev() {
                        consider(&[s1, s2, s3]);
                    }
                }
            }
            Ok(best.expect("q - 1 has divisors"))
        }
    }
}

/// Cost rows for each prime and fitted growth exponents.
pub fn ratio_scan(primes: &[u64], policy: OrderPolicy, delta: DeltaPolicy, terms: usize) -> Result<RatioScan> {
    if !(2..=3).contains(&terms) {
        return Err(Error::parameter(format!("scans cover 2 or 3 terms, got {terms}")));
    }
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if primes.len() < 2 {
        return Err(Error::parameter("a scan needs at least two distinct primes"));
    }
    if let Some(&bad) = primes.iter().find(|&&p| p < 3 || !is_prime(p)) {
        return Err(Error::parameter(format!("{bad} is not an odd prime")));
    }
    let mut warnings = Vec::new();
    if primes.len() < 5 {
        warnings.push(format!("only {} primes; exponents are rough", primes.len()));
    }
    let (lo, hi) = (primes[0] as f64, *primes.last().unwrap() as f64);
    // Primes cannot sit exactly on powers of ten; 1009..99991 counts as two decades.
    if (hi / lo).log10() < 1.95 {
        warnings.push(format!("primes span {:.2} decades, fewer than 2", (hi / lo).log10()));
    }
    let rows = primes
        .iter()
        .map(|&q| choose_orders(q, policy, terms, delta.value(q)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| (r.q as f64).ln()).collect();
    let cl: Vec<f64> = rows.iter().map(|r| (r.classical_cost as f64).ln()).collect();
    let qu: Vec<f64> = rows.iter().map(|r| (r.t2_queries as f64).ln()).collect();
    let classical_exp = fit_slope(&xs, &cl);
    let quantum_exp = fit_slope(&xs, &qu);
    Ok(RatioScan {
        policy,
        terms,
        rows,
        fit: ScanFit { classical_exp, quantum_exp, ratio: classical_exp / quantum_exp },
        warnings,
    })
}

/// `count` primes near log-spaced points of `[lo, hi]`, distinct.
pub fn log_spaced_primes(lo: u64, hi: u64, count: usize) -> Result<Vec<u64>> {
    if lo < 3 || hi <= lo || count < 2 {
        return Err(Error::parameter("need 3 <= lo < hi and at least two primes"));
    }
    let ratio = hi as f64 / lo as f64;
    let mut out: Vec<u64> = Vec::with_capacity(count);
    for i in 0..count {
        let x = (lo as f64 * ratio.powf(i as f64 / (count - 1) as f64)).round() as u64;
        let from = out.last().map_or(x, |&p| x.max(p + 1));
        let mut p = next_prime(from).ok_or_else(|| Error::parameter("no prime in range"))?;
        if p > hi {
            let floor = out.last().copied().unwrap_or(lo - 1);
            match (floor + 1..=hi).rev().find(|&c| is_prime(c)) {
                Some(c) => p = c,
                None => break,
            }
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [1.0, 2.0, 3.0];
        assert!((fit_slope(&xs, &[2.0, 3.5, 5.0]) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn primes_are_log_spaced() {
        let ps = log_spaced_primes(1000, 100_000, 9).unwrap();
        assert_eq!(ps.len(), 9);
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ps[0], 1009);
    }

    #[test]
    fn max_order_exponents() {
        let ps = log_spaced_primes(1000, 100_000, 9).unwrap();
        let scan = ratio_scan(&ps, OrderPolicy::MaxOrder, DeltaPolicy::SqrtLog, 3).unwrap();
        assert!((scan.fit.classical_exp - 1.5).abs() < 0.15);
        assert!(scan.fit.quantum_exp <= 0.65);
        assert!(scan.warnings.is_empty());
    }

    #[test]
    fn two_primes_warn() {
        let scan = ratio_scan(&[1009, 2003], OrderPolicy::MaxOrder, DeltaPolicy::SqrtLog, 3).unwrap();
        assert_eq!(scan.warnings.len(), 2);
        assert!(scan.fit.classical_exp.is_finite());
        assert!(ratio_scan(&[1009], OrderPolicy::MaxOrder, DeltaPolicy::SqrtLog, 3).is_err());
        assert!(ratio_scan(&[1009, 1001], OrderPolicy::MaxOrder, DeltaPolicy::SqrtLog, 3).is_err());
    }

    #[test]
    fn csv_rows() {
        let scan = ratio_scan(&[7, 11], OrderPolicy::MaxOrder, DeltaPolicy::SqrtLog, 3).unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SCAN_CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("7,6,6,6,1,18,3,"));
    }
}
