//! Per-target deviations from the main term and their mean square.
//!
//! Deviations are exact rationals over q. With threshold
//! `T = delta * sqrt(r q^(m-2))` (for m = 3: `delta sqrt(r q)`), the bound
//! `E(r) = sum_b Delta_b^2 < q^(m-1) r` forces fewer than `q / delta^2`
//! targets with `|Delta_b| >= T`. Both inequalities are checked exactly.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::count::count_all_b_with;
use super::{ConvolutionMethod, EquationInstance, SearchRegion};
use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::fmt::sig12;
use crate::{Limits, Rational};

pub const CENSUS_CSV_HEADER: &str = "b,N,main_num,main_den,delta_num,delta_den,threshold,exceptional";

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn ser_big<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn ser_bigint<S: Serializer>(r: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub b: FieldElement,
    pub n: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub main_term: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: Rational,
    pub threshold: f64,
    pub exceptional: bool,
}

/// The necessary condition `s_1 s_2 / q >= ((q / s_3) ln q)^(1/2)` for
/// solutions to exist in the density regime. The right-hand side is also
/// reported with `s_3 - 2` in place of `s_3`; only the `s_3` form decides
/// `holds`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceRemark {
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_offset_variant: Option<f64>,
    pub holds: bool,
}

impl ExistenceRemark {
    fn evaluate(q: u64, orders: &[u64]) -> Option<Self> {
        let [s1, s2, s3] = *orders else { return None };
        let (q, lq) = (q as f64, (q as f64).ln());
        let lhs = s1 as f64 * s2 as f64 / q;
        let rhs = (q / s3 as f64 * lq).sqrt();
        let rhs_offset_variant = (s3 > 2).then(|| (q / (s3 - 2) as f64 * lq).sqrt());
        Some(ExistenceRemark { lhs, rhs, rhs_offset_variant, holds: lhs >= rhs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub q: u64,
    pub m: usize,
    pub r: u64,
    pub orders: Vec<u64>,
    pub per_b: Vec<DensityReport>,
    /// `E(r) = sum_b Delta_b^2`, exact.
    #[serde(serialize_with = "ser_big")]
    pub energy: BigRational,
    /// `q^(m-1) r`.
    #[serde(serialize_with = "ser_bigint")]
    pub energy_bound: BigInt,
    pub exceptional_count: u64,
    /// `q / delta^2`.
    pub exceptional_bound: f64,
    pub delta_param: f64,
    pub existence_remark: Option<ExistenceRemark>,
}

impl CensusReport {
    pub fn energy_holds(&self) -> bool {
        self.energy < BigRational::from_integer(self.energy_bound.clone())
    }

    pub fn exceptional_holds(&self) -> bool {
        (self.exceptional_count as f64) <= self.exceptional_bound
    }

    pub fn bounds_hold(&self) -> bool {
        self.energy_holds() && self.exceptional_holds()
    }

    /// Total count over all targets; equals the region size.
    pub fn total(&self) -> u128 {
        self.per_b.iter().map(|d| d.n as u128).sum()
    }

    pub fn energy_f64(&self) -> f64 {
        self.energy.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `E(r)=<rational> bound=<q^(m-1) r> exceptional=<k>/<q/delta^2>`
    pub fn summary_line(&self) -> String {
        format!(
            "E(r)={}/{} bound={} exceptional={}/{}",
            self.energy.numer(),
            self.energy.denom(),
            self.energy_bound,
            self.exceptional_count,
            sig12(self.exceptional_bound)
        )
    }

    /// One row per `b`, ascending by encoding.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::parameter(format!("CSV output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CENSUS_CSV_HEADER.split(',')).map_err(io)?;
        for d in &self.per_b {
            w.write_record([
                d.b.enc().to_string(),
                d.n.to_string(),
                d.main_term.numer().to_string(),
                d.main_term.denom().to_string(),
                d.delta.numer().to_string(),
                d.delta.denom().to_string(),
                sig12(d.threshold),
                d.exceptional.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::parameter(format!("CSV output failed: {e}")))?;
        Ok(())
    }
}

/// Exact counts for every `b`, deviations, mean square and exceptional tally.
pub fn census(instance: &EquationInstance, delta: f64, region: &SearchRegion) -> Result<CensusReport> {
    census_with(instance, delta, region, ConvolutionMethod::Auto, &Limits::default())
}

pub fn census_with(
    instance: &EquationInstance,
    delta: f64,
    region: &SearchRegion,
    method: ConvolutionMethod,
    limits: &Limits,
) -> Result<CensusReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::parameter(format!("delta must be positive, got {delta}")));
    }
    let counts = count_all_b_with(instance, region, method, limits)?;
    let field = instance.field();
    let q = field.q();
    let m = instance.m();
    let size = region.size();
    let main_term = Rational::new(size as i128, q as i128);
    let threshold = delta * (region.r as f64 * (q as f64).powi(m as i32 - 2)).sqrt();

    let mut energy_num = BigInt::zero();
    let mut exceptional_count = 0u64;
    let per_b: Vec<DensityReport> = counts
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            let delta_b = Ratio::from_integer(n as i128) - main_term;
            // Delta_b = (n q - size) / q; accumulate the numerator squared.
            let num = BigInt::from(n as i128 * q as i128 - size as i128);
            energy_num += &num * &num;
            let magnitude = delta_b.abs().to_f64().unwrap_or(f64::INFINITY);
            let exceptional = magnitude >= threshold;
            exceptional_count += exceptional as u64;
            DensityReport {
                b: FieldElement::new(b as u64),
                n,
                main_term,
                delta: delta_b,
                threshold,
                exceptional,
            }
        })
        .collect();
    let qq = BigInt::from(q) * BigInt::from(q);
    let energy = BigRational::new(energy_num, qq);
    let energy_bound = BigInt::from(q).pow(m as u32 - 1) * BigInt::from(region.r);
    Ok(CensusReport {
        q,
        m,
        r: region.r,
        orders: region.full_sizes.clone(),
        per_b,
        energy,
        energy_bound,
        exceptional_count,
        exceptional_bound: q as f64 / (delta * delta),
        delta_param: delta,
        existence_remark: ExistenceRemark::evaluate(q, &instance.orders()),
    })
}
