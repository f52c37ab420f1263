//! Exact solution counts of `sum_i a_i g_i^(x_i) = b` and the density
//! census over every target `b`.
//!
//! Regions are boxes `X_1 x ... x X_{m-1} x X_m(r)`: every exponent ranges
//! over its full period `[0, s_i)` except the last, which is cut to `[0, r)`.

mod charsum;
mod conv;
mod count;
mod report;

pub use charsum::{count_via_charsum, weil_check, CharSumCounter, WeilCheck};
pub use conv::ConvolutionMethod;
pub use count::{count_all_b, count_all_b_with, count_brute, solutions_brute};
pub use report::{census, census_with, CensusReport, DensityReport, ExistenceRemark, CENSUS_CSV_HEADER};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

/// One summand `a * g^x` with the verified order of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Term {
    pub a: FieldElement,
    pub g: FieldElement,
    pub order: u64,
}

/// The equation `a_1 g_1^(x_1) + ... + a_m g_m^(x_m) = b` over F_q.
#[derive(Debug, Clone)]
pub struct EquationInstance {
    field: Arc<Field>,
    terms: Vec<Term>,
    b: FieldElement,
}

impl EquationInstance {
    /// `pairs` are `(a_i, g_i)`; both must be nonzero. Orders are computed here.
    pub fn new(field: Arc<Field>, pairs: &[(FieldElement, FieldElement)], b: FieldElement) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::parameter("an equation needs at least one term"));
        }
        field.check(b)?;
        let terms = pairs
            .iter()
            .map(|&(a, g)| {
                field.check(a)?;
                field.check(g)?;
                if a.is_zero() || g.is_zero() {
                    return Err(Error::parameter("coefficients and bases must be nonzero"));
                }
                Ok(Term { a, g, order: field.order(g)?.order })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EquationInstance { field, terms, b })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn b(&self) -> FieldElement {
        self.b
    }

    pub fn orders(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.order).collect()
    }

    /// Same terms, different target.
    pub fn with_b(&self, b: FieldElement) -> Result<Self> {
        self.field.check(b)?;
        Ok(EquationInstance { b, ..self.clone() })
    }

    /// Indices sorting the orders descending; ties keep the original order.
    pub fn descending_permutation(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.terms.len()).collect();
        idx.sort_by(|&i, &j| self.terms[j].order.cmp(&self.terms[i].order));
        idx
    }

    /// Terms reordered so that term `k` of the result is term `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        EquationInstance {
            field: self.field.clone(),
            terms: perm.iter().map(|&i| self.terms[i]).collect(),
            b: self.b,
        }
    }

    /// `sum_i a_i g_i^(x_i)`, exponents unchecked.
    pub fn evaluate(&self, xs: &[u64]) -> FieldElement {
        let f = &self.field;
        self.terms.iter().zip(xs).fold(FieldElement::ZERO, |acc, (t, &x)| {
            f.add(acc, f.mul(t.a, f.pow(t.g, x)))
        })
    }

    /// The whole period box, `r = s_m`.
    pub fn full_region(&self) -> SearchRegion {
        let sizes = self.orders();
        SearchRegion { r: *sizes.last().expect("nonempty"), full_sizes: sizes }
    }

    pub fn region(&self, r: u64) -> Result<SearchRegion> {
        SearchRegion::new(r, self.orders())
    }
}

/// `X_1 x ... x X_{m-1} x X_m(r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchRegion {
    pub r: u64,
    pub full_sizes: Vec<u64>,
}

impl SearchRegion {
    pub fn new(r: u64, full_sizes: Vec<u64>) -> Result<Self> {
        let last = *full_sizes
            .last()
            .ok_or_else(|| Error::parameter("region needs at least one term"))?;
        if r == 0 || r > last {
            return Err(Error::parameter(format!("r = {r} is outside [1, {last}]")));
        }
        Ok(SearchRegion { r, full_sizes })
    }

    /// Per-term exponent ranges: full orders, last one replaced by `r`.
    pub fn ranges(&self) -> Vec<u64> {
        let mut v = self.full_sizes.clone();
        *v.last_mut().expect("nonempty") = self.r;
        v
    }

    /// Number of exponent tuples in the box.
    pub fn size(&self) -> u128 {
        self.ranges().iter().map(|&x| x as u128).product()
    }
}

/// How the deviation parameter delta is chosen for a field of size q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
#[derive(Default)]
pub enum DeltaPolicy {
    /// `(ln q)^(1/2)`.
    #[default]
    SqrtLog,
    /// `(ln q)^eps`.
    LogPower(f64),
    Explicit(f64),
}


impl DeltaPolicy {
    pub fn value(self, q: u64) -> f64 {
        let lq = (q as f64).ln();
        match self {
            DeltaPolicy::SqrtLog => lq.sqrt(),
            DeltaPolicy::LogPower(eps) => lq.powf(eps),
            DeltaPolicy::Explicit(d) => d,
        }
    }
}

impl fmt::Display for DeltaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaPolicy::SqrtLog => write!(f, "sqrt-log"),
            DeltaPolicy::LogPower(e) => write!(f, "log^{e}"),
            DeltaPolicy::Explicit(d) => write!(f, "{d}"),
        }
    }
}

impl FromStr for DeltaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let positive = |v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::parse(s, "must be a positive finite number"))
            }
        };
        if s == "sqrt-log" {
            return Ok(DeltaPolicy::SqrtLog);
        }
        if let Some(e) = s.strip_prefix("log^") {
            let e = e.parse::<f64>().map_err(|_| Error::parse(s, "expected log^<exponent>"))?;
            return Ok(DeltaPolicy::LogPower(positive(e)?));
        }
        let d = s
            .parse::<f64>()
            .map_err(|_| Error::parse(s, "expected sqrt-log, log^<eps> or a positive number"))?;
        Ok(DeltaPolicy::Explicit(positive(d)?))
    }
}

impl From<DeltaPolicy> for String {
    fn from(d: DeltaPolicy) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DeltaPolicy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Smallest truncation length for which the density estimate beats its
/// error term, `r = ceil(q^m * delta^2 / (s_1 ... s_{m-1})^2)` clamped to
/// `[1, s_m]`. For `m = 3` and `delta^2 = ln q` this is
/// `ceil(q^3 (s_1 s_2)^(-2) ln q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinR {
    pub region: SearchRegion,
    /// The value before the ceiling.
    pub argument: f64,
    /// `max(1, ceil(argument))` before clamping to `s_m`, saturating.
    pub raw_r: u64,
    /// Whether some integer r satisfies `q^m (s_1...s_{m-1})^(-2) ln q < r <= s_m`,
    /// the regime where solutions exist for all but `q / ln q` targets.
    pub almost_all_targets: bool,
}

/// `q^m / (s_1 ... s_{m-1})^2`, the delta-free part of the truncation length.
pub fn density_ratio(q: u64, orders: &[u64]) -> f64 {
    let m = orders.len() as i32;
    let head: f64 = orders[..orders.len() - 1].iter().map(|&s| s as f64).product();
    (q as f64).powi(m) / (head * head)
}

pub(crate) fn saturating_ceil(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x.ceil() as u64).max(1)
    }
}

pub fn min_r(instance: &EquationInstance, delta: f64) -> MinR {
    let orders = instance.orders();
    let q = instance.field().q();
    let last = *orders.last().expect("nonempty");
    let ratio = density_ratio(q, &orders);
    let argument = ratio * delta * delta;
    let raw_r = saturating_ceil(argument);
    let log_arg = ratio * (q as f64).ln();
    let almost_all_targets = log_arg.floor() + 1.0 <= last as f64;
    MinR {
        region: SearchRegion { r: raw_r.min(last), full_sizes: orders },
        argument,
        raw_r,
        almost_all_targets,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn f7_canonical(b: u64) -> EquationInstance {
        let f = Arc::new(Field::prime(7).unwrap());
        let t = (FieldElement::new(1), FieldElement::new(3));
        EquationInstance::new(f, &[t, t, t], FieldElement::new(b)).unwrap()
    }

    #[test]
    fn instance_construction() {
        let inst = f7_canonical(3);
        assert_eq!(inst.orders(), vec![6, 6, 6]);
        assert_eq!(inst.evaluate(&[0, 0, 0]), FieldElement::new(3));
        let f = inst.field_arc().clone();
        let zero = FieldElement::ZERO;
        let one = FieldElement::ONE;
        assert!(EquationInstance::new(f.clone(), &[(zero, one)], one).is_err());
        assert!(EquationInstance::new(f.clone(), &[(one, zero)], one).is_err());
        assert!(EquationInstance::new(f, &[(one, one)], FieldElement::new(9)).is_err());
    }

    #[test]
    fn stable_descending_permutation() {
        let f = Arc::new(Field::prime(7).unwrap());
        let e = FieldElement::new;
        let inst = EquationInstance::new(f, &[(e(1), e(2)), (e(1), e(3)), (e(1), e(6)), (e(2), e(5))], e(0)).unwrap();
        assert_eq!(inst.orders(), vec![3, 6, 2, 6]);
        assert_eq!(inst.descending_permutation(), vec![1, 3, 0, 2]);
    }

    #[test]
    fn region_bounds() {
        let inst = f7_canonical(0);
        assert!(inst.region(0).is_err());
        assert!(inst.region(7).is_err());
        let reg = inst.region(2).unwrap();
        assert_eq!(reg.ranges(), vec![6, 6, 2]);
        assert_eq!(reg.size(), 72);
    }

    #[test]
    fn min_r_examples() {
        let inst = f7_canonical(0);
        let d = DeltaPolicy::SqrtLog.value(7);
        let mr = min_r(&inst, d);
        // 343 / 1296 * ln 7 = 0.515...
        assert!((mr.argument - 343.0 / 1296.0 * 7f64.ln()).abs() < 1e-12);
        assert_eq!(mr.region.r, 1);
        assert!(mr.almost_all_targets);

        // Orders (1, 1, 1): q^3 ln q, clamped to 1, regime not reached.
        let f = inst.field_arc().clone();
        let one = FieldElement::ONE;
        let degenerate = EquationInstance::new(f, &[(one, one); 3], one).unwrap();
        let mr = min_r(&degenerate, d);
        assert_eq!(mr.raw_r, (343.0 * 7f64.ln()).ceil() as u64);
        assert_eq!(mr.region.r, 1);
        assert!(!mr.almost_all_targets);
    }

    #[test]
    fn min_r_large_orders_is_one() {
        let f = Arc::new(Field::prime(100_003).unwrap());
        let g = f.generator();
        let inst = EquationInstance::new(f, &[(FieldElement::ONE, g); 3], FieldElement::ONE).unwrap();
        assert_eq!(min_r(&inst, DeltaPolicy::SqrtLog.value(100_003)).region.r, 1);
    }

    #[test]
    fn delta_policy_parsing() {
        assert_eq!("sqrt-log".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::SqrtLog);
        assert_eq!("log^0.25".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::LogPower(0.25));
        assert_eq!("1.5".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::Explicit(1.5));
        assert!("-1".parse::<DeltaPolicy>().is_err());
        assert!("log^x".parse::<DeltaPolicy>().is_err());
        let d = DeltaPolicy::LogPower(0.25);
        assert!((d.value(101) - 101f64.ln().powf(0.25)).abs() < 1e-15);
    }
}
