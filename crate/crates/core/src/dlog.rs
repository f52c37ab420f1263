//! Baby-step/giant-step discrete logarithm inside `<g>`.
//!
//! The table of `ceil(sqrt(s))` baby steps is built once per base and reused
//! across every query of a solver scan. Cost reports count only giant steps.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{ceil_sqrt, factorize};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

/// Baby-step table for the cyclic subgroup generated by `base`.
#[derive(Debug, Clone)]
pub struct DlogTable {
    base: FieldElement,
    order: u64,
    m: u64,
    baby: HashMap<FieldElement, u64>,
    // base^(-m)
    giant: FieldElement,
}

/// Result of one lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DlogLookup {
    /// The unique `x` in `[0, s)` with `g^x = h`, if `h` lies in `<g>`.
    pub log: Option<u64>,
    pub giant_steps: u64,
}

impl DlogTable {
    /// `g` must have exact order `s`: `g^s = 1` and `g^(s/l) != 1` for
    /// every prime `l | s`.
    pub fn build(field: &Field, g: FieldElement, s: u64) -> Result<DlogTable> {
        field.check(g)?;
        if s == 0 || g.is_zero() {
            return Err(Error::parameter("base must be nonzero with positive order"));
        }
        if field.pow(g, s) != FieldElement::ONE {
            return Err(Error::parameter(format!("{g}^{s} != 1 in F_{}", field.q())));
        }
        if factorize(s)?.primes().any(|l| field.pow(g, s / l) == FieldElement::ONE) {
            return Err(Error::parameter(format!("{g} has order below the claimed {s}")));
        }
        let m = ceil_sqrt(s);
        let mut baby = HashMap::with_capacity(m as usize);
        let mut x = FieldElement::ONE;
        for j in 0..m {
            baby.insert(x, j);
            x = field.mul(x, g);
        }
        debug_assert_eq!(baby.len() as u64, m);
        let giant = field.inv(field.pow(g, m))?;
        Ok(DlogTable { base: g, order: s, m, baby, giant })
    }

    pub fn base(&self) -> FieldElement {
        self.base
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn baby_steps(&self) -> &HashMap<FieldElement, u64> {
        &self.baby
    }

    /// At most `m` giant steps, one multiplication and one lookup each.
    pub fn lookup(&self, field: &Field, h: FieldElement) -> Result<DlogLookup> {
        if h.is_zero() {
            return Err(Error::domain("0 is not a power of any element"));
        }
        let mut gamma = h;
        for i in 0..self.m {
            if let Some(&j) = self.baby.get(&gamma) {
                return Ok(DlogLookup {
                    log: Some((i * self.m + j) % self.order),
                    giant_steps: i + 1,
                });
            }
            gamma = field.mul(gamma, self.giant);
        }
        Ok(DlogLookup { log: None, giant_steps: self.m })
    }

    pub fn dlog(&self, field: &Field, h: FieldElement) -> Result<Option<u64>> {
        Ok(self.lookup(field, h)?.log)
    }
}
