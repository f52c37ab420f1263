//! Counting through additive characters.
//!
//! Orthogonality `(1/q) sum_mu psi(mu u) = [u = 0]` turns the count into
//! `N_b = (1/q) sum_mu psi(-mu b) prod_i S_i(mu)` with per-term sums
//! `S_i(mu) = sum_{x < range_i} psi(mu a_i g_i^x)`, so each `mu` costs
//! `O(sum_i range_i)` instead of `O(prod_i range_i)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::count::term_values;
use super::{EquationInstance, SearchRegion};
use crate::error::{Error, Result};
use crate::ff::{CharacterTable, Field, FieldElement};
use crate::scalar::{pairwise_sum, pairwise_sum_real, Scalar};

/// Character-sum products for one instance and region.
pub struct CharSumCounter<'f, T> {
    table: CharacterTable<'f, T>,
    // prod_i S_i(mu), indexed by the encoding of mu.
    products: Vec<Complex<T>>,
    // |S_i(mu)|^2 per term, for the mean-square identity.
    term_norms: Vec<Vec<T>>,
}

impl<'f, T: Scalar> CharSumCounter<'f, T> {
    pub fn new(instance: &'f EquationInstance, region: &SearchRegion) -> Result<Self> {
        if region.full_sizes != instance.orders() {
            return Err(Error::parameter("region does not match the instance's orders"));
        }
        let field = instance.field();
        let table = CharacterTable::<T>::new(field);
        let values: Vec<Vec<FieldElement>> = instance
            .terms()
            .iter()
            .zip(region.ranges())
            .map(|(t, r)| term_values(field, t.a, t.g, r))
            .collect();
        let per_mu: Vec<(Complex<T>, Vec<T>)> = (0..field.q())
            .into_par_iter()
            .map(|mu| {
                let mu = FieldElement::new(mu);
                let mut prod = Complex::new(T::one(), T::zero());
                let mut norms = Vec::with_capacity(values.len());
                for vals in &values {
                    let terms: Vec<Complex<T>> = vals.iter().map(|&v| table.psi(field.mul(mu, v))).collect();
                    let s = pairwise_sum(&terms);
                    norms.push(s.norm_sqr());
                    prod *= s;
                }
                (prod, norms)
            })
            .collect();
        let m = values.len();
        let mut term_norms = vec![Vec::with_capacity(per_mu.len()); m];
        let mut products = Vec::with_capacity(per_mu.len());
        for (prod, norms) in per_mu {
            products.push(prod);
            for (i, n) in norms.into_iter().enumerate() {
                term_norms[i].push(n);
            }
        }
        Ok(CharSumCounter { table, products, term_norms })
    }

    fn field(&self) -> &Field {
        self.table.field()
    }

    /// `N_b` as a real number; within rounding error of the exact count.
    pub fn count(&self, b: FieldElement) -> T {
        let field = self.field();
        let terms: Vec<Complex<T>> = self
            .products
            .iter()
            .enumerate()
            .map(|(mu, &prod)| prod * self.table.psi(field.mul(FieldElement::new(mu as u64), b)).conj())
            .collect();
        pairwise_sum(&terms).re / <T as Scalar>::from_u64(field.q())
    }

    pub fn count_all(&self) -> Vec<T> {
        self.field().elements().collect::<Vec<_>>().into_par_iter().map(|b| self.count(b)).collect()
    }

    /// Contribution of `mu = 0` alone: `prod_i range_i / q`.
    pub fn main_term(&self) -> T {
        self.products[0].re / <T as Scalar>::from_u64(self.field().q())
    }

    /// `E(r) = sum_b Delta_b^2` evaluated as `(1/q) sum_{mu != 0} prod_i |S_i(mu)|^2`.
    pub fn mean_square(&self) -> T {
        let terms: Vec<T> = (1..self.products.len())
            .map(|mu| self.term_norms.iter().map(|n| n[mu]).fold(T::one(), |a, b| a * b))
            .collect();
        pairwise_sum_real(&terms) / <T as Scalar>::from_u64(self.field().q())
    }

    /// `|S_i(mu)|^2` for term `i`.
    pub fn term_norm_sqr(&self, i: usize, mu: FieldElement) -> T {
        self.term_norms[i][mu.enc() as usize]
    }
}

/// `N_b` for a single target through character sums.
pub fn count_via_charsum<T: Scalar>(instance: &EquationInstance, b: FieldElement, region: &SearchRegion) -> Result<T> {
    instance.field().check(b)?;
    Ok(CharSumCounter::<T>::new(instance, region)?.count(b))
}

/// Magnitude of a complete subgroup sum against the square-root bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeilCheck<T> {
    pub magnitude: T,
    pub bound: T,
}

impl<T: Scalar> WeilCheck<T> {
    pub fn holds(&self, tolerance: T) -> bool {
        self.magnitude <= self.bound + tolerance
    }
}

/// `|sum_{x < s} psi(a mu g^x)|` versus `sqrt(q)`, for `mu != 0`.
pub fn weil_check<T: Scalar>(field: &Field, a: FieldElement, g: FieldElement, s: u64, mu: FieldElement) -> Result<WeilCheck<T>> {
    for x in [a, g, mu] {
        field.check(x)?;
    }
    if mu.is_zero() {
        return Err(Error::domain("the square-root bound concerns nontrivial characters (mu != 0)"));
    }
    if g.is_zero() || s == 0 || field.pow(g, s) != FieldElement::ONE {
        return Err(Error::parameter(format!("{g} does not have order dividing {s}")));
    }
    let table = CharacterTable::<T>::new(field);
    let start = field.mul(a, mu);
    let terms: Vec<Complex<T>> = term_values(field, start, g, s).into_iter().map(|v| table.psi(v)).collect();
    Ok(WeilCheck {
        magnitude: pairwise_sum(&terms).norm(),
        bound: <T as Scalar>::from_u64(field.q()).sqrt(),
    })
}
