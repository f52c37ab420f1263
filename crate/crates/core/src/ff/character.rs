//! Additive characters `psi_mu(x) = exp(2 pi i Tr(mu x) / p)`.

use std::ops::Mul;

use num_complex::Complex;
use serde::Serialize;

use super::{Field, FieldElement};
use crate::scalar::Scalar;

/// Traces are tabulated for fields up to this size.
const TRACE_TABLE_LIMIT: u64 = 1 << 22;

/// Point on the complex unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitComplex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> UnitComplex<T> {
    pub fn one() -> Self {
        UnitComplex { re: T::one(), im: T::zero() }
    }

    /// `exp(2 pi i k / n)`.
    pub fn root_of_unity(k: u64, n: u64) -> Self {
        let angle = T::TAU() * <T as Scalar>::from_u64(k % n) / <T as Scalar>::from_u64(n);
        let (im, re) = angle.sin_cos();
        UnitComplex { re, im }
    }

    pub fn value(self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    pub fn conj(self) -> Self {
        UnitComplex { re: self.re, im: -self.im }
    }
}

impl<T: Scalar> Mul for UnitComplex<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let z = self.value() * rhs.value();
        UnitComplex { re: z.re, im: z.im }
    }
}

/// `psi(mu * x)` computed directly, without tables.
pub fn additive_character<T: Scalar>(field: &Field, mu: FieldElement, x: FieldElement) -> UnitComplex<T> {
    UnitComplex::root_of_unity(field.trace(field.mul(mu, x)), field.p())
}

/// Tabulated additive characters of one field: the `p`-th roots of unity
/// and, for small fields, the trace of every element.
pub struct CharacterTable<'f, T> {
    field: &'f Field,
    roots: Vec<Complex<T>>,
    traces: Option<Vec<u32>>,
}

impl<'f, T: Scalar> CharacterTable<'f, T> {
    pub fn new(field: &'f Field) -> Self {
        let p = field.p();
        let roots = if p <= TRACE_TABLE_LIMIT {
            (0..p).map(|k| UnitComplex::<T>::root_of_unity(k, p).value()).collect()
        } else {
            Vec::new()
        };
        let traces = (field.q() <= TRACE_TABLE_LIMIT)
            .then(|| field.elements().map(|x| field.trace(x) as u32).collect());
        CharacterTable { field, roots, traces }
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    #[inline]
    pub fn trace(&self, x: FieldElement) -> u64 {
        match &self.traces {
            Some(t) => t[x.enc() as usize] as u64,
            None => self.field.trace(x),
        }
    }

    /// `exp(2 pi i k / p)`.
    #[inline]
    pub fn root(&self, k: u64) -> Complex<T> {
        if self.roots.is_empty() {
            UnitComplex::<T>::root_of_unity(k, self.field.p()).value()
        } else {
            self.roots[k as usize]
        }
    }

    /// `psi(x)` for the canonical character.
    #[inline]
    pub fn psi(&self, x: FieldElement) -> Complex<T> {
        self.root(self.trace(x))
    }

    /// `psi(mu * x)`.
    pub fn character(&self, mu: FieldElement, x: FieldElement) -> UnitComplex<T> {
        let z = self.psi(self.field.mul(mu, x));
        UnitComplex { re: z.re, im: z.im }
    }
}
