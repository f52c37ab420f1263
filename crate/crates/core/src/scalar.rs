//! Real scalar abstraction for the floating-point parts of the library
//! (character sums, Grover rotation analysis).
//!
//! Exact quantities (counts, deviations, mean squares) never go through
//! this trait; they use integers and rationals.

use std::fmt::Debug;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static
{
    fn from_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 is representable as a float")
    }

    fn from_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 is representable as a float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Fixed-order pairwise summation.
///
/// The reduction tree depends only on the slice length, so the result is
/// bit-identical whether the terms were produced sequentially or in parallel.
pub fn pairwise_sum<T: Scalar>(terms: &[Complex<T>]) -> Complex<T> {
    const LEAF: usize = 32;
    if terms.len() <= LEAF {
        return terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &z| acc + z);
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// Real-valued counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real<T: Scalar>(terms: &[T]) -> T {
    const LEAF: usize = 32;
    if terms.len() <= LEAF {
        return terms.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = terms.len() / 2;
    pairwise_sum_real(&terms[..mid]) + pairwise_sum_real(&terms[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let terms: Vec<Complex<f64>> = (0..1000).map(|i| Complex::new(i as f64, -(i as f64))).collect();
        let s = pairwise_sum(&terms);
        assert_eq!(s, Complex::new(499_500.0, -499_500.0));
        let reals: Vec<f32> = (0..100).map(|i| i as f32).collect();
        assert_eq!(pairwise_sum_real(&reals), 4950.0);
    }
}
