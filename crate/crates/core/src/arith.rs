//! Integer factorization of `q - 1` and multiplicative orders.
//!
//! Everything here is deterministic: trial division up to 10^6, then
//! Brent's variant of Pollard rho with `x^2 + c`, `c = 1, 2, ...`, backed by
//! a Miller-Rabin test with a base set that is exact on 64-bit integers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

// Exact for every n < 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test on the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`, or `None` if there is none below `2^64`.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut c = n.max(2);
    loop {
        if is_prime(c) {
            return Some(c);
        }
        c = c.checked_add(1)?;
    }
}

/// Complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, ascending by prime.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n >= 1` completely.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    let mut primes = Vec::new();
    let mut rest = n;
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND && d * d <= rest {
        while rest.is_multiple_of(d) {
            primes.push(d);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        split_large(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    let f = Factorization { n, factors };
    debug_assert_eq!(
        f.factors.iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e)),
        n as u128
    );
    Ok(f)
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    // Perfect squares defeat rho with some polynomials; peel them off first.
    let root = isqrt(n);
    if root * root == n {
        split_large(root, out);
        split_large(root, out);
        return;
    }
    let mut c = 1;
    let d = loop {
        if let Some(d) = pollard_brent(n, c) {
            break d;
        }
        c += 1;
    };
    split_large(d, out);
    split_large(n / d, out);
}

// Brent's cycle detection on x -> x^2 + c mod n, seed 2, batched gcds.
fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
    let mut g = 1u64;
    let mut prod = 1u64;
    let mut len = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..len {
            y = f(y);
        }
        let mut k = 0;
        while k < len && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(len - k) {
                y = f(y);
                prod = mul_mod(prod, x.abs_diff(y), n);
            }
            g = num_integer::gcd(prod, n);
            k += BATCH;
        }
        len *= 2;
        if len > 1 << 40 {
            return None;
        }
    }
    if g == n {
        // Batched product overshot; backtrack one step at a time.
        loop {
            ys = f(ys);
            g = num_integer::gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Integer ceiling of the square root.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// A field element together with its verified multiplicative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderInfo {
    pub element: FieldElement,
    pub order: u64,
}

/// Smallest `s >= 1` with `g^s = 1`.
///
/// Starts from `q - 1` and divides out each prime factor while the power
/// stays 1. `fact_q_minus_1` must be the factorization of `q - 1`.
pub fn multiplicative_order(
    field: &Field,
    g: FieldElement,
    fact_q_minus_1: &Factorization,
) -> Result<OrderInfo> {
    field.check(g)?;
    if g.is_zero() {
        return Err(Error::domain("0 has no multiplicative order"));
    }
    let group_order = field.q() - 1;
    if fact_q_minus_1.n() != group_order {
        return Err(Error::parameter(format!(
            "factorization is of {}, expected q - 1 = {}",
            fact_q_minus_1.n(),
            group_order
        )));
    }
    let mut s = group_order;
    for &(p, e) in fact_q_minus_1.factors() {
        for _ in 0..e {
            if field.pow(g, s / p) == FieldElement::ONE {
                s /= p;
            } else {
                break;
            }
        }
    }
    assert_eq!(group_order % s, 0, "order must divide q - 1");
    debug_assert_eq!(field.pow(g, s), FieldElement::ONE);
    Ok(OrderInfo { element: g, order: s })
}
