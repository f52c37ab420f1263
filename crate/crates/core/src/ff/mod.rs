//! Finite field arithmetic over F_q, `q = p^nu`, and its additive characters.
//!
//! An element is a single integer in `[0, q)` read as base-`p` digits, the
//! low digit being the constant coefficient of a polynomial in `t` reduced
//! modulo a monic irreducible polynomial of degree `nu`. Addition is
//! digit-wise mod `p`. For `q <= 2^16` multiplication and inversion go
//! through discrete log/antilog tables built from a generator.
//!
//! Note: F_q has `q` elements and F_q^x has `q - 1`.

mod character;
mod poly;
mod spec;

pub use character::{additive_character, CharacterTable, UnitComplex};
pub use spec::FieldSpec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, factorize, Factorization, OrderInfo};
use crate::error::{Error, Result};

/// Fields up to this size get log/antilog tables.
pub const LOG_TABLE_LIMIT: u64 = 1 << 16;

/// Largest extension degree representable with `q < 2^64` (p = 2).
const MAX_DEGREE: usize = 64;

/// Element of F_q as its base-p digit encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wrap an encoding. Range is checked by [`Field::check`], not here.
    pub const fn new(enc: u64) -> Self {
        FieldElement(enc)
    }

    pub const fn enc(self) -> u64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Validated parameters `(p, nu, modulus)` of a field; `q = p^nu`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldParams {
    pub p: u64,
    pub nu: u32,
    /// Monic modulus, coefficients low to high (`nu + 1` entries).
    pub modulus: Vec<u64>,
    pub q: u64,
}

struct LogTables {
    exp: Vec<u64>,
    log: Vec<u64>,
}

/// The field F_q with precomputed structure.
///
/// Immutable after construction; share freely across threads.
pub struct Field {
    params: FieldParams,
    q_minus_1: Factorization,
    generator: FieldElement,
    // Tr(t^j) for j < nu; Tr is F_p-linear so this determines it.
    trace_basis: Vec<u64>,
    tables: Option<LogTables>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.params.p)
            .field("nu", &self.params.nu)
            .field("modulus", &self.params.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl Eq for Field {}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// Build F_{p^nu}. With `modulus = None` the first monic irreducible
    /// polynomial in lexicographic order (constant coefficient varying
    /// fastest) is used.
    pub fn new(p: u64, nu: u32, modulus: Option<Vec<u64>>) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::parameter(format!("{p} is not prime")));
        }
        if nu == 0 {
            return Err(Error::parameter("extension degree must be positive"));
        }
        let q = p
            .checked_pow(nu)
            .ok_or_else(|| Error::parameter(format!("{p}^{nu} does not fit in 64 bits")))?;
        let modulus = match modulus {
            Some(m) => {
                validate_modulus(&m, p, nu)?;
                m
            }
            None => default_modulus(p, nu),
        };
        let q_minus_1 = factorize(q - 1)?;
        let mut field = Field {
            params: FieldParams { p, nu, modulus, q },
            q_minus_1,
            generator: FieldElement::ONE,
            trace_basis: Vec::new(),
            tables: None,
        };
        field.generator = field.find_generator();
        field.trace_basis = (0..nu as usize)
            .map(|j| {
                let mut digits = vec![0u64; nu as usize];
                digits[j] = 1;
                field.trace_by_frobenius(field.from_digits(&digits))
            })
            .collect();
        if q <= LOG_TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// Parse a field from its textual form, e.g. `"7"`, `"3^2"` or `"3^2/1,0,1"`.
    pub fn from_spec(text: &str) -> Result<Field> {
        text.parse::<FieldSpec>()?.build()
    }

    /// Canonical textual form: `"p"` for prime fields, `"p^nu/c0,...,cnu"` otherwise.
    pub fn spec_string(&self) -> String {
        FieldSpec::of(self).to_string()
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn nu(&self) -> u32 {
        self.params.nu
    }

    pub fn q(&self) -> u64 {
        self.params.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.params.modulus
    }

    /// Factorization of `q - 1`, the order of F_q^x.
    pub fn q_minus_1(&self) -> &Factorization {
        &self.q_minus_1
    }

    /// A generator of F_q^x.
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn has_log_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Validate that `a` encodes an element of this field.
    pub fn check(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 < self.params.q {
            Ok(a)
        } else {
            Err(Error::parameter(format!(
                "encoding {} is not an element of F_{} (field parameter mismatch)",
                a.0, self.params.q
            )))
        }
    }

    pub fn element(&self, enc: u64) -> Result<FieldElement> {
        self.check(FieldElement(enc))
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.params.q).map(FieldElement)
    }

    /// Base-p digits (polynomial coefficients), low to high, length `nu`.
    pub fn digits(&self, a: FieldElement) -> Vec<u64> {
        let p = self.params.p;
        let mut x = a.0;
        (0..self.params.nu)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> FieldElement {
        let p = self.params.p;
        FieldElement(digits.iter().rev().fold(0u64, |acc, &d| acc * p + d % p))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.params.p;
        if self.params.nu == 1 {
            return FieldElement(add_mod(a.0, b.0, p));
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.params.nu {
            out += add_mod(x % p, y % p, p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.params.p;
        if self.params.nu == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let digits: Vec<u64> = self.digits(a).into_iter().map(|d| (p - d) % p).collect();
        self.from_digits(&digits)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            let n = self.params.q - 1;
            let e = t.log[a.0 as usize] + t.log[b.0 as usize];
            return FieldElement(t.exp[(if e >= n { e - n } else { e }) as usize]);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.params.p;
        let nu = self.params.nu as usize;
        if nu == 1 {
            return FieldElement(arith::mul_mod(a.0, b.0, p));
        }
        // nu >= 2 implies p < 2^32, so digit products fit in u64.
        let mut da = [0u64; MAX_DEGREE];
        let mut db = [0u64; MAX_DEGREE];
        let (mut x, mut y) = (a.0, b.0);
        for i in 0..nu {
            da[i] = x % p;
            db[i] = y % p;
            x /= p;
            y /= p;
        }
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..nu {
            if da[i] == 0 {
                continue;
            }
            for j in 0..nu {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let m = &self.params.modulus;
        for k in (nu..2 * nu - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &mj) in m[..nu].iter().enumerate() {
                let idx = k - nu + j;
                prod[idx] = (prod[idx] + p - c * mj % p) % p;
            }
        }
        self.from_digits(&prod[..nu])
    }

    /// `g^e` with `0^0 = 1`.
    pub fn pow(&self, g: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if g.is_zero() {
            return FieldElement::ZERO;
        }
        let n = self.params.q - 1;
        if let Some(t) = &self.tables {
            let idx = (t.log[g.0 as usize] as u128 * (e % n) as u128 % n as u128) as usize;
            return FieldElement(t.exp[idx]);
        }
        let mut e = e % n;
        let mut base = g;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::domain("0 has no multiplicative inverse"));
        }
        if let Some(t) = &self.tables {
            let n = self.params.q - 1;
            let l = t.log[a.0 as usize];
            return Ok(FieldElement(t.exp[((n - l) % n) as usize]));
        }
        Ok(self.pow(a, self.params.q - 2))
    }

    /// Absolute trace F_q -> F_p, returned as an integer in `[0, p)`.
    pub fn trace(&self, a: FieldElement) -> u64 {
        let p = self.params.p;
        if self.params.nu == 1 {
            return a.0;
        }
        let mut x = a.0;
        let mut acc = 0u64;
        for &tb in &self.trace_basis {
            acc = (acc + (x % p) * tb) % p;
            x /= p;
        }
        acc
    }

    /// Trace straight from the definition `sum_{i < nu} a^(p^i)`.
    pub fn trace_by_frobenius(&self, a: FieldElement) -> u64 {
        let mut acc = FieldElement::ZERO;
        let mut conj = a;
        for _ in 0..self.params.nu {
            acc = self.add(acc, conj);
            conj = self.pow(conj, self.params.p);
        }
        debug_assert!(acc.0 < self.params.p, "trace must lie in the prime field");
        acc.0
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, g: FieldElement) -> Result<OrderInfo> {
        arith::multiplicative_order(self, g, &self.q_minus_1)
    }

    fn find_generator(&self) -> FieldElement {
        let q = self.params.q;
        if q == 2 {
            return FieldElement::ONE;
        }
        let n = q - 1;
        let primes: Vec<u64> = self.q_minus_1.primes().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6765_6e65_7261_746f ^ q);
        loop {
            let g = FieldElement(rng.random_range(1..q));
            if primes.iter().all(|&l| self.pow(g, n / l) != FieldElement::ONE) {
                return g;
            }
        }
    }

    fn build_tables(&self) -> LogTables {
        let q = self.params.q as usize;
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u64; q];
        let mut x = FieldElement::ONE;
        for i in 0..q - 1 {
            exp.push(x.0);
            log[x.0 as usize] = i as u64;
            x = self.mul_slow(x, self.generator);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        LogTables { exp, log }
    }
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= p - b {
        a - (p - b)
    } else {
        a + b
    }
}

fn validate_modulus(m: &[u64], p: u64, nu: u32) -> Result<()> {
    if m.len() != nu as usize + 1 {
        return Err(Error::parameter(format!(
            "modulus must have {} coefficients, got {}",
            nu + 1,
            m.len()
        )));
    }
    if let Some(&c) = m.iter().find(|&&c| c >= p) {
        return Err(Error::parameter(format!("modulus coefficient {c} is not below p = {p}")));
    }
    if m[nu as usize] != 1 {
        return Err(Error::parameter("modulus must be monic"));
    }
    if nu == 1 {
        return Ok(());
    }
    let rootless = if nu <= 3 && p <= 1 << 16 {
        !poly::has_root(m, p)
    } else {
        true
    };
    if !rootless || !poly::is_irreducible(m, p) {
        return Err(Error::parameter(format!("modulus {m:?} is reducible over F_{p}")));
    }
    Ok(())
}

fn default_modulus(p: u64, nu: u32) -> Vec<u64> {
    if nu == 1 {
        return vec![0, 1];
    }
    let nu = nu as usize;
    let mut coeffs = vec![0u64; nu];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
        // Odometer increment, constant coefficient fastest. Irreducible
        // polynomials of every degree exist, so this terminates.
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
}
