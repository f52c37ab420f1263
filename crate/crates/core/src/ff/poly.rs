//! Dense polynomials over F_p, used only to validate and search field moduli.
//!
//! Coefficients are stored low to high with no trailing zeros. Callers
//! guarantee `p < 2^32` (true whenever the extension degree is at least 2
//! and `p^nu` fits in 64 bits), so coefficient products fit in a `u64`.

pub(crate) type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod(a, p - 2, p)
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Remainder of `a` modulo `m` (`m` nonzero).
fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let mut r: Poly = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let k = dr - dm + j;
                r[k] = (r[k] + p - c * mj % p) % p;
            }
        }
        r = trim(r);
    }
    r
}

fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem(&prod, m, p)
}

fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test: `f` monic of degree `n` is irreducible over F_p iff
/// `t^(p^n) = t mod f` and `gcd(t^(p^(n/l)) - t, f) = 1` for every prime `l | n`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let t: Poly = vec![0, 1];
    // frob[k] = t^(p^k) mod f
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(rem(&t, f, p));
    for k in 1..=n {
        let next = pow_mod(&frob[k - 1], p, f, p);
        frob.push(next);
    }
    if sub(&frob[n], &t, p) != Vec::<u64>::new() {
        return false;
    }
    let primes = crate::arith::factorize(n as u64)
        .expect("degree is positive")
        .primes()
        .collect::<Vec<_>>();
    primes.into_iter().all(|l| {
        let h = sub(&frob[n / l as usize], &t, p);
        gcd(&h, f, p).len() == 1
    })
}

/// Whether `f` has a root in F_p, by direct evaluation. Only used for small p.
pub(crate) fn has_root(f: &[u64], p: u64) -> bool {
    (0..p).any(|x| f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p) == 0)
}
