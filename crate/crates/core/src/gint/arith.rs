//! Rational-integer helpers: primality, modular square roots of -1, two-squares
//! decomposition and small trial-division factorization.

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// A square root of -1 modulo a prime `p ≡ 1 (mod 4)`.
pub fn sqrt_minus_one(p: u64) -> u64 {
    debug_assert!(p % 4 == 1);
    let mut n = 2;
    loop {
        // Euler's criterion: n is a non-residue iff n^((p-1)/2) = -1.
        if pow_mod(n, (p - 1) / 2, p) == p - 1 {
            return pow_mod(n, (p - 1) / 4, p);
        }
        n += 1;
    }
}

/// Writes a prime `p ≡ 1 (mod 4)` (or `p = 2`) as `a² + b²` with `a > b > 0`
/// (`a = b = 1` for 2), using Cornacchia's reduction of `√-1 mod p`.
pub fn two_squares(p: u64) -> Option<(u64, u64)> {
    if p == 2 {
        return Some((1, 1));
    }
    if p % 4 != 1 {
        return None;
    }
    let t = sqrt_minus_one(p);
    let (mut r0, mut r1) = (p, if t > p / 2 { p - t } else { t });
    let bound = isqrt(p as u128) as u64;
    while r1 > bound {
        let r2 = r0 % r1;
        r0 = r1;
        r1 = r2;
    }
    let a = r1;
    let rest = p - a * a;
    let b = isqrt(rest as u128) as u64;
    if b * b != rest {
        return None;
    }
    Some(if a > b { (a, b) } else { (b, a) })
}

/// Largest norm accepted by [`factor_u128`]; trial division runs to its square root.
pub const FACTOR_LIMIT: u128 = 1_000_000_000_000;

/// Trial-division factorization into `(prime, exponent)` pairs, ascending.
pub fn factor_u128(mut n: u128) -> Result<Vec<(u64, u32)>> {
    if n > FACTOR_LIMIT {
        return Err(Error::Factorization(n));
    }
    let mut out = Vec::new();
    if n < 2 {
        return Ok(out);
    }
    let mut push = |p: u64, n: &mut u128| {
        let mut e = 0;
        while *n % p as u128 == 0 {
            *n /= p as u128;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    while (d as u128) * (d as u128) <= n {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    Ok(out)
}
