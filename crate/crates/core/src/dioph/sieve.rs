use crate::error::{Error, Result};
use crate::gint::arith::factor_u128;
use crate::gint::GaussInt;

/// Rational prime factorization of `norm(n)`, split by behaviour in `Z[i]`.
/// Each pair is `(ℓ, e)` with `ℓ^e ∥ norm(n)`.
pub fn split_norm_factors(n: GaussInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput("factorization of zero"));
    }
    factor_u128(n.norm())
}

/// Norm of the Gaussian primes above the rational prime `ℓ`.
fn prime_norm_above(l: u64) -> u128 {
    if l % 4 == 3 {
        (l as u128) * (l as u128)
    } else {
        l as u128
    }
}

/// Number of Gaussian prime factors of `n` counted with multiplicity, read off
/// the norm: `v₂ + Σ_{ℓ≡1} v_ℓ + Σ_{ℓ≡3} v_ℓ/2`. Units give 0.
pub fn omega(n: GaussInt) -> Result<u32> {
    Ok(split_norm_factors(n)?
        .into_iter()
        .map(|(l, e)| if l % 4 == 3 { e / 2 } else { e })
        .sum())
}

/// Whether some Gaussian prime of norm `≤ z` divides `n`.
pub fn has_small_prime_factor(n: GaussInt, z: f64) -> Result<bool> {
    Ok(split_norm_factors(n)?.into_iter().any(|(l, _)| prime_norm_above(l) as f64 <= z))
}

/// Number of elements with no Gaussian prime factor of norm `≤ z`.
pub fn sieve_count_s(elements: &[GaussInt], z: f64) -> Result<u64> {
    let mut count = 0;
    for &n in elements {
        if !has_small_prime_factor(n, z)? {
            count += 1;
        }
    }
    Ok(count)
}
