//! Lattice enumeration by norm and exact integer thresholds for real bounds.

use rug::ops::Pow;
use rug::Integer;

use super::arith::isqrt;
use super::GaussInt;

/// Largest integer `k` with `k ≤ x`, for a finite `x ≥ 0` (saturating).
pub fn norm_floor(x: f64) -> u128 {
    if x.is_nan() || x < 0.0 {
        return 0;
    }
    if x >= 1.7e38 {
        return u128::MAX;
    }
    x.floor() as u128
}

/// Lattice points `g` with `lo < norm(g) ≤ hi`, row by row (`re` ascending,
/// then `im` ascending).
pub fn norm_window_points(lo: u128, hi: u128) -> Vec<GaussInt> {
    let mut out = Vec::new();
    for_each_in_norm_window(lo, hi, |g| out.push(g));
    out
}

pub fn for_each_in_norm_window(lo: u128, hi: u128, mut f: impl FnMut(GaussInt)) {
    if hi <= lo {
        return;
    }
    let r = isqrt(hi) as i64;
    for a in -r..=r {
        let a2 = (a as i128 * a as i128) as u128;
        let top = isqrt(hi - a2) as i64;
        let gap = if lo >= a2 { isqrt(lo - a2) as i64 + 1 } else { 0 };
        if gap > top {
            continue;
        }
        for b in -top..=-gap.max(1) {
            f(GaussInt::new(a, b));
        }
        if gap == 0 {
            f(GaussInt::new(a, 0));
        }
        for b in gap.max(1)..=top {
            f(GaussInt::new(a, b));
        }
    }
}

/// Number of lattice points with `lo < norm ≤ hi`.
pub fn count_norm_window(lo: u128, hi: u128) -> u64 {
    if hi <= lo {
        return 0;
    }
    let disc = |n: u128| -> u64 {
        let r = isqrt(n) as i64;
        (-r..=r).map(|a| 2 * isqrt(n - (a as i128 * a as i128) as u128) as u64 + 1).sum()
    };
    disc(hi) - disc(lo)
}

/// `floor(x^alpha)` computed exactly when `alpha` is a rational with a small
/// denominator (so that `16^(1/2)` is 4 and not 3.999…), otherwise in `f64`.
pub fn floor_pow(x: u128, alpha: f64) -> u128 {
    let approx = (x as f64).powf(alpha);
    let Some((num, den)) = small_fraction(alpha) else {
        return norm_floor(approx);
    };
    if num < 0 {
        return norm_floor(approx);
    }
    // largest k with k^den ≤ x^num
    let target = Integer::from(x).pow(num as u32);
    let mut k = norm_floor(approx);
    let pow = |k: u128| Integer::from(k).pow(den);
    while k > 0 && pow(k) > target {
        k -= 1;
    }
    while pow(k + 1) <= target {
        k += 1;
    }
    k
}

fn small_fraction(alpha: f64) -> Option<(i64, u32)> {
    (1..=24u32).find_map(|d| {
        let n = alpha * d as f64;
        ((n - n.round()).abs() < 1e-12).then_some((n.round() as i64, d))
    })
}
