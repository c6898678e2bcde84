use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::arith::two_squares;
use crate::gint::GaussInt;

/// One Gaussian prime with its norm and argument in `(−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeEntry {
    pub prime: GaussInt,
    pub norm: u64,
    pub arg: f64,
}

impl PrimeEntry {
    pub fn new(prime: GaussInt) -> Self {
        PrimeEntry { prime, norm: prime.norm() as u64, arg: prime.arg() }
    }
}

/// Default ceiling on the estimated memory of a table build.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// Every Gaussian prime with `0 < norm ≤ max_norm`, sorted by norm then argument.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTable {
    max_norm: u64,
    entries: Vec<PrimeEntry>,
}

/// Rough byte count for building a table up to `max_norm`: the odd-only sieve
/// plus about `4x/log x` entries with some headroom.
pub fn estimated_bytes(max_norm: u64) -> u64 {
    let x = max_norm.max(3) as f64;
    let entries = 1.3 * 4.0 * x / x.ln();
    (x / 16.0 + entries * std::mem::size_of::<PrimeEntry>() as f64) as u64
}

/// Odd-only sieve of Eratosthenes; returns the rational primes `≤ n`.
pub(crate) fn rational_primes(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    out.push(2);
    // bit k stands for 2k+1
    let len = ((n - 1) / 2 + 1) as usize;
    let mut composite = vec![0u64; len.div_ceil(64)];
    let mut k = 1usize;
    while k < len {
        if composite[k / 64] >> (k % 64) & 1 == 0 {
            let p = 2 * k as u64 + 1;
            out.push(p);
            let mut m = p * p;
            while m <= n {
                let j = (m / 2) as usize;
                composite[j / 64] |= 1 << (j % 64);
                m += 2 * p;
            }
        }
        k += 1;
    }
    out
}

impl PrimeTable {
    pub fn build(max_norm: u64) -> Result<Self> {
        Self::build_with_budget(max_norm, DEFAULT_MEMORY_BUDGET)
    }

    pub fn build_with_budget(max_norm: u64, budget_bytes: u64) -> Result<Self> {
        if max_norm < 2 {
            return Err(Error::Precondition(format!("max_norm must be ≥ 2, got {max_norm}")));
        }
        let need = estimated_bytes(max_norm);
        if need > budget_bytes {
            return Err(Error::Resource(format!(
                "prime table up to norm {max_norm} needs about {need} bytes, budget is {budget_bytes}"
            )));
        }
        let primes = rational_primes(max_norm);
        let mut entries: Vec<PrimeEntry> = primes
            .par_iter()
            .flat_map_iter(|&l| {
                let mut v = Vec::new();
                if l == 2 {
                    v.extend(GaussInt::new(1, 1).associates());
                } else if l % 4 == 1 {
                    let (a, b) = two_squares(l).expect("split prime is a sum of two squares");
                    let (a, b) = (a as i64, b as i64);
                    v.extend(GaussInt::new(a, b).associates());
                    v.extend(GaussInt::new(b, a).associates());
                } else if (l as u128) * (l as u128) <= max_norm as u128 {
                    v.extend(GaussInt::new(l as i64, 0).associates());
                }
                v.into_iter().map(PrimeEntry::new)
            })
            .collect();
        entries.par_sort_unstable_by(|x, y| x.norm.cmp(&y.norm).then(x.arg.total_cmp(&y.arg)));
        Ok(PrimeTable { max_norm, entries })
    }

    /// Rebuilds a table from its primes, recomputing norms and arguments.
    pub(crate) fn from_primes(max_norm: u64, primes: Vec<GaussInt>) -> Result<Self> {
        let mut entries: Vec<PrimeEntry> = primes.into_iter().map(PrimeEntry::new).collect();
        if entries.iter().any(|e| e.norm == 0 || e.norm > max_norm) {
            return Err(Error::Cache("entry norm outside (0, max_norm]".into()));
        }
        entries.par_sort_unstable_by(|x, y| x.norm.cmp(&y.norm).then(x.arg.total_cmp(&y.arg)));
        Ok(PrimeTable { max_norm, entries })
    }

    pub fn max_norm(&self) -> u64 {
        self.max_norm
    }

    pub fn entries(&self) -> &[PrimeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = GaussInt> + '_ {
        self.entries.iter().map(|e| e.prime)
    }

    /// Entries with `lo < norm ≤ hi`.
    pub fn norm_range(&self, lo: u64, hi: u64) -> &[PrimeEntry] {
        let a = self.entries.partition_point(|e| e.norm <= lo);
        let b = self.entries.partition_point(|e| e.norm <= hi);
        &self.entries[a..b.max(a)]
    }

    pub fn covers_norm(&self, norm: f64) -> bool {
        norm <= self.max_norm as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::is_gaussian_prime;

    fn brute_force(max_norm: u64) -> Vec<GaussInt> {
        let r = (max_norm as f64).sqrt() as i64 + 1;
        let mut v = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                let g = GaussInt::new(a, b);
                if g.is_zero() || g.norm() > max_norm as u128 {
                    continue;
                }
                // trial division over all lattice points of smaller norm
                let n = g.norm();
                let has_factor = (-r..=r).any(|x| {
                    (-r..=r).any(|y| {
                        let d = GaussInt::new(x, y);
                        let dn = d.norm();
                        dn > 1 && dn < n && d.divides(g)
                    })
                });
                if n > 1 && !has_factor {
                    v.push(g);
                }
            }
        }
        v.sort();
        v
    }

    #[test]
    fn sieve_matches_trial_division() {
        let p = rational_primes(1000);
        let td: Vec<u64> = (2..=1000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
        assert_eq!(p, td);
        assert!(rational_primes(1).is_empty());
        assert_eq!(rational_primes(2), vec![2]);
    }

    #[test]
    fn small_tables() {
        let t = PrimeTable::build(2).unwrap();
        let mut got: Vec<_> = t.primes().collect();
        got.sort();
        let mut want = GaussInt::new(1, 1).associates().to_vec();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(PrimeTable::build(100).unwrap().len(), 100);
        assert_eq!(PrimeTable::build(25).unwrap().len(), brute_force(25).len());
        assert!(PrimeTable::build(1).is_err());
    }

    #[test]
    fn equals_brute_force_enumeration() {
        for max in [2u64, 9, 10, 49, 50, 100, 400] {
            let mut got: Vec<_> = PrimeTable::build(max).unwrap().primes().collect();
            got.sort();
            assert_eq!(got, brute_force(max), "max_norm {max}");
        }
    }

    #[test]
    fn equals_primality_scan_to_ten_thousand() {
        let max = 10_000u64;
        let r = 100i64;
        let mut want = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                let g = GaussInt::new(a, b);
                if !g.is_zero() && g.norm() <= max as u128 && is_gaussian_prime(g).unwrap() {
                    want.push(g);
                }
            }
        }
        want.sort();
        let t = PrimeTable::build(max).unwrap();
        assert_eq!(t.len() % 4, 0);
        let mut got: Vec<_> = t.primes().collect();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn sorted_by_norm_then_arg() {
        let t = PrimeTable::build(5000).unwrap();
        for w in t.entries().windows(2) {
            assert!((w[0].norm, w[0].arg) < (w[1].norm, w[1].arg));
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(PrimeTable::build_with_budget(1_000_000, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn norm_range_is_half_open() {
        let t = PrimeTable::build(100).unwrap();
        assert_eq!(t.norm_range(4, 5).len(), 8);
        assert_eq!(t.norm_range(5, 9).len(), 4);
        assert_eq!(t.norm_range(0, 100).len(), 100);
    }
}
