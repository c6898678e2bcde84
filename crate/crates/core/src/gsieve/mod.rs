//! Gaussian prime tables and sector counting.

mod cache;
mod region;
mod table;

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cache::{load_or_build, load_table, read_table, save_table, write_table, CACHE_MAGIC, CACHE_VERSION};
pub use region::{angle_in_window, SectorAnnulus};
pub use table::{estimated_bytes, PrimeEntry, PrimeTable, DEFAULT_MEMORY_BUDGET};

use crate::error::{Error, Result};
use crate::gint::{cmp_int_sq, is_gaussian_prime, within_disc, ComplexHP, GaussInt};

pub fn build_prime_table(max_norm: u64) -> Result<PrimeTable> {
    PrimeTable::build(max_norm)
}

impl PrimeTable {
    /// The sub-table of primes with norm `≤ max_norm`.
    pub fn truncated(&self, max_norm: u64) -> PrimeTable {
        let keep = self.norm_range(0, max_norm).iter().map(|e| e.prime).collect();
        PrimeTable::from_primes(max_norm.min(self.max_norm()), keep).expect("subset of a valid table")
    }

    /// Errors unless `r_max² ≤ max_norm`.
    pub fn check_radius(&self, r_max: f64) -> Result<()> {
        let need = r_max * r_max;
        if need > self.max_norm() as f64 {
            return Err(Error::Coverage { needed: need, have: self.max_norm() });
        }
        Ok(())
    }

    pub fn check_norm(&self, norm: f64) -> Result<()> {
        if norm > self.max_norm() as f64 {
            return Err(Error::Coverage { needed: norm, have: self.max_norm() });
        }
        Ok(())
    }

    /// Entries whose norm lies in the radial range of `region`.
    pub fn radial_slice(&self, region: &SectorAnnulus) -> &[PrimeEntry] {
        let e = self.entries();
        let a = e.partition_point(|p| cmp_int_sq(p.norm as u128, region.r_min) != Ordering::Greater);
        let b = e.partition_point(|p| cmp_int_sq(p.norm as u128, region.r_max) != Ordering::Greater);
        &e[a..b.max(a)]
    }

    /// Primes of the table inside `region`, in table order.
    pub fn in_region<'a>(&'a self, region: &'a SectorAnnulus) -> impl ParallelIterator<Item = &'a PrimeEntry> + 'a {
        self.radial_slice(region).par_iter().filter(move |e| region.contains_angle(e.prime))
    }
}

/// Exact count in a sector together with the main term
/// `(2/π)(θ_max − θ_min)(r_max² − r_min²)/log(r_max²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCount {
    pub observed: u64,
    pub kubilius_main: f64,
}

pub fn kubilius_main(region: &SectorAnnulus) -> f64 {
    let r2 = region.r_max * region.r_max;
    if r2 <= 1.0 {
        return 0.0;
    }
    (2.0 / PI) * region.width() * (r2 - region.r_min * region.r_min) / r2.ln()
}

pub fn count_primes_sector(table: &PrimeTable, region: &SectorAnnulus) -> Result<SectorCount> {
    region.validate()?;
    table.check_radius(region.r_max)?;
    let observed = table.in_region(region).count() as u64;
    Ok(SectorCount { observed, kubilius_main: kubilius_main(region) })
}

/// All Gaussian primes `g` with `|g − center| ≤ radius`, found by testing the
/// lattice points around `center`. Sorted by norm, then argument.
pub fn primes_in_disc(table: &PrimeTable, center: &ComplexHP, radius: f64) -> Result<Vec<GaussInt>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Precondition(format!("radius must be a finite non-negative number, got {radius}")));
    }
    let (cx, cy) = center.to_f64();
    let reach = cx.hypot(cy) + radius;
    table.check_norm(reach * reach)?;
    Ok(lattice_disc(center, radius)
        .into_iter()
        .filter(|&g| !g.is_zero() && is_gaussian_prime(g).unwrap_or(false))
        .collect())
}

/// All lattice points with `|g − center| ≤ radius`, sorted by norm then argument.
pub fn lattice_disc(center: &ComplexHP, radius: f64) -> Vec<GaussInt> {
    let (cx, cy) = center.to_f64();
    let lo_re = (cx - radius).floor() as i64 - 1;
    let hi_re = (cx + radius).ceil() as i64 + 1;
    let lo_im = (cy - radius).floor() as i64 - 1;
    let hi_im = (cy + radius).ceil() as i64 + 1;
    let mut out: Vec<GaussInt> = (lo_re..=hi_re)
        .flat_map(|a| (lo_im..=hi_im).map(move |b| GaussInt::new(a, b)))
        .filter(|&g| within_disc(g, center, radius))
        .collect();
    out.sort_by(|x, y| x.norm().cmp(&y.norm()).then(x.arg().total_cmp(&y.arg())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::DEFAULT_PREC;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| PrimeTable::build(40_000).unwrap())
    }

    fn hp(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(re, im, DEFAULT_PREC)
    }

    #[test]
    fn full_and_quarter_circle() {
        let t = PrimeTable::build(100).unwrap();
        let full = count_primes_sector(&t, &SectorAnnulus::disc(10.0)).unwrap();
        assert_eq!(full.observed, 100);
        assert!((full.kubilius_main - 400.0 / 100f64.ln()).abs() < 1e-9);
        assert!((full.kubilius_main - 86.86).abs() < 0.01);
        let quarter = SectorAnnulus::new(0.0, 10.0, 0.0, PI / 2.0).unwrap();
        assert_eq!(count_primes_sector(&t, &quarter).unwrap().observed, 25);
        assert!(matches!(
            count_primes_sector(&t, &SectorAnnulus::disc(10.5)),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn annulus_excludes_inner_radius() {
        let t = PrimeTable::build(100).unwrap();
        let ring = SectorAnnulus::new(5f64.sqrt(), 10.0, -PI, PI).unwrap();
        // drops 1+i (4) and the norm-5 primes (8)
        assert_eq!(count_primes_sector(&t, &ring).unwrap().observed, 88);
    }

    #[test]
    fn disc_queries() {
        let t = PrimeTable::build(100).unwrap();
        let mut got = primes_in_disc(&t, &hp(0.0, 0.0), 1.5).unwrap();
        got.sort();
        let mut want = GaussInt::new(1, 1).associates().to_vec();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(primes_in_disc(&t, &hp(2.0, 1.0), 0.0).unwrap(), vec![GaussInt::new(2, 1)]);
        assert!(primes_in_disc(&t, &hp(0.5, 0.5), 0.6).unwrap().is_empty());
        assert!(primes_in_disc(&t, &hp(9.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn disc_scan_agrees_with_table_scan() {
        let t = table();
        for (cx, cy, r) in [(10.3, -7.1, 6.0), (0.0, 0.0, 30.0), (-55.5, 20.25, 12.5)] {
            let c = hp(cx, cy);
            let mut scan = primes_in_disc(t, &c, r).unwrap();
            let mut direct: Vec<_> = t.primes().filter(|&g| within_disc(g, &c, r)).collect();
            scan.sort();
            direct.sort();
            assert_eq!(scan, direct);
        }
    }

    #[test]
    fn partitions_sum_to_full_circle() {
        let t = table();
        let full = count_primes_sector(t, &SectorAnnulus::disc(200.0)).unwrap().observed;
        assert_eq!(full as usize, t.len());
        for pieces in [2usize, 3, 4, 5, 8, 12, 16, 33] {
            let sum: u64 = SectorAnnulus::partition(0.0, 200.0, pieces)
                .iter()
                .map(|s| count_primes_sector(t, s).unwrap().observed)
                .sum();
            assert_eq!(sum, full, "{pieces} pieces");
        }
    }

    #[test]
    fn truncation_matches_direct_build() {
        let t = table();
        assert_eq!(t.truncated(5000), PrimeTable::build(5000).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn rotation_by_quarter_turn_preserves_counts(
            r0 in 0.0f64..100.0, dr in 1.0f64..100.0, t0 in -3.2f64..3.2, w in 0.01f64..6.28,
        ) {
            let s = SectorAnnulus::new(r0, r0 + dr, t0, t0 + w).unwrap();
            let a = count_primes_sector(table(), &s).unwrap().observed;
            let b = count_primes_sector(table(), &s.rotated(PI / 2.0)).unwrap().observed;
            prop_assert_eq!(a, b);
        }

        #[test]
        fn conjugate_sector_has_same_count(
            r0 in 0.0f64..100.0, dr in 1.0f64..100.0, t0 in -3.0f64..3.0, w in 0.01f64..3.0,
        ) {
            let s = SectorAnnulus::new(r0, r0 + dr, t0, t0 + w).unwrap();
            let c = SectorAnnulus::new(r0, r0 + dr, -(t0 + w), -t0).unwrap();
            let on_boundary = |g: GaussInt| {
                let a = g.arg();
                [t0, t0 + w, -t0, -(t0 + w)].iter().any(|&b| {
                    let d = (a - b).rem_euclid(std::f64::consts::TAU);
                    d < 1e-9 || d > std::f64::consts::TAU - 1e-9
                })
            };
            prop_assume!(!table().primes().any(|g| s.contains_norm(g.norm()) && on_boundary(g)));
            let a = count_primes_sector(table(), &s).unwrap().observed;
            let b = count_primes_sector(table(), &c).unwrap().observed;
            prop_assert_eq!(a, b);
        }
    }
}
