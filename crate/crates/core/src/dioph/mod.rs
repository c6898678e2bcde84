//! Constrained prime counts, lattice counting near `nc ≡ 0`, spacing audits,
//! sieve set counts and the equidistribution experiment.

mod equid;
mod sieve;
mod spacing;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use equid::{
    equid_report, equid_window_report, find_approx_primes, is_rational_constant, ApproxPrime,
    EquidReport, Scale, ScaleSchedule,
};
pub use sieve::{has_small_prime_factor, omega, sieve_count_s, split_norm_factors};
pub use spacing::{spacing_audit, SpacingAudit};

use crate::error::{Error, Result};
use crate::gint::{for_each_in_norm_window, norm_floor, ComplexHP, PhaseMap};
use crate::gsieve::{PrimeEntry, PrimeTable, SectorAnnulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// `max(‖Re z‖, ‖Im z‖)`
    Sup,
    /// Euclidean distance to the nearest lattice point.
    Euclid,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(Metric::Sup),
            "euclid" => Ok(Metric::Euclid),
            _ => Err(Error::Precondition(format!("metric must be sup or euclid, got {s:?}"))),
        }
    }
}

impl PhaseMap {
    pub fn within(&self, n: crate::gint::GaussInt, delta: f64, metric: Metric) -> bool {
        match metric {
            Metric::Sup => self.within_sup(n, delta),
            Metric::Euclid => self.within_euclid(n, delta),
        }
    }
}

/// A sector (or a norm window with the sector's angles) and a distance
/// threshold `‖pc‖ ≤ delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintQuery {
    pub region: SectorAnnulus,
    pub delta: f64,
    pub metric: Metric,
    /// `(x₁, x₂]` in norm units; replaces the region's radii when set.
    pub norm_window: Option<(f64, f64)>,
}

impl ConstraintQuery {
    pub fn new(region: SectorAnnulus, delta: f64, metric: Metric) -> Self {
        ConstraintQuery { region, delta, metric, norm_window: None }
    }

    pub fn with_norm_window(mut self, x1: f64, x2: f64) -> Self {
        self.norm_window = Some((x1, x2));
        self
    }

    pub fn with_delta(self, delta: f64) -> Self {
        ConstraintQuery { delta, ..self }
    }

    pub fn with_metric(self, metric: Metric) -> Self {
        ConstraintQuery { metric, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::Precondition(format!("delta must lie in (0, 1/2], got {}", self.delta)));
        }
        if let Some((x1, x2)) = self.norm_window {
            if !(x1 >= 1.0 && x1 < x2 && x2.is_finite()) {
                return Err(Error::Precondition(format!("norm window needs 1 ≤ x₁ < x₂, got ({x1}, {x2}]")));
            }
        }
        match self.norm_window {
            // radii are irrelevant in window mode, only the angles are checked
            Some(_) => self.region.with_radii(0.0, 1.0).validate(),
            None => self.region.validate(),
        }
    }

    /// Table entries satisfying the region or window, before the distance test.
    pub(crate) fn candidates<'a>(&'a self, table: &'a PrimeTable) -> Result<Vec<&'a PrimeEntry>> {
        self.validate()?;
        let slice = match self.norm_window {
            Some((x1, x2)) => {
                table.check_norm(x2)?;
                table.norm_range(norm_floor(x1) as u64, norm_floor(x2) as u64)
            }
            None => {
                table.check_radius(self.region.r_max)?;
                table.radial_slice(&self.region)
            }
        };
        Ok(slice.par_iter().filter(|e| self.region.contains_angle(e.prime)).collect())
    }
}

/// Number of table primes in the query region with `dist(pc, Z[i]) ≤ delta`.
pub fn count_constrained_primes(table: &PrimeTable, c: &ComplexHP, query: &ConstraintQuery) -> Result<u64> {
    let pm = PhaseMap::new(c);
    let cands = query.candidates(table)?;
    Ok(cands.par_iter().filter(|e| pm.within(e.prime, query.delta, query.metric)).count() as u64)
}

/// Counts without the distance constraint, for the same region or window.
pub fn count_unconstrained(table: &PrimeTable, query: &ConstraintQuery) -> Result<u64> {
    Ok(query.candidates(table)?.len() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    /// Euclidean count at `delta`.
    pub pi_c: u64,
    /// Supremum-metric count at `delta/√2`.
    pub pi_star: u64,
    pub holds: bool,
}

/// Evaluates both sides of `π_c(δ) ≥ π*_c(δ/√2)`.
pub fn relation_check_pi_star(table: &PrimeTable, c: &ComplexHP, query: &ConstraintQuery) -> Result<RelationCheck> {
    let euclid = query.with_metric(Metric::Euclid);
    let sup = query.with_metric(Metric::Sup).with_delta(query.delta / std::f64::consts::SQRT_2);
    let pi_c = count_constrained_primes(table, c, &euclid)?;
    let pi_star = count_constrained_primes(table, c, &sup)?;
    Ok(RelationCheck { pi_c, pi_star, holds: pi_c >= pi_star })
}

/// Number of lattice `n` with `0 < norm(n) ≤ z`, `‖Im(nc)‖ ≤ delta1` and `‖Re(nc)‖ ≤ delta2`.
pub fn sigma_count(c: &ComplexHP, z: f64, delta1: f64, delta2: f64) -> Result<u64> {
    if !(z >= 0.0) {
        return Err(Error::Precondition(format!("z must be ≥ 0, got {z}")));
    }
    for (name, d) in [("delta1", delta1), ("delta2", delta2)] {
        if !(0.0..=0.5).contains(&d) {
            return Err(Error::Precondition(format!("{name} must lie in [0, 1/2], got {d}")));
        }
    }
    let pm = PhaseMap::new(c);
    let mut count = 0u64;
    for_each_in_norm_window(0, norm_floor(z), |n| {
        if pm.within_box(n, delta2, delta1) {
            count += 1;
        }
    });
    Ok(count)
}
