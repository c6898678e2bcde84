use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::{floor_pow, hurwitz_expansion, norm_floor, ComplexHP, GaussInt, PhaseMap};
use crate::gsieve::{PrimeTable, SectorAnnulus};

/// One scale of the equidistribution experiment, in norm units:
/// `n = norm(q)⁶` and `m = norm(q)³ = √n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub q: GaussInt,
    pub n: u128,
    pub m: u128,
}

impl Scale {
    pub fn from_denominator(q: GaussInt) -> Result<Scale> {
        let norm = q.norm();
        let m = norm.checked_pow(3).ok_or(Error::Overflow("scale norm(q)³"))?;
        let n = m.checked_mul(m).ok_or(Error::Overflow("scale norm(q)⁶"))?;
        Ok(Scale { q, n, m })
    }

    /// `|q|¹²` as a radius, i.e. `√n`.
    pub fn radius_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    pub fn radius_m(&self) -> f64 {
        (self.m as f64).sqrt()
    }
}

/// Scales built from the successive Hurwitz denominators of `c`. Unit
/// denominators are skipped.
#[derive(Clone, Debug)]
pub struct ScaleSchedule {
    pub constant: ComplexHP,
    pub scales: Vec<Scale>,
    pub rational: bool,
}

impl ScaleSchedule {
    /// All scales with `n ≤ max_n`.
    pub fn new(c: &ComplexHP, max_n: u128) -> Result<ScaleSchedule> {
        let q_norm_cap = floor_pow(max_n, 1.0 / 6.0);
        let e = hurwitz_expansion(c, 256, Some(q_norm_cap + 1))?;
        let mut scales: Vec<Scale> = Vec::new();
        for q in e.denominators() {
            if q.is_unit() || q.norm() > q_norm_cap {
                continue;
            }
            if scales.last().is_some_and(|s| s.q.norm() >= q.norm()) {
                continue;
            }
            scales.push(Scale::from_denominator(q)?);
        }
        Ok(ScaleSchedule { constant: c.clone(), scales, rational: is_rational_constant(c) })
    }

    /// Index of the largest scale with `n ≤ bound`.
    pub fn largest_within(&self, bound: u128) -> Option<usize> {
        self.scales.iter().rposition(|s| s.n <= bound)
    }
}

/// Whether `c` lies in `Q(i)`: read off how the constant was made, or else
/// detected by a terminating Hurwitz expansion.
pub fn is_rational_constant(c: &ComplexHP) -> bool {
    c.known_rational()
        .unwrap_or_else(|| hurwitz_expansion(c, 64, None).map(|e| e.terminated).unwrap_or(false))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidReport {
    pub constant: String,
    pub k: Option<usize>,
    pub q: Option<GaussInt>,
    /// Lower end of the norm window `(x, n_k]`.
    pub x: f64,
    pub n_k: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Primes in the window with `‖pc‖ ≤ δ` (sup metric).
    pub observed: u64,
    /// Primes in the window.
    pub baseline: u64,
    /// `4δ²·baseline`
    pub predicted: f64,
    /// `observed/predicted`; `None` for an empty window.
    pub ratio: Option<f64>,
    /// `δ ≥ n_k^(−1/24+ε)`
    pub admissible: bool,
    /// Outside the range where the main term is known to dominate.
    pub heuristic: bool,
    pub rational: bool,
}

/// Compares the constrained count in the norm window `(x, n_max]` and the
/// sector's angles with `4δ²` times the unconstrained count.
pub fn equid_window_report(
    table: &PrimeTable,
    c: &ComplexHP,
    x: f64,
    n_max: u64,
    delta: f64,
    region: &SectorAnnulus,
    epsilon: f64,
) -> Result<EquidReport> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(x >= 0.0 && x <= n_max as f64) {
        return Err(Error::Precondition(format!("need 0 ≤ x ≤ N, got x = {x}, N = {n_max}")));
    }
    region.with_radii(0.0, 1.0).validate()?;
    table.check_norm(n_max as f64)?;

    let pm = PhaseMap::new(c);
    let (baseline, observed) = table
        .norm_range(norm_floor(x) as u64, n_max)
        .par_iter()
        .filter(|e| region.contains_angle(e.prime))
        .map(|e| (1u64, pm.within_sup(e.prime, delta) as u64))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let predicted = 4.0 * delta * delta * baseline as f64;
    let admissible = delta >= (n_max as f64).powf(-1.0 / 24.0 + epsilon);
    Ok(EquidReport {
        constant: c.to_string(),
        k: None,
        q: None,
        x,
        n_k: n_max,
        delta,
        epsilon,
        theta_min: region.theta_min,
        theta_max: region.theta_max,
        observed,
        baseline,
        predicted,
        ratio: (predicted > 0.0).then(|| observed as f64 / predicted),
        admissible,
        heuristic: !admissible,
        rational: is_rational_constant(c),
    })
}

/// [`equid_window_report`] at the `k`-th scale of `schedule`.
pub fn equid_report(
    table: &PrimeTable,
    schedule: &ScaleSchedule,
    k: usize,
    x: f64,
    delta: f64,
    region: &SectorAnnulus,
    epsilon: f64,
) -> Result<EquidReport> {
    let scale = schedule
        .scales
        .get(k)
        .ok_or_else(|| Error::Precondition(format!("schedule has {} scales, asked for index {k}", schedule.scales.len())))?;
    let n = u64::try_from(scale.n).map_err(|_| Error::Coverage { needed: scale.n as f64, have: table.max_norm() })?;
    let mut report = equid_window_report(table, &schedule.constant, x, n, delta, region, epsilon)?;
    report.k = Some(k);
    report.q = Some(scale.q);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxPrime {
    pub p: GaussInt,
    pub norm: u64,
    /// `‖pc‖` in the sup metric.
    pub dist: f64,
}

/// Table primes with `‖pc‖ ≤ |p|^e`, in table order (norm, then argument).
pub fn find_approx_primes(table: &PrimeTable, c: &ComplexHP, e: f64) -> Vec<ApproxPrime> {
    let pm = PhaseMap::new(c);
    table
        .entries()
        .par_iter()
        .filter(|en| pm.within_sup(en.prime, (en.norm as f64).powf(e / 2.0)))
        .map(|en| ApproxPrime { p: en.prime, norm: en.norm, dist: pm.sup_dist(en.prime) })
        .collect()
}
