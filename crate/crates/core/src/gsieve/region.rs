//! Annulus sectors `D(r_min, r_max, θ_min, θ_max)` with exact membership.
//!
//! A lattice point can only sit exactly on a sector boundary when that
//! boundary is a multiple of π/4 (axes and diagonals). Boundaries within
//! `SNAP_TOL` of such a multiple are therefore treated as the exact multiple,
//! and comparisons between axis/diagonal points and those boundaries are
//! done in integer units of π/4. All other comparisons fall back to 256-bit
//! arithmetic when the double-precision margin is below `ANGLE_EPS`.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::{cmp_int_sq, GaussInt};

const SNAP_TOL: f64 = 1e-13;
const ANGLE_EPS: f64 = 1e-12;
const HP_BITS: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Angle {
    /// Exactly `k·π/4`.
    Octant(i64),
    Real(f64),
}

impl Angle {
    fn snap(theta: f64) -> Angle {
        let k = (theta / FRAC_PI_4).round();
        if (theta - k * FRAC_PI_4).abs() <= SNAP_TOL * theta.abs().max(1.0) {
            Angle::Octant(k as i64)
        } else {
            Angle::Real(theta)
        }
    }

    fn of_point(g: GaussInt) -> Angle {
        let (a, b) = (g.re, g.im);
        let k = match (a.signum(), b.signum()) {
            (1, 0) => Some(0),
            (0, 1) => Some(2),
            (-1, 0) => Some(4),
            (0, -1) => Some(-2),
            _ if a == b && a > 0 => Some(1),
            _ if a == -b && a < 0 => Some(3),
            _ if a == b && a < 0 => Some(-3),
            _ if a == -b && a > 0 => Some(-1),
            _ => None,
        };
        match k {
            Some(k) => Angle::Octant(k),
            None => Angle::Real(g.arg()),
        }
    }

    fn approx(self) -> f64 {
        match self {
            Angle::Octant(k) => k as f64 * FRAC_PI_4,
            Angle::Real(t) => t,
        }
    }
}

fn hp_point_arg(g: GaussInt) -> Float {
    let y = Float::with_val(HP_BITS, g.im);
    let x = Float::with_val(HP_BITS, g.re);
    y.atan2(&x)
}

fn hp_angle(a: Angle) -> Float {
    match a {
        Angle::Octant(k) => Float::with_val(HP_BITS, Constant::Pi) * k / 4u32,
        Angle::Real(t) => Float::with_val(HP_BITS, t),
    }
}

/// Sign of `arg(g) + 2π·turns − bound`.
fn cmp_shifted(g: GaussInt, point: Angle, turns: i64, bound: Angle) -> Ordering {
    if let (Angle::Octant(p), Angle::Octant(b)) = (point, bound) {
        return (p + 8 * turns).cmp(&b);
    }
    let d = point.approx() + TAU * turns as f64 - bound.approx();
    if d.abs() > ANGLE_EPS {
        return d.partial_cmp(&0.0).unwrap();
    }
    let tau = Float::with_val(HP_BITS, Constant::Pi) * 2u32;
    let exact = hp_point_arg(g) + tau * turns - hp_angle(bound);
    exact.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

/// The region `r_min < |z| ≤ r_max`, `θ_min < arg z ≤ θ_max`, with `arg`
/// taken modulo 2π into the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorAnnulus {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl SectorAnnulus {
    pub fn new(r_min: f64, r_max: f64, theta_min: f64, theta_max: f64) -> Result<Self> {
        let s = SectorAnnulus { r_min, r_max, theta_min, theta_max };
        s.validate()?;
        Ok(s)
    }

    /// Full circle `(−π, π]` out to `r_max`.
    pub fn disc(r_max: f64) -> Self {
        SectorAnnulus { r_min: 0.0, r_max, theta_min: -PI, theta_max: PI }
    }

    /// `L` equal half-open sectors partitioning `(−π, π]`, radii `(r_min, r_max]`.
    pub fn partition(r_min: f64, r_max: f64, pieces: usize) -> Vec<Self> {
        let width = TAU / pieces as f64;
        (0..pieces)
            .map(|k| SectorAnnulus {
                r_min,
                r_max,
                theta_min: -PI + k as f64 * width,
                theta_max: -PI + (k + 1) as f64 * width,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let ok_r = self.r_min >= 0.0 && self.r_min < self.r_max && self.r_max.is_finite();
        let ok_t = self.theta_min.is_finite()
            && self.theta_min < self.theta_max
            && self.theta_max - self.theta_min <= TAU + SNAP_TOL;
        if !ok_r {
            return Err(Error::Precondition(format!(
                "sector radii need 0 ≤ r_min < r_max, got ({}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !ok_t {
            return Err(Error::Precondition(format!(
                "sector angles need θ_min < θ_max ≤ θ_min + 2π, got ({}, {}]",
                self.theta_min, self.theta_max
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    /// Same radii, both angles shifted by `delta`.
    pub fn rotated(&self, delta: f64) -> Self {
        SectorAnnulus { theta_min: self.theta_min + delta, theta_max: self.theta_max + delta, ..*self }
    }

    pub fn with_radii(&self, r_min: f64, r_max: f64) -> Self {
        SectorAnnulus { r_min, r_max, ..*self }
    }

    pub fn is_full_turn(&self) -> bool {
        match (Angle::snap(self.theta_min), Angle::snap(self.theta_max)) {
            (Angle::Octant(a), Angle::Octant(b)) => b - a == 8,
            _ => false,
        }
    }

    /// Angular condition only. The origin is never contained.
    pub fn contains_angle(&self, g: GaussInt) -> bool {
        if g.is_zero() {
            return false;
        }
        if self.is_full_turn() {
            return true;
        }
        let lo = Angle::snap(self.theta_min);
        let hi = Angle::snap(self.theta_max);
        let p = Angle::of_point(g);
        // the window spans at most one turn, so one of a few shifts fits
        let base = ((lo.approx() - p.approx()) / TAU).floor() as i64;
        (base - 1..=base + 2).any(|m| {
            cmp_shifted(g, p, m, lo) == Ordering::Greater
                && cmp_shifted(g, p, m, hi) != Ordering::Greater
        })
    }

    pub fn contains_norm(&self, norm: u128) -> bool {
        cmp_int_sq(norm, self.r_min) == Ordering::Greater
            && cmp_int_sq(norm, self.r_max) != Ordering::Greater
    }

    pub fn contains(&self, g: GaussInt) -> bool {
        self.contains_norm(g.norm()) && self.contains_angle(g)
    }
}

/// Angular window `(ω₁, ω₂]` without radial limits, for conditions like
/// `ω₁ < arg(mn) ≤ ω₂`.
pub fn angle_in_window(g: GaussInt, omega1: f64, omega2: f64) -> bool {
    SectorAnnulus { r_min: 0.0, r_max: f64::INFINITY, theta_min: omega1, theta_max: omega2 }
        .contains_angle(g)
}
