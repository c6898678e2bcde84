use serde::{Deserialize, Serialize};

use super::sigma_count;
use crate::error::Result;
use crate::gint::{verify_approximant, ComplexHP, GaussInt, PhaseMap};

/// Spacing of `nc mod Z[i]` inside a box of side `|q|/4`, and the empty
/// window near zero for `0 < norm(n) ≤ |q|²/8`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingAudit {
    pub q: GaussInt,
    pub a: GaussInt,
    /// Largest coordinate difference of two lattice points in a half-open box of side `|q|/4`.
    pub reach: i64,
    /// `min ‖(n₁ − n₂)c‖` over distinct points of the box; `+∞` when the box holds one point.
    pub min_pair_dist: f64,
    /// `1/(2√2|q|)`
    pub spacing_bound: f64,
    pub spacing_ok: bool,
    /// `Δ = 0.999/(√8|q|)`
    pub zero_window_delta: f64,
    /// `Σ_c(|q|²/8, Δ, Δ)`
    pub zero_window_count: u64,
    pub zero_window_ok: bool,
}

/// Audits the spacing guarantees that follow from `|c − a/q| ≤ |q|⁻²`, `(a, q) = 1`.
pub fn spacing_audit(c: &ComplexHP, q: GaussInt, a: GaussInt) -> Result<SpacingAudit> {
    verify_approximant(c, a, q)?;
    let q_abs = (q.norm() as f64).sqrt();
    let side = q_abs / 4.0;
    // integers in (t, t + s] span at most ⌈s⌉ − 1
    let reach = side.ceil() as i64 - 1;
    let pm = PhaseMap::new(c);
    let mut min_pair_dist = f64::INFINITY;
    for dx in -reach..=reach {
        for dy in -reach..=reach {
            if (dx, dy) != (0, 0) {
                min_pair_dist = min_pair_dist.min(pm.sup_dist(GaussInt::new(dx, dy)));
            }
        }
    }
    let spacing_bound = 1.0 / (2.0 * std::f64::consts::SQRT_2 * q_abs);
    let zero_window_delta = 0.999 / (8f64.sqrt() * q_abs);
    let zero_window_count = sigma_count(c, q.norm() as f64 / 8.0, zero_window_delta, zero_window_delta)?;
    Ok(SpacingAudit {
        q,
        a,
        reach,
        min_pair_dist,
        spacing_bound,
        spacing_ok: min_pair_dist >= spacing_bound,
        zero_window_delta,
        zero_window_count,
        zero_window_ok: zero_window_count == 0,
    })
}
