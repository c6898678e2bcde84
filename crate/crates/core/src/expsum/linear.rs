use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::{for_each_in_norm_window, norm_floor, verify_convergent_denominator, ComplexHP, GaussInt, PhaseMap};
use crate::gsieve::angle_in_window;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSum {
    pub exact: Complex64,
    pub bound: f64,
    /// Lattice points in the region.
    pub terms: u64,
}

impl LinearSum {
    /// `|exact| / bound`; zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.exact.norm() / self.bound
        } else {
            0.0
        }
    }
}

/// `min{t⁻¹, cap}` with `t⁻¹ = +∞` at `t = 0`.
fn capped_inverse(t: f64, cap: f64) -> f64 {
    if t * cap >= 1.0 {
        1.0 / t
    } else {
        cap
    }
}

/// `Σ e(Im(mκ))` over lattice `m` with `y_lo < norm(m) ≤ y_hi` and
/// `f1 < arg m ≤ f2`, together with
/// `√y_hi · min{‖Im κ‖⁻¹, √y_hi}^½ · min{‖Re κ‖⁻¹, √y_hi}^½`.
pub fn linear_expsum(kappa: &ComplexHP, y_lo: f64, y_hi: f64, f1: f64, f2: f64) -> Result<LinearSum> {
    if !(y_lo >= 0.0 && y_lo < y_hi && y_hi.is_finite()) {
        return Err(Error::Precondition(format!("need 0 ≤ y_lo < y_hi, got ({y_lo}, {y_hi}]")));
    }
    if !(f1 < f2 && f2 <= f1 + TAU + 1e-13) {
        return Err(Error::Precondition(format!("need f1 < f2 ≤ f1 + 2π, got ({f1}, {f2}]")));
    }
    let pm = PhaseMap::new(kappa);
    let mut exact = Complex64::new(0.0, 0.0);
    let mut terms = 0u64;
    for_each_in_norm_window(norm_floor(y_lo), norm_floor(y_hi), |m| {
        if angle_in_window(m, f1, f2) {
            exact += pm.phases(m).1.e();
            terms += 1;
        }
    });
    let root = y_hi.sqrt();
    let (re_t, im_t) = pm.phases(GaussInt::new(1, 0));
    let bound = root * capped_inverse(im_t.dist(), root).sqrt() * capped_inverse(re_t.dist(), root).sqrt();
    Ok(LinearSum { exact, bound, terms })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcProfile {
    pub exact: f64,
    /// `(1 + z/|q|²)(y^½ + |q|²)(log 2y)²`
    pub bound_general: f64,
    /// `(|q|y^¼ + |q|²)·log²(2|q|)`, only when `z ≤ |q|²/8`.
    pub bound_small_z: Option<f64>,
}

/// `G_c(y, z) = Σ_{0<norm(n)≤z} min{‖Im nc‖⁻¹, √y}^½ · min{‖Re nc‖⁻¹, √y}^½`
/// with both bounds derived from the approximation denominator `q`.
pub fn g_c_profile(c: &ComplexHP, y: f64, z: f64, q: GaussInt) -> Result<GcProfile> {
    if !(y >= 1.0 && y.is_finite()) || !(z >= 0.0 && z.is_finite()) {
        return Err(Error::Precondition(format!("need y ≥ 1 and z ≥ 0, got y = {y}, z = {z}")));
    }
    verify_convergent_denominator(c, q)?;
    let pm = PhaseMap::new(c);
    let root = y.sqrt();
    let mut exact = 0.0;
    for_each_in_norm_window(0, norm_floor(z), |n| {
        let (re, im) = pm.phases(n);
        exact += (capped_inverse(im.dist(), root) * capped_inverse(re.dist(), root)).sqrt();
    });
    let q2 = q.norm() as f64;
    let q_abs = q2.sqrt();
    let bound_general = (1.0 + z / q2) * (root + q2) * (2.0 * y).ln().powi(2);
    let bound_small_z = (z <= q2 / 8.0).then(|| (q_abs * y.powf(0.25) + q2) * (2.0 * q_abs).ln().powi(2));
    Ok(GcProfile { exact, bound_general, bound_small_z })
}
