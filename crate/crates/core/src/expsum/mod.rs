//! Vaaler's trigonometric approximation, linear exponential sums over
//! sectors, the profile `G_c(y, z)`, and exact type I / type II sums.

mod bilinear;
mod linear;
mod typesum;
mod vaaler;

use serde::{Deserialize, Serialize};

pub use bilinear::{
    e1_exact, e2_exact, e3_exact, f1_exact, f3_exact, frequencies, quarter_turn, random_sign,
    Coefficients, TypeSumParams, DEFAULT_TERM_BUDGET,
};
pub use linear::{g_c_profile, linear_expsum, GcProfile, LinearSum};
pub use typesum::{type_sum_report, TypeSumReport};
pub use vaaler::{sawtooth, vaaler_eval, vaaler_weight, VaalerParams, VaalerValue};

/// Multipliers that stand in for the unspecified implied constants when an
/// exact value is checked against a `≪` bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConstants {
    /// Linear sums.
    pub linear: f64,
    /// `G_c` against the general bound.
    pub general: f64,
    /// `G_c` against the bound for `z ≤ |q|²/8`.
    pub small_z: f64,
    /// Type I / type II error budgets.
    pub type_sums: f64,
}

impl Default for AuditConstants {
    fn default() -> Self {
        AuditConstants { linear: 16.0, general: 32.0, small_z: 32.0, type_sums: 32.0 }
    }
}
