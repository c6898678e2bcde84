use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trigonometric degree `J` of Vaaler's polynomial, plus the two truncations
/// `J₁ = [N^ε|d₂|/μ]`, `J₂ = [N^ε/μ]` used by the sieve-error sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VaalerParams {
    pub j: u32,
    pub j1: u64,
    pub j2: u64,
}

impl VaalerParams {
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::Precondition("Vaaler degree J must be at least 1".into()));
        }
        Ok(VaalerParams { j, j1: j as u64, j2: j as u64 })
    }

    /// Smallest `J` with `J ≥ 1/δ`.
    pub fn for_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Precondition(format!("delta must lie in (0, 1/2], got {delta}")));
        }
        let j = (1.0 / delta).ceil();
        if j > u32::MAX as f64 {
            return Err(Error::Precondition(format!("J = {j} is too large")));
        }
        VaalerParams::new(j as u32)
    }

    /// Fills `J₁, J₂` from the sieve-error scale `N`, `ε`, `|d₂|` and `μ`.
    pub fn with_truncations(self, n: f64, epsilon: f64, d2_abs: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && n >= 1.0 && d2_abs >= 1.0) {
            return Err(Error::Precondition(format!("need μ > 0, N ≥ 1, |d₂| ≥ 1, got μ = {mu}, N = {n}, |d₂| = {d2_abs}")));
        }
        let ne = n.powf(epsilon);
        let j1 = (ne * d2_abs / mu).floor().max(1.0) as u64;
        let j2 = (ne / mu).floor().max(1.0) as u64;
        Ok(VaalerParams { j1, j2, ..self })
    }

    /// Whether `J ≥ 1/δ`.
    pub fn admits(&self, delta: f64) -> bool {
        self.j as f64 * delta >= 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaalerValue {
    pub psi: f64,
    pub psi_star: f64,
    pub sigma: f64,
}

/// Sawtooth `ψ(x) = x − ⌊x⌋ − 1/2`.
pub fn sawtooth(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// `W(t) = πt(1−|t|)cot(πt) + |t|` for `0 < |t| < 1`.
pub fn vaaler_weight(t: f64) -> f64 {
    let a = t.abs();
    PI * t * (1.0 - a) / (PI * t).tan() + a
}

/// `ψ*(x) = −Σ_{j=1}^{J} W(j/(J+1)) sin(2πjx)/(πj)` and the Fejér envelope
/// `σ(x) = (1 + 2Σ_{j=1}^{J} (1 − j/(J+1)) cos 2πjx)/(2J+2)`.
pub fn vaaler_eval(params: &VaalerParams, x: f64) -> VaalerValue {
    let j_max = params.j as u64;
    let jp1 = (j_max + 1) as f64;
    let frac = x - x.floor();
    let mut psi_star = 0.0;
    let mut fejer = 1.0;
    for j in 1..=j_max {
        let jf = j as f64;
        // reduce jx mod 1 before scaling by 2π
        let phase = (jf * frac).fract();
        let (s, c) = (2.0 * PI * phase).sin_cos();
        psi_star -= vaaler_weight(jf / jp1) * s / (PI * jf);
        fejer += 2.0 * (1.0 - jf / jp1) * c;
    }
    VaalerValue { psi: sawtooth(x), psi_star, sigma: fejer / (2.0 * jp1) }
}
