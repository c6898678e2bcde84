use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bilinear::{check_budget, pair_estimate};
use super::TypeSumParams;
use crate::error::{Error, Result};
use crate::gint::{for_each_in_norm_window, norm_floor, norm_window_points, verify_convergent_denominator, ComplexHP, GaussInt, PhaseMap};

/// Both sides of the type I and type II relations for `a ≡ b ≡ 1`:
/// `lhs` counts pairs with `mn ∈ A`, `main = 4δ²·#{mn ∈ B}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSumReport {
    pub constant: String,
    pub q: GaussInt,
    pub x1: f64,
    pub x2: f64,
    pub m_bound: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// `[δ⁻¹x^(3ε)]`
    pub j: u64,
    pub type1_lhs: u64,
    pub type1_pairs: u64,
    pub type1_main: f64,
    /// `δ²x^(1−ε) + x^(5/6+8ε)`
    pub type1_budget: f64,
    pub type1_ratio: f64,
    pub type2_lhs: u64,
    pub type2_pairs: u64,
    pub type2_main: f64,
    /// `δ²x^(1−ε) + x^(11/12+8ε)`
    pub type2_budget: f64,
    pub type2_ratio: f64,
    pub audit_constant: f64,
    pub ok: bool,
}

/// `(#{n : mn ∈ A}, #{n : mn ∈ B})` summed over `m` in `(m_lo, m_hi]`.
fn pair_counts(pm: &PhaseMap, params: &TypeSumParams, m_lo: u128, m_hi: u128) -> (u64, u64) {
    let (x1, x2) = (norm_floor(params.x1), norm_floor(params.x2));
    norm_window_points(m_lo, m_hi)
        .par_iter()
        .map(|&m| {
            let nm = m.norm();
            let (mut in_a, mut in_b) = (0u64, 0u64);
            for_each_in_norm_window(x1 / nm, x2 / nm, |n| {
                let k = m * n;
                if params.sector.contains_angle(k) {
                    in_b += 1;
                    in_a += pm.within_sup(k, params.delta) as u64;
                }
            });
            (in_a, in_b)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Evaluates the type I relation over `norm(m) ≤ M` and the type II relation
/// over `x^α < norm(m) ≤ x^(α+β)` at the parameters tied to `q`
/// (see [`TypeSumParams::for_convergent`]); `x₁` and the angles are free.
pub fn type_sum_report(
    c: &ComplexHP,
    q: GaussInt,
    params: &TypeSumParams,
    epsilon: f64,
    audit_constant: f64,
) -> Result<TypeSumReport> {
    params.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0 / 12.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1/12), got {epsilon}")));
    }
    verify_convergent_denominator(c, q)?;
    let tied = TypeSumParams::for_convergent(q, params.delta)?;
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    if !(same(params.x2, tied.x2) && same(params.m_bound, tied.m_bound) && same(params.alpha, tied.alpha) && same(params.beta, tied.beta)) {
        return Err(Error::Precondition(format!(
            "type sums need x₂ = norm(q)⁶ = {}, M = x₂^(2/3) = {}, α = 1/3, β = 1/2",
            tied.x2, tied.m_bound
        )));
    }
    let m1 = norm_floor(params.m_bound);
    let (lo2, hi2) = params.type2_range();
    check_budget(pair_estimate(0, m1, params) + pair_estimate(lo2, hi2, params), 1, params.term_budget)?;

    let pm = PhaseMap::new(c);
    let (type1_lhs, type1_pairs) = pair_counts(&pm, params, 0, m1);
    let (type2_lhs, type2_pairs) = pair_counts(&pm, params, lo2, hi2);
    let x = params.x2;
    let d2 = params.delta * params.delta;
    let type1_main = 4.0 * d2 * type1_pairs as f64;
    let type2_main = 4.0 * d2 * type2_pairs as f64;
    let type1_budget = d2 * x.powf(1.0 - epsilon) + x.powf(5.0 / 6.0 + 8.0 * epsilon);
    let type2_budget = d2 * x.powf(1.0 - epsilon) + x.powf(11.0 / 12.0 + 8.0 * epsilon);
    let type1_ratio = (type1_lhs as f64 - type1_main).abs() / type1_budget;
    let type2_ratio = (type2_lhs as f64 - type2_main).abs() / type2_budget;
    Ok(TypeSumReport {
        constant: c.to_string(),
        q,
        x1: params.x1,
        x2: x,
        m_bound: params.m_bound,
        delta: params.delta,
        epsilon,
        j: (x.powf(3.0 * epsilon) / params.delta).floor() as u64,
        type1_lhs,
        type1_pairs,
        type1_main,
        type1_budget,
        type1_ratio,
        type2_lhs,
        type2_pairs,
        type2_main,
        type2_budget,
        type2_ratio,
        audit_constant,
        ok: type1_ratio <= audit_constant && type2_ratio <= audit_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::{Preset, DEFAULT_PREC};

    fn sqrt2i() -> ComplexHP {
        ComplexHP::preset(Preset::Sqrt2I, DEFAULT_PREC)
    }

    #[test]
    fn saturation_makes_both_sides_equal() {
        let q = GaussInt::new(0, -2);
        let p = TypeSumParams::for_convergent(q, 0.5).unwrap();
        let r = type_sum_report(&sqrt2i(), q, &p, 0.01, 32.0).unwrap();
        assert_eq!(r.type1_lhs as f64, r.type1_main);
        assert_eq!(r.type2_lhs as f64, r.type2_main);
        assert_eq!((r.type1_ratio, r.type2_ratio), (0.0, 0.0));
        assert_eq!(r.x2, 4096.0);
    }

    #[test]
    fn first_convergent_within_budget() {
        let q = GaussInt::new(0, -2);
        let p = TypeSumParams::for_convergent(q, 0.3).unwrap();
        let r = type_sum_report(&sqrt2i(), q, &p, 0.01, 32.0).unwrap();
        assert!(r.ok, "{r:?}");
        assert!(r.type1_lhs > 0 && r.type2_lhs > 0);
    }

    #[test]
    fn pair_counts_match_divisor_counts() {
        // #{(m, n) : norm(m) ≤ M, mn ∈ B} = Σ_{k ∈ B} #{m | k : norm(m) ≤ M}
        let q = GaussInt::new(0, -2);
        let p = TypeSumParams::for_convergent(q, 0.5).unwrap().with_window(100.0, 4096.0).with_angles(-0.4, 1.3);
        let r = type_sum_report(&sqrt2i(), q, &p, 0.01, 32.0).unwrap();
        let divisors: Vec<GaussInt> = norm_window_points(0, 256);
        let mut want = 0u64;
        for k in norm_window_points(100, 4096) {
            if p.sector.contains_angle(k) {
                want += divisors.iter().filter(|m| m.divides(k)).count() as u64;
            }
        }
        assert_eq!(r.type1_pairs, want);
    }

    #[test]
    fn empty_window_and_rejections() {
        let q = GaussInt::new(0, -2);
        let p = TypeSumParams::for_convergent(q, 0.3).unwrap().with_window(4096.0, 4096.0);
        let r = type_sum_report(&sqrt2i(), q, &p, 0.01, 32.0).unwrap();
        assert_eq!((r.type1_lhs, r.type1_main, r.type2_lhs, r.type2_main), (0, 0.0, 0, 0.0));
        let wrong = TypeSumParams::new(0.0, 4000.0, 256.0, 1.0, 0.5, 0.3).unwrap();
        assert!(type_sum_report(&sqrt2i(), q, &wrong, 0.01, 32.0).is_err());
        assert!(type_sum_report(&sqrt2i(), GaussInt::new(3, 0), &p, 0.01, 32.0).is_err());
    }
}
