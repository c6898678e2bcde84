//! Exact evaluation of the type I sums `E₁, E₂, E₃` and the type II sums
//! `F₁, F₃`.
//!
//! `E₃`/`F₃` run over Gaussian frequencies `j` and use fixed-point phases of
//! `mnc` from [`PhaseMap`]; `E₁`, `E₂`, `F₁` enumerate their ranges with
//! box loops and take `Re`/`Im` of `c·mn` in extended precision, so the two
//! routes share no evaluation code.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::arith::isqrt;
use crate::gint::{count_norm_window, floor_pow, for_each_in_norm_window, norm_floor, ComplexHP, GaussInt, PhaseMap, Torus};
use crate::gsieve::SectorAnnulus;

/// Default cap on `pairs × frequencies` for one exact evaluation.
pub const DEFAULT_TERM_BUDGET: f64 = 1e9;

/// Norm window `(x₁, x₂]`, type I range `norm(m) ≤ M`, type II range
/// `x₂^α < norm(m) ≤ x₂^(α+β)`, frequency box `|Re j| ≤ H₁`, `|Im j| ≤ H₂`,
/// threshold `δ` and the angular window of `mn`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeSumParams {
    pub x1: f64,
    pub x2: f64,
    pub m_bound: f64,
    pub alpha: f64,
    pub beta: f64,
    pub h1: f64,
    pub h2: f64,
    pub delta: f64,
    /// Only the angles are used.
    pub sector: SectorAnnulus,
    pub term_budget: f64,
}

impl TypeSumParams {
    /// `α = 1/3`, `β = 1/2`, full circle.
    pub fn new(x1: f64, x2: f64, m_bound: f64, h1: f64, h2: f64, delta: f64) -> Result<Self> {
        let p = TypeSumParams {
            x1,
            x2,
            m_bound,
            alpha: 1.0 / 3.0,
            beta: 0.5,
            h1,
            h2,
            delta,
            sector: SectorAnnulus::disc(1.0),
            term_budget: DEFAULT_TERM_BUDGET,
        };
        p.validate()?;
        Ok(p)
    }

    /// The choices tied to an approximation denominator `q`:
    /// `x₂ = norm(q)⁶`, `M = x₂^(2/3) = norm(q)⁴`, `α = 1/3`, `β = 1/2`.
    pub fn for_convergent(q: GaussInt, delta: f64) -> Result<Self> {
        let n = q.norm();
        let x2 = n.checked_pow(6).ok_or(Error::Overflow("norm(q)⁶"))?;
        TypeSumParams::new(0.0, x2 as f64, n.pow(4) as f64, 1.0, 0.5, delta)
    }

    pub fn with_angles(self, theta_min: f64, theta_max: f64) -> Self {
        TypeSumParams { sector: SectorAnnulus { theta_min, theta_max, ..self.sector }, ..self }
    }

    pub fn with_frequencies(self, h1: f64, h2: f64) -> Self {
        TypeSumParams { h1, h2, ..self }
    }

    pub fn with_window(self, x1: f64, x2: f64) -> Self {
        TypeSumParams { x1, x2, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(msg));
        if !(self.x1 >= 0.0 && self.x1 <= self.x2 && self.x2 < 4.0e18) {
            return bad(format!("need 0 ≤ x₁ ≤ x₂, got ({}, {}]", self.x1, self.x2));
        }
        if !(self.beta > 0.0 && self.beta <= 0.5) || !(self.alpha > 0.0) {
            return bad(format!("need α > 0 and 0 < β ≤ 1/2, got α = {}, β = {}", self.alpha, self.beta));
        }
        if !(self.m_bound.is_finite() && self.m_bound > self.x2.max(1.0).powf(self.alpha)) {
            return bad(format!("need M > x₂^α, got M = {}", self.m_bound));
        }
        if !(self.h1 >= 1.0 && self.h2 >= 0.5 && self.h1.is_finite() && self.h2.is_finite()) {
            return bad(format!("need H₁ ≥ 1 and H₂ ≥ 1/2, got H₁ = {}, H₂ = {}", self.h1, self.h2));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return bad(format!("delta must lie in (0, 1/2], got {}", self.delta));
        }
        if !(self.term_budget > 0.0) {
            return bad("term budget must be positive".into());
        }
        self.sector.with_radii(0.0, 1.0).validate()
    }

    fn window(&self) -> (u128, u128) {
        (norm_floor(self.x1), norm_floor(self.x2))
    }

    /// Type II range of `norm(m)` as `(lo, hi]`.
    pub fn type2_range(&self) -> (u128, u128) {
        let x = norm_floor(self.x2);
        (floor_pow(x, self.alpha), floor_pow(x, self.alpha + self.beta))
    }

    fn in_angles(&self, k: GaussInt) -> bool {
        self.sector.contains_angle(k)
    }
}

/// Gaussian `j ≠ 0` with `|Re j| ≤ H₁`, `|Im j| ≤ H₂`, ordered by `Re j`
/// then `Im j`.
pub fn frequencies(h1: f64, h2: f64) -> Vec<GaussInt> {
    let (a, b) = (h1.floor() as i64, h2.floor() as i64);
    (-a..=a)
        .flat_map(|j1| (-b..=b).map(move |j2| GaussInt::new(j1, j2)))
        .filter(|j| !j.is_zero())
        .collect()
}

/// Coefficient sequences for the bilinear sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Coefficients {
    One,
    /// Independent `±1` per lattice point, from a seeded stream cipher.
    Signs { seed: u64 },
}

impl Coefficients {
    pub fn value(&self, n: GaussInt) -> Complex64 {
        match *self {
            Coefficients::One => Complex64::new(1.0, 0.0),
            Coefficients::Signs { seed } => Complex64::new(random_sign(seed, n), 0.0),
        }
    }
}

/// `±1` determined by `(seed, n)` alone.
pub fn random_sign(seed: u64, n: GaussInt) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n.re as u32 as u64) << 32) | n.im as u32 as u64);
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_budget(pairs: u64, freqs: usize, budget: f64) -> Result<()> {
    let work = pairs as f64 * freqs as f64;
    if work > budget {
        return Err(Error::Budget { work, budget });
    }
    Ok(())
}

/// Upper bound for the number of `(m, n)` pairs: angles are ignored.
pub(crate) fn pair_estimate(m_lo: u128, m_hi: u128, params: &TypeSumParams) -> u64 {
    let (x1, x2) = params.window();
    let mut total = 0u64;
    for_each_in_norm_window(m_lo, m_hi, |m| {
        let nm = m.norm();
        total += count_norm_window(x1 / nm, x2 / nm);
    });
    total
}

/// Phases `(Re, Im)` of `mnc mod 1` grouped by `m`, with weights.
struct PhaseGroups {
    starts: Vec<usize>,
    re: Vec<Torus>,
    im: Vec<Torus>,
    weight: Vec<Complex64>,
}

impl PhaseGroups {
    /// `Σ_groups |Σ_k w_k e(Im(j·mnc))|`.
    fn abs_sum(&self, j: GaussInt) -> f64 {
        let mut total = 0.0;
        for w in self.starts.windows(2) {
            let mut s = Complex64::new(0.0, 0.0);
            for k in w[0]..w[1] {
                // Im(jz) = Re j·Im z + Im j·Re z
                let t = self.im[k].mul_int(j.re).add(self.re[k].mul_int(j.im));
                s += self.weight[k] * t.e();
            }
            total += s.norm();
        }
        total
    }

    fn total(&self, freqs: &[GaussInt]) -> f64 {
        let per_j: Vec<f64> = freqs.par_iter().map(|&j| self.abs_sum(j)).collect();
        per_j.iter().sum()
    }
}

fn check_coefficient(v: Complex64, what: &str, n: GaussInt) -> Result<Complex64> {
    if !(v.norm() <= 1.0 + 1e-12) {
        return Err(Error::Precondition(format!("coefficient {what}({n}) = {v} has modulus above 1")));
    }
    Ok(v)
}

/// `E₃(H₁, H₂)`: over `j` in the frequency box and `0 < norm(m) ≤ M`, the
/// absolute inner sums over `n` with `x₁ < norm(mn) ≤ x₂`, `ω₁ < arg(mn) ≤ ω₂`
/// of `e(Im(jmnc))`.
pub fn e3_exact(c: &ComplexHP, params: &TypeSumParams) -> Result<f64> {
    params.validate()?;
    let freqs = frequencies(params.h1, params.h2);
    let m_hi = norm_floor(params.m_bound);
    check_budget(pair_estimate(0, m_hi, params), freqs.len(), params.term_budget)?;
    let pm = PhaseMap::new(c);
    let (x1, x2) = params.window();
    let mut g = PhaseGroups { starts: vec![0], re: Vec::new(), im: Vec::new(), weight: Vec::new() };
    for_each_in_norm_window(0, m_hi, |m| {
        let nm = m.norm();
        for_each_in_norm_window(x1 / nm, x2 / nm, |n| {
            let k = m * n;
            if params.in_angles(k) {
                let (re, im) = pm.phases(k);
                g.re.push(re);
                g.im.push(im);
                g.weight.push(Complex64::new(1.0, 0.0));
            }
        });
        g.starts.push(g.re.len());
    });
    Ok(g.total(&freqs))
}

/// `F₃(H₁, H₂)`: over `j` in the frequency box, `|Σ a_m b_n e(Im(jmnc))|`
/// with `x₂^α < norm(m) ≤ x₂^(α+β)` and `mn ∈ A`, where `A` is the norm
/// window and angles with `‖mnc‖ ≤ δ`.
pub fn f3_exact<A, B>(c: &ComplexHP, params: &TypeSumParams, a: A, b: B) -> Result<f64>
where
    A: Fn(GaussInt) -> Complex64,
    B: Fn(GaussInt) -> Complex64,
{
    params.validate()?;
    let freqs = frequencies(params.h1, params.h2);
    let (m_lo, m_hi) = params.type2_range();
    check_budget(pair_estimate(m_lo, m_hi, params), freqs.len(), params.term_budget)?;
    let pm = PhaseMap::new(c);
    let (x1, x2) = params.window();
    let mut members = Vec::new();
    for_each_in_norm_window(m_lo, m_hi, |m| {
        let nm = m.norm();
        for_each_in_norm_window(x1 / nm, x2 / nm, |n| {
            let k = m * n;
            if params.in_angles(k) && pm.within_sup(k, params.delta) {
                members.push((m, n));
            }
        });
    });
    let mut g = PhaseGroups { starts: vec![0], re: Vec::new(), im: Vec::new(), weight: Vec::new() };
    for (m, n) in members {
        let w = check_coefficient(a(m), "a", m)? * check_coefficient(b(n), "b", n)?;
        let (re, im) = pm.phases(m * n);
        g.re.push(re);
        g.im.push(im);
        g.weight.push(w);
    }
    g.starts.push(g.re.len());
    Ok(g.total(&freqs))
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

/// Fractional part of `Re(c·k)` or `Im(c·k)` at the constant's precision.
fn hp_fract(c: &ComplexHP, k: GaussInt, part: Part) -> f64 {
    let z = c.mul_gauss(k);
    let x = match part {
        Part::Re => z.re(),
        Part::Im => z.im(),
    };
    let fl = Float::with_val(x.prec(), x.floor_ref());
    Float::with_val(x.prec(), x - &fl).to_f64()
}

/// `‖c·k‖ ≤ delta` with both distances compared in extended precision.
fn hp_within_sup(c: &ComplexHP, k: GaussInt, delta: f64) -> bool {
    let z = c.mul_gauss(k);
    let close = |x: &Float| {
        let r = Float::with_val(x.prec(), x.round_ref());
        Float::with_val(x.prec(), x - &r).abs() <= delta
    };
    close(z.re()) && close(z.im())
}

/// `Σ_{1≤|j|≤H} Σ_groups |Σ_k w_k e(j·t_k)|`, sequential over `j`.
fn hp_total(groups: &[Vec<(Complex64, f64)>], h: i64) -> f64 {
    let js: Vec<i64> = (-h..=h).filter(|&j| j != 0).collect();
    let per_j: Vec<f64> = js
        .par_iter()
        .map(|&j| {
            groups
                .iter()
                .map(|grp| {
                    grp.iter()
                        .map(|&(w, t)| w * Complex64::from_polar(1.0, TAU * (j as f64 * t).fract()))
                        .sum::<Complex64>()
                        .norm()
                })
                .sum::<f64>()
        })
        .collect();
    per_j.iter().sum()
}

/// Lattice points `g` with `lo < norm(g) ≤ hi`, by scanning a square.
fn box_points(lo: u128, hi: u128) -> impl Iterator<Item = GaussInt> {
    let r = isqrt(hi) as i64;
    (-r..=r)
        .flat_map(move |a| (-r..=r).map(move |b| GaussInt::new(a, b)))
        .filter(move |g| g.norm() > lo && g.norm() <= hi)
}

fn hp_type1(c: &ComplexHP, params: &TypeSumParams, part: Part) -> Result<f64> {
    params.validate()?;
    let h = params.h1.floor() as i64;
    let m_hi = norm_floor(params.m_bound);
    check_budget(pair_estimate(0, m_hi, params), 2 * h as usize, params.term_budget)?;
    let (x1, x2) = params.window();
    let one = Complex64::new(1.0, 0.0);
    let groups: Vec<Vec<(Complex64, f64)>> = box_points(0, m_hi)
        .map(|m| {
            box_points(x1 / m.norm(), x2 / m.norm())
                .filter(|&n| params.in_angles(m * n))
                .map(|n| (one, hp_fract(c, m * n, part)))
                .collect()
        })
        .collect();
    Ok(hp_total(&groups, h))
}

/// `E₁(H) = Σ_{1≤|j|≤H} Σ_{norm(m)≤M} |Σ_n e(j·Im(mnc))|` with `H = H₁`.
pub fn e1_exact(c: &ComplexHP, params: &TypeSumParams) -> Result<f64> {
    hp_type1(c, params, Part::Im)
}

/// `E₂(H)`: as [`e1_exact`] with `Re(mnc)` in the phase.
pub fn e2_exact(c: &ComplexHP, params: &TypeSumParams) -> Result<f64> {
    hp_type1(c, params, Part::Re)
}

/// `F₁(H) = Σ_{1≤|j|≤H} |Σ_{m,n} a_m b_n e(j·Im(mnc))|` over the type II
/// range with `mn ∈ A`, `H = H₁`.
pub fn f1_exact<A, B>(c: &ComplexHP, params: &TypeSumParams, a: A, b: B) -> Result<f64>
where
    A: Fn(GaussInt) -> Complex64,
    B: Fn(GaussInt) -> Complex64,
{
    params.validate()?;
    let h = params.h1.floor() as i64;
    let (m_lo, m_hi) = params.type2_range();
    check_budget(pair_estimate(m_lo, m_hi, params), 2 * h as usize, params.term_budget)?;
    let (x1, x2) = params.window();
    let mut terms = Vec::new();
    for m in box_points(m_lo, m_hi) {
        let am = check_coefficient(a(m), "a", m)?;
        for n in box_points(x1 / m.norm(), x2 / m.norm()) {
            let k = m * n;
            if !params.in_angles(k) {
                continue;
            }
            if hp_within_sup(c, k, params.delta) {
                terms.push((am * check_coefficient(b(n), "b", n)?, hp_fract(c, k, Part::Im)));
            }
        }
    }
    Ok(hp_total(&[terms], h))
}

/// Angles of the window rotated by a quarter turn, as used by the identity
/// `E₂(ω₁, ω₂) = E₁(ω₁ + π/2, ω₂ + π/2)`.
pub fn quarter_turn(params: &TypeSumParams) -> TypeSumParams {
    params.with_angles(params.sector.theta_min + PI / 2.0, params.sector.theta_max + PI / 2.0)
}
