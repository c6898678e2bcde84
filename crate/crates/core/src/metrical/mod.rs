//! Simultaneous approximation counts `F_N(α)`, the comparison function `G_N`,
//! a Monte-Carlo check of the integral inequality, and the sieve-error
//! quantities `T_P`, `E_P` and two-prime counts over the `μ`-window.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dioph::omega;
use crate::error::{Error, Result};
use crate::gint::{
    cmp_int_sq, count_norm_window, for_each_in_norm_window, nearest_and_dist, norm_floor, ComplexHP, GaussInt,
    PhaseMap,
};
use crate::gsieve::{lattice_disc, primes_in_disc, PrimeTable, SectorAnnulus};

/// Largest lattice enumeration accepted by the window counts.
pub const WINDOW_BUDGET: f64 = 2e9;

/// Setting of `F_N`: constant `c`, exponent `ε` (threshold `η = |p|^(ε−1/12)`),
/// radius bound `N`, annulus `0 < A < B`, and the constant `C` of `G_N`.
#[derive(Clone, Debug)]
pub struct MetricalParams {
    pub c: ComplexHP,
    pub epsilon: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub c_const: f64,
}

impl MetricalParams {
    pub fn new(c: ComplexHP, epsilon: f64, n: f64, a: f64, b: f64, c_const: f64) -> Result<Self> {
        let p = MetricalParams { c, epsilon, n, a, b, c_const };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 12.0) {
            return Err(Error::Precondition(format!("epsilon must lie in (0, 1/12), got {}", self.epsilon)));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(Error::Precondition(format!("N must be finite and non-negative, got {}", self.n)));
        }
        if !(self.a > 0.0 && self.a < self.b && self.b.is_finite()) {
            return Err(Error::Precondition(format!("need 0 < A < B, got A = {}, B = {}", self.a, self.b)));
        }
        if !(self.c_const > 0.0 && self.c_const.is_finite()) {
            return Err(Error::Precondition(format!("C must be positive, got {}", self.c_const)));
        }
        Ok(())
    }

    pub fn with_n(&self, n: f64) -> Self {
        MetricalParams { n, c: self.c.clone(), ..*self }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        MetricalParams { epsilon, c: self.c.clone(), ..*self }
    }

    /// `η(p) = |p|^(ε−1/12)`.
    pub fn eta(&self, p: GaussInt) -> f64 {
        (p.norm() as f64).powf((self.epsilon - 1.0 / 12.0) / 2.0)
    }

    /// Table norm needed for `count_f_n` at `|α| ≤ alpha_abs`.
    pub fn needed_norm(&self, alpha_abs: f64) -> f64 {
        let reach = self.n * abs_f64(&self.c).max(1.0) * alpha_abs + 1.0;
        (reach * reach).max(self.n * self.n)
    }

    /// `c ∈ Q(i)` as far as the constant's origin tells.
    pub fn degenerate(&self) -> bool {
        self.c.known_rational() == Some(true)
    }
}

fn abs_f64(z: &ComplexHP) -> f64 {
    let (x, y) = z.to_f64();
    x.hypot(y)
}

/// Number of triples `(p, q, r)` with `p, r` prime, `|p| ≤ N`,
/// `|pα − r| ≤ η(p)` and `|pcα − q| ≤ η(p)`.
pub fn count_f_n(table: &PrimeTable, params: &MetricalParams, alpha: &ComplexHP) -> Result<u64> {
    params.validate()?;
    table.check_norm(params.needed_norm(abs_f64(alpha)))?;
    let ca = params.c.mul(alpha);
    let per_p: Vec<u64> = table
        .radial_slice(&SectorAnnulus::disc(params.n))
        .par_iter()
        .map(|e| {
            let eta = params.eta(e.prime);
            let r = primes_in_disc(table, &alpha.mul_gauss(e.prime), eta)?.len() as u64;
            if r == 0 {
                return Ok(0);
            }
            Ok(r * lattice_disc(&ca.mul_gauss(e.prime), eta).len() as u64)
        })
        .collect::<Result<_>>()?;
    Ok(per_p.into_iter().sum())
}

/// `G_N(A, B) = C·(A/B)·N^(5/3+4ε)/log²N`.
pub fn g_n_value(params: &MetricalParams) -> Result<f64> {
    params.validate()?;
    if params.n < 2.0 {
        return Err(Error::Precondition(format!("G_N needs N ≥ 2, got {}", params.n)));
    }
    let n = params.n;
    Ok(params.c_const * (params.a / params.b) * n.powf(5.0 / 3.0 + 4.0 * params.epsilon) / n.ln().powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    /// Estimate of `∫∫ F_N(Re^{iθ}) dR dθ` over the sector.
    pub integral_estimate: f64,
    pub stderr: f64,
    /// `(γ₂−γ₁)(b²−a²)·G_N(A, B)`
    pub rhs: f64,
    pub samples: u64,
    pub seed: u64,
    pub degenerate: bool,
}

/// Sample `i` of the Monte-Carlo run: `(R, θ)` uniform on the rectangle
/// `[r_min, r_max) × [θ_min, θ_max)`, drawn from stream `i` of `seed`.
pub fn sample_point(seed: u64, i: u64, sector: &SectorAnnulus) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    (sector.r_min + u * (sector.r_max - sector.r_min), sector.theta_min + v * sector.width())
}

/// Monte-Carlo estimate of the `dR dθ` integral of `F_N` over `sector`,
/// reported next to the right-hand side of the lower bound.
pub fn monte_carlo_theo_i(
    table: &PrimeTable,
    params: &MetricalParams,
    sector: &SectorAnnulus,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    params.validate()?;
    sector.validate()?;
    if samples == 0 {
        return Err(Error::Precondition("samples must be positive".into()));
    }
    if !(sector.r_min >= params.a && sector.r_max <= params.b) {
        return Err(Error::Precondition(format!(
            "sector radii ({}, {}] must lie within [A, B] = [{}, {}]",
            sector.r_min, sector.r_max, params.a, params.b
        )));
    }
    table.check_norm(params.needed_norm(sector.r_max))?;
    let prec = params.c.prec();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (r, t) = sample_point(seed, i, sector);
            let alpha = ComplexHP::from_f64(r * t.cos(), r * t.sin(), prec);
            count_f_n(table, params, &alpha).map(|v| v as f64)
        })
        .collect::<Result<_>>()?;
    let k = samples as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if samples > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    let area = sector.width() * (sector.r_max - sector.r_min);
    let g = g_n_value(params)?;
    Ok(MonteCarloReport {
        integral_estimate: area * mean,
        stderr: area * (var / k).sqrt(),
        rhs: sector.width() * (sector.r_max.powi(2) - sector.r_min.powi(2)) * g,
        samples,
        seed,
        degenerate: params.degenerate(),
    })
}

/// Dyadic scale `P`, moduli `d₁, d₂`, window width `μ` and the point `α`.
#[derive(Clone, Debug)]
pub struct SieveErrorParams {
    pub p: f64,
    pub d1: GaussInt,
    pub d2: GaussInt,
    pub mu: f64,
    /// Set when `μ = (P/2)^(ε−1/12)`.
    pub epsilon: Option<f64>,
    pub alpha: ComplexHP,
}

impl SieveErrorParams {
    /// `μ = (P/2)^(ε−1/12)`, which needs `P > 2^(1+1/(1/12−ε))`.
    pub fn from_epsilon(p: f64, epsilon: f64, d1: GaussInt, d2: GaussInt, alpha: ComplexHP) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0 / 12.0) {
            return Err(Error::Precondition(format!("epsilon must lie in (0, 1/12), got {epsilon}")));
        }
        let floor = 2f64.powf(1.0 + 1.0 / (1.0 / 12.0 - epsilon));
        if !(p > floor) {
            return Err(Error::Precondition(format!(
                "P = {p} must exceed 2^(1+1/(1/12−ε)) = {floor:.1} so that μ < 1/2"
            )));
        }
        let mu = (p / 2.0).powf(epsilon - 1.0 / 12.0);
        let sp = SieveErrorParams { p, d1, d2, mu, epsilon: Some(epsilon), alpha };
        sp.validate()?;
        Ok(sp)
    }

    /// Explicit `0 < μ < 1/2`, for scales below the range of `from_epsilon`.
    pub fn with_mu(p: f64, mu: f64, d1: GaussInt, d2: GaussInt, alpha: ComplexHP) -> Result<Self> {
        let sp = SieveErrorParams { p, d1, d2, mu, epsilon: None, alpha };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::Precondition(format!("P must be at least 2, got {}", self.p)));
        }
        if !(self.mu > 0.0 && self.mu < 0.5) {
            return Err(Error::Precondition(format!("μ must lie in (0, 1/2), got {}", self.mu)));
        }
        if self.d1.is_zero() || self.d2.is_zero() {
            return Err(Error::Precondition("d₁ and d₂ must be non-zero".into()));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: ComplexHP) -> Self {
        SieveErrorParams { alpha, ..self.clone() }
    }
}

/// Lattice points with `r_lo < |n| ≤ r_hi`, radii given through exact
/// comparisons `norm(n)·scale` against `P²`.
fn for_each_in_scaled_annulus(p: f64, scale: u128, mut f: impl FnMut(GaussInt)) -> Result<()> {
    let hi = norm_floor(p * p / scale as f64) + 1;
    let lo = norm_floor(p * p / (4 * scale) as f64).saturating_sub(1);
    let work = count_norm_window(lo, hi) as f64;
    if work > WINDOW_BUDGET {
        return Err(Error::Budget { work, budget: WINDOW_BUDGET });
    }
    for_each_in_norm_window(lo, hi, |n| {
        let s = n.norm() * scale;
        if cmp_int_sq(4 * s, p) == Ordering::Greater && cmp_int_sq(s, p) != Ordering::Greater {
            f(n)
        }
    });
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveError {
    pub t_p: u64,
    /// `12πP²μ⁴/(|d₁|²|d₂|²)`
    pub main: f64,
    pub e_p: f64,
    pub mu: f64,
    /// `α = 0` or `c ∈ Q(i)`.
    pub degenerate: bool,
}

/// `T_P(α; d₁, d₂)`: lattice `n` with `P/(2|d₁|) < |n| ≤ P/|d₁|`,
/// `‖nd₁α/d₂‖ ≤ μ/|d₂|` and `‖nd₁cα‖ ≤ μ`, with `E_P = T_P − main`.
pub fn t_p_and_e_p(sp: &SieveErrorParams, c: &ComplexHP) -> Result<SieveError> {
    sp.validate()?;
    let first = PhaseMap::new(&sp.alpha.mul_gauss(sp.d1).div_gauss(sp.d2).ok_or(Error::ZeroInput("d₂"))?);
    let second = PhaseMap::new(&c.mul(&sp.alpha).mul_gauss(sp.d1));
    let d2_abs = (sp.d2.norm() as f64).sqrt();
    let mut t_p = 0u64;
    for_each_in_scaled_annulus(sp.p, sp.d1.norm(), |n| {
        if first.within_sup(n, sp.mu / d2_abs) && second.within_sup(n, sp.mu) {
            t_p += 1;
        }
    })?;
    let main = 12.0 * PI * sp.p.powi(2) * sp.mu.powi(4) / (sp.d1.norm() as f64 * sp.d2.norm() as f64);
    Ok(SieveError {
        t_p,
        main,
        e_p: t_p as f64 - main,
        mu: sp.mu,
        degenerate: sp.alpha.is_zero() || c.known_rational() == Some(true),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPrimeCount {
    /// `n` with `P/2 < |n| ≤ P` and `max(‖nα‖, ‖ncα‖) ≤ μ`.
    pub window: u64,
    /// Members of the window with `n·f(nα)` a product of two primes.
    pub two_prime: u64,
}

/// Counts `n` in the `μ`-window for which `n·f(nα)` has exactly two Gaussian
/// prime factors with multiplicity; `f` rounds to the nearest lattice point.
pub fn a_p_two_prime_count(sp: &SieveErrorParams, c: &ComplexHP) -> Result<TwoPrimeCount> {
    sp.validate()?;
    let first = PhaseMap::new(&sp.alpha);
    let second = PhaseMap::new(&c.mul(&sp.alpha));
    let mut members = Vec::new();
    for_each_in_scaled_annulus(sp.p, 1, |n| {
        if first.within_sup(n, sp.mu) && second.within_sup(n, sp.mu) {
            members.push(n);
        }
    })?;
    let flags: Vec<bool> = members
        .par_iter()
        .map(|&n| {
            let f = nearest_and_dist(&sp.alpha.mul_gauss(n))?.nearest;
            if f.is_zero() {
                return Ok(false);
            }
            Ok(omega(n)? + omega(f)? == 2)
        })
        .collect::<Result<_>>()?;
    Ok(TwoPrimeCount { window: members.len() as u64, two_prime: flags.into_iter().filter(|&b| b).count() as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::DEFAULT_PREC;
    use proptest::prelude::*;
    use rand::Rng;
    use std::sync::OnceLock;

    fn table() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| PrimeTable::build(200_000).unwrap())
    }

    /// `k/1024` as a high-precision constant.
    fn dy(re: i64, im: i64) -> ComplexHP {
        ComplexHP::from_f64(re as f64 / 1024.0, im as f64 / 1024.0, DEFAULT_PREC)
    }

    fn params(c: ComplexHP, eps: f64, n: f64) -> MetricalParams {
        MetricalParams::new(c, eps, n, 1.0, 2.0, 1.0).unwrap()
    }

    /// Triple loop in exact integer arithmetic for dyadic `α = a/2¹⁰`, `c = c'/2¹⁰`:
    /// every table prime `r`, every lattice `q` in a box containing all `pcα`.
    fn naive_f_n(c: (i64, i64), alpha: (i64, i64), eps: f64, n: f64) -> u64 {
        let t = table();
        let primes: Vec<GaussInt> = t.primes().collect();
        let ca = (c.0 * alpha.0 - c.1 * alpha.1, c.0 * alpha.1 + c.1 * alpha.0);
        let q_reach = (n * ((ca.0.abs() + ca.1.abs()) as f64 / 1048576.0) + 2.0) as i64;
        let mut total = 0u64;
        for p in t.primes().filter(|p| (p.norm() as f64) <= n * n) {
            let eta2 = (p.norm() as f64).powf(eps - 1.0 / 12.0);
            let (pr, pi) = (p.re as i128, p.im as i128);
            // pα·2¹⁰ and pcα·2²⁰
            let pa = (pr * alpha.0 as i128 - pi * alpha.1 as i128, pr * alpha.1 as i128 + pi * alpha.0 as i128);
            let pca = (pr * ca.0 as i128 - pi * ca.1 as i128, pr * ca.1 as i128 + pi * ca.0 as i128);
            let rs = primes
                .iter()
                .filter(|r| {
                    let dx = pa.0 - ((r.re as i128) << 10);
                    let dy = pa.1 - ((r.im as i128) << 10);
                    ((dx * dx + dy * dy) as f64) <= eta2 * 1048576.0
                })
                .count() as u64;
            let mut qs = 0u64;
            for a in -q_reach..=q_reach {
                for b in -q_reach..=q_reach {
                    let dx = pca.0 - ((a as i128) << 20);
                    let dy = pca.1 - ((b as i128) << 20);
                    if ((dx * dx + dy * dy) as f64) <= eta2 * 1_099_511_627_776.0 {
                        qs += 1;
                    }
                }
            }
            total += rs * qs;
        }
        total
    }

    #[test]
    fn f_n_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut positive = 0;
        for _ in 0..6 {
            let c = (rng.gen_range(-1200..1200), rng.gen_range(-1200..1200));
            let a = (rng.gen_range(-1500..1500), rng.gen_range(-1500..1500));
            let eps = [0.01, 0.05, 0.08][rng.gen_range(0..3)];
            let n = rng.gen_range(10.0..60.0);
            let got = count_f_n(table(), &params(dy(c.0, c.1), eps, n), &dy(a.0, a.1)).unwrap();
            assert_eq!(got, naive_f_n(c, a, eps, n), "c = {c:?}, α = {a:?}, ε = {eps}, N = {n}");
            positive += (got > 0) as u32;
        }
        assert!(positive > 0);
    }

    #[test]
    fn f_n_degenerate_cases() {
        let c = ComplexHP::from_decimal("0.31", "0.17", DEFAULT_PREC).unwrap();
        let p = params(c, 0.01, 100.0);
        assert!(p.degenerate());
        assert_eq!(count_f_n(table(), &p, &ComplexHP::zero(DEFAULT_PREC)).unwrap(), 0);
        // α = r₀/p₀ and c = 1 put p₀α on the prime r₀ and p₀cα on a lattice point
        let (p0, r0) = (GaussInt::new(3, 2), GaussInt::new(5, 2));
        let alpha = ComplexHP::from_gauss(r0, DEFAULT_PREC).div_gauss(p0).unwrap();
        let p = params(ComplexHP::from_f64(1.0, 0.0, DEFAULT_PREC), 0.01, 4.0);
        assert!(count_f_n(table(), &p, &alpha).unwrap() >= 1);
        let far = ComplexHP::from_f64(900.0, 0.0, DEFAULT_PREC);
        assert!(matches!(count_f_n(table(), &p.with_n(100.0), &far), Err(Error::Coverage { .. })));
    }

    #[test]
    fn g_n_closed_forms() {
        let e = std::f64::consts::E;
        let p = MetricalParams::new(dy(1, 0), 0.02, e, 1.0, 1.5, 1.0).unwrap();
        let want = (1.0 / 1.5) * e.powf(5.0 / 3.0 + 0.08);
        assert!((g_n_value(&p).unwrap() - want).abs() < 1e-12 * want);
        let doubled = MetricalParams { c_const: 2.0, ..p.clone() };
        assert_eq!(g_n_value(&doubled).unwrap(), 2.0 * g_n_value(&p).unwrap());
        assert!(g_n_value(&p.with_n(1.5)).is_err());
        assert!(MetricalParams::new(dy(1, 0), 0.09, 10.0, 1.0, 2.0, 1.0).is_err());
        assert!(MetricalParams::new(dy(1, 0), 0.01, 10.0, 2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn monte_carlo_basics() {
        let c = ComplexHP::from_f64(0.7548776662466927, 0.4908978125, DEFAULT_PREC);
        let p = MetricalParams::new(c, 0.01, 40.0, 1.0, 2.0, 1.0).unwrap();
        let s = SectorAnnulus::new(1.0, 2.0, 0.0, 1.0).unwrap();
        assert!(monte_carlo_theo_i(table(), &p, &s, 0, 1).is_err());
        let a = monte_carlo_theo_i(table(), &p, &s, 24, 9).unwrap();
        let b = monte_carlo_theo_i(table(), &p, &s, 24, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.integral_estimate > 0.0 && a.stderr >= 0.0);
        assert!((a.rhs - 3.0 * g_n_value(&p).unwrap()).abs() < 1e-9 * a.rhs);
        // |pα| ≤ 0.1 and η < 1 keep every prime r out of reach
        let tiny = MetricalParams::new(p.c.clone(), 0.01, 2.0, 0.01, 0.05, 1.0).unwrap();
        let near = SectorAnnulus::new(0.01, 0.05, -PI, PI).unwrap();
        assert_eq!(monte_carlo_theo_i(table(), &tiny, &near, 8, 9).unwrap().integral_estimate, 0.0);
        let outside = SectorAnnulus::new(0.5, 2.0, 0.0, 1.0).unwrap();
        assert!(monte_carlo_theo_i(table(), &p, &outside, 8, 9).is_err());
    }

    /// `T_P` for `d₁ = d₂ = 1` and dyadic `α`, `c`, from integer residues.
    fn naive_t_p(c: (i64, i64), alpha: (i64, i64), p: f64, mu: f64) -> u64 {
        let ca = (c.0 * alpha.0 - c.1 * alpha.1, c.0 * alpha.1 + c.1 * alpha.0);
        let dist = |x: i128, bits: u32| {
            let m = 1i128 << bits;
            let r = x.rem_euclid(m);
            r.min(m - r) as f64 / m as f64
        };
        let r = p as i64 + 1;
        let mut count = 0;
        for a in -r..=r {
            for b in -r..=r {
                let nn = (a * a + b * b) as f64;
                if !(4.0 * nn > p * p && nn <= p * p) {
                    continue;
                }
                let (a, b) = (a as i128, b as i128);
                let na = (a * alpha.0 as i128 - b * alpha.1 as i128, a * alpha.1 as i128 + b * alpha.0 as i128);
                let nca = (a * ca.0 as i128 - b * ca.1 as i128, a * ca.1 as i128 + b * ca.0 as i128);
                if dist(na.0, 10).max(dist(na.1, 10)) <= mu && dist(nca.0, 20).max(dist(nca.1, 20)) <= mu {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn t_p_matches_residue_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let c = (rng.gen_range(-2048..2048), rng.gen_range(-2048..2048));
            let a = (rng.gen_range(-2048..2048), rng.gen_range(-2048..2048));
            let mu = rng.gen_range(0.2..0.45);
            let p = rng.gen_range(50.0..300.0);
            let one = GaussInt::new(1, 0);
            let sp = SieveErrorParams::with_mu(p, mu, one, one, dy(a.0, a.1)).unwrap();
            let r = t_p_and_e_p(&sp, &dy(c.0, c.1)).unwrap();
            assert_eq!(r.t_p, naive_t_p(c, a, p, mu), "c = {c:?}, α = {a:?}, P = {p}, μ = {mu}");
        }
    }

    #[test]
    fn t_p_general_moduli() {
        // scan n directly with the defining conditions in extended precision
        let (d1, d2) = (GaussInt::new(1, 1), GaussInt::new(2, -1));
        let alpha = ComplexHP::from_f64(0.3719, -0.8113, DEFAULT_PREC);
        let c = ComplexHP::from_f64(0.5772, 0.2113, DEFAULT_PREC);
        let sp = SieveErrorParams::with_mu(120.0, 0.4, d1, d2, alpha.clone()).unwrap();
        let got = t_p_and_e_p(&sp, &c).unwrap();
        let scaled = PhaseMap::new(&alpha.mul_gauss(d1).div_gauss(d2).unwrap());
        let both = PhaseMap::new(&c.mul(&alpha).mul_gauss(d1));
        let mut want = 0;
        for a in -100i64..=100 {
            for b in -100i64..=100 {
                let n = GaussInt::new(a, b);
                let r = ((n.norm() * d1.norm()) as f64).sqrt();
                if r > 60.0 && r <= 120.0 && scaled.sup_dist(n) <= 0.4 / 5f64.sqrt() && both.sup_dist(n) <= 0.4 {
                    want += 1;
                }
            }
        }
        assert_eq!(got.t_p, want);
        assert!((got.main - 12.0 * PI * 14400.0 * 0.4f64.powi(4) / 10.0).abs() < 1e-9);
    }

    #[test]
    fn t_p_degenerate_and_rejections() {
        let one = GaussInt::new(1, 0);
        let sp = SieveErrorParams::with_mu(40.0, 0.3, one, one, ComplexHP::zero(DEFAULT_PREC)).unwrap();
        let r = t_p_and_e_p(&sp, &dy(300, 100)).unwrap();
        assert!(r.degenerate);
        let annulus = (-40i64..=40)
            .flat_map(|a| (-40i64..=40).map(move |b| a * a + b * b))
            .filter(|&s| s > 400 && s <= 1600)
            .count() as u64;
        assert_eq!(r.t_p, annulus);
        assert_eq!(r.e_p, annulus as f64 - r.main);
        assert!(SieveErrorParams::with_mu(300.0, 0.5, one, one, dy(1, 1)).is_err());
        assert!(SieveErrorParams::with_mu(300.0, 0.3, GaussInt::new(0, 0), one, dy(1, 1)).is_err());
        // P = 300 lies below 2^(1+1/(1/12−ε)) for every ε
        assert!(SieveErrorParams::from_epsilon(300.0, 0.01, one, one, dy(1, 1)).is_err());
        let sp = SieveErrorParams::from_epsilon(40_000.0, 0.01, one, one, dy(1, 1)).unwrap();
        assert!(sp.mu < 0.5 && (sp.mu - 20_000f64.powf(0.01 - 1.0 / 12.0)).abs() < 1e-15);
    }

    #[test]
    fn e_p_has_no_systematic_bias() {
        let c = ComplexHP::from_f64(0.7071067811865476, 0.3183098861837907, DEFAULT_PREC);
        let one = GaussInt::new(1, 0);
        let values: Vec<f64> = (0..50)
            .map(|i| {
                let (r, t) = sample_point(2024, i, &SectorAnnulus::new(1.0, 2.0, -PI, PI).unwrap());
                let alpha = ComplexHP::from_f64(r * t.cos(), r * t.sin(), DEFAULT_PREC);
                let sp = SieveErrorParams::with_mu(150.0, 0.3, one, one, alpha).unwrap();
                t_p_and_e_p(&sp, &c).unwrap().e_p
            })
            .collect();
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        assert!(mean.abs() <= 3.0 * sd / k.sqrt(), "mean {mean}, sd {sd}");
    }

    /// Prime factors with multiplicity by dividing out table primes in norm order.
    fn trial_omega(g: GaussInt) -> u32 {
        let mut rest = g;
        let mut count = 0;
        for p in table().primes() {
            if p.norm() * p.norm() > rest.norm() {
                break;
            }
            while let Some(q) = rest.exact_div(p) {
                rest = q;
                count += 1;
            }
        }
        count + (!rest.is_unit()) as u32
    }

    #[test]
    fn two_prime_count_matches_trial_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let alpha = ComplexHP::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), DEFAULT_PREC);
            let c = ComplexHP::from_f64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), DEFAULT_PREC);
            let one = GaussInt::new(1, 0);
            let sp = SieveErrorParams::with_mu(200.0, 0.3, one, one, alpha.clone()).unwrap();
            let got = a_p_two_prime_count(&sp, &c).unwrap();
            let (pa, pca) = (PhaseMap::new(&alpha), PhaseMap::new(&c.mul(&alpha)));
            let (mut window, mut two) = (0, 0);
            for a in -200i64..=200 {
                for b in -200i64..=200 {
                    let n = GaussInt::new(a, b);
                    let s = n.norm() as f64;
                    if !(4.0 * s > 40_000.0 && s <= 40_000.0) || pa.sup_dist(n) > 0.3 || pca.sup_dist(n) > 0.3 {
                        continue;
                    }
                    window += 1;
                    let (x, y) = alpha.mul_gauss(n).to_f64();
                    let f = GaussInt::new(x.round() as i64, y.round() as i64);
                    if !f.is_zero() && trial_omega(n) + trial_omega(f) == 2 {
                        two += 1;
                    }
                }
            }
            assert_eq!(got, TwoPrimeCount { window, two_prime: two });
            assert!(got.two_prime <= got.window);
        }
    }

    #[test]
    fn two_prime_small_cases() {
        let one = GaussInt::new(1, 0);
        // α = 1: f(n) = n, so n·f(n) = n² is a two-prime product exactly for prime n
        let sp = SieveErrorParams::with_mu(10.0, 0.1, one, one, dy(1024, 0)).unwrap();
        let got = a_p_two_prime_count(&sp, &dy(1024, 0)).unwrap();
        let primes = table().primes().filter(|p| p.norm() > 25 && p.norm() <= 100).count() as u64;
        assert_eq!(got.two_prime, primes);
        // α = 1/2 + i/2 puts n ≢ 0 mod 1+i at distance 1/2 > μ
        let sp = SieveErrorParams::with_mu(10.0, 0.1, one, one, dy(512, 512)).unwrap();
        // there the window is n = (1+i)m and n·f(nα) = n²/(1−i) has an odd number of prime factors
        let got = a_p_two_prime_count(&sp, &dy(1024, 0)).unwrap();
        assert_eq!(got.two_prime, 0);
        assert!(got.window > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn f_n_monotone(cr in -1.0f64..1.0, ci in -1.0f64..1.0, ar in -1.5f64..1.5, ai in -1.5f64..1.5,
                        n in 5.0f64..40.0, dn in 0.0f64..20.0, eps in 0.005f64..0.07, de in 0.0f64..0.01) {
            let c = ComplexHP::from_f64(cr, ci, DEFAULT_PREC);
            let alpha = ComplexHP::from_f64(ar, ai, DEFAULT_PREC);
            let base = params(c, eps, n);
            let f = count_f_n(table(), &base, &alpha).unwrap();
            prop_assert!(count_f_n(table(), &base.with_n(n + dn), &alpha).unwrap() >= f);
            prop_assert!(count_f_n(table(), &base.with_epsilon(eps + de), &alpha).unwrap() >= f);
        }
    }
}
