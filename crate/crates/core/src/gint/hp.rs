//! Extended-precision complex numbers and exact phase arithmetic modulo 1.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};

use super::int::GaussInt;
use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Named irrational (and a few rational) constants, computed at any precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `i`
    I,
    /// `i·√2`
    Sqrt2I,
    /// `√2`
    Sqrt2,
    /// `(1 + √5) / 2`
    Golden,
    /// `π + e·i`
    PiE,
    /// `√2 + √3·i`
    Sqrt2Sqrt3,
    /// `√3 + √7·i`
    Sqrt3Sqrt7,
    /// `∛2 + √5·i`
    Cbrt2Sqrt5,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::I,
        Preset::Sqrt2I,
        Preset::Sqrt2,
        Preset::Golden,
        Preset::PiE,
        Preset::Sqrt2Sqrt3,
        Preset::Sqrt3Sqrt7,
        Preset::Cbrt2Sqrt5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::I => "i",
            Preset::Sqrt2I => "sqrt2i",
            Preset::Sqrt2 => "sqrt2",
            Preset::Golden => "golden",
            Preset::PiE => "pi+ei",
            Preset::Sqrt2Sqrt3 => "sqrt2+sqrt3i",
            Preset::Sqrt3Sqrt7 => "sqrt3+sqrt7i",
            Preset::Cbrt2Sqrt5 => "cbrt2+sqrt5i",
        }
    }

    pub fn from_name(s: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn is_rational(self) -> bool {
        matches!(self, Preset::I)
    }

    fn eval(self, prec: u32) -> (Float, Float) {
        let sqrt = |k: u32| Float::with_val(prec, k).sqrt();
        let zero = Float::new(prec);
        match self {
            Preset::I => (zero, Float::with_val(prec, 1)),
            Preset::Sqrt2I => (zero, sqrt(2)),
            Preset::Sqrt2 => (sqrt(2), zero),
            Preset::Golden => ((sqrt(5) + 1u32) / 2u32, zero),
            Preset::PiE => (
                Float::with_val(prec, Constant::Pi),
                Float::with_val(prec, 1).exp(),
            ),
            Preset::Sqrt2Sqrt3 => (sqrt(2), sqrt(3)),
            Preset::Sqrt3Sqrt7 => (sqrt(3), sqrt(7)),
            Preset::Cbrt2Sqrt5 => (Float::with_val(prec, 2).cbrt(), sqrt(5)),
        }
    }
}

/// Where a value came from; lets it be re-derived at a higher precision.
#[derive(Clone, Debug, PartialEq)]
enum Origin {
    /// Exactly representable at the stored precision (integers, `f64` inputs).
    Exact,
    /// Finite decimal strings; an exact element of `Q(i)`.
    Decimal(String, String),
    Preset(Preset),
    /// Result of rounded arithmetic.
    Rounded,
}

/// A complex number with real and imaginary parts held as MPFR floats at a
/// common precision. Arithmetic is correctly rounded per component operation.
#[derive(Clone, Debug)]
pub struct ComplexHP {
    re: Float,
    im: Float,
    origin: Origin,
}

impl PartialEq for ComplexHP {
    fn eq(&self, o: &Self) -> bool {
        self.re == o.re && self.im == o.im
    }
}

impl ComplexHP {
    pub fn zero(prec: u32) -> Self {
        ComplexHP { re: Float::new(prec), im: Float::new(prec), origin: Origin::Exact }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexHP {
            re: Float::with_val(prec.max(53), re),
            im: Float::with_val(prec.max(53), im),
            origin: Origin::Exact,
        }
    }

    pub fn from_gauss(g: GaussInt, prec: u32) -> Self {
        ComplexHP {
            re: Float::with_val(prec.max(64), g.re),
            im: Float::with_val(prec.max(64), g.im),
            origin: Origin::Exact,
        }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        ComplexHP {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
            origin: Origin::Rounded,
        }
    }

    pub fn preset(p: Preset, prec: u32) -> Self {
        let (re, im) = p.eval(prec);
        ComplexHP { re, im, origin: Origin::Preset(p) }
    }

    /// Builds a value from decimal strings for the two components.
    pub fn from_decimal(re: &str, im: &str, prec: u32) -> Result<Self> {
        let parse = |s: &str| -> Result<Float> {
            let s = s.trim();
            let v = Float::parse(s).map_err(|_| Error::Parse(s.to_string()))?;
            Ok(Float::with_val(prec, v))
        };
        Ok(ComplexHP {
            re: parse(re)?,
            im: parse(im)?,
            origin: Origin::Decimal(re.trim().to_string(), im.trim().to_string()),
        })
    }

    /// Parses `"a+bi"`, `"a-bi"`, `"bi"`, `"a"`, `"i"`, `"-i"`, or a preset name.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(p) = Preset::from_name(&t) {
            return Ok(ComplexHP::preset(p, prec));
        }
        let err = || Error::Parse(s.to_string());
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix('i') else {
            return ComplexHP::from_decimal(&t, "0", prec);
        };
        // split at the last sign that is not the leading one and not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let im = im.strip_prefix('+').unwrap_or(im);
        if re.is_empty() {
            return Err(err());
        }
        ComplexHP::from_decimal(re, im, prec).map_err(|_| err())
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_complex64(&self) -> Complex64 {
        let (re, im) = self.to_f64();
        Complex64::new(re, im)
    }

    /// The same value at `prec` bits. Presets and decimal inputs are
    /// re-derived from their definition, so raising the precision adds
    /// correct digits rather than trailing zeros.
    pub fn with_prec(&self, prec: u32) -> Self {
        match &self.origin {
            Origin::Preset(p) => ComplexHP::preset(*p, prec),
            Origin::Decimal(re, im) => {
                ComplexHP::from_decimal(re, im, prec).expect("decimal origin reparses")
            }
            origin => ComplexHP {
                re: Float::with_val(prec, &self.re),
                im: Float::with_val(prec, &self.im),
                origin: if prec >= self.prec() { origin.clone() } else { Origin::Rounded },
            },
        }
    }

    /// `Some(true)` when the value is known to lie in `Q(i)`, `Some(false)`
    /// when known not to, `None` when it came from rounded arithmetic.
    pub fn known_rational(&self) -> Option<bool> {
        match &self.origin {
            Origin::Exact | Origin::Decimal(..) => Some(true),
            Origin::Preset(p) => Some(p.is_rational()),
            Origin::Rounded => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn rounded(re: Float, im: Float) -> Self {
        ComplexHP { re, im, origin: Origin::Rounded }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        Self::rounded(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        Self::rounded(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }

    pub fn sub_gauss(&self, g: GaussInt) -> Self {
        let p = self.prec();
        Self::rounded(Float::with_val(p, &self.re - g.re), Float::with_val(p, &self.im - g.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Self::rounded(re, im)
    }

    /// Product with a Gaussian integer. Exact whenever the precision exceeds
    /// the component precision by 65 bits or more.
    pub fn mul_gauss(&self, g: GaussInt) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * g.re) - Float::with_val(p, &self.im * g.im);
        let im = Float::with_val(p, &self.re * g.im) + Float::with_val(p, &self.im * g.re);
        Self::rounded(re, im)
    }

    pub fn mul_f64(&self, s: f64) -> Self {
        let p = self.prec();
        Self::rounded(Float::with_val(p, &self.re * s), Float::with_val(p, &self.im * s))
    }

    pub fn norm(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    /// `1/z`; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.prec();
        let n = self.norm();
        let re = Float::with_val(p, &self.re / &n);
        let im = -Float::with_val(p, &self.im / &n);
        Some(Self::rounded(re, im))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn div_gauss(&self, g: GaussInt) -> Option<Self> {
        self.div(&ComplexHP::from_gauss(g, self.prec()))
    }

    /// Decimal strings of both components with `digits` significant digits.
    pub fn decimal_strings(&self, digits: usize) -> (String, String) {
        let fmt = |x: &Float| {
            if x.is_zero() {
                "0".to_string()
            } else {
                x.to_string_radix(10, Some(digits))
            }
        };
        (fmt(&self.re), fmt(&self.im))
    }
}

impl fmt::Display for ComplexHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Origin::Preset(p) = self.origin {
            return write!(f, "{}", p.name());
        }
        if let Origin::Decimal(re, im) = &self.origin {
            return if im.starts_with('-') {
                write!(f, "{re}{im}i")
            } else {
                write!(f, "{re}+{im}i")
            };
        }
        let (re, im) = self.to_f64();
        if im < 0.0 {
            write!(f, "{re}{im}i")
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl FromStr for ComplexHP {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ComplexHP::parse(s, DEFAULT_PREC)
    }
}

/// `floor(x + 1/2)`: nearest integer with ties rounded toward +∞.
pub fn round_half_up(x: &Float) -> Result<i64> {
    let shifted = Float::with_val(x.prec() + 2, x + 0.5f64);
    let f = shifted.floor();
    f.to_integer()
        .and_then(|i| i.to_i64())
        .ok_or(Error::Overflow("nearest lattice point"))
}

/// Nearest lattice point and distances to the lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestDist {
    pub nearest: GaussInt,
    /// `max(‖Re z‖, ‖Im z‖)`, in `[0, 1/2]`.
    pub sup_dist: f64,
    /// Euclidean distance to the lattice; the component-wise nearest point
    /// also minimizes the Euclidean distance.
    pub euclid_dist: f64,
}

pub fn nearest_and_dist(z: &ComplexHP) -> Result<NearestDist> {
    let f = GaussInt::new(round_half_up(&z.re)?, round_half_up(&z.im)?);
    let d = z.sub_gauss(f);
    let dx = d.re.to_f64().abs();
    let dy = d.im.to_f64().abs();
    Ok(NearestDist { nearest: f, sup_dist: dx.max(dy), euclid_dist: d.abs().to_f64() })
}

/// A point of `R/Z` in 128-bit fixed point: the value is `self.0 / 2^128`.
///
/// Addition and integer multiples are exact modulo 1, which is what makes
/// phase sums like `e(Im(mnc))` reproducible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Torus(pub u128);

const TWO_POW_M128: f64 = 1.0 / 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

impl Torus {
    /// `x mod 1`, truncated to 128 fractional bits.
    pub fn from_float(x: &Float) -> Torus {
        let prec = x.prec().max(160);
        let fl = Float::with_val(prec, x.floor_ref());
        let frac = Float::with_val(prec, x - &fl) << 128u32;
        let (int, _) = frac
            .to_integer_round(Round::Down)
            .expect("fractional part is finite");
        Torus(int.to_u128().unwrap_or(u128::MAX))
    }

    pub fn from_f64(x: f64) -> Torus {
        Torus::from_float(&Float::with_val(64, x))
    }

    pub fn mul_int(self, k: i64) -> Torus {
        Torus(self.0.wrapping_mul(k as i128 as u128))
    }

    pub fn add(self, o: Torus) -> Torus {
        Torus(self.0.wrapping_add(o.0))
    }

    pub fn sub(self, o: Torus) -> Torus {
        Torus(self.0.wrapping_sub(o.0))
    }

    pub fn neg(self) -> Torus {
        Torus(self.0.wrapping_neg())
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist(self) -> f64 {
        self.0.min(self.0.wrapping_neg()) as f64 * TWO_POW_M128
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn centered(self) -> f64 {
        (self.0 as i128) as f64 * TWO_POW_M128
    }

    /// Representative in `[0, 1)`.
    pub fn fract(self) -> f64 {
        self.0 as f64 * TWO_POW_M128
    }

    /// `e(t) = exp(2πit)`.
    pub fn e(self) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.centered()).sin_cos();
        Complex64::new(c, s)
    }
}

/// Margin around a threshold inside which a double-precision decision is
/// re-done in extended precision.
pub const BOUNDARY_EPS: f64 = 1e-15;

/// The map `n ↦ nc mod Z[i]` for a fixed constant `c`, with boundary-aware
/// distance tests.
#[derive(Clone, Debug)]
pub struct PhaseMap {
    c: ComplexHP,
    fine: ComplexHP,
    re: Torus,
    im: Torus,
}

impl PhaseMap {
    pub fn new(c: &ComplexHP) -> Self {
        PhaseMap {
            c: c.clone(),
            fine: c.with_prec(2 * c.prec()),
            re: Torus::from_float(c.re()),
            im: Torus::from_float(c.im()),
        }
    }

    pub fn constant(&self) -> &ComplexHP {
        &self.c
    }

    /// `(Re(nc) mod 1, Im(nc) mod 1)`.
    pub fn phases(&self, n: GaussInt) -> (Torus, Torus) {
        let re = self.re.mul_int(n.re).sub(self.im.mul_int(n.im));
        let im = self.im.mul_int(n.re).add(self.re.mul_int(n.im));
        (re, im)
    }

    /// `(‖Re(nc)‖, ‖Im(nc)‖)` evaluated at twice the working precision.
    pub fn fine_dists(&self, n: GaussInt) -> (Float, Float) {
        let z = self.fine.mul_gauss(n);
        let dist = |x: &Float| {
            let r = Float::with_val(x.prec(), x.round_ref());
            Float::with_val(x.prec(), x - &r).abs()
        };
        (dist(z.re()), dist(z.im()))
    }

    /// `‖Re(nc)‖ ≤ d_re` and `‖Im(nc)‖ ≤ d_im`.
    pub fn within_box(&self, n: GaussInt, d_re: f64, d_im: f64) -> bool {
        let (r, i) = self.phases(n);
        let (dr, di) = (r.dist(), i.dist());
        if (dr - d_re).abs() > BOUNDARY_EPS && (di - d_im).abs() > BOUNDARY_EPS {
            return dr <= d_re && di <= d_im;
        }
        let (fr, fi) = self.fine_dists(n);
        fr.partial_cmp(&d_re) != Some(Ordering::Greater)
            && fi.partial_cmp(&d_im) != Some(Ordering::Greater)
    }

    /// Supremum-metric test `‖nc‖ ≤ delta`.
    pub fn within_sup(&self, n: GaussInt, delta: f64) -> bool {
        self.within_box(n, delta, delta)
    }

    /// Euclidean test `min_q |nc − q| ≤ delta`.
    pub fn within_euclid(&self, n: GaussInt, delta: f64) -> bool {
        let (r, i) = self.phases(n);
        let d = r.dist().hypot(i.dist());
        if (d - delta).abs() > BOUNDARY_EPS {
            return d <= delta;
        }
        let (fr, fi) = self.fine_dists(n);
        let d2 = Float::with_val(fr.prec(), fr.square_ref()) + fi.square();
        let delta2 = Float::with_val(256, delta).square();
        d2 <= delta2
    }

    /// `max(‖Re(nc)‖, ‖Im(nc)‖)` in double precision.
    pub fn sup_dist(&self, n: GaussInt) -> f64 {
        let (r, i) = self.phases(n);
        r.dist().max(i.dist())
    }
}

/// `|z − center|² ≤ radius²` decided exactly (fast path in `f64`).
pub fn within_disc(g: GaussInt, center: &ComplexHP, radius: f64) -> bool {
    let (cx, cy) = center.to_f64();
    let d2 = (g.re as f64 - cx).powi(2) + (g.im as f64 - cy).powi(2);
    let r2 = radius * radius;
    if (d2 - r2).abs() > 1e-9 * (1.0 + r2) {
        return d2 <= r2;
    }
    let p = center.prec() + 130;
    let dx = Float::with_val(p, g.re) - center.re();
    let dy = Float::with_val(p, g.im) - center.im();
    let d2 = Float::with_val(p, dx.square_ref()) + dy.square();
    d2 <= Float::with_val(p, radius).square()
}

/// Compares an integer with the square of a non-negative real exactly.
pub fn cmp_int_sq(n: u128, r: f64) -> Ordering {
    let lhs = n as f64;
    let rhs = r * r;
    if (lhs - rhs).abs() > 1e-9 * (1.0 + rhs) {
        return lhs.partial_cmp(&rhs).unwrap_or(Ordering::Less);
    }
    let exact = Integer::from(n);
    let sq = Float::with_val(128, r).pow(2u32);
    exact.partial_cmp(&sq).unwrap_or(Ordering::Less)
}
