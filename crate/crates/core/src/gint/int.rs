use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::arith::is_prime_u64;
use crate::error::{Error, Result};

/// A Gaussian integer `re + im·i` with 64-bit components.
///
/// Operator impls panic on overflow instead of wrapping; the `checked_*`
/// methods return [`Error::Overflow`] and are what the library uses internally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl From<[i64; 2]> for GaussInt {
    fn from([re, im]: [i64; 2]) -> Self {
        GaussInt { re, im }
    }
}

impl From<GaussInt> for [i64; 2] {
    fn from(g: GaussInt) -> Self {
        [g.re, g.im]
    }
}

impl From<i64> for GaussInt {
    fn from(re: i64) -> Self {
        GaussInt { re, im: 0 }
    }
}

pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
pub const I: GaussInt = GaussInt { re: 0, im: 1 };

impl GaussInt {
    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub fn norm(self) -> u128 {
        let (a, b) = (self.re as i128, self.im as i128);
        (a * a + b * b) as u128
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    /// Multiplication by `i`. Panics only for `i64::MIN` components.
    pub fn mul_i(self) -> Self {
        GaussInt::new(-self.im, self.re)
    }

    /// The four unit multiples `g, ig, -g, -ig`.
    pub fn associates(self) -> [GaussInt; 4] {
        let a = self.mul_i();
        [self, a, -self, -a]
    }

    /// The associate in the first quadrant (`re > 0, im ≥ 0`); zero maps to zero.
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            return self;
        }
        self.associates()
            .into_iter()
            .find(|g| g.re > 0 && g.im >= 0)
            .expect("exactly one associate lies in the first quadrant")
    }

    pub fn arg(self) -> f64 {
        (self.im as f64).atan2(self.re as f64)
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        match (self.re.checked_add(o.re), self.im.checked_add(o.im)) {
            (Some(re), Some(im)) => Ok(GaussInt { re, im }),
            _ => Err(Error::Overflow("add")),
        }
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        match (self.re.checked_sub(o.re), self.im.checked_sub(o.im)) {
            (Some(re), Some(im)) => Ok(GaussInt { re, im }),
            _ => Err(Error::Overflow("sub")),
        }
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let re = i64::try_from(a * c - b * d).map_err(|_| Error::Overflow("mul"))?;
        let im = i64::try_from(a * d + b * c).map_err(|_| Error::Overflow("mul"))?;
        Ok(GaussInt { re, im })
    }

    /// Division with the nearest-lattice-point quotient: `self = q·d + r` with
    /// `norm(r) ≤ norm(d)/2`. Ties round toward +∞ in each component.
    pub fn div_rem_nearest(self, d: Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::ZeroInput("division by zero"));
        }
        // self / d = self·conj(d) / norm(d)
        let num_re = self.re as i128 * d.re as i128 + self.im as i128 * d.im as i128;
        let num_im = self.im as i128 * d.re as i128 - self.re as i128 * d.im as i128;
        let n = d.norm() as i128;
        let round = |x: i128| -> Result<i64> {
            // floor((2x + n) / 2n) is round-half-up of x/n
            let q = (2 * x + n).div_euclid(2 * n);
            i64::try_from(q).map_err(|_| Error::Overflow("div"))
        };
        let q = GaussInt::new(round(num_re)?, round(num_im)?);
        let r = self.checked_sub(q.checked_mul(d)?)?;
        Ok((q, r))
    }

    /// `Some(self / d)` when `d` divides `self` exactly.
    pub fn exact_div(self, d: Self) -> Option<Self> {
        let (q, r) = self.div_rem_nearest(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(self, n: Self) -> bool {
        if self.is_zero() {
            return n.is_zero();
        }
        n.exact_div(self).is_some()
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: Self) -> Self {
        self.checked_add(o).expect("GaussInt overflow")
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(o).expect("GaussInt overflow")
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(o).expect("GaussInt overflow")
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> Self {
        GaussInt::new(-self.re, -self.im)
    }
}

/// Parses the [`Display`](fmt::Display) forms: `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`.
impl std::str::FromStr for GaussInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(s.to_string());
        let int = |x: &str| x.strip_prefix('+').unwrap_or(x).parse::<i64>().map_err(|_| err());
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussInt::new(int(&t)?, 0));
        };
        let split = body.rfind(['+', '-']).filter(|&k| k > 0);
        let (re, im) = match split {
            Some(k) => (int(&body[..k])?, &body[k..]),
            None => (0, body),
        };
        let im = match im {
            "" | "+" => 1,
            "-" => -1,
            other => int(other)?,
        };
        Ok(GaussInt::new(re, im))
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// Primality in `Z[i]`: the norm is a rational prime, or `g` is a unit times a
/// rational prime `≡ 3 (mod 4)`.
pub fn is_gaussian_prime(g: GaussInt) -> Result<bool> {
    if g.is_zero() {
        return Err(Error::ZeroInput("is_gaussian_prime"));
    }
    let n = u64::try_from(g.norm()).map_err(|_| Error::Overflow("norm"))?;
    if is_prime_u64(n) {
        return Ok(true);
    }
    let c = g.canonical();
    if c.im == 0 {
        let q = c.re as u64;
        return Ok(q % 4 == 3 && is_prime_u64(q));
    }
    Ok(false)
}

/// Greatest common divisor by the Euclidean algorithm with nearest-point
/// quotients, normalized to the first-quadrant associate (units map to 1).
pub fn gaussian_gcd(a: GaussInt, b: GaussInt) -> Result<GaussInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroInput("gaussian_gcd(0, 0)"));
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = x.div_rem_nearest(y)?;
        x = y;
        y = r;
    }
    Ok(x.canonical())
}
