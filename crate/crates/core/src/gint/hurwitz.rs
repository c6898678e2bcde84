//! Hurwitz (nearest Gaussian integer) continued fractions.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::hp::{round_half_up, ComplexHP};
use super::int::{gaussian_gcd, GaussInt, ONE, ZERO};
use crate::error::{Error, Result};

/// A convergent `p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[GaussInt; 2]", into = "[GaussInt; 2]")]
pub struct Convergent {
    pub p: GaussInt,
    pub q: GaussInt,
}

impl From<[GaussInt; 2]> for Convergent {
    fn from([p, q]: [GaussInt; 2]) -> Self {
        Convergent { p, q }
    }
}

impl From<Convergent> for [GaussInt; 2] {
    fn from(c: Convergent) -> Self {
        [c.p, c.q]
    }
}

#[derive(Clone, Debug)]
pub struct HurwitzExpansion {
    pub constant: ComplexHP,
    pub quotients: Vec<GaussInt>,
    pub convergents: Vec<Convergent>,
    /// The expansion ended because `z_n − a_n` vanished at working precision.
    pub terminated: bool,
    /// Complete quotient `z_{n+1}` following the last stored partial quotient;
    /// `None` when terminated.
    pub tail: Option<ComplexHP>,
}

/// Serialized form: `{constant: [re, im], quotients: [[re,im],…], convergents: [[[pre,pim],[qre,qim]],…]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurwitzJson {
    pub constant: [String; 2],
    pub quotients: Vec<GaussInt>,
    pub convergents: Vec<Convergent>,
    pub terminated: bool,
    pub precision: u32,
}

/// `|c − p/q|·|q|² ≤ 1` evaluated as `|qc − p|·|q| ≤ 1` in extended precision.
/// Returns the scaled error `|qc − p|·|q|`.
pub fn approximation_quality(c: &ComplexHP, p: GaussInt, q: GaussInt) -> f64 {
    let prec = c.prec() + 140;
    let qc = c.with_prec(prec).mul_gauss(q).sub_gauss(p);
    let q_abs = Float::with_val(prec, q.norm()).sqrt();
    Float::with_val(prec, qc.abs() * q_abs).to_f64()
}

/// Bits needed for the convergent size `norm(q)`.
fn norm_bits(q: GaussInt) -> u32 {
    128 - q.norm().leading_zeros()
}

impl HurwitzExpansion {
    /// Expands `c` until `max_terms` quotients are stored, a denominator reaches
    /// `norm(q) ≥ min_q_norm`, or the remainder vanishes.
    ///
    /// Working precision must stay at least four times the bit length of the
    /// next convergent's norm; otherwise [`Error::PrecisionExhausted`].
    pub fn expand(c: &ComplexHP, max_terms: usize, min_q_norm: Option<u128>) -> Result<Self> {
        let prec = c.prec();
        let mut z = c.clone();
        let mut quotients = Vec::new();
        let mut convergents: Vec<Convergent> = Vec::new();
        let (mut p1, mut p2) = (ONE, ZERO);
        let (mut q1, mut q2) = (ZERO, ONE);
        let zero_threshold = Float::with_val(prec, Float::i_exp(1, -((3 * prec / 4) as i32)));
        let mut terminated = false;
        let mut tail = None;

        while quotients.len() < max_terms {
            let a = GaussInt::new(round_half_up(z.re())?, round_half_up(z.im())?);
            let p = a.checked_mul(p1)?.checked_add(p2)?;
            let q = a.checked_mul(q1)?.checked_add(q2)?;
            let needed = 4 * norm_bits(q);
            if needed > prec {
                return Err(Error::PrecisionExhausted { needed, have: prec });
            }
            quotients.push(a);
            convergents.push(Convergent { p, q });
            (p2, p1) = (p1, p);
            (q2, q1) = (q1, q);

            let r = z.sub_gauss(a);
            if r.abs() <= zero_threshold {
                terminated = true;
                break;
            }
            z = r.recip().expect("nonzero remainder");
            tail = Some(z.clone());
            if min_q_norm.is_some_and(|m| q.norm() >= m) {
                break;
            }
        }
        Ok(HurwitzExpansion {
            constant: c.clone(),
            quotients,
            convergents,
            terminated,
            tail: if terminated { None } else { tail },
        })
    }

    /// Exact evaluation of `a₀ + 1/(a₁ + 1/(… + 1/a_n))` as a reduced
    /// Gaussian fraction, folded from the back.
    pub fn evaluate_prefix(quotients: &[GaussInt]) -> Result<(GaussInt, GaussInt)> {
        let (last, rest) = quotients.split_last().ok_or(Error::ZeroInput("empty quotient list"))?;
        let (mut num, mut den) = (*last, ONE);
        for &a in rest.iter().rev() {
            // a + den/num = (a·num + den)/num
            let new_num = a.checked_mul(num)?.checked_add(den)?;
            den = num;
            num = new_num;
        }
        Ok((num, den))
    }

    /// Forward evaluation including the complete quotient:
    /// `(p_n·z + p_{n−1}) / (q_n·z + q_{n−1})`, which equals `c` up to rounding.
    pub fn reconstruct(&self) -> Option<ComplexHP> {
        let n = self.convergents.len();
        let last = self.convergents.last()?;
        let prev = if n >= 2 { self.convergents[n - 2] } else { Convergent { p: ONE, q: ZERO } };
        let Some(z) = &self.tail else {
            return ComplexHP::from_gauss(last.p, self.constant.prec()).div_gauss(last.q);
        };
        let num = z.mul_gauss(last.p).add(&ComplexHP::from_gauss(prev.p, z.prec()));
        let den = z.mul_gauss(last.q).add(&ComplexHP::from_gauss(prev.q, z.prec()));
        num.div(&den)
    }

    /// Checks every stored convergent: recurrence, approximation quality,
    /// strictly growing `|q|`, and unit `gcd(p, q)`.
    pub fn verify(&self) -> Result<()> {
        let (mut p1, mut p2, mut q1, mut q2) = (ONE, ZERO, ZERO, ONE);
        let mut last_norm = 0u128;
        for (k, (a, cv)) in self.quotients.iter().zip(&self.convergents).enumerate() {
            let p = a.checked_mul(p1)?.checked_add(p2)?;
            let q = a.checked_mul(q1)?.checked_add(q2)?;
            if p != cv.p || q != cv.q {
                return Err(Error::Precondition(format!("convergent {k} breaks the recurrence")));
            }
            let quality = approximation_quality(&self.constant, cv.p, cv.q);
            if quality > 1.0 {
                return Err(Error::Precondition(format!(
                    "convergent {k}: |c − p/q|·|q|² = {quality} > 1"
                )));
            }
            if cv.q.norm() <= last_norm {
                return Err(Error::Precondition(format!("convergent {k}: |q| not increasing")));
            }
            if gaussian_gcd(cv.p, cv.q)? != ONE {
                return Err(Error::Precondition(format!("convergent {k}: gcd(p, q) is not a unit")));
            }
            last_norm = cv.q.norm();
            (p2, p1, q2, q1) = (p1, p, q1, q);
        }
        Ok(())
    }

    pub fn denominators(&self) -> impl Iterator<Item = GaussInt> + '_ {
        self.convergents.iter().map(|c| c.q)
    }

    pub fn to_json(&self) -> HurwitzJson {
        let (re, im) = self.constant.decimal_strings(40);
        HurwitzJson {
            constant: [re, im],
            quotients: self.quotients.clone(),
            convergents: self.convergents.clone(),
            terminated: self.terminated,
            precision: self.constant.prec(),
        }
    }
}

/// Convenience wrapper matching the free-function style of the other modules.
pub fn hurwitz_expansion(
    c: &ComplexHP,
    max_terms: usize,
    min_q_norm: Option<u128>,
) -> Result<HurwitzExpansion> {
    HurwitzExpansion::expand(c, max_terms, min_q_norm)
}

/// Finds the numerator `a` that makes `q` a Hurwitz-quality denominator of
/// `c`: `a` is the nearest lattice point to `qc`, `gcd(a, q)` is a unit and
/// `|c − a/q| ≤ |q|⁻²`.
pub fn verify_convergent_denominator(c: &ComplexHP, q: GaussInt) -> Result<GaussInt> {
    if q.is_zero() {
        return Err(Error::ZeroInput("convergent denominator"));
    }
    let qc = c.mul_gauss(q);
    let a = GaussInt::new(round_half_up(qc.re())?, round_half_up(qc.im())?);
    verify_approximant(c, a, q)?;
    Ok(a)
}

/// Checks `(a, q) = 1` and `|c − a/q| ≤ |q|⁻²`.
pub fn verify_approximant(c: &ComplexHP, a: GaussInt, q: GaussInt) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroInput("convergent denominator"));
    }
    if gaussian_gcd(a, q)? != ONE {
        return Err(Error::Precondition(format!("({a}, {q}) are not coprime")));
    }
    let quality = approximation_quality(c, a, q);
    if quality > 1.0 {
        return Err(Error::Precondition(format!(
            "{a}/{q} is not a Hurwitz-quality approximant: |c − a/q|·|q|² = {quality}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::hp::{Preset, DEFAULT_PREC};

    fn hp(s: &str) -> ComplexHP {
        ComplexHP::parse(s, DEFAULT_PREC).unwrap()
    }

    #[test]
    fn c_equals_i() {
        let e = hurwitz_expansion(&hp("i"), 10, None).unwrap();
        assert_eq!(e.quotients, vec![GaussInt::new(0, 1)]);
        assert!(e.terminated);
    }

    #[test]
    fn two_step_rational() {
        let e = hurwitz_expansion(&hp("0.5+1.5i"), 10, None).unwrap();
        assert_eq!(e.quotients, vec![GaussInt::new(1, 2), GaussInt::new(-1, 1)]);
        assert!(e.terminated);
        // a0 + 1/a1 = (1+2i) + 1/(-1+i) = (1+2i) + (-1-i)/2 = 1/2 + 3/2 i
        let (num, den) = HurwitzExpansion::evaluate_prefix(&e.quotients).unwrap();
        assert_eq!(GaussInt::new(1, 3) * den, num * GaussInt::new(2, 0));
        e.verify().unwrap();
    }

    #[test]
    fn sqrt2i_convergents_satisfy_the_bound() {
        let c = hp("sqrt2i");
        let e = hurwitz_expansion(&c, 5, None).unwrap();
        assert_eq!(e.quotients.len(), 5);
        for cv in &e.convergents {
            assert!(approximation_quality(&c, cv.p, cv.q) <= 1.0);
        }
        assert_eq!(e.quotients[..3], [GaussInt::new(0, 1), GaussInt::new(0, -2), GaussInt::new(0, 2)]);
        e.verify().unwrap();
    }

    #[test]
    fn min_norm_stops_expansion() {
        let e = hurwitz_expansion(&hp("pi+ei"), 100, Some(1_000)).unwrap();
        let norms: Vec<u128> = e.denominators().map(|q| q.norm()).collect();
        assert!(*norms.last().unwrap() >= 1_000);
        assert!(norms[..norms.len() - 1].iter().all(|&n| n < 1_000));
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let c = ComplexHP::preset(Preset::PiE, 64);
        let err = hurwitz_expansion(&c, 1000, None).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { have: 64, .. }));
    }

    #[test]
    fn reconstruct_with_tail() {
        let c = hp("sqrt3+sqrt7i");
        let e = hurwitz_expansion(&c, 12, None).unwrap();
        let back = e.reconstruct().unwrap().sub(&c);
        assert!(back.abs() < Float::with_val(64, 1e-60));
    }

    #[test]
    fn json_shape() {
        let e = hurwitz_expansion(&hp("0.5+1.5i"), 10, None).unwrap();
        let v = serde_json::to_value(e.to_json()).unwrap();
        assert_eq!(v["quotients"], serde_json::json!([[1, 2], [-1, 1]]));
        assert_eq!(v["convergents"][0], serde_json::json!([[1, 2], [1, 0]]));
        assert_eq!(v["constant"][0], "5.000000000000000000000000000000000000000e-1");
    }

    #[test]
    fn convergent_denominator_check() {
        let c = hp("sqrt2i");
        assert_eq!(verify_convergent_denominator(&c, GaussInt::new(5, 0)).unwrap(), GaussInt::new(0, 7));
        assert!(verify_convergent_denominator(&c, GaussInt::new(4, 0)).is_err());
    }
}
