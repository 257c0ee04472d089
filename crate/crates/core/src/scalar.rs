//! Scalar abstraction shared by every value computation.
//!
//! All probabilities, utilities and values are generic over [`Scalar`], so the
//! same planner runs in exact rational arithmetic (`BigRational`) or in
//! floating point (`f64`, `f32`).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::LabError;

/// Number type the planner computes with.
pub trait Scalar: Num + Clone + Debug + Display + PartialOrd + Send + Sync + 'static {
    /// True when arithmetic is exact (equality claims use zero tolerance).
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality used for argmax ties. Exact types compare exactly; floats
    /// allow a relative slack of `1e-12`.
    fn near_eq(&self, other: &Self) -> bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Human and machine readable rendering (`15/8` for exact values).
    fn render(&self) -> String {
        format!("{self}")
    }

    fn powi(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }

    fn abs_diff_f64(&self, other: &Self) -> f64 {
        if self > other {
            (self.clone() - other.clone()).to_f64()
        } else {
            (other.clone() - self.clone()).to_f64()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * (1.0 + self.abs().max(other.abs()))
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn near_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-6 * (1.0 + self.abs().max(other.abs()))
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Parses `p/q`, an integer, or a finite decimal (`0.25`, `-1.5e-2`) into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, LabError> {
    let s = text.trim();
    let bad = || LabError::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(LabError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            value *= ten.clone();
        } else {
            value /= ten.clone();
        }
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

pub(crate) fn rational_in_unit(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}
