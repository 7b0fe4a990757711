//! Ordered-field abstraction shared by every algorithm in the crate.
//!
//! Two families of realizations exist: exact rationals ([`Rational`]) where
//! every comparison against zero is exact, and IEEE floats where anything
//! within [`Scalar::zero_threshold`] of zero is treated as zero.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, NumAssign, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Magnitudes at or below this value count as zero.
    fn zero_threshold() -> Self;

    #[inline]
    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_threshold()
    }

    /// Strictly positive beyond the zero threshold.
    #[inline]
    fn is_pos(&self) -> bool {
        *self > Self::zero_threshold()
    }

    /// Total order for sorting; finite inputs never hit the fallback.
    #[inline]
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Square root, exact when the argument is a perfect square in exact mode.
    fn sqrt_approx(&self) -> Self;

    fn is_integral(&self) -> bool;

    fn is_finite_value(&self) -> bool;

    /// Parses `3`, `-2.75`, `1e-3` or `7/4`. Rationals keep decimals exact.
    fn parse_scalar(s: &str) -> Option<Self>;

    /// JSON rendering: numbers for floats, `"p/q"` strings for rationals.
    fn to_json(&self) -> serde_json::Value;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits scalar")
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $thr:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            #[inline]
            fn zero_threshold() -> Self {
                $thr
            }

            fn sqrt_approx(&self) -> Self {
                self.sqrt()
            }

            fn is_integral(&self) -> bool {
                self.fract() == 0.0
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn parse_scalar(s: &str) -> Option<Self> {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: $t = n.trim().parse().ok()?;
                    let d: $t = d.trim().parse().ok()?;
                    if d == 0.0 {
                        return None;
                    }
                    return Some(n / d);
                }
                let v: $t = s.parse().ok()?;
                v.is_finite().then_some(v)
            }

            fn to_json(&self) -> serde_json::Value {
                serde_json::Number::from_f64(*self as f64)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            }
        }
    };
}

impl_float_scalar!(f64, 1e-9);
impl_float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    const EXACT: bool = true;

    #[inline]
    fn zero_threshold() -> Self {
        Self::zero()
    }

    #[inline]
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    #[inline]
    fn is_pos(&self) -> bool {
        self.is_positive()
    }

    #[inline]
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn sqrt_approx(&self) -> Self {
        if !self.is_positive() {
            return Self::zero();
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            return BigRational::new(rn, rd);
        }
        let f = self.to_f64().unwrap_or(f64::MAX).sqrt();
        BigRational::from_float(f).unwrap_or_else(Self::zero)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s.trim())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n.trim())?;
        let d = parse_rational(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(value)
}

/// Converts between scalar realizations (float paths go through `f64`).
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    if A::EXACT && B::EXACT {
        // both exact: only BigRational exists today, round-trip through text
        return B::parse_scalar(&a.to_string()).expect("exact scalar renders parseably");
    }
    if B::EXACT {
        let f = a.to_f64().unwrap_or(0.0);
        return B::from_f64(f).unwrap_or_else(B::zero);
    }
    B::from_f64(a.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(B::zero)
}

#[inline]
pub fn min_of<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

#[inline]
pub fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn one<S: Scalar>() -> S {
    S::one()
}
