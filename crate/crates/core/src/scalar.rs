//! Scalar abstraction for the weight calculus.
//!
//! Every formula in [`crate::weights`] is written once against [`Scalar`]. The
//! audits instantiate it with [`ExactScalar`](crate::ExactScalar) so that every
//! comparison is decided exactly; the floating instantiations exist for quick
//! human-readable summaries only.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A field-like number type the weight formulas can be evaluated in.
pub trait Scalar: Clone + Debug + PartialOrd + Num {
    fn from_bigint(value: &BigInt) -> Self;

    fn from_u64(value: u64) -> Self {
        Self::from_bigint(&BigInt::from(value))
    }

    fn ratio(numer: &BigInt, denom: &BigInt) -> Self {
        Self::from_bigint(numer) / Self::from_bigint(denom)
    }

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    /// Whether the type represents every value it is handed without rounding.
    const EXACT: bool;
}

impl Scalar for BigRational {
    fn from_bigint(value: &BigInt) -> Self {
        BigRational::from_integer(value.clone())
    }

    fn ratio(numer: &BigInt, denom: &BigInt) -> Self {
        BigRational::new(numer.clone(), denom.clone())
    }

    const EXACT: bool = true;
}

impl Scalar for f64 {
    fn from_bigint(value: &BigInt) -> Self {
        value.to_f64().unwrap_or(f64::INFINITY)
    }

    fn ratio(numer: &BigInt, denom: &BigInt) -> Self {
        BigRational::new(numer.clone(), denom.clone())
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    const EXACT: bool = false;
}

impl Scalar for f32 {
    fn from_bigint(value: &BigInt) -> Self {
        value.to_f32().unwrap_or(f32::INFINITY)
    }

    fn ratio(numer: &BigInt, denom: &BigInt) -> Self {
        BigRational::new(numer.clone(), denom.clone())
            .to_f32()
            .unwrap_or(f32::NAN)
    }

    const EXACT: bool = false;
}

/// Binomial coefficient C(a, b), zero outside `0 <= b <= a`.
pub fn binom(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient with a possibly negative top argument, zero when `a < 0`.
pub fn binom_signed(a: i64, b: i64) -> BigInt {
    if a < 0 {
        BigInt::zero()
    } else {
        binom(a as u64, b)
    }
}

pub fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * i)
}

/// Renders an exact value as `p/q`, always with an explicit denominator.
pub fn render_fraction(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q` or a bare integer into an exact rational.
pub fn parse_fraction(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str_radix(p.trim(), 10).ok()?;
            let q = BigInt::from_str_radix(q.trim(), 10).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => BigInt::from_str_radix(text, 10)
            .ok()
            .map(BigRational::from_integer),
    }
}

/// Approximate decimal for human-facing summaries.
pub fn approx(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Huge numerators: scale down by the common bit length first.
        let shift = value.numer().bits().max(value.denom().bits()).saturating_sub(1000);
        let n = value.numer() >> shift;
        let d = value.denom() >> shift;
        if d.is_zero() {
            if n.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
        }
    })
}

/// Ceiling of a non-negative rational.
pub fn ceil_nonneg(value: &BigRational) -> BigInt {
    let (q, r) = value.numer().div_rem(value.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}
