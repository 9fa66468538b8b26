//! Numeric back-ends shared by every module.
//!
//! [`Ring`] is the minimum an expression can be evaluated into (it is also
//! implemented by truncated Taylor jets). [`Scalar`] adds division and the
//! handful of real-valued helpers needed for frames and residuals. Two
//! scalars are provided: `f64` and the exact [`Rational`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::Number;

/// Exact rational scalar.
pub type Rational = BigRational;

pub trait Ring:
    Clone
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_number(n: &Number) -> Self;

    /// `None` when the exponential leaves the ring (e.g. `exp(1)` over ℚ).
    fn exp(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_number(&Number::Rational(Rational::from_integer(n.into())))
    }

    fn powu(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub trait Scalar: Ring + PartialEq {
    /// True for exact arithmetic; residual checks then demand equality.
    const EXACT: bool;

    fn inv(&self) -> Option<Self>;
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn abs(&self) -> Self;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }

    fn is_positive(&self) -> bool {
        self.to_f64() > 0.0
    }

    /// Entry comparison: exact for rationals, relative 1e-9 with an absolute
    /// floor of 1e-12 for floats.
    fn approx_eq(&self, other: &Self) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        let diff = (a - b).abs();
        diff <= 1e-12 || diff <= 1e-9 * a.abs().max(b.abs())
    }
}

impl Ring for f64 {
    fn from_number(n: &Number) -> Self {
        n.to_f64()
    }

    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Ring for Rational {
    fn from_number(n: &Number) -> Self {
        match n {
            Number::Rational(r) => r.clone(),
            Number::Float(x) => Rational::from_float(x.into_inner()).expect("finite constant"),
        }
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer().sqrt(), self.denom().sqrt());
        let root = Rational::new(n, d);
        (&root * &root == *self).then_some(root)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite value")
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Convenience constructor for small exact rationals.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sup-norm style difference of two scalars, in `f64`.
pub fn distance<S: Scalar>(a: &S, b: &S) -> f64 {
    if S::EXACT {
        if a == b {
            0.0
        } else {
            (a.clone() - b.clone()).to_f64().abs().max(f64::MIN_POSITIVE)
        }
    } else {
        (a.to_f64() - b.to_f64()).abs()
    }
}

/// Real arithmetic with ordering, used by the geodesic closed form so the
/// same code runs in `f64` and in double-double precision.
pub trait Real: Scalar + PartialOrd + Copy {
    const EPSILON: f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(ratio(9, 4).sqrt(), Some(ratio(3, 2)));
        assert_eq!(ratio(2, 1).sqrt(), None);
        assert_eq!(ratio(-1, 1).sqrt(), None);
    }

    #[test]
    fn rational_exp_only_at_zero() {
        assert_eq!(Ring::exp(&Rational::zero()), Some(Rational::one()));
        assert_eq!(Ring::exp(&ratio(1, 2)), None);
    }

    #[test]
    fn powu_matches_repeated_product() {
        assert_eq!(ratio(2, 3).powu(5), ratio(32, 243));
        assert_eq!(3.0f64.powu(0), 1.0);
    }

    #[test]
    fn float_comparison_uses_relative_and_absolute_floor() {
        assert!(1.0f64.approx_eq(&(1.0 + 1e-10)));
        assert!(!1.0f64.approx_eq(&(1.0 + 1e-8)));
        assert!(0.0f64.approx_eq(&1e-13));
    }
}
