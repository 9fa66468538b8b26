//! Double-double floating point (about 32 significant digits).
//!
//! Used where a finite-difference check must resolve differences far below
//! `f64` round-off, e.g. second differences at step 1e-4 against a 1e-8
//! tolerance. Algorithms follow the standard error-free transformations
//! (two-sum, fused two-product).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::expr::Number;
use crate::scalar::{Rational, Real, Ring, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn scale_pow2(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        DoubleDouble {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    pub fn recip(self) -> Self {
        DoubleDouble::new(1.0).divide(self)
    }

    pub fn divide(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        DoubleDouble { hi: s, lo: e } + DoubleDouble::new(q3)
    }

    pub fn exp_dd(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::new(0.0);
        }
        const SQUARINGS: i32 = 9;
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).scale_pow2(-SQUARINGS);
        // Taylor series of e^r - 1 for |r| < 7e-4; 12 terms exceed dd precision.
        let mut term = r;
        let mut sum = r;
        for n in 2..=12 {
            term = (term * r).divide(DoubleDouble::new(n as f64));
            sum = sum + term;
        }
        // (1 + s)^2 - 1 = s (2 + s), keeps the small part accurate.
        for _ in 0..SQUARINGS {
            sum = sum * (sum + DoubleDouble::new(2.0));
        }
        (sum + DoubleDouble::new(1.0)).scale_pow2(k as i32)
    }

    pub fn sqrt_dd(self) -> Option<Self> {
        if self.hi < 0.0 {
            return None;
        }
        if self.hi == 0.0 {
            return Some(Self::zero());
        }
        let s = DoubleDouble::new(self.hi.sqrt());
        let correction = (self - s * s).divide(s.mul_f64(2.0));
        Some(s + correction)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi + self.lo)
    }
}

fn from_rational(r: &Rational) -> DoubleDouble {
    let hi = ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return DoubleDouble::new(hi);
    }
    let rest = r - Rational::from_float(hi).expect("finite");
    DoubleDouble::renorm(hi, ToPrimitive::to_f64(&rest).unwrap_or(0.0))
}

impl Ring for DoubleDouble {
    fn from_number(n: &Number) -> Self {
        match n {
            Number::Rational(r) => from_rational(r),
            Number::Float(x) => DoubleDouble::new(x.into_inner()),
        }
    }

    fn exp(&self) -> Option<Self> {
        Some(self.exp_dd())
    }

    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        DoubleDouble::renorm(hi, (n - hi as i64) as f64)
    }
}

impl Scalar for DoubleDouble {
    const EXACT: bool = false;

    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn sqrt(&self) -> Option<Self> {
        self.sqrt_dd()
    }

    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }

    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x)
    }

    fn abs(&self) -> Self {
        if self.hi < 0.0 {
            -*self
        } else {
            *self
        }
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = 4.93e-32;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::new(x)
    }

    #[test]
    fn one_third_times_three() {
        let third = DoubleDouble::from_number(&Number::Rational(ratio(1, 3)));
        let err = (third * dd(3.0) - dd(1.0)).to_f64().abs();
        assert!(err < 1e-31, "{err}");
    }

    #[test]
    fn resolves_below_f64_epsilon() {
        let tiny = dd(1e-20);
        let x = (dd(1.0) + tiny) - dd(1.0);
        assert!((x.to_f64() - 1e-20).abs() < 1e-34);
    }

    #[test]
    fn exp_matches_known_digits() {
        // e = 2.718281828459045235360287471352662...
        let e = dd(1.0).exp_dd();
        let reference = DoubleDouble::renorm(std::f64::consts::E, 1.445_646_891_729_250_2e-16);
        assert!((e - reference).to_f64().abs() < 1e-30);
        let x = dd(-3.25);
        let prod = x.exp_dd() * (-x).exp_dd();
        assert!((prod - dd(1.0)).to_f64().abs() < 1e-30);
        assert_eq!(dd(0.0).exp_dd(), dd(1.0));
    }

    #[test]
    fn sqrt_and_division() {
        let two = dd(2.0);
        let r = two.sqrt_dd().unwrap();
        assert!((r * r - two).to_f64().abs() < 1e-31);
        let q = dd(1.0).divide(dd(7.0));
        assert!((q * dd(7.0) - dd(1.0)).to_f64().abs() < 1e-31);
        assert!(dd(-1.0).sqrt_dd().is_none());
    }

    #[test]
    fn ordering_uses_low_part() {
        let a = DoubleDouble::renorm(1.0, 1e-20);
        assert!(a > dd(1.0));
        assert!(dd(1.0) < a);
    }
}
