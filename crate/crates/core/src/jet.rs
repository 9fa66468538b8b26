//! Truncated multivariate Taylor polynomials.
//!
//! A [`Jet`] with shape `[d_0, ..., d_{n-1}]` stores the coefficients of all
//! monomials `t_0^{a_0} ... t_{n-1}^{a_{n-1}}` with `a_i <= d_i`. Evaluating
//! an [`Expression`](crate::expr::Expression) on jets yields every mixed
//! directional derivative up to that box at once, which is how high-order
//! curvature contractions along a few vectors are computed without
//! materialising the full tensor.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::expr::Number;
use crate::scalar::{Ring, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    /// Empty shape marks a constant (no infinitesimal part).
    shape: Vec<u8>,
    coeffs: Vec<S>,
}

fn box_len(shape: &[u8]) -> usize {
    shape.iter().map(|&d| d as usize + 1).product()
}

fn decode(shape: &[u8], mut flat: usize) -> Vec<u8> {
    let mut out = vec![0u8; shape.len()];
    for i in (0..shape.len()).rev() {
        let base = shape[i] as usize + 1;
        out[i] = (flat % base) as u8;
        flat /= base;
    }
    out
}

fn encode(shape: &[u8], idx: &[u8]) -> usize {
    idx.iter()
        .zip(shape)
        .fold(0, |acc, (&a, &d)| acc * (d as usize + 1) + a as usize)
}

impl<S: Scalar> Jet<S> {
    pub fn constant(c: S) -> Self {
        Jet {
            shape: Vec::new(),
            coeffs: vec![c],
        }
    }

    /// `base + Σ_i dirs[i] · t_i`.
    pub fn affine(shape: &[u8], base: S, dirs: &[S]) -> Self {
        assert_eq!(shape.len(), dirs.len());
        let mut coeffs = vec![S::zero(); box_len(shape)];
        coeffs[0] = base;
        for (i, d) in dirs.iter().enumerate() {
            if shape[i] == 0 || d.is_zero() {
                continue;
            }
            let mut idx = vec![0u8; shape.len()];
            idx[i] = 1;
            coeffs[encode(shape, &idx)] = d.clone();
        }
        Jet {
            shape: shape.to_vec(),
            coeffs,
        }
    }

    /// Coefficient of the monomial with exponents `idx` (zero if outside the box).
    pub fn coeff(&self, idx: &[u8]) -> S {
        if self.shape.is_empty() {
            return if idx.iter().all(|&a| a == 0) {
                self.coeffs[0].clone()
            } else {
                S::zero()
            };
        }
        if idx.len() != self.shape.len() || idx.iter().zip(&self.shape).any(|(a, d)| a > d) {
            return S::zero();
        }
        self.coeffs[encode(&self.shape, idx)].clone()
    }

    /// The mixed partial derivative `∂^idx` at the origin (coefficient times
    /// the product of factorials).
    pub fn derivative(&self, idx: &[u8]) -> S {
        let scale: i64 = idx
            .iter()
            .map(|&a| (1..=a as i64).product::<i64>())
            .product();
        self.coeff(idx) * S::from_i64(scale)
    }

    fn widen(&self, shape: &[u8]) -> Vec<S> {
        if self.shape.as_slice() == shape {
            return self.coeffs.clone();
        }
        assert!(self.shape.is_empty(), "jets with different shapes combined");
        let mut v = vec![S::zero(); box_len(shape)];
        v[0] = self.coeffs[0].clone();
        v
    }

    fn joint_shape(&self, other: &Self) -> Vec<u8> {
        if self.shape.is_empty() {
            other.shape.clone()
        } else {
            self.shape.clone()
        }
    }

    fn scale(&self, s: &S) -> Self {
        Jet {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        let shape = self.joint_shape(&other);
        let a = self.widen(&shape);
        let b = other.widen(&shape);
        Jet {
            shape,
            coeffs: a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet {
            shape: self.shape,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        if self.shape.is_empty() {
            return other.scale(&self.coeffs[0]);
        }
        if other.shape.is_empty() {
            return self.scale(&other.coeffs[0]);
        }
        assert_eq!(self.shape, other.shape, "jets with different shapes combined");
        let shape = self.shape;
        let n = box_len(&shape);
        let idx: Vec<Vec<u8>> = (0..n).map(|f| decode(&shape, f)).collect();
        let mut out = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let sum: Option<Vec<u8>> = idx[i]
                    .iter()
                    .zip(&idx[j])
                    .zip(&shape)
                    .map(|((x, y), d)| (x + y <= *d).then_some(x + y))
                    .collect();
                if let Some(s) = sum {
                    let k = encode(&shape, &s);
                    out[k] = out[k].clone() + a.clone() * b.clone();
                }
            }
        }
        Jet { shape, coeffs: out }
    }
}

impl<S: Scalar> Zero for Jet<S> {
    fn zero() -> Self {
        Jet::constant(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl<S: Scalar> One for Jet<S> {
    fn one() -> Self {
        Jet::constant(S::one())
    }
}

impl<S: Scalar> Ring for Jet<S> {
    fn from_number(n: &Number) -> Self {
        Jet::constant(S::from_number(n))
    }

    fn exp(&self) -> Option<Self> {
        let c0 = self.coeffs[0].exp()?;
        if self.shape.is_empty() {
            return Some(Jet::constant(c0));
        }
        // e^{c + N} = e^c Σ N^k / k!, N nilpotent of order Σ d_i + 1.
        let mut nil = self.clone();
        nil.coeffs[0] = S::zero();
        let order: usize = self.shape.iter().map(|&d| d as usize).sum();
        let mut term = Jet::constant(S::one());
        let mut sum = Jet::constant(S::one());
        for k in 1..=order {
            term = (term * nil.clone()).scale(&S::from_i64(k as i64).inv()?);
            sum = sum + term.clone();
        }
        Some(sum.scale(&c0))
    }

    fn from_i64(n: i64) -> Self {
        Jet::constant(S::from_i64(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Coord};
    use crate::scalar::{ratio, Rational};

    #[test]
    fn polynomial_derivatives() {
        // f = z1 z0^2 along z0 = 1 + t, z1 = 2 + s: ∂t^2 ∂s f = 2.
        let e = parse("(* z1 (^ z0 2))").unwrap();
        let shape = [2, 1];
        let z0 = Jet::affine(&shape, ratio(1, 1), &[ratio(1, 1), ratio(0, 1)]);
        let z1 = Jet::affine(&shape, ratio(2, 1), &[ratio(0, 1), ratio(1, 1)]);
        let j: Jet<Rational> = e
            .eval_with(&|c| match c {
                Coord::Z(0) => Some(z0.clone()),
                Coord::Z(1) => Some(z1.clone()),
                _ => None,
            })
            .unwrap();
        assert_eq!(j.derivative(&[0, 0]), ratio(2, 1));
        assert_eq!(j.derivative(&[1, 0]), ratio(4, 1));
        assert_eq!(j.derivative(&[2, 0]), ratio(4, 1));
        assert_eq!(j.derivative(&[2, 1]), ratio(2, 1));
        assert_eq!(j.derivative(&[1, 1]), ratio(2, 1));
    }

    #[test]
    fn exponential_derivatives() {
        // e^{2 z0} at z0 = 0.3: n-th derivative 2^n e^{0.6}.
        let e = parse("(exp (* 2 z0))").unwrap();
        let z0 = Jet::affine(&[8], 0.3f64, &[1.0]);
        let j = e.eval_with(&|_| Some(z0.clone())).unwrap();
        for n in 0..=8u8 {
            let want = 2f64.powi(n as i32) * 0.6f64.exp();
            assert!((j.derivative(&[n]) - want).abs() < 1e-11 * want);
        }
    }

    #[test]
    fn constants_broadcast() {
        let a = Jet::affine(&[1, 1], 1.0f64, &[1.0, 1.0]);
        let b = a.clone() * Jet::constant(3.0) + Jet::constant(1.0);
        assert_eq!(b.coeff(&[0, 0]), 4.0);
        assert_eq!(b.coeff(&[1, 0]), 3.0);
        assert_eq!(b.coeff(&[1, 1]), 0.0);
        assert_eq!((a.clone() * a).coeff(&[1, 1]), 2.0);
    }
}
