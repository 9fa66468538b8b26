//! Canonical form for exponential polynomials: finite sums of
//! `c · monomial · exp(affine form)` with rational data. Two exponential
//! polynomials are equal as functions iff their canonical forms coincide,
//! so identically-zero derivatives are detected exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use super::{Coord, Expression, Node, Number};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Ring};

/// `constant + Σ coeff · var`, zero coefficients never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub constant: Rational,
    pub coeffs: BTreeMap<Coord, Rational>,
}

impl LinearForm {
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, c) in &other.coeffs {
            let slot = out.coeffs.entry(*v).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out
    }

    pub fn coeff(&self, v: Coord) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval<R: Ring>(&self, lookup: &dyn Fn(Coord) -> Option<R>) -> Result<R> {
        let mut acc = R::from_number(&Number::Rational(self.constant.clone()));
        for (v, c) in &self.coeffs {
            let x = lookup(*v).ok_or(Error::UnboundVariable(*v))?;
            acc = acc + R::from_number(&Number::Rational(c.clone())) * x;
        }
        Ok(acc)
    }

    fn to_expr(&self) -> Expression {
        let mut terms = vec![Expression::rational(self.constant.clone())];
        for (v, c) in &self.coeffs {
            terms.push(Expression::product([
                Expression::rational(c.clone()),
                Expression::var(*v),
            ]));
        }
        Expression::sum(terms)
    }
}

/// Product of variable powers, zero exponents never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub BTreeMap<Coord, u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (v, n) in &other.0 {
            *out.entry(*v).or_insert(0) += n;
        }
        Monomial(out)
    }

    fn to_expr(&self) -> Expression {
        Expression::product(
            self.0
                .iter()
                .map(|(v, n)| Expression::pow(Expression::var(*v), *n)),
        )
    }
}

/// Σ coeff · monomial · exp(form), keyed canonically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    terms: BTreeMap<(Monomial, LinearForm), Rational>,
}

impl ExpPoly {
    pub fn constant(c: Rational) -> Self {
        let mut p = ExpPoly::default();
        p.add_term(Monomial::default(), LinearForm::default(), c);
        p
    }

    pub fn var(v: Coord) -> Self {
        let mut p = ExpPoly::default();
        p.add_term(
            Monomial([(v, 1)].into_iter().collect()),
            LinearForm::default(),
            Rational::one(),
        );
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LinearForm, &Rational)> {
        self.terms.iter().map(|((m, l), c)| (m, l, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables the function actually depends on.
    pub fn variables(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        for (m, l) in self.terms.keys() {
            out.extend(m.0.keys().copied());
            out.extend(l.coeffs.keys().copied());
        }
        out
    }

    /// True when no exponential factor is present.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|(_, l)| l.is_zero())
    }

    /// Largest total degree of the polynomial parts (0 for the zero function).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, l: LinearForm, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (m, l);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for ((m, l), c) in &other.terms {
            out.add_term(m.clone(), l.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> ExpPoly {
        let mut out = ExpPoly::default();
        for ((m, l), c) in &self.terms {
            out.add_term(m.clone(), l.clone(), c * s);
        }
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for ((m1, l1), c1) in &self.terms {
            for ((m2, l2), c2) in &other.terms {
                out.add_term(m1.mul(m2), l1.add(l2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> ExpPoly {
        let mut acc = ExpPoly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn differentiate(&self, v: Coord) -> ExpPoly {
        let mut out = ExpPoly::default();
        for ((m, l), c) in &self.terms {
            if let Some(&n) = m.0.get(&v) {
                let mut dm = m.clone();
                if n == 1 {
                    dm.0.remove(&v);
                } else {
                    dm.0.insert(v, n - 1);
                }
                out.add_term(dm, l.clone(), c * Rational::from_integer(n.into()));
            }
            let lv = l.coeff(v);
            if !lv.is_zero() {
                out.add_term(m.clone(), l.clone(), c * lv);
            }
        }
        out
    }

    pub fn multi_partial(&self, vars: &[Coord]) -> ExpPoly {
        vars.iter().fold(self.clone(), |p, v| p.differentiate(*v))
    }

    pub fn eval_with<R: Ring>(&self, lookup: &dyn Fn(Coord) -> Option<R>) -> Result<R> {
        let mut acc = R::zero();
        for ((m, l), c) in &self.terms {
            let mut term = R::from_number(&Number::Rational(c.clone()));
            for (v, n) in &m.0 {
                term = term * lookup(*v).ok_or(Error::UnboundVariable(*v))?.powu(*n);
            }
            if !l.is_zero() {
                let arg = l.eval(lookup)?;
                let e = arg.exp().ok_or_else(|| {
                    Error::NotRepresentable(format!("(exp {})", l.to_expr()))
                })?;
                term = term * e;
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    pub fn to_expr(&self) -> Expression {
        Expression::sum(self.terms.iter().map(|((m, l), c)| {
            let e = if l.is_zero() {
                Expression::one()
            } else {
                Expression::exp(l.to_expr())
            };
            Expression::product([Expression::rational(c.clone()), m.to_expr(), e])
        }))
    }

    fn as_linear_form(&self) -> Option<LinearForm> {
        let mut out = LinearForm::default();
        for ((m, l), c) in &self.terms {
            if !l.is_zero() {
                return None;
            }
            match m.0.len() {
                0 => out.constant += c,
                1 => {
                    let (v, n) = m.0.iter().next().unwrap();
                    if *n != 1 {
                        return None;
                    }
                    out.coeffs.insert(*v, c.clone());
                }
                _ => return None,
            }
        }
        Some(out)
    }

    /// Converts an expression tree. Fails on floating constants and on
    /// `exp` of a non-affine argument.
    pub fn try_from_expr(e: &Expression) -> Result<ExpPoly> {
        Ok(match e.as_node() {
            Node::Const(Number::Rational(r)) => ExpPoly::constant(r.clone()),
            Node::Const(Number::Float(_)) => {
                return Err(Error::NotExpPolynomial(format!(
                    "{e} (floating constants are not exact)"
                )))
            }
            Node::Var(v) => ExpPoly::var(*v),
            Node::Sum(v) => {
                let mut acc = ExpPoly::default();
                for t in v {
                    acc = acc.add(&ExpPoly::try_from_expr(t)?);
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = ExpPoly::constant(Rational::one());
                for t in v {
                    acc = acc.mul(&ExpPoly::try_from_expr(t)?);
                }
                acc
            }
            Node::Pow(b, n) => ExpPoly::try_from_expr(b)?.pow(*n),
            Node::Exp(arg) => {
                let inner = ExpPoly::try_from_expr(arg)?;
                let form = inner
                    .as_linear_form()
                    .ok_or_else(|| Error::NotExpPolynomial(e.to_string()))?;
                // A nonzero rational constant stays inside the exponent: e^c is
                // transcendental, so distinct constants never cancel.
                let mut p = ExpPoly::default();
                p.add_term(Monomial::default(), form, Rational::one());
                p
            }
        })
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::ratio;

    #[test]
    fn cancellation_is_exact() {
        let a = parse("(* (exp (* 2 z0)) (exp (- z0)))").unwrap().to_exp_poly().unwrap();
        let b = parse("(exp z0)").unwrap().to_exp_poly().unwrap();
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn third_partials_of_quadratic_vanish() {
        let f = parse("(+ (* 3 z0 z1) (^ z1 2) z0 7)").unwrap().to_exp_poly().unwrap();
        for vars in [[Coord::Z(0); 3], [Coord::Z(0), Coord::Z(1), Coord::Z(1)]] {
            assert!(f.multi_partial(&vars).is_zero());
        }
        assert_eq!(f.max_degree(), 2);
    }

    #[test]
    fn derivative_matches_tree_derivative() {
        let e = parse("(+ (* z1 (^ z0 3)) (* z0 (exp (+ 1 (* -1/2 z0)))))").unwrap();
        let p = e.to_exp_poly().unwrap();
        let d_tree = e.multi_partial(&[Coord::Z(0), Coord::Z(0), Coord::Z(1)]);
        let d_norm = p.multi_partial(&[Coord::Z(0), Coord::Z(0), Coord::Z(1)]);
        let pt = |c: Coord| match c {
            Coord::Z(0) => Some(0.3f64),
            Coord::Z(1) => Some(-1.1f64),
            _ => None,
        };
        let a = d_tree.eval_with(&pt).unwrap();
        let b = d_norm.eval_with(&pt).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_affine_exponent() {
        let e = parse("(exp (^ z0 2))").unwrap();
        assert!(matches!(e.to_exp_poly(), Err(Error::NotExpPolynomial(_))));
        assert!(parse("(* 0.5 z0)").unwrap().to_exp_poly().is_err());
    }

    #[test]
    fn exact_evaluation_of_polynomial_part() {
        let p = parse("(* z1 (^ z0 2))").unwrap().to_exp_poly().unwrap();
        let v: Rational = p
            .eval_with(&|c| match c {
                Coord::Z(0) => Some(ratio(1, 2)),
                Coord::Z(1) => Some(ratio(4, 1)),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, ratio(1, 1));
    }
}
