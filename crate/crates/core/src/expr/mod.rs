//! Closed-form scalar functions of the coordinates.
//!
//! An [`Expression`] is an immutable, reference-counted tree of constants,
//! coordinate variables, sums, products, integer powers and exponentials.
//! Constructors fold constants and flatten nested sums/products, and sort
//! the children of commutative nodes so structurally equal expressions hash
//! identically. Nothing else is simplified.
//!
//! Exponential polynomials (`exp` of affine arguments) additionally have a
//! canonical form, [`ExpPoly`], in which identically-zero results are
//! detected exactly.

mod normal;
mod sexpr;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use ordered_float::OrderedFloat;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Ring};

pub use normal::{ExpPoly, LinearForm, Monomial};
pub use sexpr::parse;

/// A coordinate symbol of ℝ^{6+4p}. Indices refer to the `i` in `z_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    X,
    Z(u8),
    ZTilde(u8),
    XStar,
    ZStar(u8),
    ZTildeStar(u8),
}

impl Coord {
    /// True for `x*`, `z*_i`, `z̃*_i`.
    pub fn is_dual(self) -> bool {
        matches!(self, Coord::XStar | Coord::ZStar(_) | Coord::ZTildeStar(_))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::X => write!(f, "x"),
            Coord::Z(i) => write!(f, "z{i}"),
            Coord::ZTilde(i) => write!(f, "zt{i}"),
            Coord::XStar => write!(f, "xs"),
            Coord::ZStar(i) => write!(f, "zs{i}"),
            Coord::ZTildeStar(i) => write!(f, "zts{i}"),
        }
    }
}

/// Numeric literal: exact rational, or a float that came from decimal input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Number {
    Rational(Rational),
    Float(OrderedFloat<f64>),
}

impl Number {
    pub fn int(n: i64) -> Self {
        Number::Rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => x.into_inner(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Float(x) => x.into_inner() == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Float(x) => x.into_inner() == 1.0,
        }
    }

    fn add(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => Number::Rational(a + b),
            _ => Number::Float(OrderedFloat(self.to_f64() + other.to_f64())),
        }
    }

    fn mul(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => Number::Rational(a * b),
            _ => Number::Float(OrderedFloat(self.to_f64() * other.to_f64())),
        }
    }

    fn pow(&self, n: u32) -> Number {
        match self {
            Number::Rational(r) => Number::Rational(r.powu(n)),
            Number::Float(x) => Number::Float(OrderedFloat(x.into_inner().powi(n as i32))),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Float(x) => write!(f, "{:?}", x.into_inner()),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Number),
    Var(Coord),
    Sum(Vec<Expression>),
    Product(Vec<Expression>),
    Pow(Expression, u32),
    Exp(Expression),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expression(Arc<Node>);

impl Expression {
    fn node(node: Node) -> Self {
        Expression(Arc::new(node))
    }

    pub fn as_node(&self) -> &Node {
        &self.0
    }

    pub fn constant(n: Number) -> Self {
        Self::node(Node::Const(n))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Number::int(n))
    }

    pub fn rational(r: Rational) -> Self {
        Self::constant(Number::Rational(r))
    }

    pub fn float(x: f64) -> Self {
        Self::constant(Number::Float(OrderedFloat(x)))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn var(c: Coord) -> Self {
        Self::node(Node::Var(c))
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self.as_node() {
            Node::Const(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    pub fn sum(terms: impl IntoIterator<Item = Expression>) -> Self {
        let mut constant: Option<Number> = None;
        let mut rest = Vec::new();
        let mut push = |e: Expression, rest: &mut Vec<Expression>| match e.as_node() {
            Node::Const(n) => {
                constant = Some(match constant.take() {
                    Some(c) => c.add(n),
                    None => n.clone(),
                })
            }
            _ => rest.push(e),
        };
        for t in terms {
            if let Node::Sum(inner) = t.as_node() {
                for e in inner {
                    push(e.clone(), &mut rest);
                }
            } else {
                push(t, &mut rest);
            }
        }
        if let Some(c) = constant.filter(|c| !c.is_zero()) {
            rest.push(Self::constant(c));
        }
        rest.sort();
        match rest.len() {
            0 => Self::zero(),
            1 => rest.pop().unwrap(),
            _ => Self::node(Node::Sum(rest)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expression>) -> Self {
        let mut constant = Number::int(1);
        let mut rest = Vec::new();
        for f in factors {
            let inner: Vec<Expression> = match f.as_node() {
                Node::Product(inner) => inner.clone(),
                _ => vec![f],
            };
            for e in inner {
                match e.as_node() {
                    Node::Const(n) => constant = constant.mul(n),
                    _ => rest.push(e),
                }
            }
        }
        if constant.is_zero() {
            return Self::constant(constant);
        }
        if !constant.is_one() {
            rest.push(Self::constant(constant));
        }
        rest.sort();
        match rest.len() {
            0 => Self::one(),
            1 => rest.pop().unwrap(),
            _ => Self::node(Node::Product(rest)),
        }
    }

    pub fn pow(base: Expression, n: u32) -> Self {
        match (base.as_node(), n) {
            (_, 0) => Self::one(),
            (_, 1) => base,
            (Node::Const(c), _) => Self::constant(c.pow(n)),
            (Node::Pow(inner, m), _) => Self::pow(inner.clone(), m * n),
            _ => Self::node(Node::Pow(base, n)),
        }
    }

    pub fn exp(arg: Expression) -> Self {
        match arg.as_node() {
            Node::Const(n) if n.is_zero() => Self::one(),
            Node::Const(Number::Float(x)) => Self::float(x.into_inner().exp()),
            _ => Self::node(Node::Exp(arg)),
        }
    }

    pub fn neg(self) -> Self {
        Self::product([Self::int(-1), self])
    }

    /// Variables occurring anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Coord>) {
        match self.as_node() {
            Node::Const(_) => {}
            Node::Var(c) => {
                out.insert(*c);
            }
            Node::Sum(v) | Node::Product(v) => v.iter().for_each(|e| e.collect_vars(out)),
            Node::Pow(e, _) | Node::Exp(e) => e.collect_vars(out),
        }
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        match self.as_node() {
            Node::Const(_) => false,
            Node::Var(v) => *v == c,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|e| e.depends_on(c)),
            Node::Pow(e, _) | Node::Exp(e) => e.depends_on(c),
        }
    }

    /// Evaluates the tree with variable values supplied by `lookup`.
    pub fn eval_with<R: Ring>(&self, lookup: &dyn Fn(Coord) -> Option<R>) -> Result<R> {
        Ok(match self.as_node() {
            Node::Const(n) => R::from_number(n),
            Node::Var(c) => lookup(*c).ok_or(Error::UnboundVariable(*c))?,
            Node::Sum(v) => {
                let mut acc = R::zero();
                for e in v {
                    acc = acc + e.eval_with(lookup)?;
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = R::one();
                for e in v {
                    acc = acc * e.eval_with(lookup)?;
                }
                acc
            }
            Node::Pow(e, n) => e.eval_with(lookup)?.powu(*n),
            Node::Exp(e) => e
                .eval_with(lookup)?
                .exp()
                .ok_or_else(|| Error::NotRepresentable(format!("(exp {e})")))?,
        })
    }

    /// Evaluates against an explicit list of bindings.
    pub fn eval<R: Ring>(&self, bindings: &[(Coord, R)]) -> Result<R> {
        self.eval_with(&|c| bindings.iter().find(|(v, _)| *v == c).map(|(_, x)| x.clone()))
    }

    /// Exact symbolic partial derivative.
    pub fn differentiate(&self, var: Coord) -> Expression {
        match self.as_node() {
            Node::Const(_) => Self::zero(),
            Node::Var(c) => {
                if *c == var {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Sum(v) => Self::sum(v.iter().map(|e| e.differentiate(var))),
            Node::Product(v) => {
                let mut terms = Vec::new();
                for (i, fi) in v.iter().enumerate() {
                    let d = fi.differentiate(var);
                    if d.is_zero() {
                        continue;
                    }
                    let mut factors = v.clone();
                    factors[i] = d;
                    terms.push(Self::product(factors));
                }
                Self::sum(terms)
            }
            Node::Pow(e, n) => {
                let d = e.differentiate(var);
                if d.is_zero() {
                    return Self::zero();
                }
                Self::product([Self::int(*n as i64), Self::pow(e.clone(), n - 1), d])
            }
            Node::Exp(e) => {
                let d = e.differentiate(var);
                if d.is_zero() {
                    return Self::zero();
                }
                Self::product([self.clone(), d])
            }
        }
    }

    /// Iterated partial derivative; the variables are applied in sorted
    /// order so the result does not depend on how they were listed.
    pub fn multi_partial(&self, vars: &[Coord]) -> Expression {
        let mut sorted = vars.to_vec();
        sorted.sort();
        sorted.iter().fold(self.clone(), |e, v| e.differentiate(*v))
    }

    pub fn to_exp_poly(&self) -> Result<ExpPoly> {
        ExpPoly::try_from_expr(self)
    }
}

impl From<Coord> for Expression {
    fn from(c: Coord) -> Self {
        Expression::var(c)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_node() {
            Node::Const(n) => write!(f, "{n}"),
            Node::Var(c) => write!(f, "{c}"),
            Node::Sum(v) | Node::Product(v) => {
                let op = if matches!(self.as_node(), Node::Sum(_)) { "+" } else { "*" };
                write!(f, "({op}")?;
                for e in v {
                    write!(f, " {e}")?;
                }
                write!(f, ")")
            }
            Node::Pow(e, n) => write!(f, "(^ {e} {n})"),
            Node::Exp(e) => write!(f, "(exp {e})"),
        }
    }
}

/// Memoised partial derivatives of one expression, keyed by the sorted
/// variable multiset. Safe for concurrent use.
#[derive(Debug)]
pub struct PartialCache {
    base: Expression,
    table: RwLock<HashMap<Vec<Coord>, Expression>>,
}

impl PartialCache {
    pub fn new(base: Expression) -> Self {
        PartialCache {
            base,
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &Expression {
        &self.base
    }

    pub fn get(&self, vars: &[Coord]) -> Expression {
        let mut key = vars.to_vec();
        key.sort();
        self.get_sorted(&key)
    }

    fn get_sorted(&self, key: &[Coord]) -> Expression {
        if key.is_empty() {
            return self.base.clone();
        }
        if let Some(e) = self.table.read().unwrap().get(key) {
            return e.clone();
        }
        let (last, prefix) = key.split_last().unwrap();
        let d = self.get_sorted(prefix).differentiate(*last);
        self.table
            .write()
            .unwrap()
            .entry(key.to_vec())
            .or_insert(d)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Clone for PartialCache {
    fn clone(&self) -> Self {
        PartialCache {
            base: self.base.clone(),
            table: RwLock::new(self.table.read().unwrap().clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn z(i: u8) -> Expression {
        Expression::var(Coord::Z(i))
    }

    fn zt(i: u8) -> Expression {
        Expression::var(Coord::ZTilde(i))
    }

    fn z1_z0sq() -> Expression {
        Expression::product([z(1), Expression::pow(z(0), 2)])
    }

    #[test]
    fn eval_polynomial_and_exp() {
        let e = z1_z0sq();
        let v: Rational = e
            .eval(&[(Coord::Z(0), ratio(2, 1)), (Coord::Z(1), ratio(3, 1))])
            .unwrap();
        assert_eq!(v, ratio(12, 1));
        let ex = Expression::exp(z(0));
        assert_eq!(ex.eval(&[(Coord::Z(0), 0.0f64)]).unwrap(), 1.0);
    }

    #[test]
    fn eval_big_f_p1() {
        // F = z0 zt0 + z1 zt1 at (z0=1, zt0=2, z1=0, zt1=0) is 2.
        let f = Expression::sum([
            Expression::product([z(0), zt(0)]),
            Expression::product([z(1), zt(1)]),
        ]);
        let b = [
            (Coord::Z(0), ratio(1, 1)),
            (Coord::ZTilde(0), ratio(2, 1)),
            (Coord::Z(1), ratio(0, 1)),
            (Coord::ZTilde(1), ratio(0, 1)),
        ];
        assert_eq!(f.eval(&b).unwrap(), ratio(2, 1));
    }

    #[test]
    fn missing_binding_names_variable() {
        let err = z1_z0sq().eval::<f64>(&[(Coord::Z(0), 1.0)]).unwrap_err();
        assert_eq!(err, Error::UnboundVariable(Coord::Z(1)));
        assert!(err.to_string().contains("z1"));
    }

    #[test]
    fn power_rule() {
        let d = z1_z0sq().differentiate(Coord::Z(0));
        let expected = Expression::product([Expression::int(2), z(0), z(1)]);
        assert_eq!(d, expected);
    }

    #[test]
    fn chain_rule_through_exp() {
        let b = Expression::rational(ratio(3, 2));
        let e = Expression::exp(Expression::product([b.clone(), z(0)]));
        let d = e.differentiate(Coord::Z(0));
        assert_eq!(d, Expression::product([b, e]));
    }

    #[test]
    fn repeated_derivative_of_two_exponentials() {
        // (d/dz0)^4 (e^z0 + e^{2 z0}) at 0 = 1 + 16.
        let psi = Expression::sum([
            Expression::exp(z(0)),
            Expression::exp(Expression::product([Expression::int(2), z(0)])),
        ]);
        let d = psi.multi_partial(&[Coord::Z(0); 4]);
        assert_eq!(d.eval(&[(Coord::Z(0), 0.0f64)]).unwrap(), 17.0);
        let exact: Rational = d.eval(&[(Coord::Z(0), ratio(0, 1))]).unwrap();
        assert_eq!(exact, ratio(17, 1));
    }

    #[test]
    fn mixed_partials_of_big_f() {
        let f = Expression::sum([
            z1_z0sq(),
            Expression::product([z(0), zt(0)]),
            Expression::product([z(1), zt(1)]),
        ]);
        assert!(f.multi_partial(&[Coord::Z(0), Coord::ZTilde(0)]).is_one());
        assert!(f
            .multi_partial(&[Coord::ZTilde(0), Coord::ZTilde(1)])
            .is_zero());
        let d = z1_z0sq().multi_partial(&[Coord::Z(0), Coord::Z(0), Coord::Z(1)]);
        assert_eq!(d, Expression::int(2));
    }

    #[test]
    fn constructors_fold_and_flatten() {
        let e = Expression::sum([Expression::int(1), Expression::sum([z(0), Expression::int(-1)])]);
        assert_eq!(e, z(0));
        let p = Expression::product([Expression::int(2), Expression::product([z(0), Expression::int(0)])]);
        assert!(p.is_zero());
        assert_eq!(
            Expression::sum([z(1), z(0)]),
            Expression::sum([z(0), z(1)])
        );
        assert!(Expression::exp(Expression::zero()).is_one());
    }

    #[test]
    fn cache_reuses_prefixes() {
        let cache = PartialCache::new(z1_z0sq());
        let a = cache.get(&[Coord::Z(1), Coord::Z(0)]);
        let b = cache.get(&[Coord::Z(0), Coord::Z(1)]);
        assert_eq!(a, b);
        assert_eq!(cache.get(&[Coord::Z(0), Coord::Z(0), Coord::Z(1)]), Expression::int(2));
        assert!(cache.len() >= 3);
    }

    #[test]
    fn exponential_derivatives_follow_a_b_pattern() {
        // psi = a e^{b z0}: k-th derivative is a b^k e^{b z0}.
        let a = ratio(5, 3);
        let b = ratio(-3, 2);
        let psi = Expression::product([
            Expression::rational(a.clone()),
            Expression::exp(Expression::product([Expression::rational(b.clone()), z(0)])),
        ]);
        let z0 = 0.37f64;
        let mut d = psi.clone();
        for k in 0..=10u32 {
            let got: f64 = d.eval(&[(Coord::Z(0), z0)]).unwrap();
            let want = a.to_f64().unwrap() * b.to_f64().unwrap().powi(k as i32) * (b.to_f64().unwrap() * z0).exp();
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "k={k}");
            d = d.differentiate(Coord::Z(0));
        }
    }
}
