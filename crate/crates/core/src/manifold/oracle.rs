//! Brute-force covariant derivatives of the curvature tensor.
//!
//! Works for any metric whose components and inverse components are
//! exponential polynomials. Everything is done symbolically in
//! [`ExpPoly`] canonical form: first-kind Christoffel symbols from metric
//! derivatives, index raising, `R^d_{abc}`, lowering, then the recursion
//! `(∇T)(ξ_1..ξ_r; η) = ∂_η T(ξ) − Σ_j T(ξ_1, .., Γ(η, ξ_j), .., ξ_r)`.
//! Nothing here uses the closed-form curvature of the family, which makes
//! it an independent check of it.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_traits::One;

use super::ManifoldConfig;
use crate::error::{Error, Result};
use crate::expr::{Coord, ExpPoly};
use crate::scalar::{ratio, Rational, Scalar};
use crate::tensor::{Idx, SparseTensor, Symmetry, Variance};

pub const DEFAULT_K_MAX: usize = 4;

/// Symbolic component field: index tuple ↦ nonzero exponential polynomial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolicTensor {
    pub order: usize,
    pub entries: BTreeMap<Idx, ExpPoly>,
}

impl SymbolicTensor {
    fn new(order: usize) -> Self {
        SymbolicTensor {
            order,
            entries: BTreeMap::new(),
        }
    }

    fn add(&mut self, key: Idx, value: ExpPoly) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&key) {
            Some(slot) => {
                *slot = slot.add(&value);
                if slot.is_zero() {
                    self.entries.remove(&key);
                }
            }
            None => {
                self.entries.insert(key, value);
            }
        }
    }

    /// True iff every component vanishes identically.
    pub fn is_identically_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A metric on a coordinate patch with exponential-polynomial components.
#[derive(Debug, Clone)]
pub struct MetricField {
    coords: Vec<Coord>,
    g: BTreeMap<(usize, usize), ExpPoly>,
    ginv: BTreeMap<(usize, usize), ExpPoly>,
}

fn symmetric_closure(entries: Vec<((usize, usize), ExpPoly)>) -> BTreeMap<(usize, usize), ExpPoly> {
    let mut out = BTreeMap::new();
    for ((a, b), v) in entries {
        if v.is_zero() {
            continue;
        }
        out.insert((a, b), v.clone());
        out.insert((b, a), v);
    }
    out
}

impl MetricField {
    /// Builds the field and checks `g · g^{-1} = 1` identically.
    pub fn new(
        coords: Vec<Coord>,
        g: Vec<((usize, usize), ExpPoly)>,
        ginv: Vec<((usize, usize), ExpPoly)>,
    ) -> Result<Self> {
        let field = MetricField {
            g: symmetric_closure(g),
            ginv: symmetric_closure(ginv),
            coords,
        };
        let n = field.coords.len();
        for a in 0..n {
            for c in 0..n {
                let mut sum = ExpPoly::default();
                for b in 0..n {
                    if let (Some(x), Some(y)) = (field.g.get(&(a, b)), field.ginv.get(&(b, c))) {
                        sum = sum.add(&x.mul(y));
                    }
                }
                let want = if a == c { ExpPoly::constant(Rational::one()) } else { ExpPoly::default() };
                if sum != want {
                    return Err(Error::InvalidConfig(format!(
                        "supplied inverse metric is wrong at ({a}, {c})"
                    )));
                }
            }
        }
        Ok(field)
    }

    /// The metric `g_{6+4p,f}` built from its defining components only.
    pub fn for_config(config: &ManifoldConfig) -> Result<Self> {
        let c = config.chart();
        let big_f = config.big_f().to_exp_poly()?;
        let one = ExpPoly::constant(Rational::one());
        let mut g = vec![((c.x(), c.x()), big_f.scale(&ratio(-2, 1)))];
        let mut ginv = vec![((c.xs(), c.xs()), big_f.scale(&ratio(2, 1)))];
        for a in 0..c.dim() / 2 {
            g.push(((a, c.dual(a)), one.clone()));
            ginv.push(((a, c.dual(a)), one.clone()));
        }
        let coords = (0..c.dim()).map(|i| c.coord(i)).collect();
        MetricField::new(coords, g, ginv)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    fn index_of(&self) -> HashMap<Coord, usize> {
        self.coords.iter().enumerate().map(|(i, c)| (*c, i)).collect()
    }

    pub fn metric_at<S: Scalar>(&self, point: &[S]) -> Result<SparseTensor<S>> {
        self.eval_pairs(&self.g, point, Variance::Co)
    }

    pub fn inverse_at<S: Scalar>(&self, point: &[S]) -> Result<SparseTensor<S>> {
        self.eval_pairs(&self.ginv, point, Variance::Contra)
    }

    fn eval_pairs<S: Scalar>(
        &self,
        map: &BTreeMap<(usize, usize), ExpPoly>,
        point: &[S],
        variance: Variance,
    ) -> Result<SparseTensor<S>> {
        let lookup = self.lookup(point);
        let mut t = SparseTensor::new(self.dim(), vec![variance; 2], Symmetry::None);
        for ((a, b), v) in map {
            t.insert(&[*a, *b], v.eval_with(&lookup)?);
        }
        Ok(t)
    }

    fn lookup<'a, S: Clone>(&'a self, point: &'a [S]) -> impl Fn(Coord) -> Option<S> + 'a {
        move |c| self.coords.iter().position(|&x| x == c).map(|i| point[i].clone())
    }
}

/// Cached symbolic `Γ`, `R`, `∇R`, ... up to `k_max`.
#[derive(Debug)]
pub struct CurvatureOracle {
    field: MetricField,
    k_max: usize,
    /// `Γ^c_{ab}` at key `[c, a, b]`.
    gamma: SymbolicTensor,
    /// `e ↦ [(η, ξ, Γ^e_{ηξ})]`.
    gamma_by_upper: BTreeMap<u8, Vec<(u8, u8, ExpPoly)>>,
    levels: Vec<OnceLock<SymbolicTensor>>,
}

fn key(parts: &[u8]) -> Idx {
    parts.iter().copied().collect()
}

impl CurvatureOracle {
    pub fn new(field: MetricField, k_max: usize) -> Self {
        let gamma = christoffel_second_kind(&field);
        let mut gamma_by_upper: BTreeMap<u8, Vec<(u8, u8, ExpPoly)>> = BTreeMap::new();
        for (idx, v) in &gamma.entries {
            gamma_by_upper
                .entry(idx[0])
                .or_default()
                .push((idx[1], idx[2], v.clone()));
        }
        CurvatureOracle {
            field,
            k_max,
            gamma,
            gamma_by_upper,
            levels: (0..=k_max).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn for_config(config: &ManifoldConfig, k_max: usize) -> Result<Self> {
        Ok(Self::new(MetricField::for_config(config)?, k_max))
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn field(&self) -> &MetricField {
        &self.field
    }

    /// `Γ^c_{ab}` at key `[c, a, b]`.
    pub fn christoffel_symbolic(&self) -> &SymbolicTensor {
        &self.gamma
    }

    /// The symbolic field `∇^k R` (fully covariant, derivative slots last).
    pub fn symbolic(&self, k: usize) -> Result<&SymbolicTensor> {
        if k > self.k_max {
            return Err(Error::OracleOrder {
                requested: k,
                k_max: self.k_max,
            });
        }
        Ok(self.levels[k].get_or_init(|| {
            if k == 0 {
                riemann_lowered(&self.field, &self.gamma)
            } else {
                let prev = self.symbolic(k - 1).expect("lower order within k_max");
                self.covariant_derivative(prev)
            }
        }))
    }

    fn covariant_derivative(&self, t: &SymbolicTensor) -> SymbolicTensor {
        let index_of = self.field.index_of();
        let mut out = SymbolicTensor::new(t.order + 1);
        for (idx, v) in &t.entries {
            for var in v.variables() {
                let Some(&eta) = index_of.get(&var) else { continue };
                let mut k = idx.clone();
                k.push(eta as u8);
                out.add(k, v.differentiate(var));
            }
            for j in 0..t.order {
                let Some(list) = self.gamma_by_upper.get(&idx[j]) else { continue };
                for (eta, xi, gamma) in list {
                    let mut k = idx.clone();
                    k[j] = *xi;
                    k.push(*eta);
                    out.add(k, gamma.mul(v).scale(&-Rational::one()));
                }
            }
        }
        out
    }

    /// `∇^k R` at a point, all entries explicit.
    pub fn evaluate<S: Scalar>(&self, point: &[S], k: usize) -> Result<SparseTensor<S>> {
        if point.len() != self.field.dim() {
            return Err(Error::Dimension {
                expected: self.field.dim(),
                found: point.len(),
            });
        }
        let sym = self.symbolic(k)?;
        let lookup = self.field.lookup(point);
        let mut t = SparseTensor::covariant(self.field.dim(), sym.order, Symmetry::None);
        for (idx, v) in &sym.entries {
            let i: Vec<usize> = idx.iter().map(|&x| x as usize).collect();
            t.insert(&i, v.eval_with(&lookup)?);
        }
        Ok(t)
    }

    /// `Γ^c_{ab}` at a point, key `[c, a, b]`.
    pub fn christoffel_at<S: Scalar>(&self, point: &[S]) -> Result<SparseTensor<S>> {
        let lookup = self.field.lookup(point);
        let mut t = SparseTensor::new(
            self.field.dim(),
            vec![Variance::Contra, Variance::Co, Variance::Co],
            Symmetry::None,
        );
        for (idx, v) in &self.gamma.entries {
            let i: Vec<usize> = idx.iter().map(|&x| x as usize).collect();
            t.insert(&i, v.eval_with(&lookup)?);
        }
        Ok(t)
    }
}

/// `Γ^c_{ab} = ½ g^{cd} (∂_a g_{bd} + ∂_b g_{ad} − ∂_d g_{ab})`.
fn christoffel_second_kind(field: &MetricField) -> SymbolicTensor {
    let index_of = field.index_of();
    let half = ratio(1, 2);
    // First kind, key [a, b, d].
    let mut first = SymbolicTensor::new(3);
    for (&(i, j), gij) in &field.g {
        for var in gij.variables() {
            let Some(&k) = index_of.get(&var) else { continue };
            let d = gij.differentiate(var).scale(&half);
            let (i, j, k) = (i as u8, j as u8, k as u8);
            // ∂_k g_ij appears as ∂_a g_bd (a=k, b=i, d=j), ∂_b g_ad (b=k, a=i, d=j)
            // and −∂_d g_ab (d=k, a=i, b=j).
            first.add(key(&[k, i, j]), d.clone());
            first.add(key(&[i, k, j]), d.clone());
            first.add(key(&[i, j, k]), d.scale(&-Rational::one()));
        }
    }
    let mut by_lower: BTreeMap<u8, Vec<(u8, ExpPoly)>> = BTreeMap::new();
    for (&(c, d), v) in &field.ginv {
        by_lower.entry(d as u8).or_default().push((c as u8, v.clone()));
    }
    let mut gamma = SymbolicTensor::new(3);
    for (idx, v) in &first.entries {
        let (a, b, d) = (idx[0], idx[1], idx[2]);
        for (c, ginv) in by_lower.get(&d).into_iter().flatten() {
            gamma.add(key(&[*c, a, b]), ginv.mul(v));
        }
    }
    gamma
}

/// `R_{abcd} = g_{de} R^e_{abc}` with
/// `R^d_{abc} = ∂_aΓ^d_{bc} − ∂_bΓ^d_{ac} + Γ^d_{ae}Γ^e_{bc} − Γ^d_{be}Γ^e_{ac}`.
fn riemann_lowered(field: &MetricField, gamma: &SymbolicTensor) -> SymbolicTensor {
    let index_of = field.index_of();
    let minus = -Rational::one();
    // Upper-index Riemann, key [a, b, c, d] for R^d_{abc}.
    let mut upper = SymbolicTensor::new(4);
    for (idx, v) in &gamma.entries {
        let (d, x, c) = (idx[0], idx[1], idx[2]);
        for var in v.variables() {
            let Some(&w) = index_of.get(&var) else { continue };
            let dv = v.differentiate(var);
            let w = w as u8;
            // +∂_a Γ^d_{bc} with a = w, b = x.
            upper.add(key(&[w, x, c, d]), dv.clone());
            // −∂_b Γ^d_{ac} with b = w, a = x.
            upper.add(key(&[x, w, c, d]), dv.scale(&minus));
        }
    }
    // Γ^d_{ae} grouped by e.
    let mut by_second: BTreeMap<u8, Vec<(u8, u8, &ExpPoly)>> = BTreeMap::new();
    for (idx, v) in &gamma.entries {
        by_second.entry(idx[2]).or_default().push((idx[0], idx[1], v));
    }
    for (idx, inner) in &gamma.entries {
        let (e, y, c) = (idx[0], idx[1], idx[2]);
        for (d, x, outer) in by_second.get(&e).into_iter().flatten() {
            let prod = outer.mul(inner);
            // +Γ^d_{ae}Γ^e_{bc}: a = x, b = y.
            upper.add(key(&[*x, y, c, *d]), prod.clone());
            // −Γ^d_{be}Γ^e_{ac}: b = x, a = y.
            upper.add(key(&[y, *x, c, *d]), prod.scale(&minus));
        }
    }
    let mut g_by_second: BTreeMap<u8, Vec<(u8, &ExpPoly)>> = BTreeMap::new();
    for (&(d, e), v) in &field.g {
        g_by_second.entry(e as u8).or_default().push((d as u8, v));
    }
    let mut lowered = SymbolicTensor::new(4);
    for (idx, v) in &upper.entries {
        let e = idx[3];
        for (d, g) in g_by_second.get(&e).into_iter().flatten() {
            lowered.add(key(&[idx[0], idx[1], idx[2], *d]), g.mul(v));
        }
    }
    lowered
}

/// Two-dimensional hyperbolic plane `dx² + e^{2x} dz_0²`, a metric outside
/// the family with scalar curvature −2; used as a positive control.
pub fn hyperbolic_plane() -> MetricField {
    let one = ExpPoly::constant(Rational::one());
    let exp_form = |c: i64| {
        crate::expr::Expression::exp(crate::expr::Expression::product([
            crate::expr::Expression::int(c),
            crate::expr::Expression::var(Coord::X),
        ]))
        .to_exp_poly()
        .expect("affine exponent")
    };
    MetricField::new(
        vec![Coord::X, Coord::Z(0)],
        vec![((0, 0), one.clone()), ((1, 1), exp_form(2))],
        vec![((0, 0), one), ((1, 1), exp_form(-2))],
    )
    .expect("valid inverse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::manifold::{christoffel, nabla_r_closed};

    fn config(p: usize, f: &str) -> ManifoldConfig {
        ManifoldConfig::new(p, parse(f).unwrap()).unwrap()
    }

    fn sample_point(dim: usize, seed: i64) -> Vec<Rational> {
        (0..dim).map(|i| ratio((i as i64 * 7 + seed * 3) % 9 - 4, 4)).collect()
    }

    #[test]
    fn generic_christoffel_matches_closed_form() {
        let c = config(1, "(+ (* z1 (^ z0 2)) (^ z0 4))");
        let oracle = CurvatureOracle::for_config(&c, 1).unwrap();
        for seed in 0..5 {
            let pt = sample_point(c.dim(), seed);
            let generic = oracle.christoffel_at(&pt).unwrap();
            let closed = christoffel(&c, &pt).unwrap();
            assert_eq!(generic, closed);
        }
    }

    #[test]
    fn riemann_matches_closed_form() {
        let c = config(1, "(* z1 (^ z0 2))");
        let oracle = CurvatureOracle::for_config(&c, 2).unwrap();
        let pt = sample_point(c.dim(), 2);
        for k in 0..=2 {
            let a = oracle.evaluate(&pt, k).unwrap();
            let b = nabla_r_closed(&c, &pt, k).unwrap().expand();
            assert_eq!(a, b, "k = {k}");
        }
    }

    #[test]
    fn flat_f_has_parallel_curvature() {
        let c = config(1, "0");
        let oracle = CurvatureOracle::for_config(&c, 1).unwrap();
        assert!(!oracle.symbolic(0).unwrap().is_identically_zero());
        assert!(oracle.symbolic(1).unwrap().is_identically_zero());
    }

    #[test]
    fn refuses_orders_above_limit() {
        let c = config(1, "0");
        let oracle = CurvatureOracle::for_config(&c, 2).unwrap();
        assert_eq!(
            oracle.symbolic(3).unwrap_err(),
            Error::OracleOrder { requested: 3, k_max: 2 }
        );
    }

    #[test]
    fn hyperbolic_plane_has_constant_negative_curvature() {
        let oracle = CurvatureOracle::new(hyperbolic_plane(), 1);
        let pt = [0.3f64, -1.2];
        let r = oracle.evaluate(&pt, 0).unwrap();
        // Sectional curvature −1: R(∂x, ∂z, ∂z, ∂x) = −(g_xx g_zz) with our sign convention.
        let want = -(0.6f64).exp();
        let got = r.get(&[0, 1, 1, 0]).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!(oracle.symbolic(1).unwrap().is_identically_zero());
    }
}
