//! The metric family `g_{6+4p,f}`: metric, inverse, Christoffel symbols and
//! the covariant derivatives of the curvature tensor.
//!
//! With `F = f + Σ z_i z̃_i` the only non-constant component is
//! `g(∂x, ∂x) = −2F`; `∂x ↔ ∂x*`, `∂z_i ↔ ∂z*_i`, `∂z̃_i ↔ ∂z̃*_i` are
//! paired with value 1. Every `∇^k R` is then supported on entries
//! `(x, ξ_1, ξ_2, x; ξ_3, ..)` with `ξ` among the `z, z̃` directions and
//! value `∂_{ξ_1}···∂_{ξ_{k+2}} F`.

mod oracle;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Coord, ExpPoly, Expression, PartialCache};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::tensor::{Chart, SparseTensor, Symmetry, Variance};

pub use oracle::{hyperbolic_plane, CurvatureOracle, MetricField, SymbolicTensor, DEFAULT_K_MAX};

/// Serialized form: `{ "p": int, "f": "<s-expression>" }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub p: usize,
    pub f: Expression,
}

/// `f = ψ(z_0) + Σ_{j=1}^{k} z_j z_0^{j+1}`, as recognised from `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiShape {
    pub psi: Expression,
    /// Number of `z_j z_0^{j+1}` terms present.
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct ManifoldConfig {
    chart: Chart,
    f: Expression,
    big_f: Expression,
    cache: Arc<PartialCache>,
}

impl ManifoldConfig {
    /// Validates that `f` only involves `z_0..z_p`.
    pub fn new(p: usize, f: Expression) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        let chart = Chart::new(p)?;
        for v in f.variables() {
            match v {
                Coord::Z(i) if (i as usize) <= p => {}
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "f may only depend on z0..z{p}, found `{other}`"
                    )))
                }
            }
        }
        let mut terms = vec![f.clone()];
        for i in 0..=p as u8 {
            terms.push(Expression::product([
                Expression::var(Coord::Z(i)),
                Expression::var(Coord::ZTilde(i)),
            ]));
        }
        let big_f = Expression::sum(terms);
        Ok(ManifoldConfig {
            chart,
            f,
            cache: Arc::new(PartialCache::new(big_f.clone())),
            big_f,
        })
    }

    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        Self::new(file.p, file.f.clone())
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            p: self.p(),
            f: self.f.clone(),
        }
    }

    pub fn p(&self) -> usize {
        self.chart.p()
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `(negative, positive)` counts; always neutral.
    pub fn signature(&self) -> (usize, usize) {
        (3 + 2 * self.p(), 3 + 2 * self.p())
    }

    pub fn f(&self) -> &Expression {
        &self.f
    }

    pub fn big_f(&self) -> &Expression {
        &self.big_f
    }

    /// Cached partial derivative of `F`.
    pub fn big_f_partial(&self, vars: &[Coord]) -> Expression {
        self.cache.get(vars)
    }

    pub fn eval_big_f<S: Scalar>(&self, point: &[S]) -> Result<S> {
        self.chart.check_point(point)?;
        self.big_f.eval_with(&self.chart.lookup(point))
    }

    /// Splits `f` into `ψ(z_0) + Σ_{j=1}^{k} z_j z_0^{j+1}` when it has that
    /// shape. Top-level summands depending on `z_0` alone form `ψ`; the rest
    /// must reduce exactly to the polynomial chain.
    pub fn psi_shape(&self) -> Option<PsiShape> {
        let terms: Vec<Expression> = match self.f.as_node() {
            crate::expr::Node::Sum(v) => v.clone(),
            _ => vec![self.f.clone()],
        };
        let (psi, rest): (Vec<_>, Vec<_>) = terms
            .into_iter()
            .partition(|t| t.variables().iter().all(|&v| v == Coord::Z(0)));
        let rest = Expression::sum(rest).to_exp_poly().ok()?;
        let chain = |k: usize| {
            (1..=k).fold(ExpPoly::default(), |acc, j| {
                let term = ExpPoly::var(Coord::Z(j as u8)).mul(&ExpPoly::var(Coord::Z(0)).pow(j as u32 + 1));
                acc.add(&term)
            })
        };
        let k = (0..=self.p()).find(|&k| rest.sub(&chain(k)).is_zero())?;
        Some(PsiShape {
            psi: Expression::sum(psi),
            k,
        })
    }
}

/// `g` at a point, as a pair-symmetric tensor.
pub fn metric<S: Scalar>(config: &ManifoldConfig, point: &[S]) -> Result<SparseTensor<S>> {
    let c = config.chart();
    let big_f = config.eval_big_f(point)?;
    let mut g = SparseTensor::covariant(c.dim(), 2, Symmetry::PairSymmetric);
    g.insert(&[c.x(), c.x()], S::from_i64(-2) * big_f);
    for a in 0..c.dim() / 2 {
        g.insert(&[a, c.dual(a)], S::one());
    }
    Ok(g)
}

/// Closed-form inverse: the same pairs, plus `g^{x* x*} = 2F`.
pub fn metric_inverse<S: Scalar>(config: &ManifoldConfig, point: &[S]) -> Result<SparseTensor<S>> {
    let c = config.chart();
    let big_f = config.eval_big_f(point)?;
    let mut g = SparseTensor::new(c.dim(), vec![Variance::Contra; 2], Symmetry::PairSymmetric);
    g.insert(&[c.xs(), c.xs()], S::from_i64(2) * big_f);
    for a in 0..c.dim() / 2 {
        g.insert(&[a, c.dual(a)], S::one());
    }
    Ok(g)
}

/// Christoffel symbols `Γ^c_{ab}` stored at index `[c, a, b]`:
/// `Γ^{s*_i}_{xx} = ∂_{s_i}F` and `Γ^{x*}_{x s_i} = Γ^{x*}_{s_i x} = −∂_{s_i}F`.
pub fn christoffel<S: Scalar>(config: &ManifoldConfig, point: &[S]) -> Result<SparseTensor<S>> {
    let c = config.chart();
    c.check_point(point)?;
    let lookup = c.lookup(point);
    let mut gamma = SparseTensor::new(
        c.dim(),
        vec![Variance::Contra, Variance::Co, Variance::Co],
        Symmetry::None,
    );
    for s in c.s_indices() {
        let d: S = config.big_f_partial(&[c.coord(s)]).eval_with(&lookup)?;
        gamma.insert(&[c.dual(s), c.x(), c.x()], d.clone());
        gamma.insert(&[c.xs(), c.x(), s], -d.clone());
        gamma.insert(&[c.xs(), s, c.x()], -d);
    }
    Ok(gamma)
}

/// Distinct permutations of a sorted multiset, in lexicographic order.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

/// Multisets of size `n` drawn from `items` (sorted, with repetition).
pub(crate) fn multisets(items: &[usize], n: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// `∇^k R` at a point from the closed formula. Stored entries are the
/// representatives `(x, ξ_1, ξ_2, x; ξ_3, .., ξ_{k+2})` with `ξ_1 ≤ ξ_2`;
/// the curvature-type tag supplies the rest.
pub fn nabla_r_closed<S: Scalar>(config: &ManifoldConfig, point: &[S], k: usize) -> Result<SparseTensor<S>> {
    let c = config.chart();
    c.check_point(point)?;
    let lookup = c.lookup(point);
    // F is affine in each z̃_i and z̃ only enters through z_i z̃_i, so any
    // derivative of order ≥ 3 that involves a z̃ direction vanishes.
    let directions: Vec<usize> = if k == 0 {
        c.s_indices()
    } else {
        (0..=c.p()).map(|i| c.z(i)).collect()
    };
    let mut t = SparseTensor::covariant(c.dim(), 4 + k, Symmetry::CurvatureType);
    for ms in multisets(&directions, k + 2) {
        let vars: Vec<Coord> = ms.iter().map(|&i| c.coord(i)).collect();
        let d = config.big_f_partial(&vars);
        if d.is_zero() {
            continue;
        }
        let value: S = d.eval_with(&lookup)?;
        if value.is_zero() {
            continue;
        }
        for perm in distinct_permutations(&ms) {
            if perm[0] > perm[1] {
                continue;
            }
            let mut idx = Vec::with_capacity(4 + k);
            idx.extend([c.x(), perm[0], perm[1], c.x()]);
            idx.extend_from_slice(&perm[2..]);
            t.insert(&idx, value.clone());
        }
    }
    Ok(t)
}

/// Symmetric derivative `∂_p ∂_q ∂_u^m F` at `point` along arbitrary
/// vectors, via Taylor jets of `F(P + t u + α p + β q)`.
pub fn directional_d<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    p: &[S],
    q: &[S],
    u: &[S],
    m: usize,
) -> Result<S> {
    let c = config.chart();
    c.check_point(point)?;
    let shape = [m as u8, 1, 1];
    let jets: Vec<Jet<S>> = (0..c.dim())
        .map(|i| Jet::affine(&shape, point[i].clone(), &[u[i].clone(), p[i].clone(), q[i].clone()]))
        .collect();
    let lookup = |coord: Coord| c.index(coord).map(|i| jets[i].clone());
    let j = config.big_f.eval_with(&lookup)?;
    Ok(j.derivative(&[m as u8, 1, 1]))
}

/// `∇^m R(a, b, c, d; u, .., u)` for arbitrary vectors, without
/// materialising the order-`4+m` tensor. Uses
/// `R(a,b,c,d) = a^x d^x D(b,c) − b^x d^x D(a,c) − a^x c^x D(b,d) + b^x c^x D(a,d)`
/// with `D` the symmetric derivative of `F`.
pub fn nabla_r_along<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    m: usize,
    [a, b, cv, d]: [&[S]; 4],
    u: &[S],
) -> Result<S> {
    let x = config.chart().x();
    let mut acc = S::zero();
    let terms: [(&[S], &[S], &[S], &[S], i64); 4] = [
        (a, d, b, cv, 1),
        (b, d, a, cv, -1),
        (a, cv, b, d, -1),
        (b, cv, a, d, 1),
    ];
    for (l, r, p, q, sign) in terms {
        let w = l[x].clone() * r[x].clone();
        if w.is_zero() {
            continue;
        }
        let dv = directional_d(config, point, p, q, u, m)?;
        acc = acc + S::from_i64(sign) * w * dv;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::{ratio, Rational};

    fn cfg(p: usize, f: &str) -> ManifoldConfig {
        ManifoldConfig::new(p, parse(f).unwrap()).unwrap()
    }

    fn origin<S: Scalar>(c: &ManifoldConfig) -> Vec<S> {
        vec![S::zero(); c.dim()]
    }

    #[test]
    fn rejects_foreign_variables() {
        assert!(ManifoldConfig::new(1, parse("(* zt0 z0)").unwrap()).is_err());
        assert!(ManifoldConfig::new(1, parse("z2").unwrap()).is_err());
        assert!(ManifoldConfig::new(0, parse("0").unwrap()).is_err());
    }

    #[test]
    fn metric_at_origin_for_exponential() {
        let c = cfg(1, "(exp z0)");
        let g = metric::<f64>(&c, &origin(&c)).unwrap();
        assert_eq!(g.get(&[0, 0]), Some(-2.0));
        let ch = c.chart();
        assert_eq!(g.get(&[ch.z(0), ch.zt(0)]), None);
        assert_eq!(g.get(&[ch.zs(1), ch.z(1)]), Some(1.0));
        assert_eq!(c.signature(), (5, 5));
    }

    #[test]
    fn metric_with_z_zt_product() {
        let c = cfg(1, "0");
        let ch = c.chart();
        let mut pt = origin::<Rational>(&c);
        pt[ch.z(0)] = ratio(1, 1);
        pt[ch.zt(0)] = ratio(2, 1);
        let g = metric(&c, &pt).unwrap();
        assert_eq!(g.get(&[0, 0]), Some(ratio(-4, 1)));
        let ginv = metric_inverse(&c, &pt).unwrap();
        assert_eq!(ginv.get(&[ch.x(), ch.xs()]), Some(ratio(1, 1)));
        assert_eq!(ginv.get(&[ch.x(), ch.x()]), None);
    }

    #[test]
    fn christoffel_hand_values() {
        let c = cfg(1, "0");
        let ch = c.chart();
        let mut pt = origin::<Rational>(&c);
        pt[ch.z(0)] = ratio(1, 1);
        pt[ch.zt(0)] = ratio(2, 1);
        let g = christoffel(&c, &pt).unwrap();
        assert_eq!(g.get(&[ch.zs(0), 0, 0]), Some(ratio(2, 1)));
        assert_eq!(g.get(&[ch.zts(0), 0, 0]), Some(ratio(1, 1)));
        assert_eq!(g.get(&[ch.xs(), 0, ch.z(0)]), Some(ratio(-2, 1)));
        let c2 = cfg(1, "(* z1 (^ z0 2))");
        let g2 = christoffel::<Rational>(&c2, &origin(&c2)).unwrap();
        assert_eq!(g2.get(&[ch.xs(), 0, ch.z(0)]), None);
    }

    #[test]
    fn curvature_normal_entries() {
        let c = cfg(1, "(* z1 (^ z0 2))");
        let ch = c.chart();
        let pt = origin::<Rational>(&c);
        let r = nabla_r_closed(&c, &pt, 0).unwrap();
        for i in 0..=1 {
            assert_eq!(r.get(&[0, ch.z(i), ch.zt(i), 0]), Some(ratio(1, 1)));
        }
        let mut pt1 = pt.clone();
        pt1[ch.z(0)] = ratio(3, 1);
        let dr = nabla_r_closed(&c, &pt1, 1).unwrap();
        assert_eq!(dr.get(&[0, ch.z(0), ch.z(1), 0, ch.z(0)]), Some(ratio(2, 1)));
        assert_eq!(dr.get(&[0, ch.zt(0), ch.z(1), 0, ch.z(0)]), None);
    }

    #[test]
    fn psi_derivative_entry() {
        let c = cfg(1, "(exp (* 2 z0))");
        let ch = c.chart();
        let r = nabla_r_closed::<f64>(&c, &origin(&c), 2).unwrap();
        let z0 = ch.z(0);
        assert_eq!(r.get(&[0, z0, z0, 0, z0, z0]), Some(16.0));
    }

    #[test]
    fn directional_contraction_matches_tensor() {
        let c = cfg(2, "(+ (* z1 (^ z0 2)) (* z2 (^ z0 3)) (* z1 z2 z0))");
        let n = c.dim();
        let pt: Vec<Rational> = (0..n).map(|i| ratio(i as i64 % 5 - 2, 3)).collect();
        let vec_of = |seed: i64| -> Vec<Rational> { (0..n).map(|i| ratio((i as i64 * seed) % 7 - 3, 2)).collect() };
        let (a, b, cv, d, u) = (vec_of(1), vec_of(2), vec_of(3), vec_of(5), vec_of(4));
        for m in 0..3 {
            let t = nabla_r_closed(&c, &pt, m).unwrap();
            let mut vs: Vec<&[Rational]> = vec![&a, &b, &cv, &d];
            for _ in 0..m {
                vs.push(&u);
            }
            let want = crate::tensor::apply(&t, &vs);
            let got = nabla_r_along(&c, &pt, m, [&a, &b, &cv, &d], &u).unwrap();
            assert_eq!(got, want, "m = {m}");
        }
    }

    #[test]
    fn recognises_psi_shapes() {
        let c = cfg(2, "(+ (* z1 (^ z0 2)) (* z2 (^ z0 3)) (exp z0))");
        let s = c.psi_shape().unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.psi, parse("(exp z0)").unwrap());
        assert_eq!(cfg(2, "(* z1 (^ z0 2))").psi_shape().unwrap().k, 1);
        assert_eq!(cfg(1, "0").psi_shape().unwrap().k, 0);
        assert!(cfg(1, "(* z1 z1 z0)").psi_shape().is_none());
    }

    #[test]
    fn permutations_of_multiset() {
        assert_eq!(distinct_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(distinct_permutations(&[0, 1, 2]).len(), 6);
        assert_eq!(multisets(&[1, 2, 3], 2).len(), 6);
    }
}
