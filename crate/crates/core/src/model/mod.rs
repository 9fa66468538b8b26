//! Model spaces `𝔐^k_{6+4p} = (ℝ^{6+4p}, ⟨·,·⟩, A⁰, ..., A^k)` and
//! certification of frames against them.
//!
//! Frame vectors are indexed like chart coordinates: `X` at the position
//! of `x`, `Z_i` at `z_i`, `Z̃*_i` at `z̃*_i`, and so on.

mod decompose;
mod normalize;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::manifold::{metric, nabla_r_closed, ManifoldConfig};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{Chart, Frame, SparseTensor, Symmetry};

pub use decompose::{decomposition_search, split_planes_model, Decomposition, DecompositionOutcome};
pub use normalize::{normalize_frame, normalize_frame_with_coefficients, NormalizationCoefficients, Rescaling};

/// Inner product and curvature data of a model space. Entries are `0`
/// or `±1`, so they are kept exact and converted on comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    dim: usize,
    inner: SparseTensor<Rational>,
    tensors: Vec<SparseTensor<Rational>>,
}

impl Model {
    /// Assembles a model from raw parts; `tensors[i]` must have order `4+i`.
    pub fn from_parts(inner: SparseTensor<Rational>, tensors: Vec<SparseTensor<Rational>>) -> Result<Self> {
        let dim = inner.dim();
        if inner.order() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: inner.order(),
            });
        }
        for (i, t) in tensors.iter().enumerate() {
            if t.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: t.dim(),
                });
            }
            if t.order() != 4 + i {
                return Err(Error::Dimension {
                    expected: 4 + i,
                    found: t.order(),
                });
            }
        }
        Ok(Model { dim, inner, tensors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest covariant-derivative order carried by the model.
    pub fn order(&self) -> usize {
        self.tensors.len().saturating_sub(1)
    }

    pub fn inner(&self) -> &SparseTensor<Rational> {
        &self.inner
    }

    pub fn tensor(&self, i: usize) -> Option<&SparseTensor<Rational>> {
        self.tensors.get(i)
    }

    pub fn tensors(&self) -> &[SparseTensor<Rational>] {
        &self.tensors
    }

    /// The first `k+1` curvature tensors.
    pub fn truncate(&self, k: usize) -> Model {
        Model {
            dim: self.dim,
            inner: self.inner.clone(),
            tensors: self.tensors[..=k.min(self.order())].to_vec(),
        }
    }
}

fn convert<S: Scalar>(t: &SparseTensor<Rational>) -> SparseTensor<S> {
    t.map(|r| S::from_number(&crate::expr::Number::Rational(r.clone())))
}

/// `𝔐^k_{6+4p}` for `0 ≤ k ≤ p+2`.
pub fn build_model(p: usize, k: usize) -> Result<Model> {
    let chart = Chart::new(p)?;
    if p < 1 {
        return Err(Error::InvalidConfig("p must be at least 1".into()));
    }
    if k > p + 2 {
        return Err(Error::ModelOrder { k, max: p + 2 });
    }
    let one = Rational::from_integer(1.into());
    let dim = chart.dim();
    let mut inner = SparseTensor::covariant(dim, 2, Symmetry::PairSymmetric);
    for a in 0..dim / 2 {
        inner.insert(&[a, chart.dual(a)], one.clone());
    }
    let (x, z0) = (chart.x(), chart.z(0));
    let mut tensors = Vec::with_capacity(k + 1);
    let mut a0 = SparseTensor::covariant(dim, 4, Symmetry::CurvatureType);
    for i in 0..=p {
        a0.insert(&[x, chart.z(i), chart.zt(i), x], one.clone());
    }
    tensors.push(a0);
    for i in 1..=k {
        let mut t = SparseTensor::covariant(dim, 4 + i, Symmetry::CurvatureType);
        let mut base = vec![x, z0, z0, x];
        base.extend(std::iter::repeat_n(z0, i));
        if i <= p {
            let zi = chart.z(i);
            let mut e = base.clone();
            e[2] = zi;
            t.insert(&e, one.clone());
            for slot in 4..4 + i {
                let mut e = base.clone();
                e[slot] = zi;
                t.insert(&e, one.clone());
            }
        } else {
            t.insert(&base, one.clone());
        }
        tensors.push(t);
    }
    Ok(Model { dim, inner, tensors })
}

/// The frame `X = ∂x + F∂x*`, `Z_i = ∂z_i − ½Σ_j f_ij ∂z̃_j`, `Z̃_i = ∂z̃_i`,
/// `X* = ∂x*`, `Z*_i = ∂z*_i`, `Z̃*_i = ∂z̃*_i + ½Σ_j f_ij ∂z*_j`, on which
/// `g` and `R` take their model values.
pub fn base_frame<S: Scalar>(config: &ManifoldConfig, point: &[S]) -> Result<Frame<S>> {
    let c = config.chart();
    c.check_point(point)?;
    let lookup = c.lookup(point);
    let p = c.p();
    let half = S::one().div(&S::from_i64(2)).expect("2 is invertible");
    let mut m = Matrix::identity(c.dim());
    m[(c.xs(), c.x())] = config.eval_big_f(point)?;
    for i in 0..=p {
        for j in 0..=p {
            let fij: S = config
                .f()
                .multi_partial(&[c.coord(c.z(i)), c.coord(c.z(j))])
                .eval_with(&lookup)?;
            if fij.is_zero() {
                continue;
            }
            let h = half.clone() * fij;
            m[(c.zt(j), c.z(i))] = -h.clone();
            m[(c.zs(j), c.zts(i))] = h;
        }
    }
    Frame::new(point.to_vec(), m)
}

/// Sup-norm residual of one pulled-back tensor against its model value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorResidual {
    pub tensor: String,
    pub residual: f64,
}

/// Per-tensor residuals of a frame against a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub order: usize,
    pub residuals: Vec<TensorResidual>,
    pub passed: bool,
}

/// Residual threshold for certificates.
pub const CERTIFICATE_TOL: f64 = 1e-9;

impl Certificate {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Compares the pullbacks of `g, R, ∇R, .., ∇^k R` along `frame` with the
/// model, `k` being the model's order.
pub fn verify_isomorphism<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    frame: &Frame<S>,
    model: &Model,
) -> Result<Certificate> {
    if model.dim() != config.dim() {
        return Err(Error::Dimension {
            expected: config.dim(),
            found: model.dim(),
        });
    }
    let m = frame.matrix();
    let mut residuals = Vec::with_capacity(model.order() + 2);
    let g = metric(config, point)?.pullback(m)?;
    residuals.push(TensorResidual {
        tensor: "g".into(),
        residual: g.sup_distance(&convert(model.inner())),
    });
    for (i, a) in model.tensors().iter().enumerate() {
        let pulled = nabla_r_closed(config, point, i)?.pullback(m)?;
        residuals.push(TensorResidual {
            tensor: if i == 0 { "R".into() } else { format!("nabla^{i} R") },
            residual: pulled.sup_distance(&convert(a)),
        });
    }
    let passed = residuals.iter().all(|r| r.residual <= CERTIFICATE_TOL);
    Ok(Certificate {
        order: model.order(),
        residuals,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::ratio;

    fn cfg(p: usize, f: &str) -> ManifoldConfig {
        ManifoldConfig::new(p, parse(f).unwrap()).unwrap()
    }

    #[test]
    fn model_zero_for_p1() {
        let m = build_model(1, 0).unwrap();
        let c = Chart::new(1).unwrap();
        let a0 = m.tensor(0).unwrap();
        assert_eq!(a0.len(), 2);
        assert_eq!(a0.get(&[c.x(), c.z(0), c.zt(0), c.x()]), Some(ratio(1, 1)));
        assert_eq!(a0.get(&[c.x(), c.z(1), c.zt(1), c.x()]), Some(ratio(1, 1)));
        let gram = Matrix::from_fn(10, 10, |i, j| m.inner().get(&[i, j]).unwrap_or(ratio(0, 1)));
        assert_eq!(gram.determinant().abs(), ratio(1, 1));
    }

    #[test]
    fn model_one_for_p1() {
        let m = build_model(1, 1).unwrap();
        let c = Chart::new(1).unwrap();
        let a1 = m.tensor(1).unwrap();
        let (x, z0, z1) = (c.x(), c.z(0), c.z(1));
        assert_eq!(a1.len(), 2);
        assert_eq!(a1.get(&[x, z0, z1, x, z0]), Some(ratio(1, 1)));
        assert_eq!(a1.get(&[x, z0, z0, x, z1]), Some(ratio(1, 1)));
        assert_eq!(build_model(1, 4), Err(Error::ModelOrder { k: 4, max: 3 }));
    }

    #[test]
    fn base_frame_for_flat_f_only_shifts_x() {
        let c = cfg(1, "0");
        let mut pt = vec![ratio(0, 1); c.dim()];
        pt[c.chart().z(0)] = ratio(2, 1);
        pt[c.chart().zt(0)] = ratio(3, 1);
        let frame = base_frame(&c, &pt).unwrap();
        let mut want = Matrix::identity(c.dim());
        want[(c.chart().xs(), c.chart().x())] = ratio(6, 1);
        assert_eq!(frame.matrix(), &want);
    }

    #[test]
    fn base_frame_hand_hessian() {
        let c = cfg(1, "(* z1 (^ z0 2))");
        let ch = c.chart();
        let mut pt = vec![ratio(0, 1); c.dim()];
        pt[ch.z(0)] = ratio(1, 1);
        let z0 = base_frame(&c, &pt).unwrap().vector(ch.z(0));
        let mut want = vec![ratio(0, 1); c.dim()];
        want[ch.z(0)] = ratio(1, 1);
        want[ch.zt(1)] = ratio(-1, 1);
        assert_eq!(z0, want);
    }

    #[test]
    fn base_frame_certifies_model_zero_exactly() {
        let c = cfg(2, "(+ (* z1 (^ z0 2)) (* z2 (^ z0 3)) (* z1 z2 z0))");
        let pt: Vec<Rational> = (0..c.dim()).map(|i| ratio(i as i64 - 5, 3)).collect();
        let frame = base_frame(&c, &pt).unwrap();
        let cert = verify_isomorphism(&c, &pt, &frame, &build_model(2, 0).unwrap()).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.worst(), 0.0);
    }

    #[test]
    fn coordinate_frame_fails_where_f_nonzero() {
        let c = cfg(1, "(* z1 (^ z0 2))");
        let mut pt = vec![0.0; c.dim()];
        pt[c.chart().z(0)] = 1.0;
        pt[c.chart().z(1)] = 1.0;
        let frame = Frame::coordinate(pt.clone());
        let cert = verify_isomorphism(&c, &pt, &frame, &build_model(1, 0).unwrap()).unwrap();
        assert!(!cert.passed);
        assert_eq!(cert.residuals[0].residual, 2.0);
    }
}
