//! Deciding and constructing isometries between points of the family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::alpha::{alpha_sequence, psi_derivative, psi_of};
use crate::error::{Error, Result};
use crate::geodesic::Geodesics;
use crate::linalg::Matrix;
use crate::manifold::{metric, nabla_r_closed, ManifoldConfig};
use crate::model::normalize_frame;
use crate::tensor::Frame;

/// Default highest `k` compared by [`isometry_decision`].
pub const ALPHA_K_MAX: usize = 12;

/// Relative tolerance for comparing `α^k` values.
pub const ALPHA_REL_TOL: f64 = 1e-9;

/// Outcome of comparing `α^2 .. α^{k_max}`. Agreement up to `k_max` is
/// necessary for an isometry, not sufficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryVerdict {
    ConsistentUpTo { k_max: usize },
    Distinct { k: usize, alpha1: f64, alpha2: f64 },
}

fn require_positive(config: &ManifoldConfig, point: &[f64]) -> Result<()> {
    let psi = psi_of(config)?;
    let p = config.p();
    for n in [p + 3, p + 4] {
        let v: f64 = psi_derivative(&psi, config, point, n)?;
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("psi^({n}) = {v} is not positive")));
        }
    }
    Ok(())
}

fn alpha_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ALPHA_REL_TOL * a.abs().max(b.abs())
}

pub fn isometry_decision(
    config1: &ManifoldConfig,
    point1: &[f64],
    config2: &ManifoldConfig,
    point2: &[f64],
    k_max: usize,
) -> Result<IsometryVerdict> {
    if config1.p() != config2.p() {
        return Err(Error::Precondition(format!(
            "dimensions differ: p = {} vs p = {}",
            config1.p(),
            config2.p()
        )));
    }
    require_positive(config1, point1)?;
    require_positive(config2, point2)?;
    let a = alpha_sequence(config1, point1, k_max)?;
    let b = alpha_sequence(config2, point2, k_max)?;
    for ((k, x), (_, y)) in a.values.iter().zip(&b.values) {
        if !alpha_close(*x, *y) {
            return Ok(IsometryVerdict::Distinct {
                k: *k,
                alpha1: *x,
                alpha2: *y,
            });
        }
    }
    Ok(IsometryVerdict::ConsistentUpTo { k_max })
}

/// `φ = exp_{P2} ∘ Φ ∘ log_{P1}` with `Φ` the linear map taking one
/// normalized frame to the other.
pub struct Isometry {
    geodesics: Geodesics,
    p1: Vec<f64>,
    p2: Vec<f64>,
    phi: Matrix<f64>,
}

impl Isometry {
    pub fn tangent_map(&self) -> &Matrix<f64> {
        &self.phi
    }

    pub fn apply(&self, q: &[f64]) -> Result<Vec<f64>> {
        let v = self.geodesics.log_map(&self.p1, q)?;
        self.geodesics.exp_map(&self.p2, &self.phi.mul_vec(&v))
    }

    /// Central-difference Jacobian with step `h`.
    pub fn jacobian(&self, q: &[f64], h: f64) -> Result<Matrix<f64>> {
        let n = q.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut plus = q.to_vec();
            let mut minus = q.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let a = self.apply(&plus)?;
            let b = self.apply(&minus)?;
            cols.push(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect::<Vec<_>>());
        }
        Ok(Matrix::from_columns(&cols))
    }

    /// `sup |Jᵀ g(φ(q)) J − g(q)|`.
    pub fn pullback_residual(&self, q: &[f64], h: f64) -> Result<f64> {
        let config = self.geodesics.config();
        let n = q.len();
        let j = self.jacobian(q, h)?;
        let image = self.apply(q)?;
        let dense = |t: crate::tensor::SparseTensor<f64>| Matrix::from_fn(n, n, |a, b| t.get(&[a, b]).unwrap_or(0.0));
        let g_image = dense(metric(config, &image)?);
        let g_here = dense(metric(config, q)?);
        let pulled = j.transpose().mul(&g_image)?.mul(&j)?;
        Ok(pulled.max_abs_diff(&g_here))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub k_cert: usize,
    /// Largest difference between pulled-back `∇^j R`, `j ≤ k_cert + 2`, at the two points.
    pub tensor_agreement: f64,
    pub samples: usize,
    pub worst_residual: f64,
    pub worst_point: Vec<f64>,
    pub passed: bool,
}

/// Jacobian step and pass threshold of the verification.
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;

fn frame_tensors(config: &ManifoldConfig, frame: &Frame<f64>, orders: usize) -> Result<Vec<crate::tensor::SparseTensor<f64>>> {
    (0..=orders)
        .map(|k| nabla_r_closed(config, frame.point(), k)?.pullback(frame.matrix()))
        .collect()
}

/// Builds `φ` from frames normalized to order `k_cert` and checks
/// `φ*g = g` by finite differences at `samples` random points with
/// coordinates in `[−1, 1]`.
pub fn build_isometry(
    config: &ManifoldConfig,
    point1: &[f64],
    point2: &[f64],
    k_cert: usize,
    samples: usize,
    seed: u64,
) -> Result<(Isometry, IsometryReport)> {
    if require_positive(config, point1).is_ok() && require_positive(config, point2).is_ok() {
        if let IsometryVerdict::Distinct { k, alpha1, alpha2 } =
            isometry_decision(config, point1, config, point2, ALPHA_K_MAX)?
        {
            return Err(Error::Precondition(format!(
                "alpha^{k} differs between the points ({alpha1} vs {alpha2})"
            )));
        }
    }
    let f1 = normalize_frame(config, point1, k_cert)?;
    let f2 = normalize_frame(config, point2, k_cert)?;
    let t1 = frame_tensors(config, &f1, k_cert + 2)?;
    let t2 = frame_tensors(config, &f2, k_cert + 2)?;
    let mut agreement: f64 = 0.0;
    for (j, (a, b)) in t1.iter().zip(&t2).enumerate() {
        let d = a.sup_distance(b);
        if d > 1e-8 {
            return Err(Error::Precondition(format!(
                "pulled-back nabla^{j} R differs by {d:e} between the normalized frames"
            )));
        }
        agreement = agreement.max(d);
    }
    let phi = f2.matrix().mul(&f1.matrix().inverse()?)?;
    let iso = Isometry {
        geodesics: Geodesics::new(config),
        p1: point1.to_vec(),
        p2: point2.to_vec(),
        phi,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0;
    let mut worst_point = Vec::new();
    for _ in 0..samples {
        let q: Vec<f64> = (0..config.dim()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r = iso.pullback_residual(&q, FD_STEP)?;
        if r >= worst {
            worst = r;
            worst_point = q;
        }
    }
    let report = IsometryReport {
        k_cert,
        tensor_agreement: agreement,
        samples,
        worst_residual: worst,
        worst_point,
        passed: worst <= FD_TOL,
    };
    Ok((iso, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg(f: &str) -> ManifoldConfig {
        ManifoldConfig::new(1, parse(f).unwrap()).unwrap()
    }

    fn at(c: &ManifoldConfig, x: f64, z0: f64) -> Vec<f64> {
        let mut pt = vec![0.0; c.dim()];
        pt[c.chart().x()] = x;
        pt[c.chart().z(0)] = z0;
        pt
    }

    #[test]
    fn h_one_origin_to_shifted_point() {
        let c = cfg("(* z1 (^ z0 2))");
        let (_, report) = build_isometry(&c, &at(&c, 0.0, 0.0), &at(&c, 1.0, 1.0), 1, 4, 11).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn same_point_gives_identity() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        let p = at(&c, 0.2, 0.4);
        let (iso, _) = build_isometry(&c, &p, &p, 3, 1, 1).unwrap();
        assert!(iso.tangent_map().max_abs_diff(&Matrix::identity(c.dim())) < 1e-12);
        let q: Vec<f64> = (0..c.dim()).map(|i| 0.1 * i as f64 - 0.5).collect();
        let image = iso.apply(&q).unwrap();
        assert!(image.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn decision_examples() {
        let e = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        assert_eq!(
            isometry_decision(&e, &at(&e, 0.0, -1.0), &e, &at(&e, 3.0, 2.0), ALPHA_K_MAX).unwrap(),
            IsometryVerdict::ConsistentUpTo { k_max: ALPHA_K_MAX }
        );
        let mix = cfg("(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        match isometry_decision(&mix, &at(&mix, 0.0, 0.0), &mix, &at(&mix, 0.0, 1.0), ALPHA_K_MAX).unwrap() {
            IsometryVerdict::Distinct { k, .. } => assert_eq!(k, 2),
            other => panic!("{other:?}"),
        }
        let twice = cfg("(+ (* z1 (^ z0 2)) (* 2 (exp z0)) (* 2 (exp (* 2 z0))))");
        let p = at(&mix, 0.0, 0.5);
        assert_eq!(
            isometry_decision(&mix, &p, &twice, &p, ALPHA_K_MAX).unwrap(),
            IsometryVerdict::ConsistentUpTo { k_max: ALPHA_K_MAX }
        );
    }

    #[test]
    fn distinct_alpha_blocks_construction() {
        let mix = cfg("(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        let r = build_isometry(&mix, &at(&mix, 0.0, 0.0), &at(&mix, 0.0, 1.0), 3, 1, 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
