//! Frame normalization for `f = ψ(z_0) + z_1 z_0² + ... + z_n z_0^{n+1}`.
//!
//! Starting from [`base_frame`], `Z_0` is corrected by `a_1 Z_1 + .. + a_n Z_n`
//! so that `∇^ℓ R(X, Z_0, Z_0, X; Z_0, ..)` vanishes, the `Z_i` are mixed by a
//! triangular matrix so that `∇^ℓ R(X, Z_0, Z_i, X; Z_0, ..) = δ_{iℓ}`, the
//! `Z̃_i` are re-paired through `R(X, Z_i, Z̃_j, X) = δ_ij` and the dual half is
//! the inverse transpose. For orders `p+1` and `p+2` a final rescaling
//! normalises the `ψ^{(p+3)}` and `ψ^{(p+4)}` entries.

use crate::error::{Error, Result};
use crate::expr::Coord;
use crate::linalg::Matrix;
use crate::manifold::ManifoldConfig;
use crate::scalar::Scalar;
use crate::tensor::Frame;

use super::base_frame;

/// Rescaling scalars `ε, ε_0, .., ε_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaling<S> {
    pub epsilon: S,
    /// `eps[i] = ε_i`, with `eps[0] = ε_0`.
    pub eps: Vec<S>,
}

/// Everything solved for while normalizing, indexed from 1 as in the
/// triangular systems (entry `0` of each vector is `i = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationCoefficients<S> {
    /// Requested model order.
    pub order: usize,
    /// Number of `Z_i` (`i ≥ 1`) taking part in the triangular systems.
    pub chain: usize,
    /// `ε_i = ∂_{z_0}^{i+2} f`.
    pub eps: Vec<S>,
    /// `eps_mixed[j-1][i-1] = ε_{j,i} = ∂_{z_0}^{i+1} ∂_{z_j} f`.
    pub eps_mixed: Vec<Vec<S>>,
    /// `a_1, .., a_n`: the `Z_0` correction.
    pub a: Vec<S>,
    /// `a_mixed[i-1][m-1] = a_{i,m}` for `m ≤ i`.
    pub a_mixed: Vec<Vec<S>>,
    pub rescaling: Option<Rescaling<S>>,
}

impl<S: Scalar> NormalizationCoefficients<S> {
    /// Left-hand sides of both triangular systems after substituting the
    /// solution; all zero when the solve is correct.
    pub fn residuals(&self) -> Vec<S> {
        let n = self.chain;
        let mut out = Vec::new();
        for l in 1..=n {
            let mut s = S::zero();
            for j in 1..=n {
                s = s + self.eps_mixed[j - 1][l - 1].clone() * self.a[j - 1].clone();
            }
            out.push(self.eps[l - 1].clone() + S::from_i64(l as i64 + 2) * s);
        }
        for i in 1..=n {
            for l in 1..=i {
                let mut s = S::zero();
                for m in 1..=i {
                    s = s + self.a_mixed[i - 1][m - 1].clone() * self.eps_mixed[m - 1][l - 1].clone();
                }
                if l == i {
                    s = s - S::one();
                }
                out.push(s);
            }
        }
        out
    }
}

fn failure(quantity: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Normalization {
        quantity: quantity.into(),
        detail: detail.into(),
    }
}

fn z0_derivative<S: Scalar>(config: &ManifoldConfig, point: &[S], n: usize, extra: Option<usize>) -> Result<S> {
    let mut vars = vec![Coord::Z(0); n];
    if let Some(j) = extra {
        vars.push(Coord::Z(j as u8));
    }
    config.f().multi_partial(&vars).eval_with(&config.chart().lookup(point))
}

/// A frame on which `g, R, .., ∇^k R` take the values of `𝔐^k`.
pub fn normalize_frame<S: Scalar>(config: &ManifoldConfig, point: &[S], k: usize) -> Result<Frame<S>> {
    normalize_frame_with_coefficients(config, point, k).map(|(f, _)| f)
}

pub fn normalize_frame_with_coefficients<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    k: usize,
) -> Result<(Frame<S>, NormalizationCoefficients<S>)> {
    let c = config.chart();
    let p = c.p();
    if k > p + 2 {
        return Err(Error::ModelOrder { k, max: p + 2 });
    }
    let base = base_frame(config, point)?;
    if k == 0 {
        let coeffs = NormalizationCoefficients {
            order: 0,
            chain: 0,
            eps: vec![],
            eps_mixed: vec![],
            a: vec![],
            a_mixed: vec![],
            rescaling: None,
        };
        return Ok((base, coeffs));
    }
    let shape = config
        .psi_shape()
        .ok_or_else(|| Error::NotPsiShape(config.f().to_string()))?;
    let n = if k <= p { k.max(shape.k) } else { p };

    let eps: Vec<S> = (1..=n)
        .map(|i| z0_derivative(config, point, i + 2, None))
        .collect::<Result<_>>()?;
    let eps_mixed: Vec<Vec<S>> = (1..=n)
        .map(|j| {
            (1..=n)
                .map(|i| z0_derivative(config, point, i + 1, Some(j)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let diag_inv: Vec<S> = (1..=n)
        .map(|i| {
            eps_mixed[i - 1][i - 1]
                .inv()
                .ok_or_else(|| failure(format!("eps_{{{i},{i}}}"), "vanishes at this point"))
        })
        .collect::<Result<_>>()?;

    // 0 = ε_ℓ + (ℓ+2) Σ_j ε_{j,ℓ} a_j, solved from ℓ = n down.
    let mut a = vec![S::zero(); n];
    for l in (1..=n).rev() {
        let mut s = eps[l - 1].clone().div(&S::from_i64(l as i64 + 2)).expect("nonzero");
        for j in l + 1..=n {
            s = s + eps_mixed[j - 1][l - 1].clone() * a[j - 1].clone();
        }
        a[l - 1] = -(s * diag_inv[l - 1].clone());
    }
    // Σ_m a_{i,m} ε_{m,ℓ} = δ_{iℓ}, solved from ℓ = i down.
    let mut a_mixed = vec![vec![S::zero(); n]; n];
    for i in 1..=n {
        a_mixed[i - 1][i - 1] = diag_inv[i - 1].clone();
        for l in (1..i).rev() {
            let mut s = S::zero();
            for m in l + 1..=i {
                s = s + a_mixed[i - 1][m - 1].clone() * eps_mixed[m - 1][l - 1].clone();
            }
            a_mixed[i - 1][l - 1] = -(s * diag_inv[l - 1].clone());
        }
    }

    // ¹Z_i = Σ_m C[i][m] Z_m.
    let mut cmat = Matrix::<S>::identity(p + 1);
    for j in 1..=n {
        cmat[(0, j)] = a[j - 1].clone();
    }
    for i in 1..=n {
        for m in 1..=n {
            cmat[(i, m)] = a_mixed[i - 1][m - 1].clone();
        }
    }
    // ¹Z̃_i = Σ_j D[i][j] Z̃_j with C Dᵀ = I.
    let dmat = cmat.transpose().inverse()?;
    let dim = c.dim();
    let half = dim / 2;
    let mut first = Matrix::<S>::identity(half);
    for i in 0..=p {
        for m in 0..=p {
            first[(c.z(m), c.z(i))] = cmat[(i, m)].clone();
            first[(c.zt(m), c.zt(i))] = dmat[(i, m)].clone();
        }
    }
    let second = first.transpose().inverse()?;
    let mut change = Matrix::<S>::zeros(dim, dim);
    for r in 0..half {
        for col in 0..half {
            change[(r, col)] = first[(r, col)].clone();
            change[(r + half, col + half)] = second[(r, col)].clone();
        }
    }

    let rescaling = if k > p {
        let r = rescale(config, point, k)?;
        let eps2 = r.epsilon.clone() * r.epsilon.clone();
        let eps2_inv = eps2.inv().expect("positive");
        let mut scale = vec![S::one(); dim];
        scale[c.x()] = r.epsilon.clone();
        scale[c.xs()] = r.epsilon.inv().expect("positive");
        for i in 0..=p {
            let e = r.eps[i].clone();
            let e_inv = e.inv().expect("positive");
            scale[c.z(i)] = e.clone();
            scale[c.zs(i)] = e_inv.clone();
            scale[c.zt(i)] = eps2_inv.clone() * e_inv;
            scale[c.zts(i)] = eps2.clone() * e;
        }
        for col in 0..dim {
            for row in 0..dim {
                if !change[(row, col)].is_zero() {
                    change[(row, col)] = change[(row, col)].clone() * scale[col].clone();
                }
            }
        }
        Some(r)
    } else {
        None
    };

    let frame = base.recombine(&change)?;
    let coeffs = NormalizationCoefficients {
        order: k,
        chain: n,
        eps,
        eps_mixed,
        a,
        a_mixed,
        rescaling,
    };
    Ok((frame, coeffs))
}

fn rescale<S: Scalar>(config: &ManifoldConfig, point: &[S], k: usize) -> Result<Rescaling<S>> {
    let p = config.p();
    let psi = config.psi_shape().expect("checked by caller").psi;
    let lookup = config.chart().lookup(point);
    let derivative = |m: usize| -> Result<S> { psi.multi_partial(&vec![Coord::Z(0); m]).eval_with(&lookup) };
    let positive = |m: usize, v: &S| -> Result<()> {
        if v.is_positive() {
            Ok(())
        } else {
            Err(failure(format!("psi^({m})"), format!("must be positive, got {}", v.to_f64())))
        }
    };
    let inv_sqrt = |v: S, what: &str| -> Result<S> {
        v.sqrt()
            .and_then(|s| s.inv())
            .ok_or_else(|| Error::NotRepresentable(format!("square root of {what} in exact arithmetic")))
    };
    let psi3 = derivative(p + 3)?;
    positive(p + 3, &psi3)?;
    let (eps0, epsilon) = if k == p + 1 {
        (S::one(), inv_sqrt(psi3, "psi^(p+3)")?)
    } else {
        let psi4 = derivative(p + 4)?;
        positive(p + 4, &psi4)?;
        let eps0 = psi3.div(&psi4).expect("positive");
        let epsilon = inv_sqrt(eps0.powu(p as u32 + 3) * psi3, "eps_0^(p+3) psi^(p+3)")?;
        (eps0, epsilon)
    };
    let eps2_inv = (epsilon.clone() * epsilon.clone()).inv().expect("positive");
    let mut eps = vec![eps0.clone()];
    for i in 1..=p {
        let e = eps2_inv.clone() * eps0.powu(i as u32 + 1).inv().expect("positive");
        eps.push(e);
    }
    Ok(Rescaling { epsilon, eps })
}

#[cfg(test)]
mod tests {
    use super::super::{build_model, verify_isomorphism};
    use super::*;
    use crate::expr::parse;
    use crate::scalar::{ratio, Rational};

    fn cfg(p: usize, f: &str) -> ManifoldConfig {
        ManifoldConfig::new(p, parse(f).unwrap()).unwrap()
    }

    fn point(c: &ManifoldConfig, z0: Rational) -> Vec<Rational> {
        let mut pt: Vec<Rational> = (0..c.dim()).map(|i| ratio((i as i64 * 7) % 5 - 2, 3)).collect();
        pt[c.chart().z(0)] = z0;
        pt
    }

    #[test]
    fn hand_coefficients_at_z0_zero() {
        let c = cfg(1, "(* z1 (^ z0 2))");
        let pt = point(&c, ratio(0, 1));
        let (_, co) = normalize_frame_with_coefficients(&c, &pt, 1).unwrap();
        assert_eq!(co.eps, vec![ratio(0, 1)]);
        assert_eq!(co.eps_mixed, vec![vec![ratio(2, 1)]]);
        assert_eq!(co.a, vec![ratio(0, 1)]);
        assert_eq!(co.a_mixed, vec![vec![ratio(1, 2)]]);
    }

    #[test]
    fn exact_certificate_for_polynomial_chain() {
        let c = cfg(2, "(+ (* z1 (^ z0 2)) (* z2 (^ z0 3)) (^ z0 4))");
        for z0 in [ratio(-3, 2), ratio(0, 1), ratio(5, 4)] {
            let pt = point(&c, z0);
            let (frame, co) = normalize_frame_with_coefficients(&c, &pt, 2).unwrap();
            assert!(co.residuals().iter().all(|r| r == &ratio(0, 1)));
            let cert = verify_isomorphism(&c, &pt, &frame, &build_model(2, 2).unwrap()).unwrap();
            assert_eq!(cert.worst(), 0.0, "{cert:?}");
        }
    }

    #[test]
    fn rescaled_orders_for_exponential_psi() {
        let c = cfg(1, "(+ (* z1 (^ z0 2)) (exp z0))");
        let pt: Vec<f64> = (0..c.dim()).map(|i| 0.3 * i as f64 - 1.0).collect();
        for k in [2, 3] {
            let frame = normalize_frame(&c, &pt, k).unwrap();
            let cert = verify_isomorphism(&c, &pt, &frame, &build_model(1, k).unwrap()).unwrap();
            assert!(cert.passed, "{cert:?}");
        }
    }

    #[test]
    fn structured_failures() {
        let flat = cfg(1, "(exp z0)");
        let pt = vec![0.0; flat.dim()];
        match normalize_frame(&flat, &pt, 1) {
            Err(Error::Normalization { quantity, .. }) => assert_eq!(quantity, "eps_{1,1}"),
            other => panic!("{other:?}"),
        }
        let neg = cfg(1, "(+ (* z1 (^ z0 2)) (- (exp z0)))");
        match normalize_frame(&neg, &pt, 2) {
            Err(Error::Normalization { quantity, .. }) => assert_eq!(quantity, "psi^(4)"),
            other => panic!("{other:?}"),
        }
        let other = cfg(1, "(* z1 z1 z0)");
        assert!(matches!(normalize_frame(&other, &pt, 1), Err(Error::NotPsiShape(_))));
        let exact = cfg(1, "(+ (* z1 (^ z0 2)) (^ z0 4))");
        let rpt = vec![ratio(0, 1); exact.dim()];
        assert!(matches!(normalize_frame(&exact, &rpt, 2), Err(Error::NotRepresentable(_))));
    }
}
