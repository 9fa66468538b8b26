//! The affine invariants
//! `α^k = ψ^{(k+p+3)} (ψ^{(p+3)})^{k−1} (ψ^{(p+4)})^{−k}`, `k ≥ 2`, of
//! `f = ψ(z_0) + z_1 z_0² + ... + z_p z_0^{p+1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coord, Expression};
use crate::manifold::{metric_inverse, nabla_r_along, ManifoldConfig};
use crate::scalar::Scalar;
use crate::tensor::apply;

/// `ψ` of an `f_ψ`-shaped configuration (full chain `z_1 .. z_p`).
pub fn psi_of(config: &ManifoldConfig) -> Result<Expression> {
    let shape = config
        .psi_shape()
        .ok_or_else(|| Error::NotPsiShape(config.f().to_string()))?;
    if shape.k != config.p() {
        return Err(Error::NotPsiShape(format!(
            "chain stops at z{} but p = {}",
            shape.k,
            config.p()
        )));
    }
    Ok(shape.psi)
}

/// `ψ^{(n)}` at the point's `z_0`.
pub fn psi_derivative<S: Scalar>(psi: &Expression, config: &ManifoldConfig, point: &[S], n: usize) -> Result<S> {
    psi.multi_partial(&vec![Coord::Z(0); n])
        .eval_with(&config.chart().lookup(point))
}

fn alpha_from<S: Scalar>(k: usize, p: usize, d: &dyn Fn(usize) -> Result<S>) -> Result<S> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("alpha^k needs k >= 2, got {k}")));
    }
    let den = d(p + 4)?;
    let den_inv = den
        .inv()
        .ok_or_else(|| Error::ZeroDenominator(format!("psi^({})", p + 4)))?;
    Ok(d(k + p + 3)? * d(p + 3)?.powu(k as u32 - 1) * den_inv.powu(k as u32))
}

/// `α^k` from symbolic derivatives of `ψ`.
pub fn alpha_direct<S: Scalar>(config: &ManifoldConfig, point: &[S], k: usize) -> Result<S> {
    config.chart().check_point(point)?;
    let psi = psi_of(config)?;
    alpha_from(k, config.p(), &|n| psi_derivative(&psi, config, point, n))
}

/// `α^2, .., α^{k_max}` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSequence {
    pub point: Vec<f64>,
    /// `(k, α^k)` for `k = 2..=k_max`.
    pub values: Vec<(usize, f64)>,
}

pub fn alpha_sequence(config: &ManifoldConfig, point: &[f64], k_max: usize) -> Result<AlphaSequence> {
    config.chart().check_point(point)?;
    let psi = psi_of(config)?;
    let derivs: Vec<f64> = (0..=k_max + config.p() + 3)
        .map(|n| psi_derivative(&psi, config, point, n))
        .collect::<Result<_>>()?;
    let values: Vec<(usize, f64)> = (2..=k_max)
        .map(|k| alpha_from(k, config.p(), &|n| Ok(derivs[n])).map(|v| (k, v)))
        .collect::<Result<_>>()?;
    for (k, v) in &values {
        if !v.is_finite() {
            return Err(Error::NotRepresentable(format!("alpha^{k} overflows at this point")));
        }
    }
    Ok(AlphaSequence {
        point: point.to_vec(),
        values,
    })
}

/// Which vector the curvature operator is applied to inside `Θ{..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaForm {
    /// `Θ{(∇_{Z_0})^m ℛ(X, Z_0) X}`, the expression whose `m = p+1` value is
    /// the admissibility condition.
    OnX,
    /// `Θ{(∇_{Z_0})^m ℛ(X, Z_0) Z_0}`.
    OnZ0,
}

/// `Θ{(∇_{Z_0})^m ℛ(X, Z_0) V} = ∇^m R(X, Z_0, V, Θ^♯; Z_0, .., Z_0)`.
fn theta_term<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    m: usize,
    x: &[S],
    z0: &[S],
    v: &[S],
    w: &[S],
) -> Result<S> {
    nabla_r_along(config, point, m, [x, z0, v, w], z0)
}

fn raise<S: Scalar>(config: &ManifoldConfig, point: &[S], theta: &[S]) -> Result<Vec<S>> {
    let ginv = metric_inverse(config, point)?;
    let n = config.dim();
    Ok((0..n)
        .map(|a| {
            let mut e = vec![S::zero(); n];
            e[a] = S::one();
            apply(&ginv, &[&e, theta])
        })
        .collect())
}

/// `α^k` as the quotient
/// `Θ{∇^{k+p+1}ℛ·} Θ{∇^{p+1}ℛ·}^{k−1} / Θ{∇^{p+2}ℛ·}^k` along `Z_0`.
pub fn alpha_via_theta_form<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    k: usize,
    x: &[S],
    z0: &[S],
    theta: &[S],
    form: ThetaForm,
) -> Result<S> {
    let c = config.chart();
    for v in [point, x, z0, theta] {
        c.check_point(v)?;
    }
    if k < 2 {
        return Err(Error::InvalidConfig(format!("alpha^k needs k >= 2, got {k}")));
    }
    let p = config.p();
    let w = raise(config, point, theta)?;
    let admissibility = theta_term(config, point, p + 1, x, z0, x, &w)?;
    if admissibility.is_zero() {
        return Err(Error::Inadmissible("Θ{(∇_Z0)^(p+1) ℛ(X,Z0)X} = 0".into()));
    }
    let v = match form {
        ThetaForm::OnX => x,
        ThetaForm::OnZ0 => z0,
    };
    let base = theta_term(config, point, p + 1, x, z0, v, &w)?;
    let den = theta_term(config, point, p + 2, x, z0, v, &w)?;
    if base.is_zero() || den.is_zero() {
        return Err(Error::Inadmissible(format!(
            "quotient is 0/0 for this triple ({form:?}): Θ{{(∇_Z0)^m ℛ(X,Z0)V}} vanishes"
        )));
    }
    let num = theta_term(config, point, k + p + 1, x, z0, v, &w)?;
    Ok(num * base.powu(k as u32 - 1) * den.inv().expect("nonzero").powu(k as u32))
}

/// [`alpha_via_theta_form`] with [`ThetaForm::OnX`].
pub fn alpha_via_theta<S: Scalar>(
    config: &ManifoldConfig,
    point: &[S],
    k: usize,
    x: &[S],
    z0: &[S],
    theta: &[S],
) -> Result<S> {
    alpha_via_theta_form(config, point, k, x, z0, theta, ThetaForm::OnX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::{ratio, Rational};

    fn cfg(f: &str) -> ManifoldConfig {
        ManifoldConfig::new(1, parse(f).unwrap()).unwrap()
    }

    fn at_z0(c: &ManifoldConfig, z0: f64) -> Vec<f64> {
        let mut pt = vec![0.25; c.dim()];
        pt[c.chart().z(0)] = z0;
        pt
    }

    #[test]
    fn exponential_psi_gives_one() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        for z0 in [-2.0, 0.0, 1.5] {
            let seq = alpha_sequence(&c, &at_z0(&c, z0), 12).unwrap();
            assert!(seq.values.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn mixed_exponentials_hand_value() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        let a: f64 = alpha_direct(&c, &at_z0(&c, 0.0), 2).unwrap();
        assert!((a - 1105.0 / 1089.0).abs() < 1e-12);
    }

    #[test]
    fn scale_of_psi_cancels() {
        let c1 = cfg("(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        let c2 = cfg("(+ (* z1 (^ z0 2)) (* 2 (exp z0)) (* 2 (exp (* 2 z0))))");
        let pt = at_z0(&c1, 0.7);
        for k in 2..6 {
            let a: f64 = alpha_direct(&c1, &pt, k).unwrap();
            let b: f64 = alpha_direct(&c2, &pt, k).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn exact_for_polynomial_psi() {
        // ψ = z0^6: ψ^(4) = 360 z0², ψ^(5) = 720 z0, ψ^(6) = 720.
        let c = cfg("(+ (* z1 (^ z0 2)) (^ z0 6))");
        let mut pt = vec![ratio(0, 1); c.dim()];
        pt[c.chart().z(0)] = ratio(1, 1);
        let a: Rational = alpha_direct(&c, &pt, 2).unwrap();
        assert_eq!(a, ratio(720 * 360, 720 * 720));
        pt[c.chart().z(0)] = ratio(0, 1);
        assert!(matches!(alpha_direct(&c, &pt, 2), Err(Error::ZeroDenominator(_))));
    }

    fn canonical(c: &ManifoldConfig) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let ch = c.chart();
        let unit = |i: usize| {
            let mut v = vec![0.0; c.dim()];
            v[i] = 1.0;
            v
        };
        (unit(ch.x()), unit(ch.z(0)), unit(ch.zs(0)))
    }

    #[test]
    fn canonical_triple_reproduces_direct_value() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0) (exp (* 2 z0)))");
        let pt = at_z0(&c, 0.3);
        let (x, z0, theta) = canonical(&c);
        for k in 2..5 {
            let direct: f64 = alpha_direct(&c, &pt, k).unwrap();
            let via = alpha_via_theta(&c, &pt, k, &x, &z0, &theta).unwrap();
            assert!((via - direct).abs() <= 1e-10 * direct.abs(), "k={k}: {via} vs {direct}");
        }
        // The same triple makes the ℛ(X, Z0)Z0 quotient 0/0.
        let displayed = alpha_via_theta_form(&c, &pt, 2, &x, &z0, &theta, ThetaForm::OnZ0);
        assert!(matches!(displayed, Err(Error::Inadmissible(_))));
    }

    #[test]
    fn degree_zero_in_x_and_inadmissible_triples() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        let pt = at_z0(&c, -0.4);
        let (x, z0, theta) = canonical(&c);
        let scaled: Vec<f64> = x.iter().map(|v| 3.5 * v).collect();
        let a = alpha_via_theta(&c, &pt, 3, &x, &z0, &theta).unwrap();
        let b = alpha_via_theta(&c, &pt, 3, &scaled, &z0, &theta).unwrap();
        assert!((a - b).abs() < 1e-12);
        let mut bad = vec![0.0; c.dim()];
        bad[c.chart().zts(1)] = 1.0;
        assert!(matches!(
            alpha_via_theta(&c, &pt, 2, &x, &z0, &bad),
            Err(Error::Inadmissible(_))
        ));
    }
}
