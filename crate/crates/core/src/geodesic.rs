//! Geodesics of `g_{6+4p,f}`.
//!
//! With `γ(0) = (α, ξ, α*, ξ*)` and `γ'(0) = (β, η, β*, η*)`:
//!
//! ```text
//! x(t)    = α + βt,            s(t) = ξ + tη,
//! x*(t)   = α* + β*t + 2β ∫_0^t ∫_0^τ Σ_i η_i ∂_{s_i}F(ξ+ση) dσ dτ,
//! s*_i(t) = ξ*_i + η*_i t − β² ∫_0^t ∫_0^τ ∂_{s_i}F(ξ+ση) dσ dτ.
//! ```
//!
//! The double integral equals `∫_0^t (t−σ) g(σ) dσ`. When `∂_{s_i}F` is an
//! exponential polynomial its restriction to the line is a sum of terms
//! `c σ^n e^{λσ}`, each integrated in closed form; otherwise adaptive
//! Gauss–Kronrod quadrature is used.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{Coord, ExpPoly, Expression, Number};
use crate::manifold::ManifoldConfig;
use crate::scalar::{Real, Ring, Scalar};

/// Initial point and velocity, both in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicData<S> {
    pub point: Vec<S>,
    pub velocity: Vec<S>,
}

impl<S: Scalar> GeodesicData<S> {
    pub fn new(point: Vec<S>, velocity: Vec<S>) -> Self {
        GeodesicData { point, velocity }
    }

    pub fn convert<T: Scalar>(&self) -> GeodesicData<T> {
        GeodesicData {
            point: self.point.iter().map(|v| T::from_f64(v.to_f64())).collect(),
            velocity: self.velocity.iter().map(|v| T::from_f64(v.to_f64())).collect(),
        }
    }
}

/// `∂_{s_i}F` restricted to one geodesic line, in a form that can be
/// integrated twice.
enum Integrand {
    Closed(ExpPoly),
    Quadrature(Expression),
}

/// Per-configuration geodesic solver; caches `∂_{s_i}F` for every `s`.
pub struct Geodesics {
    config: ManifoldConfig,
    integrands: Vec<(usize, Integrand)>,
}

/// `K(n, μ) = ∫_0^1 (1−u) u^n e^{μu} du`.
fn kernel<R: Real>(n: u32, mu: R) -> R {
    let nn = R::from_i64(n as i64);
    let one = R::one();
    let two = R::from_i64(2);
    let zero = R::zero();
    if mu >= zero {
        // Σ_m μ^m/m! · 1/((n+m+1)(n+m+2)), all terms positive.
        let mut term = (nn + one).inv().unwrap() * (nn + two).inv().unwrap();
        let mut sum = term;
        let mut m = 0i64;
        loop {
            let mf = R::from_i64(m);
            let ratio = mu.div(&(mf + one)).unwrap() * (nn + mf + one).div(&(nn + mf + R::from_i64(3))).unwrap();
            term = term * ratio;
            sum = sum + term;
            m += 1;
            if (term.to_f64() <= R::EPSILON * sum.to_f64() && R::from_i64(m) > mu) || m > 100_000 {
                return sum;
            }
        }
    }
    let l = -mu;
    let big = R::from_i64(40.max(4 * (n as i64 + 2)));
    if l > big {
        // I_j = ∫_0^1 u^j e^{−Lu} du by the upward recurrence, stable for L > j.
        let e = (-l).exp().unwrap_or_else(R::zero);
        let mut i_prev = (one - e).div(&l).unwrap();
        let mut i_n = i_prev;
        for j in 1..=n + 1 {
            let cur = (R::from_i64(j as i64) * i_prev - e).div(&l).unwrap();
            if j == n {
                i_n = cur;
            }
            i_prev = cur;
        }
        if n == 0 {
            i_n = (one - e).div(&l).unwrap();
        }
        return i_n - i_prev;
    }
    // e^{−L} Σ_m L^m (m+1) n!/(m+n+2)!, all terms positive.
    let mut term = (nn + one).inv().unwrap() * (nn + two).inv().unwrap();
    let mut sum = term;
    let mut m = 0i64;
    loop {
        let mf = R::from_i64(m);
        let ratio = l * (mf + two).div(&(mf + one)).unwrap() * (nn + mf + R::from_i64(3)).inv().unwrap();
        term = term * ratio;
        sum = sum + term;
        m += 1;
        if (term.to_f64() <= R::EPSILON * sum.to_f64() && R::from_i64(m) > l) || m > 100_000 {
            return sum * (-l).exp().unwrap();
        }
    }
}

fn number<R: Ring>(r: &crate::scalar::Rational) -> R {
    R::from_number(&Number::Rational(r.clone()))
}

/// Multiplies polynomials given by coefficient vectors.
fn poly_mul<R: Real>(a: &[R], b: &[R]) -> Vec<R> {
    let mut out = vec![R::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

/// `∫_0^t (t−σ) p(σ) dσ` for `p` an exponential polynomial restricted to
/// the line `base + σ·dir`.
fn double_integral_closed<R: Real>(
    p: &ExpPoly,
    lookup_base: &dyn Fn(Coord) -> Option<R>,
    lookup_dir: &dyn Fn(Coord) -> Option<R>,
    t: R,
) -> Result<R> {
    let mut total = R::zero();
    for (mono, form, c) in p.terms() {
        let mut poly = vec![number::<R>(c)];
        for (v, n) in &mono.0 {
            let b = lookup_base(*v).ok_or(Error::UnboundVariable(*v))?;
            let d = lookup_dir(*v).ok_or(Error::UnboundVariable(*v))?;
            for _ in 0..*n {
                poly = poly_mul(&poly, &[b, d]);
            }
        }
        let mut lambda = R::zero();
        let mut prefactor = R::one();
        if !form.is_zero() {
            let at_base = form.eval(lookup_base)?;
            prefactor = at_base.exp().ok_or_else(|| Error::NotRepresentable("exp".into()))?;
            for (v, coeff) in &form.coeffs {
                let d = lookup_dir(*v).ok_or(Error::UnboundVariable(*v))?;
                lambda = lambda + number::<R>(coeff) * d;
            }
        }
        let mu = lambda * t;
        let mut tpow = t * t;
        for (n, a) in poly.iter().enumerate() {
            if !a.is_zero() {
                total = total + prefactor * *a * tpow * kernel(n as u32, mu);
            }
            tpow = tpow * t;
        }
    }
    Ok(total)
}

// Gauss–Kronrod 7-15 nodes and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x)? + f(c + x)?;
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Adaptive Gauss–Kronrod with absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi)?;
        if !val.is_finite() {
            return Err(Error::Quadrature { achieved: f64::INFINITY });
        }
        if err <= tol || depth >= 40 {
            if err > tol {
                worst = worst.max(err);
            }
            total += val;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, tol / 2.0, depth + 1));
        stack.push((mid, hi, tol / 2.0, depth + 1));
    }
    if worst > 0.0 {
        return Err(Error::Quadrature { achieved: worst });
    }
    Ok(total)
}

/// Absolute tolerance of the quadrature fallback.
pub const QUADRATURE_TOL: f64 = 1e-12;

impl Geodesics {
    pub fn new(config: &ManifoldConfig) -> Self {
        let c = config.chart();
        let integrands = c
            .s_indices()
            .into_iter()
            .map(|s| {
                let e = config.big_f_partial(&[c.coord(s)]);
                let integrand = match e.to_exp_poly() {
                    Ok(p) => Integrand::Closed(p),
                    Err(_) => Integrand::Quadrature(e),
                };
                (s, integrand)
            })
            .collect();
        Geodesics {
            config: config.clone(),
            integrands,
        }
    }

    pub fn config(&self) -> &ManifoldConfig {
        &self.config
    }

    /// True when every integrand has a closed-form antiderivative.
    pub fn is_closed_form(&self) -> bool {
        self.integrands.iter().all(|(_, i)| matches!(i, Integrand::Closed(_)))
    }

    fn check<S: Scalar>(&self, data: &GeodesicData<S>) -> Result<()> {
        let chart = self.config.chart();
        chart.check_point(&data.point)?;
        chart.check_point(&data.velocity)
    }

    /// `G_i(t) = ∫_0^t ∫_0^τ ∂_{s_i}F(ξ+ση) dσ dτ` for each `s` index.
    fn double_integrals<R: Real>(&self, base: &[R], dir: &[R], t: R) -> Result<Vec<R>> {
        let chart = self.config.chart();
        let lb = chart.lookup(base);
        let ld = chart.lookup(dir);
        self.integrands
            .iter()
            .map(|(_, integrand)| match integrand {
                Integrand::Closed(p) => double_integral_closed(p, &lb, &ld, t),
                Integrand::Quadrature(e) => {
                    let tf = t.to_f64();
                    let bf: Vec<f64> = base.iter().map(Scalar::to_f64).collect();
                    let df: Vec<f64> = dir.iter().map(Scalar::to_f64).collect();
                    let g = |sigma: f64| -> Result<f64> {
                        let pt: Vec<f64> = bf.iter().zip(&df).map(|(b, d)| b + sigma * d).collect();
                        let v: f64 = e.eval_with(&chart.lookup(&pt))?;
                        Ok((tf - sigma) * v)
                    };
                    let (lo, hi) = if tf >= 0.0 { (0.0, tf) } else { (tf, 0.0) };
                    let val = integrate(&g, lo, hi, QUADRATURE_TOL)?;
                    Ok(R::from_f64(if tf >= 0.0 { val } else { -val }))
                }
            })
            .collect()
    }

    /// The closed-form geodesic at parameter `t`.
    pub fn at<R: Real>(&self, data: &GeodesicData<R>, t: R) -> Result<Vec<R>> {
        self.check(data)?;
        let chart = self.config.chart();
        let (x, xs) = (chart.x(), chart.xs());
        let p = &data.point;
        let v = &data.velocity;
        let mut out: Vec<R> = p.iter().zip(v).map(|(a, b)| *a + *b * t).collect();
        let beta = v[x];
        if beta.is_zero() {
            return Ok(out);
        }
        let g = self.double_integrals(p, v, t)?;
        let mut h = R::zero();
        for ((s, _), gi) in self.integrands.iter().zip(&g) {
            h = h + v[*s] * *gi;
            out[chart.dual(*s)] = out[chart.dual(*s)] - beta * beta * *gi;
        }
        out[xs] = out[xs] + R::from_i64(2) * beta * h;
        Ok(out)
    }

    /// `exp_P(v)`.
    pub fn exp_map<R: Real>(&self, point: &[R], v: &[R]) -> Result<Vec<R>> {
        self.at(&GeodesicData::new(point.to_vec(), v.to_vec()), R::one())
    }

    /// The unique `v` with `exp_P(v) = Q`.
    pub fn log_map<R: Real>(&self, point: &[R], q: &[R]) -> Result<Vec<R>> {
        let chart = self.config.chart();
        chart.check_point(point)?;
        chart.check_point(q)?;
        let (x, xs) = (chart.x(), chart.xs());
        let mut v: Vec<R> = q.iter().zip(point).map(|(a, b)| *a - *b).collect();
        let beta = v[x];
        if beta.is_zero() {
            return Ok(v);
        }
        let g = self.double_integrals(point, &v, R::one())?;
        let mut h = R::zero();
        for ((s, _), gi) in self.integrands.iter().zip(&g) {
            h = h + v[*s] * *gi;
            let d = chart.dual(*s);
            v[d] = v[d] + beta * beta * *gi;
        }
        v[xs] = v[xs] - R::from_i64(2) * beta * h;
        Ok(v)
    }

    /// Geodesic acceleration from the closed-form Christoffel symbols.
    fn acceleration(&self, pos: &[f64], vel: &[f64]) -> Result<Vec<f64>> {
        let chart = self.config.chart();
        let lookup = chart.lookup(pos);
        let beta = vel[chart.x()];
        let mut acc = vec![0.0; pos.len()];
        if beta == 0.0 {
            return Ok(acc);
        }
        let mut cross = 0.0;
        for (s, _) in &self.integrands {
            let d: f64 = self.config.big_f_partial(&[chart.coord(*s)]).eval_with(&lookup)?;
            acc[chart.dual(*s)] = -beta * beta * d;
            cross += vel[*s] * d;
        }
        acc[chart.xs()] = 2.0 * beta * cross;
        Ok(acc)
    }

    /// Classical RK4 with `ceil(|t| / step)` equal steps.
    pub fn numeric(&self, data: &GeodesicData<f64>, t: f64, step: f64) -> Result<Vec<f64>> {
        self.check(data)?;
        if !(step > 0.0) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
        }
        let n = ((t.abs() / step).ceil() as usize).max(1);
        let h = t / n as f64;
        let dim = data.point.len();
        let mut pos = data.point.clone();
        let mut vel = data.velocity.clone();
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
        for _ in 0..n {
            let k1v = self.acceleration(&pos, &vel)?;
            let k1x = vel.clone();
            let p2 = axpy(&pos, h / 2.0, &k1x);
            let v2 = axpy(&vel, h / 2.0, &k1v);
            let k2v = self.acceleration(&p2, &v2)?;
            let k2x = v2;
            let p3 = axpy(&pos, h / 2.0, &k2x);
            let v3 = axpy(&vel, h / 2.0, &k2v);
            let k3v = self.acceleration(&p3, &v3)?;
            let k3x = v3;
            let p4 = axpy(&pos, h, &k3x);
            let v4 = axpy(&vel, h, &k3v);
            let k4v = self.acceleration(&p4, &v4)?;
            let k4x = v4;
            for i in 0..dim {
                pos[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                vel[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
        }
        Ok(pos)
    }

    /// Largest residual of the geodesic equations along the closed form at
    /// `t`, with second derivatives from a five-point central difference of
    /// step `h`. Evaluated in double-double arithmetic so round-off stays far
    /// below the difference quotient's truncation error.
    pub fn ode_residual(&self, data: &GeodesicData<f64>, t: f64, h: f64) -> Result<f64> {
        use crate::dd::DoubleDouble as D;
        let data: GeodesicData<D> = data.convert();
        let chart = self.config.chart();
        let td = D::from(t);
        let hd = D::from(h);
        let samples: Vec<Vec<D>> = [-2i64, -1, 0, 1, 2]
            .iter()
            .map(|&k| self.at(&data, td + D::from_i64(k) * hd))
            .collect::<Result<_>>()?;
        let weights = [-1i64, 16, -30, 16, -1];
        let denom = D::from_i64(12) * hd * hd;
        let second: Vec<D> = (0..chart.dim())
            .map(|i| {
                let num = samples
                    .iter()
                    .zip(weights)
                    .fold(D::zero(), |acc, (s, w)| acc + D::from_i64(w) * s[i]);
                num.div(&denom).unwrap()
            })
            .collect();
        let pos = &samples[2];
        let lookup = chart.lookup(pos);
        let beta = data.velocity[chart.x()];
        let mut residual = second.clone();
        let mut cross = D::zero();
        for (s, _) in &self.integrands {
            let d: D = self.config.big_f_partial(&[chart.coord(*s)]).eval_with(&lookup)?;
            let star = chart.dual(*s);
            residual[star] = residual[star] + beta * beta * d;
            cross = cross + data.velocity[*s] * d;
        }
        residual[chart.xs()] = residual[chart.xs()] - D::from_i64(2) * beta * cross;
        Ok(residual.iter().map(|r| r.to_f64().abs()).fold(0.0, f64::max))
    }
}

/// One-shot closed-form geodesic.
pub fn geodesic_closed<R: Real>(config: &ManifoldConfig, data: &GeodesicData<R>, t: R) -> Result<Vec<R>> {
    Geodesics::new(config).at(data, t)
}

/// One-shot RK4 geodesic.
pub fn geodesic_numeric(config: &ManifoldConfig, data: &GeodesicData<f64>, t: f64, step: f64) -> Result<Vec<f64>> {
    Geodesics::new(config).numeric(data, t, step)
}

pub fn exp_map<R: Real>(config: &ManifoldConfig, point: &[R], v: &[R]) -> Result<Vec<R>> {
    Geodesics::new(config).exp_map(point, v)
}

pub fn log_map<R: Real>(config: &ManifoldConfig, point: &[R], q: &[R]) -> Result<Vec<R>> {
    Geodesics::new(config).log_map(point, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::DoubleDouble;
    use crate::expr::parse;

    fn cfg(f: &str) -> ManifoldConfig {
        ManifoldConfig::new(1, parse(f).unwrap()).unwrap()
    }

    #[test]
    fn kernel_matches_quadrature() {
        for n in [0u32, 1, 3, 6] {
            for mu in [-120.0, -45.0, -7.5, -0.3, 0.0, 0.4, 3.0, 25.0] {
                let want = integrate(
                    &|u: f64| Ok((1.0 - u) * u.powi(n as i32) * (mu * u).exp()),
                    0.0,
                    1.0,
                    1e-14 * mu.exp().max(1.0),
                )
                .unwrap();
                let got = kernel(n, mu);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300) + 1e-15, "n={n} mu={mu}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn hand_geodesic_with_flat_f() {
        let c = cfg("0");
        let ch = c.chart();
        let mut v = vec![0.0; c.dim()];
        v[ch.x()] = 1.0;
        v[ch.z(0)] = 1.0;
        let data = GeodesicData::new(vec![0.0; c.dim()], v);
        let g = geodesic_closed(&c, &data, 1.0).unwrap();
        assert!((g[ch.zts(0)] + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(g[ch.xs()], 0.0);
        assert_eq!(g[ch.x()], 1.0);
        assert_eq!(g[ch.z(0)], 1.0);
    }

    #[test]
    fn straight_line_without_x_velocity() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        let mut v = vec![0.0; c.dim()];
        v[c.chart().xs()] = 2.0;
        v[c.chart().zs(1)] = -1.0;
        let p: Vec<f64> = (0..c.dim()).map(|i| i as f64 * 0.1).collect();
        let data = GeodesicData::new(p.clone(), v.clone());
        let g = geodesic_closed(&c, &data, 3.0).unwrap();
        for i in 0..c.dim() {
            assert_eq!(g[i], p[i] + 3.0 * v[i]);
        }
        let n = geodesic_numeric(&c, &data, 3.0, 0.1).unwrap();
        assert!(n.iter().zip(&g).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn residual_is_small_in_double_double() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        let p: Vec<f64> = (0..c.dim()).map(|i| ((i * 37) % 11) as f64 / 11.0 - 0.5).collect();
        let v: Vec<f64> = (0..c.dim()).map(|i| ((i * 23) % 7) as f64 / 7.0 - 0.4).collect();
        let data = GeodesicData::new(p, v);
        let r = Geodesics::new(&c).ode_residual(&data, 0.7, 1e-4).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn log_inverts_exp_in_double_double() {
        let c = cfg("(+ (* z1 (^ z0 2)) (exp z0))");
        let geo = Geodesics::new(&c);
        let p: Vec<DoubleDouble> = (0..c.dim()).map(|i| DoubleDouble::from(i as f64 * 0.1 - 0.3)).collect();
        let v: Vec<DoubleDouble> = (0..c.dim()).map(|i| DoubleDouble::from(0.5 - i as f64 * 0.05)).collect();
        let q = geo.exp_map(&p, &v).unwrap();
        let back = geo.log_map(&p, &q).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((*a - *b).to_f64().abs() < 1e-25);
        }
    }

    #[test]
    fn quadrature_fallback_for_non_affine_exponent() {
        let c = cfg("(exp (^ z0 2))");
        let geo = Geodesics::new(&c);
        assert!(!geo.is_closed_form());
        let p: Vec<f64> = vec![0.1; c.dim()];
        let v: Vec<f64> = vec![0.3; c.dim()];
        let data = GeodesicData::new(p, v);
        let closed = geo.at(&data, 1.0).unwrap();
        let numeric = geo.numeric(&data, 1.0, 1e-3).unwrap();
        for (a, b) in closed.iter().zip(&numeric) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
