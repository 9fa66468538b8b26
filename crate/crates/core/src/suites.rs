//! Verification suites. Each suite checks one family-wide property on a
//! fixed corpus of instances and random points, and reports per-check
//! outcomes. Used by the `acceptance` test target and `gpw verify-all`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::expr::parse;
use crate::geodesic::{GeodesicData, Geodesics};
use crate::instance::{chain_f, Preset};
use crate::invariant::{
    alpha_direct, alpha_sequence, alpha_via_theta, build_isometry, classify, enumerate_schemes, sphere_block,
    tau_scheme, Classification, CurvatureData, Grid, HomogeneityOrder, MAX_SLOTS,
};
use crate::manifold::{hyperbolic_plane, nabla_r_closed, CurvatureOracle, ManifoldConfig, MetricField};
use crate::model::{base_frame, build_model, normalize_frame, verify_isomorphism};
use crate::scalar::{ratio, Rational, Scalar};
use crate::tensor::SparseTensor;

/// One named check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn bound(label: impl Into<String>, worst: f64, tol: f64) -> Self {
        Check::new(label, worst <= tol, format!("worst {worst:.3e} (tol {tol:.0e})"))
    }

    fn failed(label: impl Into<String>, err: impl fmt::Display) -> Self {
        Check::new(label, false, format!("error: {err}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub id: usize,
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        SuiteReport {
            id: suite.id(),
            suite,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// `criterion <id> <name>: PASS|FAIL (<n>/<m> checks)`.
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!(
            "criterion {} {}: {} ({ok}/{} checks)",
            self.id,
            self.suite.name(),
            if self.passed { "PASS" } else { "FAIL" },
            self.checks.len()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CurvatureOracle,
    SymmetricSpace,
    Geodesics,
    WeylVanishing,
    ModelCertificates,
    AlphaInvariants,
    Classification,
    Isometries,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CurvatureOracle,
        Suite::SymmetricSpace,
        Suite::Geodesics,
        Suite::WeylVanishing,
        Suite::ModelCertificates,
        Suite::AlphaInvariants,
        Suite::Classification,
        Suite::Isometries,
    ];

    pub fn id(self) -> usize {
        Suite::ALL.iter().position(|s| *s == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::CurvatureOracle => "curvature-oracle",
            Suite::SymmetricSpace => "symmetric-space",
            Suite::Geodesics => "geodesics",
            Suite::WeylVanishing => "weyl-vanishing",
            Suite::ModelCertificates => "model-certificates",
            Suite::AlphaInvariants => "alpha-invariants",
            Suite::Classification => "classification",
            Suite::Isometries => "isometries",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn run(self, opts: &SuiteOptions) -> SuiteReport {
        let checks = match self {
            Suite::CurvatureOracle => curvature_oracle(opts),
            Suite::SymmetricSpace => symmetric_space(),
            Suite::Geodesics => geodesics(opts),
            Suite::WeylVanishing => weyl_vanishing(opts),
            Suite::ModelCertificates => model_certificates(opts),
            Suite::AlphaInvariants => alpha_invariants(opts),
            Suite::Classification => classification(opts),
            Suite::Isometries => isometries(opts),
        };
        SuiteReport::new(self, checks)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 20240601,
            exec: Exec::Parallel,
        }
    }
}

impl SuiteOptions {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Runs every suite in order.
pub fn run_all(opts: &SuiteOptions) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|s| s.run(opts)).collect()
}

fn config(p: usize, f: &str) -> ManifoldConfig {
    ManifoldConfig::new(p, parse(f).expect("corpus parses")).expect("corpus is valid")
}

fn preset(p: usize, preset: Preset) -> (String, ManifoldConfig) {
    let spec = preset.instance(p).expect("preset exists");
    (spec.name.clone(), spec.config().expect("preset is valid"))
}

/// Small rationals `n/d` with `|n| ≤ 8`, `1 ≤ d ≤ 4`.
pub fn rational_point(rng: &mut impl Rng, dim: usize) -> Vec<Rational> {
    (0..dim)
        .map(|_| ratio(rng.gen_range(-8..=8), rng.gen_range(1..=4)))
        .collect()
}

/// Uniform in `[lo, hi]^dim`.
pub fn float_point(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// `n` seeded points uniform in `[lo, hi]^dim`.
pub fn sample_points(dim: usize, n: usize, seed: u64, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| float_point(&mut rng, dim, lo, hi)).collect()
}

fn sup_norm<S: Scalar>(t: &SparseTensor<S>) -> f64 {
    t.entries().map(|(_, v)| v.to_f64().abs()).fold(0.0, f64::max)
}

fn relative_distance<S: Scalar>(a: &SparseTensor<S>, b: &SparseTensor<S>) -> f64 {
    a.sup_distance(b) / sup_norm(a).max(sup_norm(b)).max(1.0)
}

fn worst_of(results: Vec<Result<f64>>) -> Result<f64> {
    results.into_iter().try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

fn curvature_oracle(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for p in [1, 2] {
        let corpus = [
            ("0".to_string(), true),
            ("(* z1 (^ z0 2))".to_string(), true),
            (chain_f(p, p + 1).expect("valid"), true),
            (chain_f(p, p + 2).expect("valid"), false),
        ];
        for (f, exact) in corpus {
            let c = config(p, &f);
            let label = format!("p={p} f={f}");
            let oracle = match CurvatureOracle::for_config(&c, 3) {
                Ok(o) => o,
                Err(e) => {
                    checks.push(Check::failed(label, e));
                    continue;
                }
            };
            let mut rng = opts.rng(p as u64 * 31 + f.len() as u64);
            let points: Vec<Vec<Rational>> = (0..20).map(|_| rational_point(&mut rng, c.dim())).collect();
            let outcome = opts.exec.map(&points, |pt| -> Result<f64> {
                let mut worst: f64 = 0.0;
                for k in 0..=3 {
                    if exact {
                        let a = nabla_r_closed(&c, pt, k)?;
                        let b = oracle.evaluate(pt, k)?;
                        worst = worst.max(a.sup_distance(&b));
                    } else {
                        let pf: Vec<f64> = pt.iter().map(|v| v.to_f64()).collect();
                        let a = nabla_r_closed(&c, &pf, k)?;
                        let b = oracle.evaluate(&pf, k)?;
                        worst = worst.max(relative_distance(&a, &b));
                    }
                }
                Ok(worst)
            });
            checks.push(match worst_of(outcome) {
                Ok(w) if exact => Check::new(label, w == 0.0, format!("exact rational, worst {w:.3e}")),
                Ok(w) => Check::bound(label, w, 1e-9),
                Err(e) => Check::failed(label, e),
            });
        }
    }
    checks
}

fn symmetric_space() -> Vec<Check> {
    let corpus = [
        (1, "(+ (* z0 z1) (* 3 (^ z1 2)) (* -2 z0) 5)", true),
        (1, "(* z1 (^ z0 2))", false),
        (1, "(^ z0 4)", false),
        (2, "(+ (* z2 (^ z0 3)) (exp z0))", false),
        (2, "(+ (^ z2 2) (* z0 z1))", true),
    ];
    corpus
        .iter()
        .map(|&(p, f, quadratic)| {
            let label = format!("p={p} f={f}");
            let c = config(p, f);
            let degree_ok = match c.f().to_exp_poly() {
                Ok(e) => e.is_polynomial() && e.max_degree() <= 2,
                Err(_) => false,
            };
            match CurvatureOracle::for_config(&c, 1).and_then(|o| o.symbolic(1).map(|t| t.is_identically_zero())) {
                Ok(parallel) => Check::new(
                    label,
                    parallel == degree_ok && parallel == quadratic,
                    format!("nabla R identically zero: {parallel}, at most quadratic: {degree_ok}"),
                ),
                Err(e) => Check::failed(label, e),
            }
        })
        .collect()
}

fn geodesics(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let flat = config(1, "0");
    let ch = flat.chart();
    let mut v = vec![0.0; flat.dim()];
    v[ch.x()] = 1.0;
    v[ch.z(0)] = 1.0;
    let hand = Geodesics::new(&flat).at(&GeodesicData::new(vec![0.0; flat.dim()], v), 1.0);
    checks.push(match hand {
        Ok(g) => Check::bound("f=0 hand value zt*_0(1) = -1/6", (g[ch.zts(0)] + 1.0 / 6.0).abs(), 1e-12),
        Err(e) => Check::failed("f=0 hand value", e),
    });
    for f in ["(* z1 (^ z0 2))", "(+ (* z1 (^ z0 2)) (exp z0))"] {
        let c = config(1, f);
        let geo = Geodesics::new(&c);
        let mut rng = opts.rng(f.len() as u64);
        let data: Vec<GeodesicData<f64>> = (0..50)
            .map(|_| GeodesicData::new(float_point(&mut rng, c.dim(), -1.0, 1.0), float_point(&mut rng, c.dim(), -1.0, 1.0)))
            .collect();
        let residual = opts.exec.map(&data, |d| geo.ode_residual(d, 0.7, 1e-4));
        checks.push(match worst_of(residual) {
            Ok(w) => Check::bound(format!("{f}: ODE residual"), w, 1e-8),
            Err(e) => Check::failed(format!("{f}: ODE residual"), e),
        });
        let numeric = opts.exec.map(&data, |d| -> Result<f64> {
            let a = geo.at(d, 1.0)?;
            let b = geo.numeric(d, 1.0, 1e-3)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        });
        checks.push(match worst_of(numeric) {
            Ok(w) => Check::bound(format!("{f}: closed vs numeric at t=1"), w, 1e-6),
            Err(e) => Check::failed(format!("{f}: closed vs numeric"), e),
        });
        let round_trip = opts.exec.map(&data, |d| -> Result<f64> {
            let q = geo.exp_map(&d.point, &d.velocity)?;
            let back = geo.log_map(&d.point, &q)?;
            Ok(back
                .iter()
                .zip(&d.velocity)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max))
        });
        checks.push(match worst_of(round_trip) {
            Ok(w) => Check::bound(format!("{f}: log(exp(v)) = v"), w, 1e-9),
            Err(e) => Check::failed(format!("{f}: round trip"), e),
        });
    }
    checks
}

/// Family instances used by the Weyl, model and classification suites.
fn corpus(p: usize) -> Vec<(String, ManifoldConfig)> {
    Preset::all(p).into_iter().map(|pr| preset(p, pr)).collect()
}

fn weyl_vanishing(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let schemes = match enumerate_schemes(MAX_SLOTS) {
        Ok(s) => s,
        Err(e) => return vec![Check::failed("enumerate schemes", e)],
    };
    let max_order = schemes.iter().map(|s| s.max_order()).max().unwrap_or(0);
    for (name, c) in corpus(1) {
        let exact = c.f().to_exp_poly().map(|e| e.is_polynomial()).unwrap_or(false);
        let mut rng = opts.rng(name.len() as u64 + 77);
        let points: Vec<Vec<Rational>> = (0..10).map(|_| rational_point(&mut rng, c.dim())).collect();
        let label = format!("{name}: {} schemes x 10 points", schemes.len());
        let outcome = opts.exec.map(&points, |pt| -> Result<f64> {
            if exact {
                let data = CurvatureData::for_config(&c, pt, max_order)?;
                let vals = data.evaluate_all(&schemes, Exec::Sequential)?;
                Ok(if vals.iter().all(|v| *v == ratio(0, 1)) { 0.0 } else { 1.0 })
            } else {
                let pf: Vec<f64> = pt.iter().map(|v| v.to_f64()).collect();
                let data = CurvatureData::for_config(&c, &pf, max_order)?;
                let vals = data.evaluate_all(&schemes, Exec::Sequential)?;
                Ok(vals.iter().map(|v| v.abs()).fold(0.0, f64::max))
            }
        });
        checks.push(match worst_of(outcome) {
            Ok(w) if exact => Check::new(label, w == 0.0, "exact rational zero"),
            Ok(w) => Check::bound(label, w, 1e-10),
            Err(e) => Check::failed(label, e),
        });
    }
    let sphere = sphere_block(2.0, 0.9).evaluate(&tau_scheme());
    checks.push(match sphere {
        Ok(t) => Check::new(
            "control: round sphere r=2",
            (t - 0.5).abs() < 1e-12,
            format!("tau = {t} (expected 1/2)"),
        ),
        Err(e) => Check::failed("control: round sphere", e),
    });
    let hyperbolic = hyperbolic_control(0.3);
    checks.push(match hyperbolic {
        Ok(t) => Check::new(
            "control: hyperbolic plane",
            (t + 2.0).abs() < 1e-12,
            format!("tau = {t} (expected -2)"),
        ),
        Err(e) => Check::failed("control: hyperbolic plane", e),
    });
    checks
}

fn hyperbolic_control(x: f64) -> Result<f64> {
    let field: MetricField = hyperbolic_plane();
    let oracle = CurvatureOracle::new(field, 0);
    let pt = [x, 0.0];
    let data = CurvatureData::from_parts(&oracle.field().inverse_at(&pt)?, &[oracle.evaluate(&pt, 0)?]);
    data.evaluate(&tau_scheme())
}

fn model_certificates(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for p in [1, 2] {
        let m0 = build_model(p, 0).expect("order 0 exists");
        for (name, c) in corpus(p) {
            let mut rng = opts.rng(p as u64 * 1000 + name.len() as u64);
            let points: Vec<Vec<f64>> = (0..20).map(|_| float_point(&mut rng, c.dim(), -1.0, 1.0)).collect();
            let outcome = opts.exec.map(&points, |pt| -> Result<f64> {
                let cert = verify_isomorphism(&c, pt, &base_frame(&c, pt)?, &m0)?;
                Ok(if cert.passed { cert.worst() } else { f64::INFINITY })
            });
            let label = format!("{name}: base frame certifies order 0");
            checks.push(match worst_of(outcome) {
                Ok(w) => Check::bound(label, w, 1e-9),
                Err(e) => Check::failed(label, e),
            });
        }
        for k in 1..=p + 2 {
            let (name, c) = preset(p, Preset::Chain { k });
            let model = build_model(p, k).expect("order within range");
            let mut rng = opts.rng(p as u64 * 100 + k as u64);
            let points: Vec<Vec<f64>> = (0..20).map(|_| float_point(&mut rng, c.dim(), -1.0, 1.0)).collect();
            let outcome = opts.exec.map(&points, |pt| -> Result<f64> {
                let cert = verify_isomorphism(&c, pt, &normalize_frame(&c, pt, k)?, &model)?;
                Ok(if cert.passed { cert.worst() } else { f64::INFINITY })
            });
            let label = format!("{name}: normalized frame certifies order {k}");
            checks.push(match worst_of(outcome) {
                Ok(w) => Check::bound(label, w, 1e-9),
                Err(e) => Check::failed(label, e),
            });
        }
        for j in 1..=p + 1 {
            let (name, c) = preset(p, Preset::Chain { k: j });
            let mut rng = opts.rng(p as u64 * 10 + j as u64 + 5000);
            let pt = rational_point(&mut rng, c.dim());
            for k in j + 1..=p + 2 {
                let label = format!("{name}: nabla^{k} R = 0 while A^{k} != 0");
                let outcome = (|| -> Result<(bool, bool)> {
                    let frame = normalize_frame(&c, &pt.iter().map(|v| v.to_f64()).collect::<Vec<_>>(), j)?;
                    let pulled = nabla_r_closed(&c, frame.point(), k)?.pullback(frame.matrix())?;
                    let exact_zero = nabla_r_closed(&c, &pt, k)?.is_zero_tensor();
                    let model = build_model(p, k)?;
                    let a_nonzero = !model.tensor(k).expect("order k").is_zero_tensor();
                    Ok((exact_zero && pulled.is_zero_tensor(), a_nonzero))
                })();
                checks.push(match outcome {
                    Ok((zero, nonzero)) => Check::new(
                        label,
                        zero && nonzero,
                        format!("pulled-back tensor zero: {zero}, model tensor nonzero: {nonzero}"),
                    ),
                    Err(e) => Check::failed(label, e),
                });
            }
        }
    }
    checks
}

fn alpha_invariants(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let (_, mix) = preset(1, Preset::PsiMixed);
    let (_, exp) = preset(1, Preset::PsiExp);

    let mut rng = opts.rng(404);
    let mut worst: f64 = 0.0;
    let mut tried = 0;
    let mut accepted = 0;
    let mut error = None;
    while accepted < 50 && tried < 500 {
        tried += 1;
        let pt = float_point(&mut rng, mix.dim(), -1.0, 1.0);
        let x = float_point(&mut rng, mix.dim(), -1.0, 1.0);
        let z0 = float_point(&mut rng, mix.dim(), -1.0, 1.0);
        let theta = float_point(&mut rng, mix.dim(), -1.0, 1.0);
        let k = rng.gen_range(2..=5);
        match alpha_via_theta(&mix, &pt, k, &x, &z0, &theta) {
            Ok(via) => {
                accepted += 1;
                match alpha_direct::<f64>(&mix, &pt, k) {
                    Ok(d) => worst = worst.max((via - d).abs() / d.abs().max(1e-300)),
                    Err(e) => error = Some(e),
                }
            }
            Err(crate::Error::Inadmissible(_)) => {}
            Err(e) => error = Some(e),
        }
    }
    let label = format!("theta quotient = direct on {accepted} random admissible triples");
    checks.push(match error {
        Some(e) => Check::failed(label, e),
        None if accepted < 50 => Check::new(label, false, format!("only {accepted} admissible in {tried} draws")),
        None => Check::bound(label, worst, 1e-8),
    });

    let grid = Grid::default();
    let ones = grid.points(&exp).iter().try_fold(0.0f64, |acc, pt| {
        alpha_sequence(&exp, pt, 12).map(|s| s.values.iter().fold(acc, |a, (_, v)| a.max((v - 1.0).abs())))
    });
    checks.push(match ones {
        Ok(w) => Check::bound("psi = e^z0: alpha^k = 1, k = 2..12, 17 grid points", w, 1e-12),
        Err(e) => Check::failed("psi = e^z0", e),
    });

    let mut at0 = vec![0.0; mix.dim()];
    at0[mix.chart().z(0)] = 0.0;
    checks.push(match alpha_direct::<f64>(&mix, &at0, 2) {
        Ok(v) => Check::bound("psi = e^z0 + e^2z0: alpha^2(0) = 1105/1089", (v - 1105.0 / 1089.0).abs(), 1e-12),
        Err(e) => Check::failed("alpha^2(0)", e),
    });
    let exact = alpha_direct::<Rational>(&mix, &vec![ratio(0, 1); mix.dim()], 2);
    checks.push(match exact {
        Ok(v) => Check::new(
            "alpha^2(0) in exact arithmetic",
            v == ratio(1105, 1089),
            format!("{v}"),
        ),
        Err(e) => Check::failed("alpha^2(0) exact", e),
    });
    let values: Result<Vec<f64>> = grid.points(&mix).iter().map(|pt| alpha_direct(&mix, pt, 2)).collect();
    checks.push(match values {
        Ok(v) => {
            let c = crate::invariant::is_constant(&v).expect("nonempty");
            Check::new(
                "psi = e^z0 + e^2z0: alpha^2 not constant on the grid",
                !c.constant,
                format!("min {:.6} max {:.6}", c.min, c.max),
            )
        }
        Err(e) => Check::failed("alpha^2 on grid", e),
    });
    checks
}

fn expected_classification(preset: Preset, p: usize) -> (bool, bool, HomogeneityOrder) {
    match preset {
        Preset::Symmetric => (true, true, HomogeneityOrder::InfFlat),
        Preset::Chain { k } => (false, true, HomogeneityOrder::Finite(k)),
        Preset::PsiExp => (false, true, HomogeneityOrder::Finite(p + 2)),
        Preset::PsiMixed => (false, false, HomogeneityOrder::Finite(p + 2)),
    }
}

fn classification(opts: &SuiteOptions) -> Vec<Check> {
    let grid = Grid::default();
    let mut checks = Vec::new();
    for p in [1, 2] {
        for pr in Preset::all(p) {
            let (name, c) = preset(p, pr);
            let (sym, hom, order) = expected_classification(pr, p);
            checks.push(match classify(&c, &grid, opts.exec) {
                Ok(Classification {
                    symmetric,
                    curvature_homogeneity,
                    homogeneous,
                    ..
                }) => Check::new(
                    name,
                    symmetric == sym && homogeneous == Some(hom) && curvature_homogeneity == order,
                    format!(
                        "got ({symmetric}, {homogeneous:?}, {curvature_homogeneity}), expected ({sym}, Some({hom}), {order})"
                    ),
                ),
                Err(e) => Check::failed(name, e),
            });
        }
    }
    checks
}

fn isometries(opts: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for (pr, k_cert) in [(Preset::Chain { k: 1 }, 1), (Preset::PsiExp, 3)] {
        let (name, c) = preset(1, pr);
        let mut rng = opts.rng(k_cert as u64 + 900);
        let p1 = float_point(&mut rng, c.dim(), -1.0, 1.0);
        let p2 = float_point(&mut rng, c.dim(), -1.0, 1.0);
        let label = format!("{name}: phi*g = g at 10 sample points");
        checks.push(match build_isometry(&c, &p1, &p2, k_cert, 10, opts.seed) {
            Ok((_, report)) => Check::new(
                label,
                report.passed,
                format!("worst {:.3e} (tol 1e-6)", report.worst_residual),
            ),
            Err(e) => Check::failed(label, e),
        });
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::Isometries.id(), 8);
    }

    #[test]
    fn summary_line_shape() {
        let r = SuiteReport::new(Suite::SymmetricSpace, vec![Check::new("a", true, ""), Check::new("b", false, "")]);
        assert_eq!(r.summary_line(), "criterion 2 symmetric-space: FAIL (1/2 checks)");
        assert!(!SuiteReport::new(Suite::Geodesics, vec![]).passed);
    }
}
