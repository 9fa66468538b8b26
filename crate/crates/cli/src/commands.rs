use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use gpw_core::exec::Exec;
use gpw_core::geodesic::{GeodesicData, Geodesics};
use gpw_core::instance::InstanceSpec;
use gpw_core::invariant::{
    build_isometry, classify as classify_config, enumerate_schemes, isometry_decision, psi_of, CurvatureData, Grid,
    IsometryVerdict,
};
use gpw_core::manifold::{nabla_r_closed, CurvatureOracle, ManifoldConfig};
use gpw_core::model::{base_frame, build_model, normalize_frame, verify_isomorphism, Certificate};
use gpw_core::suites::{sample_points, Suite, SuiteOptions};
use gpw_core::{Error, Result};
use serde_json::{json, Value};

pub struct Context {
    pub seed: u64,
    pub exec: Exec,
}

/// Machine-readable payload, human summary and overall verdict of one command.
pub struct Report {
    json: Value,
    markdown: String,
    csv: Option<String>,
    ok: bool,
    failed: bool,
}

impl Report {
    fn new(json: Value, markdown: String, ok: bool) -> Self {
        Report {
            json,
            markdown,
            csv: None,
            ok,
            failed: false,
        }
    }

    pub fn from_error(e: Error) -> Self {
        let json = json!({ "error": error_json(&e) });
        Report {
            markdown: format!("# Error\n\n{e}\n"),
            json,
            csv: None,
            ok: false,
            failed: true,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        if self.failed {
            ExitCode::from(2)
        } else if self.ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }

    /// Prints the CSV (if any) or the JSON to stdout, and writes
    /// `<name>.json`, `<name>.md` (and `<name>.csv`) under `out`.
    pub fn emit(&self, name: &str, out: Option<&Path>) -> std::io::Result<()> {
        let json = pretty(&self.json);
        match &self.csv {
            Some(csv) => print!("{csv}"),
            None => print!("{json}"),
        }
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{name}.json")), &json)?;
            fs::write(dir.join(format!("{name}.md")), &self.markdown)?;
            if let Some(csv) = &self.csv {
                fs::write(dir.join(format!("{name}.csv")), csv)?;
            }
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UnboundVariable(_) => "unbound_variable",
        Error::NotRepresentable(_) => "not_representable",
        Error::Parse { .. } => "parse",
        Error::NotExpPolynomial(_) => "not_exp_polynomial",
        Error::Dimension { .. } => "dimension",
        Error::SlotOutOfRange { .. } => "slot_out_of_range",
        Error::Variance(_) => "variance",
        Error::InvalidConfig(_) => "invalid_config",
        Error::OracleOrder { .. } => "oracle_order",
        Error::Quadrature { .. } => "quadrature",
        Error::Normalization { .. } => "normalization",
        Error::ModelOrder { .. } => "model_order",
        Error::Scheme(_) => "scheme",
        Error::ZeroDenominator(_) => "zero_denominator",
        Error::Inadmissible(_) => "inadmissible",
        Error::NotPsiShape(_) => "not_psi_shape",
        Error::Singular => "singular",
        Error::Precondition(_) => "precondition",
        Error::Io(_) => "io",
    }
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "kind": error_kind(e), "message": e.to_string() });
    if let Error::Parse { line, column, .. } = e {
        v["line"] = json!(line);
        v["column"] = json!(column);
    }
    v
}

fn load(path: &Path) -> Result<(InstanceSpec, ManifoldConfig)> {
    let spec = InstanceSpec::load(path)?;
    let config = spec.config()?;
    Ok((spec, config))
}

/// The instance's own points, or `n` seeded points in `[−1, 1]^dim`.
fn points(spec: &InstanceSpec, config: &ManifoldConfig, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    match &spec.points {
        Some(pts) => {
            for pt in pts {
                config.chart().check_point(pt)?;
            }
            Ok(pts.clone())
        }
        None => Ok(sample_points(config.dim(), n, seed, -1.0, 1.0)),
    }
}

fn coordinate_names(config: &ManifoldConfig) -> Vec<String> {
    let chart = config.chart();
    (0..config.dim()).map(|i| chart.coord(i).to_string()).collect()
}

fn heading(md: &mut String, title: &str, spec: &InstanceSpec) {
    let _ = writeln!(md, "# {title}\n\n{}\n", spec.describe());
}

pub fn describe(path: &Path) -> Result<Report> {
    let (spec, config) = load(path)?;
    let (neg, pos) = config.signature();
    let psi = config.psi_shape().map(|s| json!({ "psi": s.psi.to_string(), "chain": s.k }));
    let json = json!({
        "name": spec.name,
        "p": config.p(),
        "dim": config.dim(),
        "signature": [neg, pos],
        "coordinates": coordinate_names(&config),
        "f": config.f().to_string(),
        "F": config.big_f().to_string(),
        "psi_shape": psi,
    });
    let mut md = String::new();
    heading(&mut md, "Instance", &spec);
    let _ = writeln!(md, "| property | value |\n|---|---|");
    let _ = writeln!(md, "| dimension | {} |", config.dim());
    let _ = writeln!(md, "| signature | ({neg}, {pos}) |");
    let _ = writeln!(md, "| F | `{}` |", config.big_f());
    match config.psi_shape() {
        Some(s) => {
            let _ = writeln!(md, "| psi | `{}` (chain length {}) |", s.psi, s.k);
        }
        None => {
            let _ = writeln!(md, "| psi | not of psi shape |");
        }
    }
    Ok(Report::new(json, md, true))
}

pub fn curvature(ctx: &Context, path: &Path, order: usize, n: usize) -> Result<Report> {
    let (spec, config) = load(path)?;
    let pts = points(&spec, &config, n, ctx.seed)?;
    let oracle = if order <= 3 {
        Some(CurvatureOracle::for_config(&config, order)?)
    } else {
        None
    };
    let rows = ctx.exec.map(&pts, |pt| -> Result<(Value, usize, f64, Option<f64>)> {
        let t = nabla_r_closed(&config, pt, order)?;
        let diff = match &oracle {
            Some(o) => Some(t.sup_distance(&o.evaluate(pt, order)?)),
            None => None,
        };
        let sup = t.entries().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        Ok((t.to_json(), t.len(), sup, diff))
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
    let worst_diff = rows.iter().filter_map(|r| r.3).fold(0.0, f64::max);
    let ok = rows.iter().all(|r| r.3.map_or(true, |d| d <= 1e-9));
    let json = json!({
        "instance": spec.name,
        "order": order,
        "points": pts.iter().zip(&rows).map(|(pt, r)| json!({
            "point": pt,
            "tensor": r.0,
            "oracle_difference": r.3,
        })).collect::<Vec<_>>(),
        "worst_oracle_difference": oracle.as_ref().map(|_| worst_diff),
    });
    let mut md = String::new();
    heading(&mut md, &format!("nabla^{order} R"), &spec);
    let _ = writeln!(md, "| point | stored entries | sup norm | oracle difference |\n|---|---|---|---|");
    for (i, r) in rows.iter().enumerate() {
        let diff = r.3.map_or("n/a".to_string(), |d| format!("{d:.3e}"));
        let _ = writeln!(md, "| {i} | {} | {:.6e} | {diff} |", r.1, r.2);
    }
    Ok(Report::new(json, md, ok))
}

pub fn geodesic(ctx: &Context, path: &Path, n: usize) -> Result<Report> {
    let (spec, config) = load(path)?;
    let dim = config.dim();
    let mut draws = sample_points(dim, 2, ctx.seed, -1.0, 1.0);
    let velocity = draws.pop().expect("two draws");
    let point = match &spec.points {
        Some(pts) if !pts.is_empty() => {
            config.chart().check_point(&pts[0])?;
            pts[0].clone()
        }
        _ => draws.pop().expect("two draws"),
    };
    let geo = Geodesics::new(&config);
    let data = GeodesicData::new(point, velocity);
    let n = n.max(2);
    let mut csv = format!("t,{}\n", coordinate_names(&config).join(","));
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let q = geo.at(&data, t)?;
        let row: Vec<String> = q.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(csv, "{t},{}", row.join(","));
    }
    let residual = geo.ode_residual(&data, 0.5, 1e-4)?;
    let closed = geo.at(&data, 1.0)?;
    let numeric = geo.numeric(&data, 1.0, 1e-3)?;
    let discrepancy = closed.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ok = residual <= 1e-8 && discrepancy <= 1e-6;
    let json = json!({
        "instance": spec.name,
        "point": data.point,
        "velocity": data.velocity,
        "closed_form": geo.is_closed_form(),
        "samples": n,
        "ode_residual": residual,
        "numeric_discrepancy": discrepancy,
    });
    let mut md = String::new();
    heading(&mut md, "Geodesic", &spec);
    let _ = writeln!(
        md,
        "| quantity | value |\n|---|---|\n| closed form | {} |\n| ODE residual at t=0.5 | {residual:.3e} |\n| closed vs RK4 at t=1 | {discrepancy:.3e} |",
        geo.is_closed_form()
    );
    let mut report = Report::new(json, md, ok);
    report.csv = Some(csv);
    Ok(report)
}

pub fn weyl(ctx: &Context, path: &Path, max_slots: usize, n: usize) -> Result<Report> {
    let (spec, config) = load(path)?;
    let schemes = enumerate_schemes(max_slots)?;
    let max_order = schemes.iter().map(|s| s.max_order()).max().unwrap_or(0);
    let pts = points(&spec, &config, n, ctx.seed)?;
    let mut per_point = Vec::with_capacity(pts.len());
    for pt in &pts {
        let data = CurvatureData::for_config(&config, pt, max_order)?;
        let vals = data.evaluate_all(&schemes, ctx.exec)?;
        per_point.push(vals.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let worst = per_point.iter().copied().fold(0.0, f64::max);
    let ok = worst <= 1e-10;
    let json = json!({
        "instance": spec.name,
        "max_slots": max_slots,
        "schemes": schemes.len(),
        "points": pts.iter().zip(&per_point).map(|(pt, m)| json!({ "point": pt, "max_abs": m })).collect::<Vec<_>>(),
        "max_abs": worst,
        "all_zero": ok,
    });
    let mut md = String::new();
    heading(&mut md, "Scalar Weyl invariants", &spec);
    let _ = writeln!(
        md,
        "{} contraction schemes with at most {max_slots} slots.\n\n| point | max abs value |\n|---|---|",
        schemes.len()
    );
    for (i, m) in per_point.iter().enumerate() {
        let _ = writeln!(md, "| {i} | {m:.3e} |");
    }
    let _ = writeln!(md, "\nAll zero: {ok}");
    Ok(Report::new(json, md, ok))
}

fn certify_point(config: &ManifoldConfig, pt: &[f64], order: usize) -> Result<Certificate> {
    let model = build_model(config.p(), order)?;
    let frame = if order == 0 {
        base_frame(config, pt)?
    } else {
        normalize_frame(config, pt, order)?
    };
    verify_isomorphism(config, pt, &frame, &model)
}

pub fn certify(ctx: &Context, path: &Path, order: usize, n: usize) -> Result<Report> {
    let (spec, config) = load(path)?;
    build_model(config.p(), order)?;
    let pts = points(&spec, &config, n, ctx.seed)?;
    let certs = ctx.exec.map(&pts, |pt| certify_point(&config, pt, order));
    let ok = certs.iter().all(|c| matches!(c, Ok(c) if c.passed));
    let worst = certs
        .iter()
        .filter_map(|c| c.as_ref().ok())
        .map(|c| c.worst())
        .fold(0.0, f64::max);
    let entries: Vec<Value> = pts
        .iter()
        .zip(&certs)
        .map(|(pt, c)| match c {
            Ok(c) => json!({ "point": pt, "certificate": c }),
            Err(e) => json!({ "point": pt, "error": error_json(e) }),
        })
        .collect();
    let json = json!({
        "instance": spec.name,
        "order": order,
        "passed": ok,
        "worst_residual": worst,
        "points": entries,
    });
    let mut md = String::new();
    heading(&mut md, &format!("Model certificate, order {order}"), &spec);
    let _ = writeln!(md, "| point | passed | worst residual |\n|---|---|---|");
    for (i, c) in certs.iter().enumerate() {
        match c {
            Ok(c) => {
                let _ = writeln!(md, "| {i} | {} | {:.3e} |", c.passed, c.worst());
            }
            Err(e) => {
                let _ = writeln!(md, "| {i} | false | {e} |");
            }
        }
    }
    Ok(Report::new(json, md, ok))
}

pub fn classify(ctx: &Context, path: &Path, grid: &Grid) -> Result<Report> {
    let (spec, config) = load(path)?;
    let c = classify_config(&config, grid, ctx.exec)?;
    let json = json!({ "instance": spec.name, "grid": grid, "classification": c });
    let mut md = String::new();
    heading(&mut md, "Classification", &spec);
    let fmt_opt = |v: Option<bool>| v.map_or("undecided".to_string(), |b| b.to_string());
    let _ = writeln!(md, "| property | value |\n|---|---|");
    let _ = writeln!(md, "| symmetric | {} |", c.symmetric);
    let _ = writeln!(md, "| curvature homogeneous to order | {} |", c.curvature_homogeneity);
    match &c.alpha2 {
        Some(a) => {
            let _ = writeln!(md, "| alpha^2 on grid | {:.9} .. {:.9} (constant: {}) |", a.min, a.max, a.constant);
        }
        None => {
            let _ = writeln!(md, "| alpha^2 on grid | not applicable |");
        }
    }
    let _ = writeln!(md, "| homogeneous | {} ({}) |", fmt_opt(c.homogeneous), c.basis);
    Ok(Report::new(json, md, true))
}

/// Largest `k ≤ p + 2` whose normalized frames certify at both points.
fn certified_order(config: &ManifoldConfig, p1: &[f64], p2: &[f64]) -> usize {
    (0..=config.p() + 2)
        .rev()
        .find(|&k| {
            [p1, p2]
                .iter()
                .all(|pt| certify_point(config, pt, k).map(|c| c.passed).unwrap_or(false))
        })
        .unwrap_or(0)
}

pub fn isometry(ctx: &Context, path: &Path, order: Option<usize>, samples: usize, k_max: usize) -> Result<Report> {
    let (spec, config) = load(path)?;
    let pts = match &spec.points {
        Some(p) if p.len() >= 2 => points(&spec, &config, 2, ctx.seed)?,
        _ => sample_points(config.dim(), 2, ctx.seed, -1.0, 1.0),
    };
    let (p1, p2) = (&pts[0], &pts[1]);
    let decision = match psi_of(&config) {
        Ok(_) => Some(isometry_decision(&config, p1, &config, p2, k_max)),
        Err(_) => None,
    };
    let distinct = matches!(decision, Some(Ok(IsometryVerdict::Distinct { .. })));
    let decision_json = match &decision {
        Some(Ok(v)) => json!(v),
        Some(Err(e)) => json!({ "error": error_json(e) }),
        None => Value::Null,
    };
    let k_cert = order.unwrap_or_else(|| certified_order(&config, p1, p2));
    let built = if distinct {
        None
    } else {
        Some(build_isometry(&config, p1, p2, k_cert, samples, ctx.seed))
    };
    let (iso_json, ok) = match &built {
        None => (Value::Null, true),
        Some(Ok((iso, report))) => (
            json!({ "report": report, "tangent_map": matrix_rows(iso.tangent_map()) }),
            report.passed,
        ),
        Some(Err(e)) => (json!({ "error": error_json(e) }), false),
    };
    let json = json!({
        "instance": spec.name,
        "p1": p1,
        "p2": p2,
        "k_cert": k_cert,
        "decision": decision_json,
        "isometry": iso_json,
    });
    let mut md = String::new();
    heading(&mut md, "Isometry", &spec);
    let _ = writeln!(md, "| step | outcome |\n|---|---|");
    let _ = writeln!(
        md,
        "| alpha comparison | {} |",
        match &decision {
            Some(Ok(IsometryVerdict::ConsistentUpTo { k_max })) => format!("consistent up to k = {k_max}"),
            Some(Ok(IsometryVerdict::Distinct { k, alpha1, alpha2 })) => {
                format!("distinct at k = {k} ({alpha1:.12} vs {alpha2:.12})")
            }
            Some(Err(e)) => format!("not applicable: {e}"),
            None => "not applicable: f is not of psi shape".into(),
        }
    );
    let _ = writeln!(
        md,
        "| map construction (order {k_cert}) | {} |",
        match &built {
            None => "skipped: the points are not isometric".into(),
            Some(Ok((_, r))) => format!(
                "pullback residual {:.3e} over {} samples, passed: {}",
                r.worst_residual, r.samples, r.passed
            ),
            Some(Err(e)) => format!("failed: {e}"),
        }
    );
    Ok(Report::new(json, md, ok))
}

fn matrix_rows(m: &gpw_core::linalg::Matrix<f64>) -> Vec<Vec<f64>> {
    let t = m.transpose();
    (0..m.rows()).map(|i| t.column(i)).collect()
}

pub fn verify_all(ctx: &Context, instance: Option<&Path>) -> Result<Report> {
    let selection: Vec<Suite> = match instance {
        Some(path) => match InstanceSpec::load(path)?.suites {
            Some(names) => names
                .iter()
                .map(|n| Suite::from_name(n).ok_or_else(|| Error::InvalidConfig(format!("unknown suite `{n}`"))))
                .collect::<Result<_>>()?,
            None => Suite::ALL.to_vec(),
        },
        None => Suite::ALL.to_vec(),
    };
    let opts = SuiteOptions {
        seed: ctx.seed,
        exec: ctx.exec,
    };
    let reports: Vec<_> = selection.iter().map(|s| s.run(&opts)).collect();
    let ok = reports.iter().all(|r| r.passed);
    for r in &reports {
        eprintln!("{}", r.summary_line());
    }
    let json = json!({ "seed": ctx.seed, "passed": ok, "suites": reports });
    let mut md = String::from("# Verification suites\n\n| # | suite | result | checks |\n|---|---|---|---|\n");
    for r in &reports {
        let passed = r.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(
            md,
            "| {} | {} | {} | {passed}/{} |",
            r.id,
            r.suite,
            if r.passed { "pass" } else { "FAIL" },
            r.checks.len()
        );
    }
    for r in reports.iter().filter(|r| !r.passed) {
        let _ = writeln!(md, "\n## {} failures\n", r.suite);
        for c in r.checks.iter().filter(|c| !c.passed) {
            let _ = writeln!(md, "- {}: {}", c.label, c.detail);
        }
    }
    Ok(Report::new(json, md, ok))
}
