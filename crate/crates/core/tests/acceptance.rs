//! End-to-end acceptance criteria. Each criterion prints one line:
//! `criterion <n> <name>: PASS|FAIL (<passed>/<total> checks)`.

use gpw_core::suites::{Suite, SuiteOptions, SuiteReport};

fn run(suite: Suite) -> SuiteReport {
    let report = suite.run(&SuiteOptions::default());
    println!("{}", report.summary_line());
    for c in report.checks.iter().filter(|c| !c.passed) {
        println!("    failed: {}: {}", c.label, c.detail);
    }
    report
}

fn assert_passes(suite: Suite) {
    let report = run(suite);
    assert!(report.passed, "{}", report.summary_line());
}

#[test]
fn criterion_1_curvature_oracle_equivalence() {
    assert_passes(Suite::CurvatureOracle);
}

#[test]
fn criterion_2_symmetric_space() {
    assert_passes(Suite::SymmetricSpace);
}

#[test]
fn criterion_3_geodesics() {
    assert_passes(Suite::Geodesics);
}

#[test]
fn criterion_4_weyl_vanishing() {
    assert_passes(Suite::WeylVanishing);
}

#[test]
fn criterion_5_model_certificates() {
    assert_passes(Suite::ModelCertificates);
}

#[test]
fn criterion_6_alpha_invariants() {
    assert_passes(Suite::AlphaInvariants);
}

#[test]
fn criterion_7_classification() {
    assert_passes(Suite::Classification);
}

#[test]
fn criterion_8_isometries() {
    assert_passes(Suite::Isometries);
}
