//! The full acceptance suite: one test per criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them) and asserting the stated tolerances and runtime budgets.

use std::time::Duration;

use intersective::acceptance::{run_criterion, CriterionReport};
use intersective::RunConfig;

fn run(id: u32) -> CriterionReport {
    let config = RunConfig::default();
    let report = run_criterion(id, &config);
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
    report
}

#[test]
fn criterion_01_gauss_sum_magnitude() {
    let r = run(1);
    assert!(
        r.elapsed < Duration::from_secs(1),
        "runtime {:?}",
        r.elapsed
    );
}

#[test]
fn criterion_02_deligne_bound_suite() {
    let r = run(2);
    assert!(
        r.elapsed < Duration::from_secs(30),
        "runtime {:?}",
        r.elapsed
    );
}

#[test]
fn criterion_03_hensel_vanishing() {
    run(3);
}

#[test]
fn criterion_04_auxiliary_calculus_exactness() {
    run(4);
}

#[test]
fn criterion_05_inheritance_proposition() {
    run(5);
}

#[test]
fn criterion_06_sieve_sandwich() {
    run(6);
}

#[test]
fn criterion_07_extremal_oracle_equivalence() {
    let r = run(7);
    assert!(
        r.elapsed < Duration::from_secs(120),
        "runtime {:?}",
        r.elapsed
    );
}

#[test]
fn criterion_08_orthogonality_count_identity() {
    run(8);
}

#[test]
fn criterion_09_psi_cross_check() {
    run(9);
}

#[test]
fn criterion_10_increment_step() {
    run(10);
}

#[test]
fn criterion_11_classification_regressions() {
    run(11);
}

#[test]
fn criterion_12_additive_energy() {
    run(12);
}
