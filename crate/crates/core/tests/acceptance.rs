//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! per checked property. Tolerances are pinned in `seqcd::verify`.

use seqcd::verify::{self, CriterionResult};

fn report(results: &[CriterionResult]) {
    for r in results {
        println!("{r}");
    }
    assert!(results.iter().all(|r| r.pass), "criterion failed: see lines above");
}

#[test]
fn criterion_01_kraft_exactness() {
    report(&verify::verify_kraft().unwrap());
}

#[test]
fn criterion_02_universality() {
    report(&verify::verify_redundancy().unwrap());
}

#[test]
fn criterion_03_oracle_equivalence() {
    report(&verify::verify_oracle_equivalence().unwrap());
}

#[test]
fn criterion_04_error_probability_bounds() {
    report(&verify::verify_error_bound().unwrap());
}

#[test]
fn criterion_05_arl_lower_bounds() {
    report(&verify::verify_arl().unwrap());
}

#[test]
fn criterion_06_delay_asymptotics() {
    report(&verify::verify_slope().unwrap());
}

#[test]
fn criterion_07_termination_under_change() {
    report(&verify::verify_termination().unwrap());
}

#[test]
fn criterion_08_beta_bound_property() {
    report(&verify::verify_beta_bound_property().unwrap());
}

#[test]
fn criterion_09_optimality_trend() {
    report(&verify::verify_optimality().unwrap());
}

#[test]
fn criterion_10_reproducibility() {
    report(&verify::verify_reproducibility().unwrap());
}
