//! Acceptance checklist. Each check prints one pass/fail line; runtime caps
//! are asserted where the checklist pins them. The CLI reproducibility check
//! lives with the binary crate.

use fmc_core::desk;

fn report(out: &desk::CriterionOutcome) {
    println!(
        "criterion {:2}: {} - {} ({} ms) [{}]",
        out.id,
        if out.pass { "PASS" } else { "FAIL" },
        out.label,
        out.millis,
        out.details
    );
}

#[test]
fn criterion_01_dependent_rounding() {
    let out = desk::criterion_1();
    report(&out);
    assert!(out.pass, "{}", out.details);
    assert!(out.millis < 10_000, "runtime {} ms over the 10 s cap", out.millis);
}

#[test]
fn criteria_02_03_04_randomized_block() {
    let block = desk::randomized_block();
    for out in [&block.c2, &block.c3, &block.c4] {
        report(out);
    }
    assert!(block.c2.pass, "{}", block.c2.details);
    assert!(block.c3.pass, "{}", block.c3.details);
    assert!(block.c4.pass, "{}", block.c4.details);
    assert!(
        block.c3.millis < 300_000,
        "runtime {} ms over the 5 min cap",
        block.c3.millis
    );
}

#[test]
fn criterion_05_iterated_node() {
    let out = desk::criterion_5();
    report(&out);
    assert!(out.pass, "{}", out.details);
    assert!(out.millis < 600_000, "runtime {} ms over the 10 min cap", out.millis);
}

#[test]
fn criterion_06_iterated_fmc() {
    let out = desk::criterion_6();
    report(&out);
    assert!(out.pass, "{}", out.details);
}

#[test]
fn criterion_07_segregated() {
    let out = desk::criterion_7();
    report(&out);
    assert!(out.pass, "{}", out.details);
}

#[test]
fn criterion_08_balanced() {
    let out = desk::criterion_8();
    report(&out);
    assert!(out.pass, "{}", out.details);
}

#[test]
fn criterion_09_integrality_gap() {
    let out = desk::criterion_9();
    report(&out);
    assert!(out.pass, "{}", out.details);
}

#[test]
fn criterion_10_geometric() {
    let out = desk::criterion_10();
    report(&out);
    assert!(out.pass, "{}", out.details);
    assert!(out.millis < 120_000, "runtime {} ms over the 2 min cap", out.millis);
}
