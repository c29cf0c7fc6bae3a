//! Acceptance suite: runs every numbered criterion at its pinned tolerance
//! and prints one pass/fail line per criterion.

use hms_core::checks;

fn run(id: u32) {
    let report = checks::run_criterion(id).expect("known criterion");
    println!("{}", report.line());
    assert!(
        report.pass,
        "criterion {id} failed: {:?} ({} ms)",
        report.details, report.elapsed_ms
    );
}

#[test]
fn criterion_01_hilbert_dimensions() {
    run(1);
}

#[test]
fn criterion_02_koszul_resolution() {
    run(2);
}

#[test]
fn criterion_03_cohomology_table() {
    run(3);
}

#[test]
fn criterion_04_intersection_ranks() {
    run(4);
}

#[test]
fn criterion_05_gradings() {
    run(5);
}

#[test]
fn criterion_06_disc_enumeration() {
    run(6);
}

#[test]
fn criterion_07_anticommutation_signs() {
    run(7);
}

#[test]
fn criterion_08_mirror_match() {
    run(8);
}

#[test]
fn criterion_09_line_mirror_match() {
    run(9);
}

#[test]
fn criterion_10_numerical_monodromy() {
    run(10);
}

#[test]
fn criterion_11_mutations() {
    run(11);
}

#[test]
fn criterion_12_hirzebruch_family() {
    run(12);
}

#[test]
fn criterion_13_products_and_blowup() {
    run(13);
}

#[test]
fn criterion_14_quadratic_dual() {
    run(14);
}

#[test]
fn criterion_15_subset_counts() {
    run(15);
}
