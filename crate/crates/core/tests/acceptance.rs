// Acceptance criteria 1-8, each at its stated tolerance; one test (and one
// printed line) per criterion:
//   cargo test --release --test acceptance -- --nocapture

use warpfield::config::RunConfig;
use warpfield::suite::run_check;

fn criterion(id: u8) {
    let o = run_check(id, &RunConfig::default());
    println!("{}", o.line());
    assert!(o.pass, "criterion {id} failed: {}", o.detail);
}

#[test]
fn c1_curvature_oracles() {
    criterion(1);
}

#[test]
fn c2_torpedo_family() {
    criterion(2);
}

#[test]
fn c3_bending_homotopy() {
    criterion(3);
}

#[test]
fn c4_isotopy_to_standard_form() {
    criterion(4);
}

#[test]
fn c5_deformation_retract() {
    criterion(5);
}

#[test]
fn c6_surgery_descriptors() {
    criterion(6);
}

#[test]
fn c7_compact_family() {
    criterion(7);
}

#[test]
fn c8_numerical_hygiene() {
    criterion(8);
}
