//! Shared fixtures for the criterion benchmarks.

use dimerlab_core::{DimerParams, PotentialFamily, PotentialSpec};

/// Parameter sets covering both bifurcation regimes.
pub fn regimes() -> Vec<(&'static str, DimerParams)> {
    vec![
        ("cubic_eta3", DimerParams::new(1.0, 3.0).expect("valid")),
        ("mu5_eta5", DimerParams::new(5.0, 5.0).expect("valid")),
        ("mu5_eta6.5", DimerParams::new(5.0, 6.5).expect("valid")),
    ]
}

pub fn quartic(hbar: f64) -> PotentialSpec {
    PotentialSpec::new(PotentialFamily::Quartic { a: 1.0, b: 1.0 }, hbar)
}
