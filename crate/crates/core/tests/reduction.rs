use dimerlab_core::{
    compute_c, cross_terms, solve_doublet, DimerError, PotentialFamily, PotentialSpec,
    ReductionOptions, ReductionResult,
};

const SWEEP: [f64; 5] = [0.5, 0.4, 0.3, 0.25, 0.2];

fn quartic(hbar: f64) -> PotentialSpec {
    PotentialSpec::new(PotentialFamily::Quartic { a: 1.0, b: 1.0 }, hbar)
}

/// ħ = 0.5 sits below the default gap ratio (about 6.9).
fn sweep_options() -> ReductionOptions {
    ReductionOptions {
        min_gap_ratio: 5.0,
        ..Default::default()
    }
}

fn sweep() -> Vec<ReductionResult> {
    SWEEP
        .iter()
        .map(|&h| solve_doublet(&quartic(h), &sweep_options()).unwrap())
        .collect()
}

fn inner(r: &ReductionResult, a: &[f64], b: &[f64]) -> f64 {
    r.integrate(a.iter().zip(b).map(|(x, y)| x * y))
}

#[test]
fn harmonic_levels() {
    for hbar in [1.0, 0.5, 0.2] {
        let mut spec = PotentialSpec::new(PotentialFamily::Harmonic { omega: 1.0 }, hbar);
        spec.validation_mode = true;
        let r = solve_doublet(&spec, &ReductionOptions::default()).unwrap();
        assert!(
            (r.lambda_plus / (0.5 * hbar) - 1.0).abs() < 1e-6,
            "hbar={hbar}"
        );
        assert!(
            (r.lambda_minus / (1.5 * hbar) - 1.0).abs() < 1e-6,
            "hbar={hbar}"
        );
        assert!(
            (r.lambda_2 / (2.5 * hbar) - 1.0).abs() < 1e-6,
            "hbar={hbar}"
        );
    }
}

#[test]
fn harmonic_rejected_outside_validation() {
    let spec = PotentialSpec::new(PotentialFamily::Harmonic { omega: 1.0 }, 1.0);
    assert!(solve_doublet(&spec, &ReductionOptions::default()).is_err());
}

#[test]
fn shallow_well_has_no_isolated_doublet() {
    let err = solve_doublet(&quartic(0.5), &ReductionOptions::default()).unwrap_err();
    match err {
        DimerError::NoDoubletGap { ratio } => assert!(ratio > 5.0 && ratio < 10.0),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eigenfunction_invariants() {
    for r in sweep() {
        let n = r.x.len();
        for i in 0..n {
            let j = n - 1 - i;
            assert!((r.phi_plus[i] - r.phi_plus[j]).abs() < 1e-8);
            assert!((r.phi_minus[i] + r.phi_minus[j]).abs() < 1e-8);
            assert!((r.phi_r[j] - r.phi_l[i]).abs() < 1e-8);
        }
        assert!(inner(&r, &r.phi_plus, &r.phi_minus).abs() < 1e-10);
        assert!((inner(&r, &r.phi_plus, &r.phi_plus) - 1.0).abs() < 1e-10);
        assert!((inner(&r, &r.phi_minus, &r.phi_minus) - 1.0).abs() < 1e-10);
        assert!(r.lambda_plus < r.lambda_minus && r.lambda_minus < r.lambda_2);
        assert!(r.boundary_amplitude < 1e-10);
        assert!((compute_c(&r, 0.0).unwrap() - 1.0).abs() < 1e-10);
        // gauge
        let m = n / 2;
        assert!(r.phi_plus[m] > 0.0 && r.phi_minus[m + 1] > 0.0);
    }
}

#[test]
fn splitting_is_exponentially_small() {
    let results = sweep();
    let pts: Vec<(f64, f64)> = results
        .iter()
        .map(|r| (1.0 / r.hbar, r.omega.ln()))
        .collect();
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    assert!(slopes.iter().all(|&s| s < 0.0), "{slopes:?}");
    assert!(
        slopes.windows(2).all(|w| w[1] <= w[0]),
        "not concave: {slopes:?}"
    );
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.99, "R² = {r2}");
    for r in &results {
        assert!((r.beating_period * r.omega - 2.0 * std::f64::consts::PI * r.hbar).abs() < 1e-12);
    }
}

#[test]
fn cross_terms_shrink_with_hbar() {
    let results = sweep();
    let terms: Vec<_> = results
        .iter()
        .map(|r| cross_terms(r, 1.0).unwrap())
        .collect();
    for w in terms.windows(2) {
        assert!(w[1].overlap < w[0].overlap);
        assert!(w[1].cross.abs() < w[0].cross.abs());
    }
    for (r, t) in results.iter().zip(&terms) {
        assert!(t.overlap >= 0.0);
        let l_pow = r.integrate(r.phi_l.iter().map(|v| v.abs().powi(2)));
        assert!(t.cross.abs() <= t.overlap * l_pow * (1.0 + 1e-12));
        let l_max = r.phi_l.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let l_abs = r.integrate(r.phi_l.iter().map(|v| v.abs()));
        assert!(t.cross.abs() <= t.overlap * l_max.powi(2) * l_abs);
    }
}

#[test]
fn second_order_grid_convergence() {
    let mut spec = quartic(0.3);
    spec.half_width = Some(3.8);
    let levels: Vec<ReductionResult> = [255usize, 511, 1023]
        .iter()
        .map(|&m| {
            spec.grid_points = 2 * m + 1;
            solve_doublet(&spec, &ReductionOptions::fixed_grid()).unwrap()
        })
        .collect();
    for pick in [
        |r: &ReductionResult| r.lambda_plus,
        |r: &ReductionResult| r.lambda_minus,
        |r: &ReductionResult| r.omega,
    ] {
        let e1 = pick(&levels[0]) - pick(&levels[1]);
        let e2 = pick(&levels[1]) - pick(&levels[2]);
        let factor = e1 / e2;
        assert!((factor - 4.0).abs() < 0.2, "factor {factor}");
    }
    let c: Vec<f64> = levels.iter().map(|r| compute_c(r, 1.0).unwrap()).collect();
    let factor = (c[0] - c[1]) / (c[1] - c[2]);
    assert!((factor - 4.0).abs() < 0.2, "c factor {factor}");
}

/// Composite Simpson over the full box including the zero wall values.
fn simpson(dx: f64, interior: &[f64]) -> f64 {
    let mut values = Vec::with_capacity(interior.len() + 2);
    values.push(0.0);
    values.extend_from_slice(interior);
    values.push(0.0);
    assert!((values.len() - 1) % 2 == 0);
    let mut sum = values[0] + values[values.len() - 1];
    for (k, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * dx / 3.0
}

#[test]
fn nonlinear_constant_against_refined_simpson() {
    let r = solve_doublet(&quartic(0.3), &ReductionOptions::default()).unwrap();
    let c = compute_c(&r, 1.0).unwrap();

    let mut fine = quartic(0.3);
    fine.half_width = Some(r.half_width);
    let m = r.x.len() / 2;
    let m_fine = 4 * (m + 1) - 1;
    fine.grid_points = 2 * m_fine + 1;
    let f = solve_doublet(&fine, &ReductionOptions::fixed_grid()).unwrap();
    assert_eq!(f.x.len(), 2 * m_fine + 1);
    let quartic_r: Vec<f64> = f.phi_r.iter().map(|v| v.powi(4)).collect();
    let norm: Vec<f64> = f.phi_r.iter().map(|v| v * v).collect();
    let oracle = simpson(f.dx, &quartic_r) / simpson(f.dx, &norm).powi(2);
    assert!(
        (c - oracle).abs() < 1e-6 * oracle,
        "c = {c}, oracle = {oracle}"
    );
}

#[test]
fn tabulated_matches_analytic() {
    let xs: Vec<f64> = (0..=4000).map(|k| -4.0 + 8.0 * k as f64 / 4000.0).collect();
    let text: String = xs
        .iter()
        .map(|x| format!("{x:.6} {:.17e}\n", (x * x - 1.0f64).powi(2)))
        .collect();
    let family = PotentialFamily::parse_table(&format!("# quartic\n{text}")).unwrap();
    let mut spec = PotentialSpec::new(family, 0.3);
    spec.grid_points = 2047;
    let tab = solve_doublet(&spec, &ReductionOptions::default()).unwrap();
    let exact = solve_doublet(&quartic(0.3), &ReductionOptions::default()).unwrap();
    // linear interpolation of the table costs O(Δx²)
    assert!(
        (tab.omega / exact.omega - 1.0).abs() < 1e-3,
        "{} vs {}",
        tab.omega,
        exact.omega
    );
}
