//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use dimerlab_core::numerics::bisect;
use dimerlab_core::stationary::asymmetric_roots;
use dimerlab_core::{
    amplitude_hamiltonian, classify_stability, compute_c, cross_terms, d2eta_at_zero, eta_plus,
    eta_star, f_pm, find_stationary_points, fold_condition, fold_location, fold_root, hamiltonian,
    integrate_amplitudes, integrate_phase, mu_threshold, solve_doublet, to_amplitudes, to_phase,
    vector_field, DimerParams, IntegrationSettings, PhasePoint, PotentialFamily, PotentialSpec,
    ReductionOptions, StabilityTag, StationarySign,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn params(mu: f64, eta: f64) -> DimerParams {
    DimerParams::new(mu, eta).unwrap()
}

fn threshold_and_curvature() -> Outcome {
    let m = mu_threshold();
    let exact = (3.0 + 13f64.sqrt()) / 2.0;
    ensure!((m - exact).abs() < 1e-12, "threshold {m} vs {exact}");
    ensure!(
        d2eta_at_zero(m).abs() < 1e-12,
        "curvature at threshold {}",
        d2eta_at_zero(m)
    );
    ensure!(
        d2eta_at_zero(m - 1e-3) > 0.0 && d2eta_at_zero(m + 1e-3) < 0.0,
        "curvature sign does not flip"
    );
    Ok(format!("mu_thr = {m:.15}"))
}

fn pitchfork_strengths() -> Outcome {
    for (mu, want) in [(5.0, 6.4), (1.0, 2.0), (2.0, 2.0)] {
        let got = eta_star(mu);
        ensure!(got == want, "eta*({mu}) = {got}, expected {want}");
    }
    Ok("eta*(5) = 6.4, eta*(1) = eta*(2) = 2".into())
}

fn saddle_node_strengths() -> Outcome {
    let four = eta_plus(4.0)
        .map_err(|e| e.to_string())?
        .ok_or("no fold at mu = 4")?;
    ensure!((four - 13.5f64.sqrt()).abs() < 1e-9, "eta+(4) = {four}");
    let five = eta_plus(5.0)
        .map_err(|e| e.to_string())?
        .ok_or("no fold at mu = 5")?;
    ensure!((five - 4.41).abs() < 5e-3, "eta+(5) = {five}");
    ensure!(
        eta_plus(2.0).map_err(|e| e.to_string())?.is_none(),
        "fold reported at mu = 2"
    );
    Ok(format!(
        "eta+(4) = {four:.12}, eta+(5) = {five:.6}, eta+(2) absent"
    ))
}

/// Sign changes of `f_−` on an `n`-point grid across (−1, 1).
fn sign_scan(p: &DimerParams, n: usize) -> usize {
    let edge = 1e-9;
    let step = 2.0 * (1.0 - edge) / (n - 1) as f64;
    let value = |z: f64| f_pm(z.min(1.0 - edge), StationarySign::Minus, p).unwrap();
    let mut prev = value(-1.0 + edge);
    let mut count = 0;
    for k in 1..n {
        let cur = value(-1.0 + edge + k as f64 * step);
        if prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn stationary_counts() -> Outcome {
    use StabilityTag::*;
    let cases = [
        (2.0, vec![Center]),
        (5.0, vec![Center, Center, Center, Saddle, Saddle]),
        (6.5, vec![Center, Center, Saddle]),
    ];
    for (eta, mut want) in cases {
        let p = params(5.0, eta);
        let scan = sign_scan(&p, 1_000_000);
        let points = find_stationary_points(&p).map_err(|e| e.to_string())?;
        let mut on_pi: Vec<StabilityTag> = points
            .iter()
            .filter(|s| (s.point.theta() - PI).abs() < 1e-12)
            .map(|s| s.stability)
            .collect();
        ensure!(
            scan == want.len() && on_pi.len() == want.len(),
            "eta = {eta}: scan {scan}, solver {}",
            on_pi.len()
        );
        on_pi.sort_by_key(|t| t.as_str());
        want.sort_by_key(|t| t.as_str());
        ensure!(on_pi == want, "eta = {eta}: tags {on_pi:?}");
    }
    Ok("mu = 5: 1 / 5 / 3 points on theta = pi at eta = 2 / 5 / 6.5".into())
}

fn pitchfork_onset() -> Outcome {
    let mut worst: f64 = 0.0;
    for mu in [1.0, 2.0, 3.0] {
        let has_root = |eta: f64| !asymmetric_roots(&params(mu, eta)).unwrap().is_empty();
        let es = eta_star(mu);
        let onset = bisect(
            |eta| if has_root(eta) { 1.0 } else { -1.0 },
            0.5 * es,
            1.5 * es,
            1e-12,
            200,
        )
        .map_err(|e| e.to_string())?;
        ensure!(
            (onset - es).abs() < 1e-6,
            "mu = {mu}: onset {onset} vs {es}"
        );
        worst = worst.max((onset - es).abs());
        let origin = PhasePoint::new(0.0, PI).unwrap();
        let before = classify_stability(origin, &params(mu, onset - 1e-6))
            .unwrap()
            .0;
        let after = classify_stability(origin, &params(mu, onset + 1e-6))
            .unwrap()
            .0;
        ensure!(
            before == StabilityTag::Center && after == StabilityTag::Saddle,
            "mu = {mu}: {before:?} -> {after:?}"
        );
    }
    Ok(format!(
        "onset within {worst:.1e} of eta*, centre turns saddle"
    ))
}

fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let settings = IntegrationSettings::with_tol(1e-10);
    let (mut energy, mut norm, mut chart): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut compared = 0;
    for _ in 0..100 {
        let p = params(rng.random_range(0.5..6.0), rng.random_range(1e-3..8.0));
        let start =
            PhasePoint::new(rng.random_range(-0.95..0.95), rng.random_range(0.0..TAU)).unwrap();
        let amp = integrate_amplitudes(to_amplitudes(start, 0.0), &p, 100.0, &settings)
            .map_err(|e| e.to_string())?;
        energy = energy.max(amp.energy_drift);
        norm = norm.max(amp.norm_drift.unwrap_or(f64::INFINITY));
        let phase = integrate_phase(start, &p, 100.0, &settings).map_err(|e| e.to_string())?;
        energy = energy.max(phase.energy_drift);
        if phase.is_complete() {
            compared += 1;
            let dev = phase
                .z_values()
                .iter()
                .zip(amp.z_values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            chart = chart.max(dev);
        }
    }
    ensure!(energy <= 1e-8, "energy drift {energy:.2e}");
    ensure!(norm <= 1e-9, "norm drift {norm:.2e}");
    ensure!(
        compared > 50 && chart < 1e-6,
        "chart deviation {chart:.2e} over {compared} runs"
    );
    Ok(format!(
        "100 starts: energy {energy:.1e}, norm {norm:.1e}, charts agree to {chart:.1e}"
    ))
}

fn chart_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = params(rng.random_range(0.2..8.0), rng.random_range(1e-12..10.0));
        let (z, theta, gamma) = (
            rng.random_range(-0.95..0.95),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        );
        let point = PhasePoint::new(z, theta).unwrap();
        let a = to_amplitudes(point, gamma);
        let h = hamiltonian(point, &p);
        ensure!(
            (amplitude_hamiltonian(a, &p) + 0.5 * h).abs() < 1e-12 * h.abs().max(1.0),
            "H_amp != -H/2 at ({z}, {theta})"
        );
        let back = to_phase(a).point;
        let dt = (back.theta() - theta).abs();
        ensure!(
            (back.z() - z).abs() < 1e-12 && dt.min(TAU - dt) < 1e-9,
            "round trip fails at ({z}, {theta})"
        );
        let step = 1e-6;
        let at = |z: f64, t: f64| hamiltonian(PhasePoint::new(z, t).unwrap(), &p);
        let dh_dz = (at(z + step, theta) - at(z - step, theta)) / (2.0 * step);
        let dh_dt = (at(z, theta + step) - at(z, theta - step)) / (2.0 * step);
        let v = vector_field(point, &p).map_err(|e| e.to_string())?;
        let scale = 1.0 + dh_dz.abs().max(dh_dt.abs());
        let err = (v.dtheta - dh_dz).abs().max((v.dz + dh_dt).abs()) / scale;
        ensure!(err < 1e-6, "gradient mismatch {err:.2e} at ({z}, {theta})");
        worst = worst.max(err);
    }
    Ok(format!("1000 points, worst gradient mismatch {worst:.1e}"))
}

fn reduction() -> Outcome {
    for hbar in [1.0, 0.5, 0.2] {
        let mut spec = PotentialSpec::new(PotentialFamily::Harmonic { omega: 1.0 }, hbar);
        spec.validation_mode = true;
        let r = solve_doublet(&spec, &ReductionOptions::default()).map_err(|e| e.to_string())?;
        for (got, n) in [
            (r.lambda_plus, 0.5),
            (r.lambda_minus, 1.5),
            (r.lambda_2, 2.5),
        ] {
            ensure!(
                (got / (n * hbar) - 1.0).abs() < 1e-6,
                "harmonic hbar = {hbar}: {got}"
            );
        }
    }
    let opts = ReductionOptions {
        min_gap_ratio: 5.0,
        ..Default::default()
    };
    let mut pts = Vec::new();
    let mut prev_overlap = f64::INFINITY;
    for hbar in [0.5, 0.4, 0.3, 0.25, 0.2] {
        let spec = PotentialSpec::new(PotentialFamily::Quartic { a: 1.0, b: 1.0 }, hbar);
        let r = solve_doublet(&spec, &opts).map_err(|e| e.to_string())?;
        let ip = |a: &[f64], b: &[f64]| r.integrate(a.iter().zip(b).map(|(x, y)| x * y));
        ensure!(
            ip(&r.phi_plus, &r.phi_minus).abs() < 1e-10,
            "hbar = {hbar}: not orthogonal"
        );
        ensure!(
            (ip(&r.phi_plus, &r.phi_plus) - 1.0).abs() < 1e-10,
            "hbar = {hbar}: not normalised"
        );
        let n = r.x.len();
        ensure!(
            (0..n).all(|i| (r.phi_plus[i] - r.phi_plus[n - 1 - i]).abs() < 1e-8),
            "hbar = {hbar}: phi+ not even"
        );
        ensure!(
            (0..n).all(|i| (r.phi_minus[i] + r.phi_minus[n - 1 - i]).abs() < 1e-8),
            "hbar = {hbar}: phi- not odd"
        );
        ensure!(
            (compute_c(&r, 0.0).unwrap() - 1.0).abs() < 1e-10,
            "hbar = {hbar}: c(0) != 1"
        );
        let overlap = cross_terms(&r, 1.0).map_err(|e| e.to_string())?.overlap;
        ensure!(overlap < prev_overlap, "overlap grows at hbar = {hbar}");
        prev_overlap = overlap;
        pts.push((1.0 / hbar, r.omega.ln()));
    }
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    ensure!(
        slopes.iter().all(|&s| s < 0.0),
        "omega not decreasing: {slopes:?}"
    );
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    ensure!(r2 > 0.99, "ln omega vs 1/hbar: R^2 = {r2}");
    Ok(format!(
        "harmonic levels exact, ln omega vs 1/hbar slope {:.3}, R^2 = {r2:.5}",
        sxy / sxx
    ))
}

/// Argmin of η(z) from a 30-digit solve of dη/dz = 0.
const FOLD_ORACLE: [(f64, f64); 4] = [
    (3.5, 0.362_585_550_117_932_66),
    (4.0, 0.577_350_269_189_625_8),
    (5.0, 0.723_947_422_374_485_5),
    (8.0, 0.853_553_394_259_078_8),
];

fn fold_reconstruction() -> Outcome {
    let mut worst: f64 = 0.0;
    for (mu, z_ref) in FOLD_ORACLE {
        let root = fold_root(mu)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no root at mu = {mu}"))?;
        let (argmin, _) = fold_location(mu)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no fold at mu = {mu}"))?;
        for z in [root, argmin] {
            ensure!((z - z_ref).abs() < 1e-8, "mu = {mu}: {z} vs {z_ref}");
            worst = worst.max((z - z_ref).abs());
        }
    }
    for mu in [1.0, 2.0, 3.0] {
        let n = 200_000;
        let signs: Vec<bool> = (1..n)
            .map(|k| fold_condition(k as f64 / n as f64, mu) > 0.0)
            .collect();
        ensure!(
            signs.iter().all(|&s| s == signs[0]),
            "fold condition changes sign at mu = {mu}"
        );
        ensure!(
            fold_root(mu).map_err(|e| e.to_string())?.is_none(),
            "root reported at mu = {mu}"
        );
    }
    Ok(format!(
        "root and argmin within {worst:.1e}; no sign change for mu = 1, 2, 3"
    ))
}

const CLI_RUNS: [(&str, &str); 5] = [
    ("critical", r#"{"mu": 5}"#),
    (
        "bifurcation",
        r#"{"mu": 5, "eta_min": 3, "eta_max": 8, "samples": 201}"#,
    ),
    (
        "portrait",
        r#"{"mu": 5, "eta": 5, "nz": 101, "ntheta": 101}"#,
    ),
    (
        "simulate",
        r#"{"mu": 5, "eta": 6.5, "z0": 0.9, "theta0": 3.141592653589793, "tau_end": 20, "chart": "phase"}"#,
    ),
    (
        "reduce",
        r#"{"potential": "quartic", "a": 1, "b": 1, "hbar": 0.3, "epsilon": [0.001, 0.01, 0.1]}"#,
    ),
];

fn run_cli(command: &str, config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_dimerlab"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .arg("--svg")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        status.status.success(),
        "{command}: {}",
        String::from_utf8_lossy(&status.stderr)
    );
    Ok(())
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (command, body) in CLI_RUNS {
        let config = tmp.path().join(format!("{command}.json"));
        fs::write(&config, body).map_err(|e| e.to_string())?;
        let (a, b) = (
            tmp.path().join(format!("{command}_a")),
            tmp.path().join(format!("{command}_b")),
        );
        run_cli(command, &config, &a)?;
        run_cli(command, &config, &b)?;
        let mut names: Vec<_> = fs::read_dir(&a)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            let ext = Path::new(&name)
                .extension()
                .and_then(|e| e.to_str())
                .unwrap_or("");
            if ext != "csv" && ext != "json" {
                continue;
            }
            let (x, y) = (
                fs::read(a.join(&name)).unwrap(),
                fs::read(b.join(&name)).unwrap(),
            );
            ensure!(
                x == y,
                "{command}: {} differs between runs",
                name.to_string_lossy()
            );
            files += 1;
        }
    }
    Ok(format!(
        "{files} CSV/JSON files identical across two runs of every command"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "critical power and curvature at the origin",
            threshold_and_curvature,
        ),
        ("pitchfork coupling", pitchfork_strengths),
        ("saddle-node coupling", saddle_node_strengths),
        ("stationary-point counts and stability", stationary_counts),
        ("pitchfork onset and stability flip", pitchfork_onset),
        ("conservation and chart agreement", conservation),
        ("chart identity and Hamiltonian gradient", chart_identity),
        ("double-well reduction", reduction),
        ("fold reconstruction", fold_reconstruction),
        ("CLI byte determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
