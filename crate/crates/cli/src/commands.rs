//! The five subcommands. Each writes its data files into `out_dir` and
//! returns the paths it wrote.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dimerlab_core::{
    beating_period, bifurcation_diagram, compute_c, cross_terms, d2eta_at_zero, eta_plus, eta_star,
    integrate_amplitudes, integrate_phase, map_epsilon_to_eta, mu_threshold, phase_portrait,
    solve_doublet, to_amplitudes, BranchLabel, Chart, DimerParams, IntegrationSettings, PhasePoint,
    PotentialFamily, PotentialSpec, ReductionOptions, StabilityTag, TrajectoryStatus,
};

use crate::config::{
    BifurcationConfig, CriticalConfig, PortraitConfig, ReduceConfig, RunConfig, SimulateConfig,
};
use crate::error::{CliError, InModule};
use crate::format::{write_json, CsvTable};
use crate::svg::{self, Level, Series};

pub const REGIME_PITCHFORK: &str = "supercritical pitchfork";
pub const REGIME_SADDLE_NODE: &str = "saddle-node + inverse pitchfork";

/// Dispatches a validated configuration.
pub fn execute(config: &RunConfig, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    match config {
        RunConfig::Critical(c) => critical(c, out_dir),
        RunConfig::Bifurcation(c) => bifurcation(c, out_dir, svg),
        RunConfig::Portrait(c) => portrait(c, out_dir, svg),
        RunConfig::Simulate(c) => simulate(c, out_dir, svg),
        RunConfig::Reduce(c, spec, opts) => reduce(c, spec, opts, out_dir, svg),
    }
}

fn write_svg(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn regime(eta_plus: Option<f64>) -> &'static str {
    if eta_plus.is_some() {
        REGIME_SADDLE_NODE
    } else {
        REGIME_PITCHFORK
    }
}

#[derive(Debug, Serialize)]
pub struct CriticalReport {
    pub mu: f64,
    pub mu_threshold: f64,
    pub eta_star: f64,
    /// `None` (JSON `null`) when no fold exists.
    pub eta_plus: Option<f64>,
    pub d2eta_at_zero: f64,
    pub regime: &'static str,
}

pub fn critical_report(mu: f64) -> Result<CriticalReport, CliError> {
    let ep = eta_plus(mu).in_module("dimer")?;
    Ok(CriticalReport {
        mu,
        mu_threshold: mu_threshold(),
        eta_star: eta_star(mu),
        eta_plus: ep,
        d2eta_at_zero: d2eta_at_zero(mu),
        regime: regime(ep),
    })
}

fn critical(c: &CriticalConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = critical_report(c.mu)?;
    println!("mu_threshold = {:.15}", report.mu_threshold);
    println!("eta_star     = {:.15}", report.eta_star);
    match report.eta_plus {
        Some(v) => println!("eta_plus     = {v:.15}"),
        None => println!("eta_plus     = absent"),
    }
    println!("d2eta/dz2|0  = {:.15}", report.d2eta_at_zero);
    println!("regime       = {}", report.regime);
    let path = out_dir.join("critical.json");
    write_json(&path, &report)?;
    Ok(vec![path])
}

#[derive(Debug, Serialize)]
struct BranchSummary {
    label: &'static str,
    side: i8,
    eta_first: f64,
    eta_last: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct BifurcationMeta {
    mu: f64,
    eta_min: f64,
    eta_max: f64,
    samples: usize,
    eta_star: f64,
    eta_plus: Option<f64>,
    regime: &'static str,
    branches: Vec<BranchSummary>,
}

fn bifurcation(c: &BifurcationConfig, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let branches =
        bifurcation_diagram(c.mu, (c.eta_min, c.eta_max), c.samples).in_module("stationary")?;
    let ep = eta_plus(c.mu).in_module("dimer")?;
    let mut table = CsvTable::new(&["eta", "z", "theta", "stability", "branch_label"]);
    let mut summaries = Vec::new();
    for b in &branches {
        for s in &b.samples {
            table.push(&[
                crate::format::fmt_float(s.eta),
                crate::format::fmt_float(s.z),
                crate::format::fmt_float(s.theta),
                s.stability.as_str().to_string(),
                b.label.as_str().to_string(),
            ]);
        }
        let (first, last) = b.eta_range().unwrap_or((f64::NAN, f64::NAN));
        summaries.push(BranchSummary {
            label: b.label.as_str(),
            side: b.side() as i8,
            eta_first: first,
            eta_last: last,
            points: b.samples.len(),
        });
    }
    let csv = out_dir.join("bifurcation.csv");
    table.write(&csv)?;
    let json = out_dir.join("bifurcation.json");
    write_json(
        &json,
        &BifurcationMeta {
            mu: c.mu,
            eta_min: c.eta_min,
            eta_max: c.eta_max,
            samples: c.samples,
            eta_star: eta_star(c.mu),
            eta_plus: ep,
            regime: regime(ep),
            branches: summaries,
        },
    )?;
    println!(
        "{} branches over eta in [{}, {}]",
        branches.len(),
        c.eta_min,
        c.eta_max
    );
    let mut written = vec![csv, json];
    if svg {
        let series: Vec<Series> = branches
            .iter()
            .map(|b| Series {
                points: b.samples.iter().map(|s| (s.eta, s.z)).collect(),
                color: match b.label {
                    BranchLabel::SymmetricTheta0 => "#1f77b4",
                    BranchLabel::AntisymmetricThetaPi => "#d62728",
                    BranchLabel::AsymmetricStable => "#2ca02c",
                    BranchLabel::AsymmetricUnstable => "#ff7f0e",
                },
                dashed: b.label == BranchLabel::AsymmetricUnstable,
            })
            .collect();
        let path = out_dir.join("bifurcation.svg");
        write_svg(
            &path,
            &svg::line_plot(
                &format!("stationary states, mu = {}", c.mu),
                "eta",
                "z",
                &series,
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct FixedPointRecord {
    z: f64,
    theta: f64,
    stability: &'static str,
    energy: f64,
    hessian_product: f64,
}

#[derive(Debug, Serialize)]
struct PortraitMeta {
    mu: f64,
    eta: f64,
    nz: usize,
    ntheta: usize,
    fixed_points: Vec<FixedPointRecord>,
    separatrix_energies: Vec<f64>,
}

fn portrait(c: &PortraitConfig, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let params = DimerParams::new(c.mu, c.eta).in_module("dimer")?;
    let p = phase_portrait(&params, c.nz, c.ntheta).in_module("stationary")?;
    let mut table = CsvTable::new(&["z", "theta", "H"]);
    for (i, z) in p.z_values.iter().enumerate() {
        for (j, theta) in p.theta_values.iter().enumerate() {
            table.push_floats(&[*z, *theta, p.grid[i][j]]);
        }
    }
    let csv = out_dir.join("portrait.csv");
    table.write(&csv)?;
    let fixed_points: Vec<FixedPointRecord> = p
        .fixed_points
        .iter()
        .map(|f| FixedPointRecord {
            z: f.point.z(),
            theta: f.point.theta(),
            stability: f.stability.as_str(),
            energy: f.energy(),
            hessian_product: f.hessian_product,
        })
        .collect();
    let json = out_dir.join("portrait.json");
    write_json(
        &json,
        &PortraitMeta {
            mu: c.mu,
            eta: c.eta,
            nz: c.nz,
            ntheta: c.ntheta,
            fixed_points,
            separatrix_energies: p.separatrix_energies.clone(),
        },
    )?;
    println!(
        "{} fixed points, {} saddles",
        p.fixed_points.len(),
        p.separatrix_energies.len()
    );
    let mut written = vec![csv, json];
    if svg {
        // close the θ axis periodically so contours cross 2π cleanly
        let mut thetas = p.theta_values.clone();
        thetas.push(TAU);
        let grid: Vec<Vec<f64>> = p
            .grid
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(row[0]);
                r
            })
            .collect();
        let (lo, hi) = grid
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(*v), b.max(*v))
            });
        let mut levels: Vec<Level> = (1..20)
            .map(|k| Level {
                value: lo + (hi - lo) * k as f64 / 20.0,
                color: "#888888",
                width: 0.8,
            })
            .collect();
        levels.extend(p.separatrix_energies.iter().map(|&e| Level {
            value: e,
            color: "#d62728",
            width: 1.8,
        }));
        let markers: Vec<(f64, f64, &'static str)> = p
            .fixed_points
            .iter()
            .map(|f| {
                let color = match f.stability {
                    StabilityTag::Center => "#2ca02c",
                    StabilityTag::Saddle => "#d62728",
                    StabilityTag::Degenerate => "#ffbf00",
                };
                (f.point.theta(), f.point.z(), color)
            })
            .collect();
        // z on rows, θ on columns: plot θ horizontally
        let text = svg::contour_plot(
            &format!("energy levels, mu = {}, eta = {}", c.mu, c.eta),
            "theta",
            "z",
            &thetas,
            &p.z_values,
            &grid,
            &levels,
            &markers,
        );
        let path = out_dir.join("portrait.svg");
        write_svg(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    chart: &'static str,
    mu: f64,
    eta: f64,
    z0: f64,
    theta0: f64,
    tau_end: f64,
    tol: f64,
    sample_stride: f64,
    reverse: bool,
    samples: usize,
    energy_drift: f64,
    norm_drift: Option<f64>,
    status: &'static str,
    /// Where the phase chart was abandoned, if it was.
    escape_tau: Option<f64>,
    beating_period: Option<f64>,
    steps_accepted: usize,
    steps_rejected: usize,
}

fn simulate(c: &SimulateConfig, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let params = DimerParams::new(c.mu, c.eta).in_module("dimer")?;
    let start = PhasePoint::new(c.z0, c.theta0).in_module("dimer")?;
    let settings = IntegrationSettings {
        dt_init: c.dt_init,
        tol: c.tol,
        sample_stride: c.sample_stride,
        reverse: c.reverse,
        ..Default::default()
    };
    let chart: Chart = c.chart.into();
    let traj = match chart {
        Chart::Phase => integrate_phase(start, &params, c.tau_end, &settings),
        Chart::Amplitude => integrate_amplitudes(
            to_amplitudes(start, c.global_phase),
            &params,
            c.tau_end,
            &settings,
        ),
    }
    .in_module("dynamics")?;

    let mut table = CsvTable::new(&["tau", "z", "theta", "H", "norm"]);
    let points = traj.phase_points();
    for (k, p) in points.iter().enumerate() {
        table.push_floats(&[
            traj.times[k],
            p.z(),
            p.theta(),
            traj.energies[k],
            traj.norms[k],
        ]);
    }
    let csv = out_dir.join("trajectory.csv");
    table.write(&csv)?;
    let (status, escape_tau) = match traj.status {
        TrajectoryStatus::Completed => ("completed", None),
        TrajectoryStatus::ChartEscape { tau } => ("chart_escape", Some(tau)),
    };
    let report = SimulateReport {
        chart: chart.as_str(),
        mu: c.mu,
        eta: c.eta,
        z0: c.z0,
        theta0: c.theta0,
        tau_end: c.tau_end,
        tol: c.tol,
        sample_stride: c.sample_stride,
        reverse: c.reverse,
        samples: traj.len(),
        energy_drift: traj.energy_drift,
        norm_drift: traj.norm_drift,
        status,
        escape_tau,
        beating_period: beating_period(&traj),
        steps_accepted: traj.steps_accepted,
        steps_rejected: traj.steps_rejected,
    };
    let json = out_dir.join("simulate.json");
    write_json(&json, &report)?;
    if let Some(tau) = escape_tau {
        eprintln!("warning: the phase chart reached |z| = 1 at tau = {tau:.6}; rerun with chart \"amplitude\"");
    }
    println!(
        "{} samples, energy drift {:.3e}, status {}",
        report.samples, report.energy_drift, report.status
    );
    let mut written = vec![csv, json];
    if svg {
        let series = [Series {
            points: traj
                .times
                .iter()
                .copied()
                .zip(points.iter().map(|p| p.z()))
                .collect(),
            color: "#1f77b4",
            dashed: false,
        }];
        let path = out_dir.join("trajectory.svg");
        write_svg(
            &path,
            &svg::line_plot(
                &format!("population imbalance, mu = {}, eta = {}", c.mu, c.eta),
                "tau",
                "z",
                &series,
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct EtaOfEpsilon {
    epsilon: f64,
    eta: f64,
}

#[derive(Debug, Serialize)]
struct ReductionReport {
    potential: PotentialRecord,
    hbar: f64,
    mu: f64,
    half_width: f64,
    grid_points: usize,
    dx: f64,
    lambda_plus: f64,
    lambda_minus: f64,
    lambda_2: f64,
    omega: f64,
    #[serde(rename = "Omega")]
    omega_mean: f64,
    gap_ratio: f64,
    c: f64,
    overlap: f64,
    cross: f64,
    #[serde(rename = "T")]
    beating_period: f64,
    boundary_amplitude: f64,
    eta_of_epsilon: Vec<EtaOfEpsilon>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum PotentialRecord {
    Quartic { a: f64, b: f64 },
    GaussianWells { depth: f64, center: f64, width: f64 },
    Tabulated { points: usize, extent: f64 },
    Harmonic { omega: f64 },
}

impl From<&PotentialFamily> for PotentialRecord {
    fn from(f: &PotentialFamily) -> Self {
        match f {
            PotentialFamily::Quartic { a, b } => PotentialRecord::Quartic { a: *a, b: *b },
            PotentialFamily::GaussianWells {
                depth,
                center,
                width,
            } => PotentialRecord::GaussianWells {
                depth: *depth,
                center: *center,
                width: *width,
            },
            PotentialFamily::Tabulated { x, .. } => PotentialRecord::Tabulated {
                points: x.len(),
                extent: f.extent().unwrap_or(f64::NAN),
            },
            PotentialFamily::Harmonic { omega } => PotentialRecord::Harmonic { omega: *omega },
        }
    }
}

fn reduce(
    c: &ReduceConfig,
    spec: &PotentialSpec,
    opts: &ReductionOptions,
    out_dir: &Path,
    svg: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let r = solve_doublet(spec, opts).in_module("reduction")?;
    let nonlinear = compute_c(&r, c.mu).in_module("reduction")?;
    let terms = cross_terms(&r, c.mu).in_module("reduction")?;
    let report = ReductionReport {
        potential: (&spec.family).into(),
        hbar: r.hbar,
        mu: c.mu,
        half_width: r.half_width,
        grid_points: r.grid_points(),
        dx: r.dx,
        lambda_plus: r.lambda_plus,
        lambda_minus: r.lambda_minus,
        lambda_2: r.lambda_2,
        omega: r.omega,
        omega_mean: r.omega_mean,
        gap_ratio: r.gap_ratio(),
        c: nonlinear,
        overlap: terms.overlap,
        cross: terms.cross,
        beating_period: r.beating_period,
        boundary_amplitude: r.boundary_amplitude,
        eta_of_epsilon: c
            .epsilon
            .iter()
            .map(|&e| EtaOfEpsilon {
                epsilon: e,
                eta: map_epsilon_to_eta(&r, nonlinear, e),
            })
            .collect(),
    };
    let json = out_dir.join("reduction.json");
    write_json(&json, &report)?;
    let mut table = CsvTable::new(&["x", "phi_plus", "phi_minus", "phi_R", "phi_L"]);
    for k in 0..r.x.len() {
        table.push_floats(&[
            r.x[k],
            r.phi_plus[k],
            r.phi_minus[k],
            r.phi_r[k],
            r.phi_l[k],
        ]);
    }
    let csv = out_dir.join("eigenfunctions.csv");
    table.write(&csv)?;
    println!(
        "omega = {:.6e}, c = {:.6e}, T = {:.6e}, {} grid points",
        r.omega,
        nonlinear,
        r.beating_period,
        r.grid_points()
    );
    let mut written = vec![json, csv];
    if svg {
        let curve = |v: &[f64], color, dashed| Series {
            points: r.x.iter().copied().zip(v.iter().copied()).collect(),
            color,
            dashed,
        };
        let series = [
            curve(&r.phi_r, "#1f77b4", false),
            curve(&r.phi_l, "#d62728", false),
            curve(&r.phi_plus, "#2ca02c", true),
            curve(&r.phi_minus, "#ff7f0e", true),
        ];
        let path = out_dir.join("eigenfunctions.svg");
        write_svg(
            &path,
            &svg::line_plot(
                &format!("ground doublet, hbar = {}", r.hbar),
                "x",
                "phi",
                &series,
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}
