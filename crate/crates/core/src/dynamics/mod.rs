//! Time integration of the dimer equations.
//!
//! Two charts are available. The canonical chart integrates
//! `θ' = ∂H/∂z, z' = −∂H/∂θ` and is singular at `z = ±1`; the amplitude
//! chart integrates
//!
//! ```text
//! i a_R' = −a_L + η |a_R|^(2μ) a_R
//! i a_L' = −a_R + η |a_L|^(2μ) a_L
//! ```
//!
//! as four real components and is regular everywhere. Both use the same
//! adaptive Dormand–Prince 5(4) driver with steps clipped to land on the
//! output grid. Energy and norm are recorded at each output sample and their
//! maximum deviations are reported; nothing is renormalised.

mod rk;

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dimer::{
    amplitude_hamiltonian, hamiltonian, raw_vector_field, to_phase, wrap_angle, AmplitudePair,
    DimerParams, PhasePoint, DELTA_SING,
};
use crate::error::{DimerError, Result};

/// Smallest admissible step.
pub const MIN_STEP: f64 = 1e-14;
/// A stage leaving the domain at a step this small ends the integration.
const DOMAIN_STALL_STEP: f64 = 1e-9;
const ROUNDOFF_ULPS: f64 = 16.0;
/// The canonical chart is abandoned once `|z|` reaches `1 − CHART_MARGIN`.
pub const CHART_MARGIN: f64 = 10.0 * DELTA_SING;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub dt_init: f64,
    /// Bound on the max-norm of the local error estimate per unit step
    /// (`err ≤ tol·h`), so the accumulated error stays near `tol·τ`.
    pub tol: f64,
    /// Spacing of recorded samples in τ.
    pub sample_stride: f64,
    /// Integrate the time-reversed flow.
    pub reverse: bool,
    pub max_steps: usize,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            dt_init: 1e-3,
            tol: 1e-10,
            sample_stride: 0.01,
            reverse: false,
            max_steps: 50_000_000,
        }
    }
}

impl IntegrationSettings {
    pub fn with_tol(tol: f64) -> Self {
        IntegrationSettings {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self, tau_end: f64) -> Result<()> {
        if !(tau_end.is_finite() && tau_end > 0.0) {
            return Err(DimerError::param(
                "tau_end",
                tau_end,
                "must be finite and > 0",
            ));
        }
        if !(1e-14..=1e-6).contains(&self.tol) {
            return Err(DimerError::param(
                "tol",
                self.tol,
                "must lie in [1e-14, 1e-6]",
            ));
        }
        if !(self.dt_init.is_finite() && self.dt_init > 0.0) {
            return Err(DimerError::param(
                "dt_init",
                self.dt_init,
                "must be finite and > 0",
            ));
        }
        if !(self.sample_stride.is_finite() && self.sample_stride > 0.0) {
            return Err(DimerError::param(
                "sample_stride",
                self.sample_stride,
                "must be finite and > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Phase,
    Amplitude,
}

impl Chart {
    pub fn as_str(&self) -> &'static str {
        match self {
            Chart::Phase => "phase",
            Chart::Amplitude => "amplitude",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStates {
    Phase(Vec<PhasePoint>),
    Amplitude(Vec<AmplitudePair>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// The canonical chart reached `|z| ≥ 1 − 10·δ`; the trajectory stops at
    /// `tau` and should be continued in the amplitude chart.
    ChartEscape {
        tau: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub chart: Chart,
    pub params: DimerParams,
    pub times: Vec<f64>,
    pub states: TrajectoryStates,
    /// `H(z, θ)` per sample; in the amplitude chart `−2·H_amp`, which is the
    /// same quantity.
    pub energies: Vec<f64>,
    /// `|a_R|² + |a_L|²` per sample (identically 1 in the phase chart).
    pub norms: Vec<f64>,
    pub energy_drift: f64,
    /// Amplitude chart only.
    pub norm_drift: Option<f64>,
    pub status: TrajectoryStatus,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn z_values(&self) -> Vec<f64> {
        match &self.states {
            TrajectoryStates::Phase(ps) => ps.iter().map(|p| p.z()).collect(),
            TrajectoryStates::Amplitude(as_) => {
                as_.iter().map(|a| to_phase(*a).point.z()).collect()
            }
        }
    }

    /// `(z, θ)` per sample; `θ` is 0 where the phase is undefined.
    pub fn phase_points(&self) -> Vec<PhasePoint> {
        match &self.states {
            TrajectoryStates::Phase(ps) => ps.clone(),
            TrajectoryStates::Amplitude(as_) => as_.iter().map(|a| to_phase(*a).point).collect(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

enum DriveEnd {
    Completed,
    DomainExit(f64),
}

/// Generic adaptive driver; `record` is called at every output time.
fn drive<const N: usize, F, R>(
    f: F,
    y0: [f64; N],
    tau_end: f64,
    settings: &IntegrationSettings,
    post_step: impl Fn(&mut [f64; N]),
    mut record: R,
) -> Result<(DriveEnd, usize, usize)>
where
    F: Fn(f64, &[f64; N]) -> Option<[f64; N]>,
    R: FnMut(f64, &[f64; N]),
{
    let n_out = (tau_end / settings.sample_stride).ceil() as usize;
    let out_time = |k: usize| (k as f64 * settings.sample_stride).min(tau_end);

    let mut t = 0.0;
    let mut y = y0;
    let Some(mut dy) = f(t, &y) else {
        return Ok((DriveEnd::DomainExit(0.0), 0, 0));
    };
    record(t, &y);
    let mut next_out = 1;
    let mut h = settings.dt_init;
    let (mut accepted, mut rejected) = (0usize, 0usize);

    while next_out <= n_out {
        if accepted + rejected >= settings.max_steps {
            return Err(DimerError::ConvergenceFailure {
                what: "adaptive integration",
                iterations: settings.max_steps,
            });
        }
        let target = out_time(next_out);
        let clipped = t + h >= target;
        let h_try = if clipped { target - t } else { h };
        if h_try < MIN_STEP && !clipped {
            return Err(DimerError::StepUnderflow { tau: t, dt: h_try });
        }
        match rk::trial_step(&f, t, &y, &dy, h_try) {
            None => {
                rejected += 1;
                h = h_try * 0.25;
                // the state is pinned against the chart edge
                if h_try <= DOMAIN_STALL_STEP {
                    return Ok((DriveEnd::DomainExit(t), accepted, rejected));
                }
            }
            Some(trial) => {
                // below a few ulps of the state the estimate is pure round-off
                let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let bound = (settings.tol * h_try).max(ROUNDOFF_ULPS * f64::EPSILON * scale);
                let ratio = trial.err / bound;
                if ratio <= 1.0 {
                    accepted += 1;
                    t = if clipped { target } else { t + h_try };
                    y = trial.y;
                    post_step(&mut y);
                    dy = trial.dy;
                    if clipped {
                        record(t, &y);
                        next_out += 1;
                    }
                    let grow = if ratio == 0.0 {
                        5.0
                    } else {
                        (0.9 * ratio.powf(-0.25)).clamp(0.2, 5.0)
                    };
                    // a clipped step says nothing about the natural step size
                    h = if clipped {
                        h.max(h_try * grow)
                    } else {
                        h_try * grow
                    };
                } else {
                    rejected += 1;
                    h = h_try * (0.9 * ratio.powf(-0.25)).clamp(0.1, 1.0);
                    if h < MIN_STEP {
                        return Err(DimerError::StepUnderflow { tau: t, dt: h });
                    }
                }
            }
        }
    }
    Ok((DriveEnd::Completed, accepted, rejected))
}

fn max_deviation(values: &[f64]) -> f64 {
    let first = values.first().copied().unwrap_or(0.0);
    values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
}

/// Integrates the canonical equations from `p0` over `τ ∈ [0, tau_end]`.
///
/// On approaching `|z| = 1` the partial trajectory is returned with status
/// [`TrajectoryStatus::ChartEscape`].
pub fn integrate_phase(
    p0: PhasePoint,
    params: &DimerParams,
    tau_end: f64,
    settings: &IntegrationSettings,
) -> Result<Trajectory> {
    settings.validate(tau_end)?;
    if p0.z().abs() > 1.0 - CHART_MARGIN {
        return Err(DimerError::EndpointSingularity { z: p0.z() });
    }
    let sign = if settings.reverse { -1.0 } else { 1.0 };
    let rhs = |_t: f64, y: &[f64; 2]| {
        if y[0].abs() >= 1.0 - CHART_MARGIN || !y[0].is_finite() {
            return None;
        }
        let v = raw_vector_field(y[0], y[1], params);
        Some([sign * v.dz, sign * v.dtheta])
    };
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energies = Vec::new();
    let (end, accepted, rejected) = drive(
        rhs,
        [p0.z(), p0.theta()],
        tau_end,
        settings,
        |y| y[1] = y[1].rem_euclid(TAU),
        |t, y| {
            let p = PhasePoint::new(y[0], wrap_angle(y[1])).expect("state inside chart");
            times.push(t);
            energies.push(hamiltonian(p, params));
            states.push(p);
        },
    )?;
    let status = match end {
        DriveEnd::Completed => TrajectoryStatus::Completed,
        DriveEnd::DomainExit(tau) => TrajectoryStatus::ChartEscape { tau },
    };
    let norms = vec![1.0; times.len()];
    Ok(Trajectory {
        chart: Chart::Phase,
        params: *params,
        energy_drift: max_deviation(&energies),
        norm_drift: None,
        times,
        states: TrajectoryStates::Phase(states),
        energies,
        norms,
        status,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}

/// Integrates the complex amplitude equations from `a0`.
pub fn integrate_amplitudes(
    a0: AmplitudePair,
    params: &DimerParams,
    tau_end: f64,
    settings: &IntegrationSettings,
) -> Result<Trajectory> {
    settings.validate(tau_end)?;
    let (mu, eta) = (params.mu(), params.eta());
    let sign = if settings.reverse { -1.0 } else { 1.0 };
    // a' = −i(−a_other + η|a|^(2μ) a) = i·a_other − iη|a|^(2μ) a
    let rhs = |_t: f64, y: &[f64; 4]| {
        let (rr, ri, lr, li) = (y[0], y[1], y[2], y[3]);
        let gr = eta * (rr * rr + ri * ri).powf(mu);
        let gl = eta * (lr * lr + li * li).powf(mu);
        let out = [-li + gr * ri, lr - gr * rr, -ri + gl * li, rr - gl * lr];
        if out.iter().all(|v| v.is_finite()) {
            Some(out.map(|v| sign * v))
        } else {
            None
        }
    };
    let y0 = [a0.a_r().re, a0.a_r().im, a0.a_l().re, a0.a_l().im];
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energies = Vec::new();
    let mut norms = Vec::new();
    let (end, accepted, rejected) = drive(
        rhs,
        y0,
        tau_end,
        settings,
        |_| {},
        |t, y| {
            let a = AmplitudePair::new_unchecked(
                Complex64::new(y[0], y[1]),
                Complex64::new(y[2], y[3]),
            );
            times.push(t);
            energies.push(-2.0 * amplitude_hamiltonian(a, params));
            norms.push(a.norm_sqr());
            states.push(a);
        },
    )?;
    if let DriveEnd::DomainExit(tau) = end {
        return Err(DimerError::StepUnderflow { tau, dt: MIN_STEP });
    }
    Ok(Trajectory {
        chart: Chart::Amplitude,
        params: *params,
        energy_drift: max_deviation(&energies),
        norm_drift: Some(max_deviation(&norms)),
        times,
        states: TrajectoryStates::Amplitude(states),
        energies,
        norms,
        status: TrajectoryStatus::Completed,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}

/// Noise floor below which `z` excursions do not count as crossings.
const CROSSING_FLOOR: f64 = 1e-8;

/// Period of `z(τ)` from successive upward zero crossings.
///
/// A crossing only counts after `z` has dipped below `−1e-8`, so round-off
/// wobble of a stationary trajectory never registers. `None` when fewer than
/// two crossings occur (e.g. self-trapped motion).
pub fn beating_period(traj: &Trajectory) -> Option<f64> {
    let z = traj.z_values();
    let t = &traj.times;
    let mut crossings = Vec::new();
    let mut armed = false;
    for k in 1..z.len() {
        if z[k - 1] < -CROSSING_FLOOR {
            armed = true;
        }
        if armed && z[k - 1] < 0.0 && z[k] >= 0.0 {
            let frac = -z[k - 1] / (z[k] - z[k - 1]);
            crossings.push(t[k - 1] + frac * (t[k] - t[k - 1]));
            armed = false;
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}
