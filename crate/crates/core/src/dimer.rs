//! Closed-form mathematics of the two-mode model.
//!
//! The reduced system lives either in the amplitude chart `(a_R, a_L)` on the
//! unit sphere or in the canonical chart `(z, θ)`, where `z = |a_R|² − |a_L|²`
//! is the population imbalance and `θ = arg a_R − arg a_L` the relative
//! phase. In the canonical chart the flow is Hamiltonian with
//!
//! ```text
//! H(z, θ) = 2√(1−z²) cos θ − η [(1+z)^(μ+1) + (1−z)^(μ+1)] / (2^μ (μ+1))
//! θ' = ∂H/∂z,   z' = −∂H/∂θ
//! ```
//!
//! Stationary points sit on `θ ∈ {0, π}` and are the roots of `f_±(z)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::numerics::{bisect, golden_section_min, linspace};

/// Distance from `|z| = 1` below which the canonical chart is treated as
/// singular.
pub const DELTA_SING: f64 = 1e-12;

/// Nonlinearity power `μ` and dimensionless strength `η`, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    mu: f64,
    eta: f64,
}

impl DimerParams {
    pub fn new(mu: f64, eta: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(DimerError::param("mu", mu, "must be finite and > 0"));
        }
        if !eta.is_finite() || eta <= 0.0 {
            return Err(DimerError::param("eta", eta, "must be finite and > 0"));
        }
        Ok(DimerParams { mu, eta })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Same power, different strength.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        DimerParams::new(self.mu, eta)
    }
}

/// A point `(z, θ)` of the canonical chart with `θ` wrapped into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    z: f64,
    theta: f64,
}

impl PhasePoint {
    pub fn new(z: f64, theta: f64) -> Result<Self> {
        if !z.is_finite() || !(-1.0..=1.0).contains(&z) {
            return Err(DimerError::param("z", z, "must lie in [-1, 1]"));
        }
        if !theta.is_finite() {
            return Err(DimerError::param("theta", theta, "must be finite"));
        }
        Ok(PhasePoint {
            z,
            theta: wrap_angle(theta),
        })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Complex mode amplitudes on the unit sphere `|a_R|² + |a_L|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    a_r: Complex64,
    a_l: Complex64,
}

impl AmplitudePair {
    /// Tolerance on the unit-norm constraint at construction.
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(a_r: Complex64, a_l: Complex64) -> Result<Self> {
        let norm = a_r.norm_sqr() + a_l.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(DimerError::param(
                "|a_R|^2 + |a_L|^2",
                norm,
                "amplitudes must be normalised to 1",
            ));
        }
        Ok(AmplitudePair { a_r, a_l })
    }

    /// Skips the norm check. Used for integrator states, whose drift is
    /// tracked separately.
    pub fn new_unchecked(a_r: Complex64, a_l: Complex64) -> Self {
        AmplitudePair { a_r, a_l }
    }

    pub fn a_r(&self) -> Complex64 {
        self.a_r
    }

    pub fn a_l(&self) -> Complex64 {
        self.a_l
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_r.norm_sqr() + self.a_l.norm_sqr()
    }
}

/// Stability class of a stationary point of the planar Hamiltonian flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityTag {
    /// Neutrally stable (elliptic).
    Center,
    /// Unstable (hyperbolic).
    Saddle,
    /// Hessian determinant within tolerance of zero.
    Degenerate,
}

impl StabilityTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityTag::Center => "center",
            StabilityTag::Saddle => "saddle",
            StabilityTag::Degenerate => "degenerate",
        }
    }
}

/// Selects `f_+` (stationarity along θ = 0) or `f_−` (along θ = π).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationarySign {
    Plus,
    Minus,
}

impl StationarySign {
    pub fn theta(&self) -> f64 {
        match self {
            StationarySign::Plus => 0.0,
            StationarySign::Minus => PI,
        }
    }
}

/// Time derivatives of the canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowVector {
    pub dz: f64,
    pub dtheta: f64,
}

impl FlowVector {
    pub fn max_norm(&self) -> f64 {
        self.dz.abs().max(self.dtheta.abs())
    }
}

fn check_interior(z: f64) -> Result<()> {
    if !(z.abs() < 1.0 - DELTA_SING) {
        return Err(DimerError::EndpointSingularity { z });
    }
    Ok(())
}

/// `(1+z)^μ − (1−z)^μ` without cancellation near `z = 0`.
pub(crate) fn power_difference(z: f64, mu: f64) -> f64 {
    if z.abs() < 0.5 {
        // (1−z)^μ · (exp(μ ln((1+z)/(1−z))) − 1), and ln((1+z)/(1−z)) = 2 atanh z
        (1.0 - z).powf(mu) * (2.0 * mu * z.atanh()).exp_m1()
    } else {
        (1.0 + z).powf(mu) - (1.0 - z).powf(mu)
    }
}

fn power_sum(z: f64, exponent: f64) -> f64 {
    (1.0 + z).powf(exponent) + (1.0 - z).powf(exponent)
}

/// The conserved energy `H(z, θ)`; finite on the closed interval `[-1, 1]`.
pub fn hamiltonian(p: PhasePoint, params: &DimerParams) -> f64 {
    let (mu, eta) = (params.mu, params.eta);
    let z = p.z;
    let kinetic = 2.0 * (1.0 - z * z).max(0.0).sqrt() * p.theta.cos();
    let nonlinear = eta * power_sum(z, mu + 1.0) / (2f64.powf(mu) * (mu + 1.0));
    kinetic - nonlinear
}

/// Right-hand side of the canonical equations, `(z', θ') = (−∂_θ H, ∂_z H)`.
pub fn vector_field(p: PhasePoint, params: &DimerParams) -> Result<FlowVector> {
    check_interior(p.z)?;
    Ok(raw_vector_field(p.z, p.theta, params))
}

pub(crate) fn raw_vector_field(z: f64, theta: f64, params: &DimerParams) -> FlowVector {
    let root = (1.0 - z * z).sqrt();
    let (sin, cos) = theta.sin_cos();
    FlowVector {
        dz: 2.0 * root * sin,
        dtheta: -2.0 * z * cos / root
            - params.eta * power_difference(z, params.mu) / 2f64.powf(params.mu),
    }
}

/// Stationarity function along `θ = 0` (`Plus`) or `θ = π` (`Minus`):
/// `f_±(z) = ∓2z/√(1−z²) − η [(1+z)^μ − (1−z)^μ] 2^(−μ)`.
pub fn f_pm(z: f64, sign: StationarySign, params: &DimerParams) -> Result<f64> {
    check_interior(z)?;
    Ok(raw_f_pm(z, sign, params))
}

pub(crate) fn raw_f_pm(z: f64, sign: StationarySign, params: &DimerParams) -> f64 {
    let s = match sign {
        StationarySign::Plus => -1.0,
        StationarySign::Minus => 1.0,
    };
    s * 2.0 * z / (1.0 - z * z).sqrt()
        - params.eta * power_difference(z, params.mu) / 2f64.powf(params.mu)
}

/// The strength at which `z` is an asymmetric root of `f_−`:
/// `η(z) = 2^(μ+1) z / [√(1−z²) ((1+z)^μ − (1−z)^μ)]`, extended evenly to
/// negative `z`.
pub fn eta_of_z(z: f64, mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(DimerError::param("mu", mu, "must be finite and > 0"));
    }
    check_interior(z)?;
    if z == 0.0 {
        return Err(DimerError::Domain {
            what: "eta_of_z",
            detail: "z = 0 is a removable singularity; use eta_star".into(),
        });
    }
    let z = z.abs();
    Ok(2f64.powf(mu + 1.0) * z / ((1.0 - z * z).sqrt() * power_difference(z, mu)))
}

/// Pitchfork strength `η* = 2^μ / μ`, the limit of `η(z)` at `z → 0`.
pub fn eta_star(mu: f64) -> f64 {
    2f64.powf(mu) / mu
}

/// The universal critical power `(3 + √13)/2`, positive root of `μ² − 3μ − 1`.
pub fn mu_threshold() -> f64 {
    (3.0 + 13f64.sqrt()) / 2.0
}

/// Curvature of the `η(z)` branch at the origin, `2^μ (3μ + 1 − μ²) / (3μ)`.
pub fn d2eta_at_zero(mu: f64) -> f64 {
    2f64.powf(mu) * (3.0 * mu + 1.0 - mu * mu) / (3.0 * mu)
}

/// `g(z, μ) = (μz² − μz + 1)(1+z)^μ`.
pub fn g_func(z: f64, mu: f64) -> f64 {
    (mu * z * z - mu * z + 1.0) * (1.0 + z).powf(mu)
}

/// `g(z, μ) − g(−z, μ)`; vanishes exactly where `dη/dz = 0`.
pub fn fold_condition(z: f64, mu: f64) -> f64 {
    g_func(z, mu) - g_func(-z, mu)
}

const FOLD_SCAN_POINTS: usize = 10_000;
const FOLD_SCAN_EDGE: f64 = 1e-6;
const FOLD_XTOL: f64 = 1e-12;
const FOLD_MAX_ITER: usize = 200;

/// Location `z` and value `η⁺` of the interior minimum of `η(z)` on `(0, 1)`.
///
/// `None` for `μ ≤ μ_threshold` (within 1e-12), where `η(z)` is increasing
/// and its infimum `η*` is only approached at `z → 0`.
pub fn fold_location(mu: f64) -> Result<Option<(f64, f64)>> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(DimerError::param("mu", mu, "must be finite and > 0"));
    }
    if mu <= mu_threshold() + 1e-12 {
        return Ok(None);
    }
    let grid = linspace(FOLD_SCAN_EDGE, 1.0 - FOLD_SCAN_EDGE, FOLD_SCAN_POINTS);
    let values: Vec<f64> = grid
        .iter()
        .map(|&z| eta_of_z(z, mu).unwrap_or(f64::INFINITY))
        .collect();
    let (best, _) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| {
                if v < bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            },
        );
    if best == 0 {
        // Minimum pinned at the inner edge: fold closer to 0 than the scan
        // resolves, only possible a hair above the threshold.
        return Ok(None);
    }
    let lo = grid[best - 1];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let m = golden_section_min(
        |z| eta_of_z(z, mu).unwrap_or(f64::INFINITY),
        lo,
        hi,
        FOLD_XTOL,
        FOLD_MAX_ITER,
    )?;
    // η is flat at its minimum, so the location is sharpened on the
    // derivative condition instead
    let z = match bisect(|z| fold_condition(z, mu), lo, hi, 0.0, 200) {
        Ok(z) => z,
        Err(_) => return Ok(Some((m.x, m.value))),
    };
    Ok(Some((z, eta_of_z(z, mu)?)))
}

/// Saddle-node strength `η⁺ = min_{z∈(0,1)} η(z)`, or `None` when no
/// interior fold exists (`μ ≤ μ_threshold`; callers then use `η*`).
pub fn eta_plus(mu: f64) -> Result<Option<f64>> {
    Ok(fold_location(mu)?.map(|(_, eta)| eta))
}

/// Root of [`fold_condition`] in `(0, 1)` by bisection, if there is a sign
/// change on the scan grid.
pub fn fold_root(mu: f64) -> Result<Option<f64>> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(DimerError::param("mu", mu, "must be finite and > 0"));
    }
    let grid = linspace(0.01, 0.99, FOLD_SCAN_POINTS);
    let bracket = grid
        .windows(2)
        .find(|w| fold_condition(w[0], mu).signum() != fold_condition(w[1], mu).signum());
    match bracket {
        Some(w) => bisect(|z| fold_condition(z, mu), w[0], w[1], 0.0, FOLD_MAX_ITER).map(Some),
        None => Ok(None),
    }
}

/// Result of mapping amplitudes to the canonical chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReading {
    pub point: PhasePoint,
    /// `false` when one amplitude is below [`DELTA_SING`]; θ is then set to 0.
    pub phase_defined: bool,
}

pub fn to_phase(a: AmplitudePair) -> PhaseReading {
    let (nr, nl) = (a.a_r.norm_sqr(), a.a_l.norm_sqr());
    let norm = nr + nl;
    let z = ((nr - nl) / norm).clamp(-1.0, 1.0);
    let phase_defined = a.a_r.norm() > DELTA_SING && a.a_l.norm() > DELTA_SING;
    let theta = if phase_defined {
        // arg(a_R · conj(a_L)) avoids accumulating two separate branch cuts
        wrap_angle((a.a_r * a.a_l.conj()).arg())
    } else {
        0.0
    };
    PhaseReading {
        point: PhasePoint { z, theta },
        phase_defined,
    }
}

/// Inverse of [`to_phase`]: `a_R = p e^{i(γ+θ)}`, `a_L = q e^{iγ}` with
/// `p² = (1+z)/2`, `q² = (1−z)/2`.
pub fn to_amplitudes(p: PhasePoint, global_phase: f64) -> AmplitudePair {
    let mag_r = ((1.0 + p.z) / 2.0).sqrt();
    let mag_l = ((1.0 - p.z) / 2.0).sqrt();
    AmplitudePair {
        a_r: Complex64::from_polar(mag_r, global_phase + p.theta),
        a_l: Complex64::from_polar(mag_l, global_phase),
    }
}

/// Conserved quantity of the amplitude equations,
/// `−(ā_R a_L + ā_L a_R) + η (|a_R|^(2μ+2) + |a_L|^(2μ+2)) / (μ+1)`.
/// On the unit sphere it equals `−H/2`.
pub fn amplitude_hamiltonian(a: AmplitudePair, params: &DimerParams) -> f64 {
    let hopping = -2.0 * (a.a_r.conj() * a.a_l).re;
    let exponent = params.mu + 1.0;
    let nonlinear =
        params.eta * (a.a_r.norm_sqr().powf(exponent) + a.a_l.norm_sqr().powf(exponent)) / exponent;
    hopping + nonlinear
}
