//! Stationary states of the dimer, their stability, continuation in η and
//! phase-portrait data.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::dimer::{
    hamiltonian, power_difference, raw_vector_field, DimerParams, PhasePoint, StabilityTag,
    DELTA_SING,
};
use crate::error::{DimerError, Result};
use crate::numerics::{bisect, bracket_roots, linspace};

/// Hessian products with magnitude at or below this are tagged degenerate.
pub const TOL_DEGENERATE: f64 = 1e-9;
/// Grid resolution of the root scan on `(0, 1)`.
pub const ROOT_SCAN_POINTS: usize = 10_000;
const ROOT_SCAN_EDGE: f64 = 1e-6;
/// Largest `|Δz|` between consecutive samples of one branch.
pub const BRANCH_JUMP_GUARD: f64 = 0.1;
const BRANCH_TIE_TOL: f64 = 1e-9;
const STATIONARY_RESIDUAL_TOL: f64 = 1e-8;

/// A fixed point of the canonical flow. `θ` is always 0 or π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub point: PhasePoint,
    pub params: DimerParams,
    pub stability: StabilityTag,
    /// `H_zz · H_θθ` at the point; positive for centres.
    pub hessian_product: f64,
}

impl StationaryPoint {
    pub fn energy(&self) -> f64 {
        hamiltonian(self.point, &self.params)
    }

    pub fn is_symmetric(&self) -> bool {
        self.point.z() == 0.0
    }
}

/// Centre/saddle test for a stationary point on `θ ∈ {0, π}`.
///
/// The mixed partial `H_zθ` vanishes there, so the sign of `H_zz · H_θθ`
/// decides: the linearisation has eigenvalues `±√(−H_zz H_θθ)`.
pub fn classify_stability(point: PhasePoint, params: &DimerParams) -> Result<(StabilityTag, f64)> {
    let (z, theta) = (point.z(), point.theta());
    if z.abs() >= 1.0 - DELTA_SING {
        return Err(DimerError::EndpointSingularity { z });
    }
    let cos = theta.cos();
    let residual = raw_vector_field(z, theta, params).max_norm();
    if theta.sin().abs() > 1e-12 || residual > STATIONARY_RESIDUAL_TOL {
        return Err(DimerError::NotStationary { z, theta, residual });
    }
    let (mu, eta) = (params.mu(), params.eta());
    let one_minus = 1.0 - z * z;
    let h_zz = -2.0 * cos * one_minus.powf(-1.5)
        - eta * mu * ((1.0 + z).powf(mu - 1.0) + (1.0 - z).powf(mu - 1.0)) / 2f64.powf(mu);
    let h_tt = -2.0 * one_minus.sqrt() * cos;
    let product = h_zz * h_tt;
    let tag = if product > TOL_DEGENERATE {
        StabilityTag::Center
    } else if product < -TOL_DEGENERATE {
        StabilityTag::Saddle
    } else {
        StabilityTag::Degenerate
    };
    Ok((tag, product))
}

/// `f_−(z)/z`, which has the same nonzero roots as `f_−` but no trivial root
/// at the origin.
fn reduced_f_minus(z: f64, params: &DimerParams) -> f64 {
    2.0 / (1.0 - z * z).sqrt()
        - params.eta() * power_difference(z, params.mu()) / (2f64.powf(params.mu()) * z)
}

/// Positive roots of `f_−` on `(0, 1)`, ascending.
///
/// Negative roots are their mirror images since `f_−` is odd.
pub fn asymmetric_roots(params: &DimerParams) -> Result<Vec<f64>> {
    let grid = linspace(ROOT_SCAN_EDGE, 1.0 - ROOT_SCAN_EDGE, ROOT_SCAN_POINTS);
    let q = |z: f64| reduced_f_minus(z, params);
    let mut roots = Vec::new();
    for (a, b) in bracket_roots(q, &grid) {
        let r = if a == b {
            a
        } else {
            bisect(q, a, b, 0.0, 200)?
        };
        if roots.last().is_none_or(|&last: &f64| r - last > 1e-14) {
            roots.push(r);
        }
    }
    Ok(roots)
}

#[cfg(debug_assertions)]
fn debug_check_f_plus(params: &DimerParams) {
    // f_+ is strictly decreasing for η > 0, so z = 0 is its only root.
    let grid = linspace(ROOT_SCAN_EDGE, 1.0 - ROOT_SCAN_EDGE, ROOT_SCAN_POINTS);
    use crate::dimer::{raw_f_pm, StationarySign};
    debug_assert!(
        grid.iter()
            .all(|&z| raw_f_pm(z, StationarySign::Plus, params) < 0.0),
        "f_+ has a nonzero root for {params:?}"
    );
}

fn stationary_at(z: f64, theta: f64, params: &DimerParams) -> Result<StationaryPoint> {
    let point = PhasePoint::new(z, theta)?;
    let (stability, hessian_product) = classify_stability(point, params)?;
    Ok(StationaryPoint {
        point,
        params: *params,
        stability,
        hessian_product,
    })
}

/// All stationary points for the given parameters.
///
/// Always contains `(0, 0)` and `(0, π)` first, followed by the asymmetric
/// roots of `f_−` at `θ = π` in ascending `z`.
pub fn find_stationary_points(params: &DimerParams) -> Result<Vec<StationaryPoint>> {
    #[cfg(debug_assertions)]
    debug_check_f_plus(params);

    let mut points = vec![
        stationary_at(0.0, 0.0, params)?,
        stationary_at(0.0, PI, params)?,
    ];
    let positive = asymmetric_roots(params)?;
    for &z in positive.iter().rev() {
        points.push(stationary_at(-z, PI, params)?);
    }
    for &z in &positive {
        points.push(stationary_at(z, PI, params)?);
    }
    Ok(points)
}

/// Kind of a branch in a bifurcation diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchLabel {
    SymmetricTheta0,
    AntisymmetricThetaPi,
    AsymmetricStable,
    AsymmetricUnstable,
}

impl BranchLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchLabel::SymmetricTheta0 => "symmetric_theta0",
            BranchLabel::AntisymmetricThetaPi => "antisymmetric_theta_pi",
            BranchLabel::AsymmetricStable => "asymmetric_stable",
            BranchLabel::AsymmetricUnstable => "asymmetric_unstable",
        }
    }

    fn accepts(&self, tag: StabilityTag) -> bool {
        matches!(
            (self, tag),
            (_, StabilityTag::Degenerate)
                | (BranchLabel::AsymmetricStable, StabilityTag::Center)
                | (BranchLabel::AsymmetricUnstable, StabilityTag::Saddle)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub eta: f64,
    pub z: f64,
    pub theta: f64,
    pub stability: StabilityTag,
}

/// A family of stationary points continued over increasing η.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: BranchLabel,
    pub samples: Vec<BranchSample>,
}

impl Branch {
    fn new(label: BranchLabel) -> Self {
        Branch {
            label,
            samples: Vec::new(),
        }
    }

    fn push(&mut self, eta: f64, p: &StationaryPoint) {
        self.samples.push(BranchSample {
            eta,
            z: p.point.z(),
            theta: p.point.theta(),
            stability: p.stability,
        });
    }

    pub fn eta_range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.eta, self.samples.last()?.eta))
    }

    /// Sign of `z` along the branch (0 for the symmetric branches).
    pub fn side(&self) -> f64 {
        self.samples
            .first()
            .map(|s| if s.z == 0.0 { 0.0 } else { s.z.signum() })
            .unwrap_or(0.0)
    }
}

/// Bifurcation diagram over `eta_range` with `n_samples` evenly spaced η.
///
/// Stationary points are computed per sample (in parallel) and then
/// threaded into branches by nearest-`z` matching within the same side and
/// stability class, in a single deterministic pass.
pub fn bifurcation_diagram(
    mu: f64,
    eta_range: (f64, f64),
    n_samples: usize,
) -> Result<Vec<Branch>> {
    let (lo, hi) = eta_range;
    if !(lo.is_finite() && lo > 0.0) {
        return Err(DimerError::param("eta_min", lo, "must be finite and > 0"));
    }
    if !(hi.is_finite() && hi > lo) {
        return Err(DimerError::param(
            "eta_max",
            hi,
            "must be finite and > eta_min",
        ));
    }
    if n_samples < 2 {
        return Err(DimerError::param(
            "n_samples",
            n_samples as f64,
            "need at least 2 samples",
        ));
    }
    DimerParams::new(mu, lo)?;
    let etas = linspace(lo, hi, n_samples);
    let per_sample: Vec<Vec<StationaryPoint>> = etas
        .par_iter()
        .map(|&eta| find_stationary_points(&DimerParams::new(mu, eta)?))
        .collect::<Result<_>>()?;
    thread_branches(&etas, &per_sample)
}

fn thread_branches(etas: &[f64], per_sample: &[Vec<StationaryPoint>]) -> Result<Vec<Branch>> {
    let mut symmetric = Branch::new(BranchLabel::SymmetricTheta0);
    let mut antisymmetric = Branch::new(BranchLabel::AntisymmetricThetaPi);
    let mut asym: Vec<Branch> = Vec::new();
    let mut open: Vec<usize> = Vec::new();

    for (&eta, points) in etas.iter().zip(per_sample) {
        let mut pending: Vec<&StationaryPoint> = Vec::new();
        for p in points {
            if p.is_symmetric() {
                if p.point.theta() == 0.0 {
                    symmetric.push(eta, p);
                } else {
                    antisymmetric.push(eta, p);
                }
            } else {
                pending.push(p);
            }
        }

        // (distance, point index, branch index) for every admissible pairing
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (pi, p) in pending.iter().enumerate() {
            let z = p.point.z();
            let mut dists: Vec<f64> = Vec::new();
            for &bi in &open {
                let b = &asym[bi];
                let last = b.samples.last().expect("open branches are non-empty");
                let d = (z - last.z).abs();
                if last.z.signum() == z.signum()
                    && b.label.accepts(p.stability)
                    && d < BRANCH_JUMP_GUARD
                {
                    pairs.push((d, pi, bi));
                    dists.push(d);
                }
            }
            dists.sort_by(f64::total_cmp);
            if dists.len() >= 2 && dists[1] - dists[0] < BRANCH_TIE_TOL {
                return Err(DimerError::BranchMatchingAmbiguous { eta, z });
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut point_done = vec![false; pending.len()];
        let mut continued: Vec<usize> = Vec::new();
        for (_, pi, bi) in pairs {
            if point_done[pi] || continued.contains(&bi) {
                continue;
            }
            asym[bi].push(eta, pending[pi]);
            point_done[pi] = true;
            continued.push(bi);
        }
        open.retain(|bi| continued.contains(bi));

        for (pi, p) in pending.iter().enumerate() {
            if point_done[pi] {
                continue;
            }
            let label = if p.hessian_product >= 0.0 {
                BranchLabel::AsymmetricStable
            } else {
                BranchLabel::AsymmetricUnstable
            };
            let mut b = Branch::new(label);
            b.push(eta, p);
            asym.push(b);
            open.push(asym.len() - 1);
        }
    }

    let mut branches = vec![symmetric, antisymmetric];
    branches.extend(asym);
    Ok(branches)
}

/// Energy landscape on a `(z, θ)` lattice together with the fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    pub params: DimerParams,
    /// `nz` values spanning `[-1, 1]` inclusive.
    pub z_values: Vec<f64>,
    /// `ntheta` values `2πj/ntheta`, covering `[0, 2π)`.
    pub theta_values: Vec<f64>,
    /// `grid[i][j] = H(z_values[i], theta_values[j])`.
    pub grid: Vec<Vec<f64>>,
    pub fixed_points: Vec<StationaryPoint>,
    /// Energy of every saddle, in the order of `fixed_points`.
    pub separatrix_energies: Vec<f64>,
}

pub const DEFAULT_PORTRAIT_RESOLUTION: usize = 401;

pub fn phase_portrait(params: &DimerParams, nz: usize, ntheta: usize) -> Result<PhasePortrait> {
    if nz < 16 {
        return Err(DimerError::param(
            "nz",
            nz as f64,
            "need at least 16 points",
        ));
    }
    if ntheta < 16 {
        return Err(DimerError::param(
            "ntheta",
            ntheta as f64,
            "need at least 16 points",
        ));
    }
    let z_values = linspace(-1.0, 1.0, nz);
    let theta_values: Vec<f64> = (0..ntheta)
        .map(|j| TAU * j as f64 / ntheta as f64)
        .collect();
    let grid = z_values
        .iter()
        .map(|&z| {
            theta_values
                .iter()
                .map(|&theta| {
                    hamiltonian(PhasePoint::new(z, theta).expect("lattice point"), params)
                })
                .collect()
        })
        .collect();
    let fixed_points = find_stationary_points(params)?;
    let separatrix_energies = fixed_points
        .iter()
        .filter(|p| p.stability == StabilityTag::Saddle)
        .map(StationaryPoint::energy)
        .collect();
    Ok(PhasePortrait {
        params: *params,
        z_values,
        theta_values,
        grid,
        fixed_points,
        separatrix_energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::{eta_plus, eta_star, vector_field};

    fn params(mu: f64, eta: f64) -> DimerParams {
        DimerParams::new(mu, eta).unwrap()
    }

    fn tags(points: &[StationaryPoint]) -> Vec<(f64, f64, StabilityTag)> {
        points
            .iter()
            .map(|p| (p.point.z(), p.point.theta(), p.stability))
            .collect()
    }

    #[test]
    fn classify_examples() {
        let anti = PhasePoint::new(0.0, PI).unwrap();
        assert_eq!(
            classify_stability(anti, &params(1.0, 1.0)).unwrap().0,
            StabilityTag::Center
        );
        assert_eq!(
            classify_stability(anti, &params(1.0, 3.0)).unwrap().0,
            StabilityTag::Saddle
        );
        for mu in [0.5, 1.0, 2.0, 3.3, 5.0, 8.0] {
            let (tag, prod) = classify_stability(anti, &params(mu, eta_star(mu))).unwrap();
            assert_eq!(tag, StabilityTag::Degenerate, "mu={mu} prod={prod}");
        }
    }

    #[test]
    fn classify_rejects_non_stationary() {
        let p = PhasePoint::new(0.3, PI).unwrap();
        assert!(matches!(
            classify_stability(p, &params(1.0, 1.0)),
            Err(DimerError::NotStationary { .. })
        ));
        let p = PhasePoint::new(0.0, 1.0).unwrap();
        assert!(classify_stability(p, &params(1.0, 1.0)).is_err());
    }

    #[test]
    fn mu5_counts_across_regimes() {
        use StabilityTag::*;
        let pts = find_stationary_points(&params(5.0, 2.0)).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].stability, Center);
        assert_eq!(pts[1].stability, Center);

        let pts = find_stationary_points(&params(5.0, 5.0)).unwrap();
        let t = tags(&pts);
        assert_eq!(pts.len(), 6, "{t:?}");
        // ascending z after the two symmetric points: −outer, −inner, +inner, +outer
        let kinds: Vec<_> = pts.iter().map(|p| p.stability).collect();
        assert_eq!(kinds, vec![Center, Center, Center, Saddle, Saddle, Center]);

        let pts = find_stationary_points(&params(5.0, 6.5)).unwrap();
        let kinds: Vec<_> = pts.iter().map(|p| p.stability).collect();
        assert_eq!(kinds, vec![Center, Saddle, Center, Center]);
    }

    #[test]
    fn stationary_points_are_stationary_and_mirrored() {
        for (mu, eta) in [
            (1.0, 3.0),
            (2.0, 10.0),
            (5.0, 5.0),
            (5.0, 30.0),
            (8.0, 7.0),
            (0.5, 1.5),
        ] {
            let pts = find_stationary_points(&params(mu, eta)).unwrap();
            for p in &pts {
                let v = vector_field(p.point, &p.params).unwrap();
                assert!(v.max_norm() < 1e-10, "mu={mu} eta={eta} {p:?} {v:?}");
            }
            let asym: Vec<_> = pts.iter().filter(|p| !p.is_symmetric()).collect();
            let n = asym.len();
            assert_eq!(n % 2, 0);
            for k in 0..n / 2 {
                let (a, b) = (asym[k], asym[n - 1 - k]);
                assert!((a.point.z() + b.point.z()).abs() < 1e-11);
                assert_eq!(a.stability, b.stability);
            }
        }
    }

    #[test]
    fn diagram_cubic_is_supercritical_pitchfork() {
        let branches = bifurcation_diagram(1.0, (0.1, 4.0), 400).unwrap();
        let anti = &branches[1];
        assert_eq!(anti.label, BranchLabel::AntisymmetricThetaPi);
        for s in &anti.samples {
            let expected = if s.eta < 2.0 - 1e-9 {
                StabilityTag::Center
            } else if s.eta > 2.0 + 1e-9 {
                StabilityTag::Saddle
            } else {
                StabilityTag::Degenerate
            };
            assert_eq!(s.stability, expected, "eta={}", s.eta);
        }
        let asym = &branches[2..];
        assert_eq!(asym.len(), 2);
        for b in asym {
            assert_eq!(b.label, BranchLabel::AsymmetricStable);
            let (start, end) = b.eta_range().unwrap();
            assert!(start > 2.0 && start < 2.0 + 4.0 / 399.0 + 1e-12);
            assert_eq!(end, 4.0);
        }
        assert_eq!(asym[0].side() * asym[1].side(), -1.0);
    }

    #[test]
    fn diagram_mu5_has_saddle_node_and_inverse_pitchfork() {
        let branches = bifurcation_diagram(5.0, (3.0, 8.0), 500).unwrap();
        let asym = &branches[2..];
        assert_eq!(asym.len(), 4);
        let ep = eta_plus(5.0).unwrap().unwrap();
        let step = 5.0 / 499.0;
        let stable: Vec<_> = asym
            .iter()
            .filter(|b| b.label == BranchLabel::AsymmetricStable)
            .collect();
        let unstable: Vec<_> = asym
            .iter()
            .filter(|b| b.label == BranchLabel::AsymmetricUnstable)
            .collect();
        assert_eq!(stable.len(), 2);
        assert_eq!(unstable.len(), 2);
        for b in &stable {
            let (start, end) = b.eta_range().unwrap();
            assert!(start >= ep && start < ep + step + 1e-12);
            assert_eq!(end, 8.0);
        }
        for b in &unstable {
            let (start, end) = b.eta_range().unwrap();
            assert!(start >= ep && start < ep + step + 1e-12);
            assert!(end < 6.4 && end > 6.4 - step - 1e-12);
            // saddles collapse onto z = 0
            assert!(b.samples.last().unwrap().z.abs() < 0.05);
        }
    }

    #[test]
    fn diagram_below_fold_has_no_asymmetric_branch() {
        let branches = bifurcation_diagram(5.0, (0.1, 4.0), 200).unwrap();
        assert_eq!(branches.len(), 2);
        assert!(branches[1]
            .samples
            .iter()
            .all(|s| s.stability == StabilityTag::Center));
    }

    #[test]
    fn diagram_rejects_bad_ranges() {
        assert!(bifurcation_diagram(1.0, (0.0, 1.0), 10).is_err());
        assert!(bifurcation_diagram(1.0, (2.0, 1.0), 10).is_err());
        assert!(bifurcation_diagram(1.0, (0.5, 1.0), 1).is_err());
    }

    #[test]
    fn portrait_examples() {
        let p = phase_portrait(&params(5.0, 2.0), 32, 32).unwrap();
        assert!(p.separatrix_energies.is_empty());
        assert_eq!(p.fixed_points.len(), 2);
        assert_eq!(p.grid.len(), 32);
        assert_eq!(p.grid[0].len(), 32);
        assert_eq!(p.z_values[0], -1.0);
        assert_eq!(p.z_values[31], 1.0);
        assert!(p.theta_values.iter().all(|&t| (0.0..TAU).contains(&t)));

        let p = phase_portrait(&params(5.0, 5.0), 16, 16).unwrap();
        assert_eq!(p.separatrix_energies.len(), 2);
        assert!((p.separatrix_energies[0] - p.separatrix_energies[1]).abs() < 1e-12);

        let p = phase_portrait(&params(5.0, 6.5), 16, 16).unwrap();
        let saddles: Vec<_> = p
            .fixed_points
            .iter()
            .filter(|f| f.stability == StabilityTag::Saddle)
            .collect();
        assert_eq!(saddles.len(), 1);
        assert_eq!(saddles[0].point.z(), 0.0);
        assert_eq!(saddles[0].point.theta(), PI);

        assert!(phase_portrait(&params(5.0, 6.5), 8, 16).is_err());
    }
}
