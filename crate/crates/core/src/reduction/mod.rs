//! From a concrete symmetric double well to the dimer parameters.
//!
//! `H₀ = −(ħ²/2) d²/dx² + V(x)` is discretised on `[−L, L]` with Dirichlet
//! walls and the three-point stencil. Because `V` is even, the discrete
//! operator splits exactly into an even block (nodes `0..M`, with the
//! origin row rescaled by `√2` to stay symmetric) and an odd block (nodes
//! `1..M`, `ψ(0) = 0`). The ground doublet is the lowest eigenvalue of each
//! block, so `φ₊` and `φ₋` come out with exact parity and the near-degenerate
//! pair never has to be separated numerically.

mod potential;
mod tridiag;

use std::f64::consts::{PI, SQRT_2};

pub use potential::{PotentialFamily, PotentialSpec, SYMMETRY_TOL};
use tridiag::SymTridiag;

use crate::error::{DimerError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionOptions {
    /// Double the grid until `λ±` change by less than `rel_tol` relative.
    pub auto_refine: bool,
    pub rel_tol: f64,
    /// Largest admissible number of interior grid points.
    pub grid_cap: usize,
    /// Widen the box until `|φ±| < boundary_tol` on its outer tenth.
    pub auto_widen: bool,
    pub boundary_tol: f64,
    /// Minimum `(λ₂ − λ₋)/(λ₋ − λ₊)`.
    pub min_gap_ratio: f64,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            auto_refine: true,
            rel_tol: 1e-8,
            grid_cap: 1 << 18,
            auto_widen: true,
            boundary_tol: 1e-10,
            min_gap_ratio: 10.0,
        }
    }
}

impl ReductionOptions {
    /// Solve exactly on the grid and box given by the spec.
    pub fn fixed_grid() -> Self {
        ReductionOptions {
            auto_refine: false,
            auto_widen: false,
            ..Default::default()
        }
    }
}

/// Ground doublet of a double well and the derived two-mode quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub hbar: f64,
    pub half_width: f64,
    /// Grid spacing.
    pub dx: f64,
    /// Interior nodes, symmetric about (and including) `x = 0`.
    pub x: Vec<f64>,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Next eigenvalue above the doublet.
    pub lambda_2: f64,
    /// Splitting `(λ₋ − λ₊)/2`.
    pub omega: f64,
    /// Doublet centre `(λ₊ + λ₋)/2`.
    pub omega_mean: f64,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    /// `(φ₊ + φ₋)/√2`, localised in the right well.
    pub phi_r: Vec<f64>,
    /// `(φ₊ − φ₋)/√2`, localised in the left well.
    pub phi_l: Vec<f64>,
    /// `max_x |φ_R φ_L|`.
    pub overlap: f64,
    /// Beating period `2πħ/ω` in physical time units.
    pub beating_period: f64,
    /// Largest `|φ±|` on the outer tenth of the box.
    pub boundary_amplitude: f64,
}

impl ReductionResult {
    pub fn gap_ratio(&self) -> f64 {
        (self.lambda_2 - self.lambda_minus) / (self.lambda_minus - self.lambda_plus)
    }

    /// Trapezoid rule on the grid (the walls contribute zero).
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.dx * values.into_iter().sum::<f64>()
    }

    pub fn grid_points(&self) -> usize {
        self.x.len()
    }
}

/// Eigen-data of the two parity blocks on one grid.
struct BlockSolution {
    half_width: f64,
    dx: f64,
    /// Number of positive interior nodes `M`.
    m: usize,
    lambda_plus: f64,
    lambda_minus: f64,
    lambda_2: f64,
    even: SymTridiag,
    odd: SymTridiag,
}

impl BlockSolution {
    /// `φ₊` and `φ₋` on nodes `0..=M`, normalised over the whole line and
    /// gauged so that `φ₊(0) > 0` and `φ₋(x₁) > 0`.
    fn half_states(&self) -> (Vec<f64>, Vec<f64>) {
        let mut plus = self.even.eigenvector(self.lambda_plus);
        // even block: u_0 = ψ(0)/√2, u_j = ψ(x_j)
        plus[0] *= SQRT_2;
        let mut minus = vec![0.0; self.m + 1];
        minus[1..].copy_from_slice(&self.odd.eigenvector(self.lambda_minus));
        for (half, lead) in [(&mut plus, 0), (&mut minus, 1)] {
            normalize_half(half, self.dx);
            if half[lead] < 0.0 {
                half.iter_mut().for_each(|v| *v = -*v);
            }
        }
        (plus, minus)
    }
}

/// Scales a half-line function so its even or odd extension has unit
/// trapezoid norm.
fn normalize_half(half: &mut [f64], dx: f64) {
    let sum = half[0] * half[0] + 2.0 * half[1..].iter().map(|v| v * v).sum::<f64>();
    let norm = (dx * sum).sqrt();
    half.iter_mut().for_each(|v| *v /= norm);
}

fn solve_blocks(spec: &PotentialSpec, half_width: f64, m: usize) -> BlockSolution {
    let dx = half_width / (m + 1) as f64;
    let kin = spec.hbar * spec.hbar / (dx * dx);
    let off = -0.5 * kin;
    // nodes x_j = j·dx, j = 0..=M
    let v: Vec<f64> = (0..=m).map(|j| spec.family.value(j as f64 * dx)).collect();

    let even_diag: Vec<f64> = v.iter().map(|vj| kin + vj).collect();
    let mut even_off = vec![off; m];
    even_off[0] = SQRT_2 * off;
    let even = SymTridiag::new(even_diag, even_off);

    let odd_diag: Vec<f64> = v[1..].iter().map(|vj| kin + vj).collect();
    let odd = SymTridiag::new(odd_diag, vec![off; m - 1]);

    let lambda_plus = even.eigenvalue(0);
    let lambda_minus = odd.eigenvalue(0);
    let lambda_2 = even.eigenvalue(1).min(odd.eigenvalue(1));
    BlockSolution {
        half_width,
        dx,
        m,
        lambda_plus,
        lambda_minus,
        lambda_2,
        even,
        odd,
    }
}

/// The ground doublet on the half line `x_j = j·dx, j = 0..=M`.
struct Doublet {
    half_width: f64,
    dx: f64,
    m: usize,
    lambda_plus: f64,
    lambda_minus: f64,
    lambda_2: f64,
    half_plus: Vec<f64>,
    half_minus: Vec<f64>,
}

impl Doublet {
    fn from_grid(sol: &BlockSolution) -> Self {
        let (half_plus, half_minus) = sol.half_states();
        Doublet {
            half_width: sol.half_width,
            dx: sol.dx,
            m: sol.m,
            lambda_plus: sol.lambda_plus,
            lambda_minus: sol.lambda_minus,
            lambda_2: sol.lambda_2,
            half_plus,
            half_minus,
        }
    }

    /// Richardson combination of a grid and its halving, reported on the
    /// coarser grid (coarse node `j` is fine node `2j`).
    fn extrapolated(coarse: &BlockSolution, fine: &BlockSolution) -> Self {
        let (cp, cm) = coarse.half_states();
        let (fp, fm) = fine.half_states();
        let combine = |c: &[f64], f: &[f64]| -> Vec<f64> {
            let mut out: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(j, cj)| richardson(*cj, f[2 * j]))
                .collect();
            normalize_half(&mut out, coarse.dx);
            out
        };
        Doublet {
            half_width: coarse.half_width,
            dx: coarse.dx,
            m: coarse.m,
            lambda_plus: richardson(coarse.lambda_plus, fine.lambda_plus),
            lambda_minus: richardson(coarse.lambda_minus, fine.lambda_minus),
            lambda_2: richardson(coarse.lambda_2, fine.lambda_2),
            half_plus: combine(&cp, &fp),
            half_minus: combine(&cm, &fm),
        }
    }
}

/// Removes the `O(dx²)` term using the grid with twice the spacing.
fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn converged_doublet(
    spec: &PotentialSpec,
    half_width: f64,
    opts: &ReductionOptions,
) -> Result<Doublet> {
    let mut m = (spec.grid_points / 2).max(64);
    let refine = |m: usize| {
        // halve dx: M + 1 → 2(M + 1)
        let m = 2 * m + 1;
        if 2 * m + 1 > opts.grid_cap {
            Err(DimerError::GridCapExceeded { cap: opts.grid_cap })
        } else {
            Ok(m)
        }
    };
    if 2 * m + 1 > opts.grid_cap {
        return Err(DimerError::GridCapExceeded { cap: opts.grid_cap });
    }
    let mut coarse = solve_blocks(spec, half_width, m);
    if !opts.auto_refine {
        return Ok(Doublet::from_grid(&coarse));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= opts.rel_tol * b.abs().max(1e-300);
    let mut previous: Option<(f64, f64)> = None;
    loop {
        m = refine(m)?;
        let fine = solve_blocks(spec, half_width, m);
        let plus = richardson(coarse.lambda_plus, fine.lambda_plus);
        let minus = richardson(coarse.lambda_minus, fine.lambda_minus);
        if let Some((p, q)) = previous {
            if close(p, plus) && close(q, minus) {
                return Ok(Doublet::extrapolated(&coarse, &fine));
            }
        }
        previous = Some((plus, minus));
        coarse = fine;
    }
}

/// Largest positive `x` where `V(x) = energy`, searched outward from the
/// right-hand minimum.
fn outer_turning_point(spec: &PotentialSpec, energy: f64) -> Option<f64> {
    let x_min = spec.right_minimum();
    let mut step = spec.family.scale() / 64.0;
    let mut x = x_min;
    let cap = spec.family.extent().unwrap_or(1e6 * spec.family.scale());
    while spec.family.value(x + step) < energy {
        x += step;
        if x > cap {
            return None;
        }
        step *= 1.1;
    }
    crate::numerics::bisect(|y| spec.family.value(y) - energy, x, x + step, 1e-12, 200).ok()
}

fn initial_half_width(spec: &PotentialSpec) -> Result<f64> {
    if let Some(l) = spec.half_width {
        return Ok(l);
    }
    if let Some(ext) = spec.family.extent() {
        return Ok(ext);
    }
    let probe = solve_blocks(spec, spec.family.scale(), 255);
    let turning = outer_turning_point(spec, probe.lambda_minus).ok_or_else(|| {
        DimerError::InvalidPotential(format!(
            "no classical turning point at the doublet energy {}",
            probe.lambda_minus
        ))
    })?;
    Ok(3.0 * turning)
}

fn expand(solution: &Doublet) -> ReductionResult {
    let m = solution.m;
    let dx = solution.dx;
    let n = 2 * m + 1;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 - m as f64) * dx).collect();
    let mirror = |half: &[f64], parity: f64| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if i >= m {
                    half[i - m]
                } else {
                    parity * half[m - i]
                }
            })
            .collect()
    };
    let phi_plus = mirror(&solution.half_plus, 1.0);
    let phi_minus = mirror(&solution.half_minus, -1.0);
    let phi_r: Vec<f64> = phi_plus
        .iter()
        .zip(&phi_minus)
        .map(|(p, q)| (p + q) / SQRT_2)
        .collect();
    let phi_l: Vec<f64> = phi_plus
        .iter()
        .zip(&phi_minus)
        .map(|(p, q)| (p - q) / SQRT_2)
        .collect();
    let overlap = phi_r
        .iter()
        .zip(&phi_l)
        .map(|(r, l)| (r * l).abs())
        .fold(0.0, f64::max);
    let edge = 0.9 * solution.half_width;
    let boundary_amplitude = x
        .iter()
        .enumerate()
        .filter(|(_, xi)| xi.abs() >= edge)
        .map(|(i, _)| phi_plus[i].abs().max(phi_minus[i].abs()))
        .fold(0.0, f64::max);

    let omega = 0.5 * (solution.lambda_minus - solution.lambda_plus);
    ReductionResult {
        hbar: f64::NAN,
        half_width: solution.half_width,
        dx,
        x,
        lambda_plus: solution.lambda_plus,
        lambda_minus: solution.lambda_minus,
        lambda_2: solution.lambda_2,
        omega,
        omega_mean: 0.5 * (solution.lambda_minus + solution.lambda_plus),
        phi_plus,
        phi_minus,
        phi_r,
        phi_l,
        overlap,
        beating_period: f64::NAN,
        boundary_amplitude,
    }
}

const MAX_WIDENINGS: usize = 24;
const WIDEN_FACTOR: f64 = 1.25;

/// Computes the ground doublet, splitting and single-well states.
///
/// The grid is refined and the box widened according to `opts`; see
/// [`ReductionOptions`].
pub fn solve_doublet(spec: &PotentialSpec, opts: &ReductionOptions) -> Result<ReductionResult> {
    spec.validate()?;
    let mut half_width = initial_half_width(spec)?;
    let widen = opts.auto_widen && spec.family.extent().is_none();
    let mut widenings = 0;
    let mut result = loop {
        let doublet = converged_doublet(spec, half_width, opts)?;
        let result = expand(&doublet);
        if !widen || result.boundary_amplitude < opts.boundary_tol {
            break result;
        }
        widenings += 1;
        if widenings > MAX_WIDENINGS {
            return Err(DimerError::ConvergenceFailure {
                what: "box widening",
                iterations: MAX_WIDENINGS,
            });
        }
        half_width *= WIDEN_FACTOR;
    };
    result.hbar = spec.hbar;
    result.beating_period = 2.0 * PI * spec.hbar / result.omega;
    if !(result.omega > 0.0) {
        return Err(DimerError::NoDoubletGap { ratio: f64::NAN });
    }
    if !spec.validation_mode {
        let ratio = result.gap_ratio();
        if !(ratio >= opts.min_gap_ratio) {
            return Err(DimerError::NoDoubletGap { ratio });
        }
    }
    Ok(result)
}

/// Nonlinear constant `c = ∫ |φ_R|^(2μ+2) dx`, checked against the `φ_L`
/// value.
pub fn compute_c(result: &ReductionResult, mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(DimerError::param("mu", mu, "must be finite and >= 0"));
    }
    let p = 2.0 * mu + 2.0;
    let c_r = result.integrate(result.phi_r.iter().map(|v| v.abs().powf(p)));
    let c_l = result.integrate(result.phi_l.iter().map(|v| v.abs().powf(p)));
    if (c_r - c_l).abs() > 1e-8 * c_r.abs() {
        return Err(DimerError::SymmetryViolation {
            what: "nonlinear constant",
            detail: format!("c(phi_R) = {c_r} but c(phi_L) = {c_l}"),
        });
    }
    Ok(c_r)
}

/// Two-level approximation error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerms {
    /// `max_x |φ_R φ_L|`.
    pub overlap: f64,
    /// `⟨φ_R, |φ_L|^(2μ) φ_L⟩`.
    pub cross: f64,
}

pub fn cross_terms(result: &ReductionResult, mu: f64) -> Result<CrossTerms> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(DimerError::param("mu", mu, "must be finite and >= 0"));
    }
    let cross = result.integrate(
        result
            .phi_r
            .iter()
            .zip(&result.phi_l)
            .map(|(r, l)| r * l.abs().powf(2.0 * mu) * l),
    );
    Ok(CrossTerms {
        overlap: result.overlap,
        cross,
    })
}

/// `η = c ε / ω`.
pub fn map_epsilon_to_eta(result: &ReductionResult, c: f64, epsilon: f64) -> f64 {
    c * epsilon / result.omega
}

/// `ε = η ω / c`.
pub fn epsilon_of_eta(result: &ReductionResult, c: f64, eta: f64) -> f64 {
    eta * result.omega / c
}
