use std::path::Path;

use crate::error::{DimerError, Result};
use crate::numerics::linspace;

/// Mirror-symmetry tolerance for tabulated and analytic potentials.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFamily {
    /// `V = a (x² − b²)²`.
    Quartic { a: f64, b: f64 },
    /// `V = −A [exp(−(x−x₀)²/s²) + exp(−(x+x₀)²/s²)]`.
    GaussianWells { depth: f64, center: f64, width: f64 },
    /// Sampled `(x, V)` pairs, symmetric about `x = 0`, linearly
    /// interpolated.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
    /// `V = ω² x² / 2`. A single well, accepted only in validation mode.
    Harmonic { omega: f64 },
}

impl PotentialFamily {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            PotentialFamily::Quartic { a, b } => {
                let s = x * x - b * b;
                a * s * s
            }
            PotentialFamily::GaussianWells {
                depth,
                center,
                width,
            } => {
                let l = (x - center) / width;
                let r = (x + center) / width;
                -depth * ((-l * l).exp() + (-r * r).exp())
            }
            PotentialFamily::Tabulated { x: xs, v } => interpolate(xs, v, x.abs()),
            PotentialFamily::Harmonic { omega } => 0.5 * omega * omega * x * x,
        }
    }

    /// Largest `|x|` at which the potential is defined, if bounded.
    pub fn extent(&self) -> Option<f64> {
        match self {
            PotentialFamily::Tabulated { x, .. } => x.last().copied(),
            _ => None,
        }
    }

    /// Length scale used for the initial box and the shape checks.
    pub(crate) fn scale(&self) -> f64 {
        match self {
            PotentialFamily::Quartic { b, .. } => 2.5 * b,
            PotentialFamily::GaussianWells { center, width, .. } => center + 4.0 * width,
            PotentialFamily::Tabulated { x, .. } => *x.last().expect("validated table"),
            PotentialFamily::Harmonic { omega } => 6.0 / omega.sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(DimerError::InvalidPotential(format!(
                    "{name} = {v} must be finite and > 0"
                )))
            }
        };
        match self {
            PotentialFamily::Quartic { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            PotentialFamily::GaussianWells {
                depth,
                center,
                width,
            } => {
                positive("depth", *depth)?;
                positive("center", *center)?;
                positive("width", *width)
            }
            PotentialFamily::Harmonic { omega } => positive("omega", *omega),
            PotentialFamily::Tabulated { x, v } => {
                if x.len() < 3 || x.len() != v.len() {
                    return Err(DimerError::InvalidPotential(
                        "table needs at least three (x, V) rows".into(),
                    ));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) || x[0] != 0.0 {
                    return Err(DimerError::InvalidPotential(
                        "internal table must be ascending from x = 0".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Parses a two-column `x V` table with `#` comments.
    ///
    /// Rows must come in mirror pairs `x ↔ −x` (within 1e-12); the paired
    /// values are averaged and must agree to 1e-12 relative.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let cols: Vec<&str> = content
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(DimerError::InvalidPotential(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        DimerError::InvalidPotential(format!(
                            "line {}: bad number `{s}`",
                            lineno + 1
                        ))
                    })
            };
            rows.push((parse(cols[0])?, parse(cols[1])?));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = rows.len();
        if n < 5 {
            return Err(DimerError::InvalidPotential(
                "table needs at least five rows".into(),
            ));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for i in (n / 2)..n {
            let (xp, vp) = rows[i];
            let (xm, vm) = rows[n - 1 - i];
            if (xp + xm).abs() > SYMMETRY_TOL * xp.abs().max(1.0) {
                return Err(DimerError::SymmetryViolation {
                    what: "potential table",
                    detail: format!("abscissae {xm} and {xp} are not mirror images"),
                });
            }
            if (vp - vm).abs() > SYMMETRY_TOL * vp.abs().max(vm.abs()).max(1.0) {
                return Err(DimerError::SymmetryViolation {
                    what: "potential table",
                    detail: format!("V({xm}) = {vm} but V({xp}) = {vp}"),
                });
            }
            xs.push(0.5 * (xp - xm));
            vs.push(0.5 * (vp + vm));
        }
        if n.is_multiple_of(2) {
            // no sample at the origin; an even potential is flat there
            xs.insert(0, 0.0);
            vs.insert(0, vs[0]);
        } else {
            xs[0] = 0.0;
        }
        let fam = PotentialFamily::Tabulated { x: xs, v: vs };
        fam.validate()?;
        Ok(fam)
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            DimerError::InvalidPotential(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse_table(&text)
    }
}

fn interpolate(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x >= xs[last] {
        return vs[last];
    }
    let i = xs.partition_point(|&xi| xi <= x).saturating_sub(1);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    vs[i] + t * (vs[i + 1] - vs[i])
}

/// A 1D double well `V(x) = V(−x)` with `m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub hbar: f64,
    /// Initial half-width `L` of the box `[−L, L]`; chosen from the
    /// doublet's turning point when `None`.
    pub half_width: Option<f64>,
    /// Initial number of interior grid points (at least 128).
    pub grid_points: usize,
    /// Skips the double-well shape and doublet-gap checks (for single-well
    /// solver validation).
    pub validation_mode: bool,
}

impl PotentialSpec {
    pub fn new(family: PotentialFamily, hbar: f64) -> Self {
        PotentialSpec {
            family,
            hbar,
            half_width: None,
            grid_points: 1023,
            validation_mode: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(DimerError::param(
                "hbar",
                self.hbar,
                "must be finite and > 0",
            ));
        }
        if self.grid_points < 128 {
            return Err(DimerError::param(
                "grid_points",
                self.grid_points as f64,
                "need at least 128 grid points",
            ));
        }
        if let Some(l) = self.half_width {
            if !(l.is_finite() && l > 0.0) {
                return Err(DimerError::param("half_width", l, "must be finite and > 0"));
            }
            if let Some(ext) = self.family.extent() {
                if l > ext * (1.0 + 1e-12) {
                    return Err(DimerError::param(
                        "half_width",
                        l,
                        "exceeds the extent of the tabulated potential",
                    ));
                }
            }
        }
        let scale = self.half_width.unwrap_or_else(|| self.family.scale());
        let samples = linspace(-scale, scale, 4001);
        for &x in &samples {
            let (vp, vm) = (self.family.value(x), self.family.value(-x));
            if (vp - vm).abs() > SYMMETRY_TOL * vp.abs().max(1.0) {
                return Err(DimerError::SymmetryViolation {
                    what: "potential",
                    detail: format!("V({x}) = {vp} but V({}) = {vm}", -x),
                });
            }
        }
        if !self.validation_mode {
            let v: Vec<f64> = samples.iter().map(|&x| self.family.value(x)).collect();
            let minima: Vec<usize> = (1..v.len() - 1)
                .filter(|&i| v[i] < v[i - 1] && v[i] <= v[i + 1])
                .collect();
            let v0 = self.family.value(0.0);
            let ok = minima.len() == 2
                && (samples[minima[0]] + samples[minima[1]]).abs() < 1e-9 * scale
                && v[minima[1]] < v0;
            if !ok {
                return Err(DimerError::InvalidPotential(format!(
                    "expected exactly two symmetric minima below V(0); found {} local minima",
                    minima.len()
                )));
            }
        }
        Ok(())
    }

    /// Position of the right-hand minimum (or 0 for a single well).
    pub(crate) fn right_minimum(&self) -> f64 {
        let scale = self.half_width.unwrap_or_else(|| self.family.scale());
        let xs = linspace(0.0, scale, 4001);
        xs.iter()
            .copied()
            .min_by(|a, b| self.family.value(*a).total_cmp(&self.family.value(*b)))
            .unwrap_or(0.0)
    }
}
