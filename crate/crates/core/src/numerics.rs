//! Scalar root bracketing and one-dimensional minimisation.
//!
//! Everything here is derivative-free. Roots are refined by bisection and
//! minima by golden-section search, both of which converge unconditionally
//! once a valid bracket is known.

use crate::error::{DimerError, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}

/// Bisection on a bracket with `f(a)` and `f(b)` of opposite sign (or one of
/// them zero).
///
/// Iterates until the bracket is narrower than `xtol` or cannot be split any
/// further in floating point.
pub fn bisect<F>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(DimerError::Domain {
            what: "bisect",
            detail: format!("no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"),
        });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid.clamp(lo, hi));
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(DimerError::ConvergenceFailure {
        what: "bisection",
        iterations: max_iter,
    })
}

/// Result of a golden-section search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket width drops below `xtol`; fails if that does not
/// happen within `max_iter` contractions.
pub fn golden_section_min<F>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<Minimum>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for iter in 0..max_iter {
        if hi - lo <= xtol {
            let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            return Ok(Minimum {
                x,
                value,
                iterations: iter,
            });
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    Err(DimerError::ConvergenceFailure {
        what: "golden-section search",
        iterations: max_iter,
    })
}

/// Brackets every root of `f` on a sampled grid.
///
/// Adjacent samples of opposite sign yield one bracket each. Where three
/// consecutive samples share a sign but the middle one is an extremum
/// pointing towards zero, the extremum is located by golden-section search;
/// if it crosses zero the cell contributes two brackets. This catches pairs
/// of roots that are closer together than the grid spacing, which is what
/// happens right after a fold.
pub fn bracket_roots<F>(f: F, grid: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut brackets = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            brackets.push((grid[i], grid[i]));
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            brackets.push((grid[i], grid[i + 1]));
            continue;
        }
        if i == 0 {
            continue;
        }
        let fp = values[i - 1];
        let same_sign = fp.signum() == fa.signum() && fb.signum() == fa.signum();
        // Only extrema that approach zero can hide a root pair.
        let towards_zero = if fa > 0.0 {
            fa <= fp && fa <= fb
        } else {
            fa >= fp && fa >= fb
        };
        if !(same_sign && towards_zero) {
            continue;
        }
        let sign = fa.signum();
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let Ok(m) = golden_section_min(|x| sign * f(x), lo, hi, 1e-15 * (1.0 + hi.abs()), 200)
        else {
            continue;
        };
        if m.value < 0.0 {
            let (left, right) = if m.x < grid[i] {
                ((lo, m.x), (m.x, grid[i]))
            } else {
                ((grid[i], m.x), (m.x, hi))
            };
            // Ignore if the neighbouring cells already produced a sign change
            // on the same side; with same-sign samples that cannot happen.
            brackets.push(left);
            brackets.push(right);
        }
    }
    brackets
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 0.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 4e-16);
    }

    #[test]
    fn bisect_rejects_missing_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100),
            Err(DimerError::Domain { .. })
        ));
    }

    #[test]
    fn golden_section_quadratic() {
        let m = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn golden_section_reports_budget_exhaustion() {
        assert!(matches!(
            golden_section_min(|x| x * x, -1.0, 1.0, 1e-12, 5),
            Err(DimerError::ConvergenceFailure { .. })
        ));
    }

    #[test]
    fn close_root_pair_inside_one_cell_is_found() {
        // roots at 0.5 ± 1e-4, grid spacing 0.01
        let f = |x: f64| (x - 0.5).powi(2) - 1e-8;
        let grid = linspace(0.0, 1.0, 101);
        let grid: Vec<f64> = grid.iter().map(|x| x + 0.003).collect();
        let br = bracket_roots(f, &grid);
        assert_eq!(br.len(), 2);
        let roots: Vec<f64> = br
            .iter()
            .map(|&(a, b)| bisect(f, a, b, 0.0, 200).unwrap())
            .collect();
        assert!((roots[0] - (0.5 - 1e-4)).abs() < 1e-12);
        assert!((roots[1] - (0.5 + 1e-4)).abs() < 1e-12);
    }

    #[test]
    fn simple_sign_changes() {
        let grid = linspace(-4.0, 4.0, 601);
        let br = bracket_roots(|x: f64| x.sin(), &grid);
        assert_eq!(br.len(), 3);
        for (&(a, b), root) in br.iter().zip([-PI, 0.0, PI]) {
            assert!(a <= root && root <= b);
        }
    }
}
