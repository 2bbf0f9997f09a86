//! Minimal hand-written SVG plots: polylines on a box and marching-squares
//! contours.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

/// Axis-aligned data-to-pixel map.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Frame {
            x: widen(x),
            y: widen(y),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str, frame: &Frame, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="30" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = frame.x.0 + t * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + t * (frame.y.1 - frame.y.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            frame.px(xv),
            HEIGHT - MARGIN + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            frame.py(yv) + 4.0,
            tick(yv)
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Line plot of several series on shared axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let mut x = bounds(all().map(|p| p.0));
    let mut y = bounds(all().map(|p| p.1));
    if !x.0.is_finite() {
        x = (0.0, 1.0);
        y = (0.0, 1.0);
    }
    let frame = Frame::new(x, y);
    let mut out = String::new();
    header(&mut out, title, &frame, x_label, y_label);
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, (px, py)) in s.points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if k == 0 { "M" } else { " L" },
                frame.px(*px),
                frame.py(*py)
            );
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            s.color
        );
    }
    out.push_str("</svg>\n");
    out
}

/// A level set to draw.
pub struct Level {
    pub value: f64,
    pub color: &'static str,
    pub width: f64,
}

/// Line segments of the level set `f = level` on a rectangular lattice.
///
/// `f[i][j]` is sampled at `(xs[j], ys[i])`. Ambiguous saddle cells are
/// resolved with the cell-centre average.
pub fn marching_squares(
    xs: &[f64],
    ys: &[f64],
    f: &[Vec<f64>],
    level: f64,
) -> Vec<[(f64, f64); 2]> {
    let mut segments = Vec::new();
    for i in 0..ys.len().saturating_sub(1) {
        for j in 0..xs.len().saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let c = [
                (xs[j], ys[i], f[i][j]),
                (xs[j + 1], ys[i], f[i][j + 1]),
                (xs[j + 1], ys[i + 1], f[i + 1][j + 1]),
                (xs[j], ys[i + 1], f[i + 1][j]),
            ];
            if c.iter().any(|k| !k.2.is_finite()) {
                continue;
            }
            let above: Vec<bool> = c.iter().map(|k| k.2 >= level).collect();
            let edge_point = |a: usize, b: usize| {
                let (xa, ya, fa) = c[a];
                let (xb, yb, fb) = c[b];
                let t = if fb != fa {
                    (level - fa) / (fb - fa)
                } else {
                    0.5
                };
                (xa + t * (xb - xa), ya + t * (yb - ya))
            };
            let crossed: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
            match crossed.len() {
                2 => segments.push([
                    edge_point(crossed[0], (crossed[0] + 1) % 4),
                    edge_point(crossed[1], (crossed[1] + 1) % 4),
                ]),
                4 => {
                    let centre = c.iter().map(|k| k.2).sum::<f64>() / 4.0;
                    let p: Vec<(f64, f64)> = (0..4).map(|e| edge_point(e, (e + 1) % 4)).collect();
                    // join the edges around the corners that differ from the centre
                    if (centre >= level) == above[0] {
                        segments.push([p[0], p[1]]);
                        segments.push([p[2], p[3]]);
                    } else {
                        segments.push([p[3], p[0]]);
                        segments.push([p[1], p[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

/// Contour plot of `f[i][j]` over `(xs[j], ys[i])` with markers.
#[allow(clippy::too_many_arguments)]
pub fn contour_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    f: &[Vec<f64>],
    levels: &[Level],
    markers: &[(f64, f64, &'static str)],
) -> String {
    let frame = Frame::new(bounds(xs.iter().copied()), bounds(ys.iter().copied()));
    let mut out = String::new();
    header(&mut out, title, &frame, x_label, y_label);
    for level in levels {
        let segments = marching_squares(xs, ys, f, level.value);
        if segments.is_empty() {
            continue;
        }
        let mut d = String::new();
        for [a, b] in segments {
            let _ = write!(
                d,
                "M{:.2},{:.2} L{:.2},{:.2} ",
                frame.px(a.0),
                frame.py(a.1),
                frame.px(b.0),
                frame.py(b.1)
            );
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            d.trim_end(),
            level.color,
            level.width
        );
    }
    for (x, y, color) in markers {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}" stroke="black"/>"#,
            frame.px(*x),
            frame.py(*y)
        );
    }
    out.push_str("</svg>\n");
    out
}
