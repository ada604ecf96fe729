//! Minimal deterministic SVG scatter/line plots for the report directory.
//!
//! The renderer formats every coordinate with fixed precision, so identical
//! input points always produce identical bytes — the plots participate in
//! the byte-reproducibility contract of the experiment runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Plot style: QQ scatter with the identity reference line, or a trend
/// polyline through points ordered by their x coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvgKind {
    Qq,
    Trend,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn from_points(points: &[(f64, f64)]) -> Frame {
        let mut x_lo = f64::INFINITY;
        let mut x_hi = f64::NEG_INFINITY;
        let mut y_lo = f64::INFINITY;
        let mut y_hi = f64::NEG_INFINITY;
        for (x, y) in points {
            x_lo = x_lo.min(*x);
            x_hi = x_hi.max(*x);
            y_lo = y_lo.min(*y);
            y_hi = y_hi.max(*y);
        }
        // Pad 5% each side; give degenerate ranges unit width.
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = *hi - *lo;
            if span <= 0.0 {
                *lo -= 0.5;
                *hi += 0.5;
            } else {
                *lo -= 0.05 * span;
                *hi += 0.05 * span;
            }
        };
        pad(&mut x_lo, &mut x_hi);
        pad(&mut y_lo, &mut y_hi);
        Frame { x_lo, x_hi, y_lo, y_hi }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && (a >= 1e4 || a < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Render points to a standalone SVG file.
///
/// Errors on empty input (no file is written) and surfaces I/O failures.
pub fn render_svg(points: &[(f64, f64)], kind: SvgKind, path: &Path) -> Result<()> {
    let svg = render_svg_string(points, kind)?;
    fs::write(path, svg)?;
    Ok(())
}

/// The SVG document as a string; the file writer is a thin wrapper.
pub fn render_svg_string(points: &[(f64, f64)], kind: SvgKind) -> Result<String> {
    if points.is_empty() {
        return Err(Error::config("cannot plot an empty point set"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::domain("render_svg", "non-finite plot point"));
    }
    let frame = Frame::from_points(points);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>"
    );

    // Five ticks per axis with labels.
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = frame.x_lo + f * (frame.x_hi - frame.x_lo);
        let xp = frame.px(xv);
        let _ = writeln!(
            s,
            "<line x1=\"{xp:.2}\" y1=\"{y0:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{xp:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            y0 + 20.0,
            fmt_tick(xv)
        );
        let yv = frame.y_lo + f * (frame.y_hi - frame.y_lo);
        let yp = frame.py(yv);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{x0:.2}\" y2=\"{yp:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            x0 - 8.0,
            yp + 4.0,
            fmt_tick(yv)
        );
    }

    match kind {
        SvgKind::Qq => {
            // Identity reference over the shared data range.
            let lo = frame.x_lo.max(frame.y_lo);
            let hi = frame.x_hi.min(frame.y_hi);
            if hi > lo {
                let _ = writeln!(
                    s,
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                     stroke=\"#c00000\" stroke-dasharray=\"6 3\"/>",
                    frame.px(lo),
                    frame.py(lo),
                    frame.px(hi),
                    frame.py(hi)
                );
            }
        }
        SvgKind::Trend => {
            let mut ordered: Vec<(f64, f64)> = points.to_vec();
            ordered.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut d = String::new();
            for (i, (x, y)) in ordered.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.2} {:.2} ", frame.px(*x), frame.py(*y));
            }
            let _ = writeln!(
                s,
                "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>",
                d.trim_end()
            );
        }
    }

    for (x, y) in points {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f77b4\" \
             fill-opacity=\"0.7\"/>",
            frame.px(*x),
            frame.py(*y)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_bytes_and_reference_line() {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = -2.0 + 4.0 * i as f64 / 19.0;
                (x, x)
            })
            .collect();
        let a = render_svg_string(&pts, SvgKind::Qq).unwrap();
        let b = render_svg_string(&pts, SvgKind::Qq).unwrap();
        assert_eq!(a, b, "identical input must give identical bytes");
        assert!(a.contains("stroke-dasharray"), "QQ plot carries a reference line");
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));

        // On identity input, the first point must sit on the reference
        // line's start: both map to the same pixel.
        let frame_x = a
            .match_indices("<circle")
            .count();
        assert_eq!(frame_x, 20);
    }

    #[test]
    fn trend_draws_a_path() {
        let pts = [(16.0, 0.9), (256.0, 0.4), (4096.0, 0.2)];
        let svg = render_svg_string(&pts, SvgKind::Trend).unwrap();
        assert!(svg.contains("<path d=\"M"));
        assert_eq!(svg.match_indices("<circle").count(), 3);
    }

    #[test]
    fn empty_and_degenerate_inputs() {
        assert!(render_svg_string(&[], SvgKind::Qq).is_err());
        assert!(render_svg_string(&[(0.0, f64::NAN)], SvgKind::Qq).is_err());
        // A single point has zero range; padding must keep the frame valid.
        let svg = render_svg_string(&[(1.0, 1.0)], SvgKind::Trend).unwrap();
        assert!(svg.contains("<circle"));
    }

    #[test]
    fn error_leaves_no_file() {
        let path = std::env::temp_dir().join("bvmlab-empty-test.svg");
        let _ = std::fs::remove_file(&path);
        assert!(render_svg(&[], SvgKind::Qq, &path).is_err());
        assert!(!path.exists(), "failed render must not create the file");
    }
}
