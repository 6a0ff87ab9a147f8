//! Minimal SVG overlay of an estimated trace against its reference.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::{align_traces, EnfTrace};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

/// Renders both traces over their common time span as SVG polylines.
pub fn overlay_svg(estimate: &EnfTrace, truth: &EnfTrace, title: &str) -> Result<String> {
    let (est, gt) = align_traces(estimate, truth)?;
    let (t0, t1) = (est.t0(), est.end());
    let (mut lo, mut hi) = est
        .values()
        .iter()
        .chain(gt.values())
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-6 {
        lo -= 0.005;
        hi += 0.005;
    }
    let span_t = (t1 - t0).max(f64::MIN_POSITIVE);
    let x = |t: f64| MARGIN + (t - t0) / span_t * (WIDTH - 2.0 * MARGIN);
    let y = |f: f64| HEIGHT - MARGIN - (f - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    let points = |tr: &EnfTrace| {
        tr.times()
            .zip(tr.values())
            .map(|(t, f)| format!("{:.2},{:.2}", x(t), y(*f)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    let w = &mut svg;
    // Writing into a String cannot fail.
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        w,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (label, v) in [(format!("{hi:.4}"), hi), (format!("{lo:.4}"), lo)] {
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            MARGIN - 4.0,
            y(v) + 4.0
        );
    }
    for (label, t) in [(format!("{t0:.0} s"), t0), (format!("{t1:.0} s"), t1)] {
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            x(t),
            HEIGHT - MARGIN + 16.0
        );
    }
    let _ = writeln!(
        w,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
        points(&gt)
    );
    let _ = writeln!(
        w,
        r#"<polyline fill="none" stroke="crimson" stroke-width="1.5" stroke-dasharray="5,3" points="{}"/>"#,
        points(&est)
    );
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">reference (solid), estimate (dashed)</text>"#,
        MARGIN,
        HEIGHT - 16.0
    );
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// The aligned samples behind the figure, as `t_s,estimate_hz,reference_hz`.
pub fn overlay_csv(estimate: &EnfTrace, truth: &EnfTrace) -> Result<String> {
    let (est, gt) = align_traces(estimate, truth)?;
    let mut out = String::from("t_s,estimate_hz,reference_hz\n");
    for ((t, e), g) in est.times().zip(est.values()).zip(gt.values()) {
        let _ = writeln!(out, "{t:.9},{e},{g}");
    }
    Ok(out)
}

/// Writes the SVG figure and, next to it, the CSV with the same stem.
pub fn write_overlay(estimate: &EnfTrace, truth: &EnfTrace, title: &str, svg_path: impl AsRef<Path>) -> Result<()> {
    let svg_path = svg_path.as_ref();
    let csv_path = svg_path.with_extension("csv");
    std::fs::write(svg_path, overlay_svg(estimate, truth, title)?).map_err(|e| Error::io(svg_path, e))?;
    std::fs::write(&csv_path, overlay_csv(estimate, truth)?).map_err(|e| Error::io(&csv_path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_has_two_polylines_over_the_common_span() {
        let a = EnfTrace::new(8.0, 1.0, vec![50.0, 50.01, 50.02, 50.01]).unwrap();
        let b = EnfTrace::new(9.0, 1.0, vec![50.0, 50.02, 50.0, 49.99, 50.0]).unwrap();
        let svg = overlay_svg(&a, &b, "a < b").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        let csv = overlay_csv(&a, &b).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("9.000000000,50.01,50"));
    }

    #[test]
    fn flat_traces_still_render() {
        let a = EnfTrace::new(0.0, 1.0, vec![50.0; 5]).unwrap();
        assert!(overlay_svg(&a, &a, "flat").unwrap().contains("polyline"));
    }
}
