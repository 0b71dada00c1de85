//! Minimal deterministic SVG rendering of `omega_hat(t)/t`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rips::ScaleProfile;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLine {
    pub value: f64,
    pub label: String,
}

impl ReferenceLine {
    pub fn new(value: f64, label: impl Into<String>) -> Self {
        ReferenceLine {
            value,
            label: label.into(),
        }
    }
}

/// The two constants every profile plot carries: the hyperbolicity threshold
/// and the Euclidean extremal ratio.
pub fn default_reference_lines(threshold: f64) -> Vec<ReferenceLine> {
    vec![
        ReferenceLine::new(threshold, format!("threshold {threshold:.5}")),
        ReferenceLine::new(crate::euclid::ETA0, "eta0 0.15014"),
    ]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn plot_profile(profile: &ScaleProfile, refs: &[ReferenceLine]) -> Result<String> {
    let pts: Vec<(f64, f64)> = profile
        .buckets
        .iter()
        .filter(|b| b.t > 0.0)
        .map(|b| (b.t, b.omega_hat / b.t))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let t_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let y_max = pts
        .iter()
        .map(|p| p.1)
        .chain(refs.iter().map(|r| r.value))
        .fold(0.0, f64::max)
        * 1.1;
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let sx = |t: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * t / t_max;
    let sy = |y: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * y / y_max;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{:.2} {:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        MARGIN,
        MARGIN,
        HEIGHT - MARGIN,
        WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">t (max {:.3})</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        t_max
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" font-size="12" transform="rotate(-90 15 {:.2})" text-anchor="middle">omega_hat(t)/t (max {:.4})</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_max
    );
    for r in refs {
        let y = sy(r.value);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            MARGIN,
            WIDTH - MARGIN
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="gray" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN,
            y - 3.0,
            escape(&r.label)
        );
    }
    let mut path = String::new();
    for (i, &(t, y)) in pts.iter().enumerate() {
        let _ = write!(
            path,
            "{}{:.2} {:.2}",
            if i == 0 { "M" } else { " L" },
            sx(t),
            sy(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="2"/>"#
    );
    out.push_str("</svg>\n");
    Ok(out)
}
