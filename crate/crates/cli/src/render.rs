//! Deterministic SVG of particles and their spanning-tree edges.

use std::fmt::Write;

use ccshape_core::analysis::{euclidean_mst, EdgeTierLadder};
use ccshape_core::{rms_length, MassConfiguration};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;
const LEGEND_ROW: f64 = 18.0;
const BACKGROUND: &str = "#101014";
const PARTICLE: &str = "#e8e8f0";
const PLAIN_EDGE: &str = "#8c8c99";

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub tiers: bool,
    pub gap: f64,
    pub point_radius: f64,
}

/// Tier `k` of `count` on a red, orange, yellow ramp.
pub fn tier_color(k: usize, count: usize) -> String {
    let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
    // Hue 0 to 60 degrees at full saturation: red stays 255, green climbs.
    let green = (255.0 * t).round() as u8;
    format!("#ff{green:02x}00")
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// SVG text for `config`; only the first two coordinates are drawn.
pub fn render_svg(config: &MassConfiguration, options: &RenderOptions) -> String {
    let pts: Vec<(f64, f64)> = config.points().map(|p| (p[0], p[1])).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let map = |(x, y): (f64, f64)| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale);

    let mst = euclidean_mst(config);
    let unit = rms_length(config);
    let lengths: Vec<f64> = mst.lengths().iter().map(|l| l / unit).collect();
    let ladder = EdgeTierLadder::from_lengths(&lengths, options.gap);
    let tier_of = ladder.tier_of();
    let count = ladder.tiers.len();
    let color = |k: usize| if options.tiers { tier_color(k, count) } else { PLAIN_EDGE.to_string() };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        SIZE
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{0}" height="{0}" fill="{BACKGROUND}"/>"#, SIZE);
    let _ = writeln!(svg, r#"<g id="edges" stroke-width="1.5" stroke-linecap="round">"#);
    for (e, k) in mst.edges.iter().zip(&tier_of) {
        let (ax, ay) = map(pts[e.i]);
        let (bx, by) = map(pts[e.j]);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" data-tier="{}"/>"#,
            fmt(ax),
            fmt(ay),
            fmt(bx),
            fmt(by),
            color(*k),
            k + 1
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g id="particles" fill="{PARTICLE}">"#);
    for &p in &pts {
        let (x, y) = map(p);
        let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="{}"/>"#, fmt(x), fmt(y), fmt(options.point_radius));
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="legend" font-family="monospace" font-size="12" fill="{PARTICLE}">"#);
    let entries: Vec<(String, String)> = if options.tiers {
        ladder
            .tiers
            .iter()
            .enumerate()
            .map(|(k, t)| {
                (
                    tier_color(k, count),
                    format!("tier {}: mean {:.4} l_rms, {} edges", k + 1, t.mean, t.lengths.len()),
                )
            })
            .collect()
    } else {
        let mean = lengths.iter().sum::<f64>() / lengths.len().max(1) as f64;
        vec![(PLAIN_EDGE.to_string(), format!("MST edges: mean {mean:.4} l_rms"))]
    };
    for (row, (swatch, label)) in entries.iter().enumerate() {
        let y = 10.0 + row as f64 * LEGEND_ROW;
        let _ = writeln!(
            svg,
            r#"<rect x="10" y="{}" width="12" height="12" fill="{swatch}"/>"#,
            fmt(y)
        );
        let _ = writeln!(svg, r#"<text x="28" y="{}">{label}</text>"#, fmt(y + 10.0));
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
