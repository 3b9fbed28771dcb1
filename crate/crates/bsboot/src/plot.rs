//! Static SVG rendering of a Gaussian kernel density estimate.

use std::fmt::Write as _;

use crate::summary::quantile_sorted;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const POINTS: usize = 256;

/// `(x, density)` pairs of a Gaussian KDE with Silverman's bandwidth.
pub fn kde(values: &[f64], points: usize) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let sd = (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let bw = if spread > 0.0 {
        0.9 * spread * n.powf(-0.2)
    } else {
        // all values equal: draw a narrow bump
        1e-3 * mean.abs().max(1.0)
    };
    let lo = sorted[0] - 3.0 * bw;
    let hi = sorted[sorted.len() - 1] + 3.0 * bw;
    let norm = 1.0 / (n * bw * (2.0 * std::f64::consts::PI).sqrt());
    (0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            // only kernels within 8 bandwidths contribute measurably
            let a = sorted.partition_point(|v| *v < x - 8.0 * bw);
            let b = sorted.partition_point(|v| *v <= x + 8.0 * bw);
            let d: f64 = sorted[a..b]
                .iter()
                .map(|v| (-0.5 * ((x - v) / bw).powi(2)).exp())
                .sum();
            (x, d * norm)
        })
        .collect()
}

/// Standalone SVG of the density of `values` titled `title`.
pub fn density_svg(values: &[f64], title: &str) -> String {
    let curve = kde(values, POINTS);
    let (x0, x1) = (curve[0].0, curve[curve.len() - 1].0);
    let ymax = curve.iter().map(|p| p.1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y / ymax * (HEIGHT - 2.0 * MARGIN);

    let mut path = String::new();
    for (i, (x, y)) in curve.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, px(*x), py(*y));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="25" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (bx, by) = (HEIGHT - MARGIN, WIDTH - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{MARGIN},{MARGIN} L{MARGIN},{bx} L{by},{bx}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let x = x0 + (x1 - x0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            px(x),
            HEIGHT - MARGIN + 16.0,
            format_tick(x)
        );
    }
    let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, path.trim_end());
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(x: f64) -> String {
    if x.abs() >= 1e4 || (x != 0.0 && x.abs() < 1e-2) {
        format!("{x:.2e}")
    } else {
        format!("{x:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
