//! ECDF plots as standalone SVG 1.1.

use std::fmt::Write;

use blackbench_core::perf::EcdfCurve;
use blackbench_core::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 540.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 380.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Decade range `[lo, hi]` of the x axis: from the decade of the smallest
/// budget to one decade past the largest.
fn decades(curves: &[(&str, &EcdfCurve)]) -> (i32, i32) {
    let budgets = curves.iter().flat_map(|(_, c)| c.budgets().iter().copied());
    let (min, max) = budgets.fold((f64::INFINITY, 0.0f64), |(lo, hi), b| {
        (lo.min(b), hi.max(b))
    });
    let lo = min.log10().floor() as i32;
    let hi = (max.log10().floor() as i32 + 1).max(lo + 1);
    (lo, hi)
}

/// Renders labeled ECDF curves of one dimension as step functions over a
/// log10 axis of evaluations per dimension. Legend entries follow input
/// order and show each curve's final proportion.
pub fn render_ecdf_svg(title: &str, curves: &[(&str, &EcdfCurve)]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::InvalidCurve("nothing to plot".into()));
    }
    let (lo, hi) = decades(curves);
    let span = f64::from(hi - lo);
    let x = |b: f64| LEFT + (b.log10() - f64::from(lo)) / span * (RIGHT - LEFT);
    let y = |p: f64| BOTTOM - p * (BOTTOM - TOP);

    let mut svg = String::new();
    let w = &mut svg;
    // Writing to a String cannot fail.
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        w,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );

    let _ = writeln!(w, r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##);
    for k in lo..=hi {
        let gx = LEFT + f64::from(k - lo) / span * (RIGHT - LEFT);
        let _ = writeln!(
            w,
            r#"<line x1="{gx:.2}" y1="{TOP:.2}" x2="{gx:.2}" y2="{BOTTOM:.2}"/>"#
        );
    }
    for step in 0..=5 {
        let gy = y(f64::from(step) / 5.0);
        let _ = writeln!(
            w,
            r#"<line x1="{LEFT:.2}" y1="{gy:.2}" x2="{RIGHT:.2}" y2="{gy:.2}"/>"#
        );
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(
        w,
        r#"<rect class="frame" x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for k in lo..=hi {
        let gx = LEFT + f64::from(k - lo) / span * (RIGHT - LEFT);
        let _ = writeln!(
            w,
            r#"<text class="xtick" x="{gx:.2}" y="{:.2}" text-anchor="middle">10<tspan dy="-6" font-size="9">{k}</tspan></text>"#,
            BOTTOM + 18.0
        );
    }
    for step in 0..=5 {
        let p = f64::from(step) / 5.0;
        let _ = writeln!(
            w,
            r#"<text class="ytick" x="{:.2}" y="{:.2}" text-anchor="end">{p:.1}</text>"#,
            LEFT - 6.0,
            y(p) + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">evaluations / dimension (log scale)</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 44.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">proportion of (problem, target) pairs</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    for (k, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        let mut points = curve.points();
        if let Some((b0, p0)) = points.next() {
            let _ = write!(d, "M {:.2} {:.2} V {:.2}", x(b0), y(0.0), y(p0));
            for (b, p) in points {
                let _ = write!(d, " H {:.2} V {:.2}", x(b), y(p));
            }
            let _ = write!(d, " H {RIGHT:.2}");
        }
        let _ = writeln!(
            w,
            r#"<path class="ecdf" data-label="{}" d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            escape(label)
        );
    }

    let legend_x = RIGHT + 20.0;
    for (k, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            w,
            r#"<line x1="{legend_x:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            legend_x + 20.0
        );
        let _ = writeln!(
            w,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{} ({:.3})</text>"#,
            legend_x + 26.0,
            ly + 4.0,
            escape(label),
            curve.final_proportion()
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_spans_whole_decades() {
        let a = EcdfCurve::new(vec![1.0, 10.0], vec![0.5, 1.0]).unwrap();
        assert_eq!(decades(&[("a", &a)]), (0, 2));
        let b = EcdfCurve::new(vec![0.3, 7.0], vec![0.0, 0.1]).unwrap();
        assert_eq!(decades(&[("a", &a), ("b", &b)]), (-1, 2));
    }

    #[test]
    fn labels_are_escaped() {
        let a = EcdfCurve::new(vec![1.0], vec![1.0]).unwrap();
        let svg = render_ecdf_svg("a<b", &[("x&y", &a)]).unwrap();
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("x&amp;y (1.000)"));
    }
}
