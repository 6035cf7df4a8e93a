//! Static SVG line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

pub struct Line<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub dashed: bool,
}

/// Line chart with an optional shaded x-interval.
pub fn line_chart(title: &str, lines: &[Line<'_>], shade: Option<(f64, f64)>) -> String {
    let all = lines.iter().flat_map(|l| l.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some((a, b)) = shade {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="#f4c7c3" opacity="0.6"/>"##,
            px(a),
            (px(b) - px(a)).max(1.0),
            HEIGHT - 2.0 * MARGIN
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
    for (value, anchor, x, y) in [
        (y0, "end", MARGIN - 4.0, HEIGHT - MARGIN),
        (y1, "end", MARGIN - 4.0, MARGIN + 10.0),
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            tick(value)
        );
    }
    for line in lines {
        let mut path = String::new();
        for (i, &(x, y)) in line.points.iter().enumerate() {
            let _ = write!(path, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, px(x), py(y));
        }
        let dash = if line.dashed { r#" stroke-dasharray="5,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<path d="{path}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            line.color
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_has_one_path_per_line() {
        let a = [(0.0, 0.0), (1.0, 1.0)];
        let b = [(0.0, 1.0), (1.0, 0.5)];
        let svg = line_chart(
            "x < y",
            &[Line { points: &a, color: "black", dashed: false }, Line { points: &b, color: "red", dashed: true }],
            Some((0.2, 0.4)),
        );
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("x &lt; y"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn flat_series_does_not_divide_by_zero() {
        let a = [(0.0, 3.0), (1.0, 3.0)];
        let svg = line_chart("flat", &[Line { points: &a, color: "black", dashed: false }], None);
        assert!(!svg.contains("NaN"));
    }
}
