//! Self-contained SVG rendering of the two-atom detection curves.

use std::fmt::Write;

use cqed_core::experiments::SweepSeries;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

struct Frame {
    x0: f64,
    x1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, p: f64) -> f64 {
        HEIGHT - BOTTOM - p * (HEIGHT - TOP - BOTTOM)
    }
}

/// Label for `k·π/3`, reduced.
fn pi_label(k: i64) -> String {
    if k == 0 {
        return "0".into();
    }
    let g = gcd(k.unsigned_abs(), 3) as i64;
    let (num, den) = (k / g, 3 / g);
    let sign = if num < 0 { "-" } else { "" };
    let num = num.abs();
    let head = if num == 1 {
        "π".to_string()
    } else {
        format!("{num}π")
    };
    if den == 1 {
        format!("{sign}{head}")
    } else {
        format!("{sign}{head}/{den}")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn polyline(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], style: &str) {
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" {style} points="{}"/>"#,
        points.join(" ")
    );
}

/// Solid `P_eg`, dashed `P_ge`, dotted `P_ee` (equal to `P_gg`), with
/// horizontal ticks at multiples of π/3.
pub fn render_figure1(series: &SweepSeries) -> String {
    let xs = series.grid();
    let col = |name: &str| series.column(name).expect("figure column present");
    let frame = Frame {
        x0: xs[0],
        x1: xs[xs.len() - 1],
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="serif" font-size="14">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (bx, by) = (frame.y(0.0), frame.y(1.0));
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{by}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        bx - by
    );

    let step = std::f64::consts::PI / 3.0;
    let k_lo = (frame.x0 / step - 1e-9).ceil() as i64;
    let k_hi = (frame.x1 / step + 1e-9).floor() as i64;
    for k in k_lo..=k_hi {
        let x = frame.x(k as f64 * step);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bx}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bx - 6.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bx + 20.0,
            pi_label(k)
        );
    }
    for j in 0..=5 {
        let p = j as f64 * 0.2;
        let y = frame.y(p);
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
            LEFT + 6.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{p:.1}</text>"#,
            LEFT - 8.0,
            y + 5.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">λt</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">P</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    );

    polyline(&mut out, &frame, xs, col("P_eg"), "");
    polyline(
        &mut out,
        &frame,
        xs,
        col("P_ge"),
        r#"stroke-dasharray="8,5""#,
    );
    polyline(
        &mut out,
        &frame,
        xs,
        col("P_ee"),
        r#"stroke-dasharray="2,3""#,
    );

    let legend = [
        ("P(e₁,g₂)", ""),
        ("P(g₁,e₂)", r#" stroke-dasharray="8,5""#),
        ("P(e₁,e₂) = P(g₁,g₂)", r#" stroke-dasharray="2,3""#),
    ];
    for (i, (label, dash)) in legend.iter().enumerate() {
        let y = TOP + 18.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT - 210.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="1.5"{dash}/>"#,
            x + 36.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            x + 44.0,
            y + 5.0
        );
    }
    out.push_str("</svg>\n");
    out
}
