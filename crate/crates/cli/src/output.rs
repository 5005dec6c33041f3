//! Artifact writers. Everything here is deterministic: no timestamps, fixed
//! float formatting, stable key order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use quatlie::pde::DiagnosticsRow;

use crate::error::CliError;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub const CSV_HEADER: &str = "t,l2,hs,grad_linf,bkm_integral,energy_ratio";

/// One row per line, 17 significant digits.
pub fn trajectory_csv(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let cols = [r.t, r.l2, r.hs, r.grad_linf, r.bkm_integral, r.energy_ratio];
        let line: Vec<String> = cols.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn column(rows: &[DiagnosticsRow], name: &str) -> Vec<f64> {
    rows.iter()
        .map(|r| match name {
            "l2" => r.l2,
            "hs" => r.hs,
            "grad_linf" => r.grad_linf,
            "bkm_integral" => r.bkm_integral,
            "energy_ratio" => r.energy_ratio,
            _ => r.t,
        })
        .collect()
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn range(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v.iter().filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        let pad = if lo.abs() > 0.0 { 0.1 * lo.abs() } else { 1.0 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// A self-contained SVG line plot of `ys` against `xs`.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x0, x1) = range(xs);
    let (y0, y1) = range(ys);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let (bx, by, bw, bh) = (LEFT, TOP, W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(s, r##"<rect x="{bx}" y="{by}" width="{bw}" height="{bh}" fill="none" stroke="#444"/>"##);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (gx, gy) = (px(xv), py(yv));
        let _ = writeln!(s, r##"<line x1="{gx:.2}" y1="{:.2}" x2="{gx:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP, H - BOTTOM);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}" stroke="#ddd"/>"##, LEFT, W - RIGHT);
        let _ = writeln!(s, r#"<text x="{gx:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, H - BOTTOM + 16.0, tick(xv));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, LEFT - 6.0, gy + 4.0, tick(yv));
    }
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{}"/>"##, pts.join(" "));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
