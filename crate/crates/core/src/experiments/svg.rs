//! Minimal self-contained SVG 1.1 line charts and heatmaps.

use std::fmt::Write as _;

use super::report::{format_sig, ExperimentResult, Series};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f4fd1", "#d12f1f", "#2e9e44", "#8e44ad", "#e67e22", "#555555"];

fn tick(v: f64) -> String {
    format_sig(v, 4)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64), xlab: &str, ylab: &str) {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = LEFT + f * pw;
        let py = TOP + ph - f * ph;
        let _ = writeln!(
            out,
            r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/><text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            tick(x0 + f * (x1 - x0))
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py}" x2="{LEFT}" y2="{py}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick(y0 + f * (y1 - y0))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(xlab)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(ylab)
    );
}

fn line_chart(result: &ExperimentResult, series: &[&Series]) -> String {
    let mut out = String::new();
    header(&mut out, &result.experiment_id);
    let xr = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.x)));
    let yr = extent(
        series
            .iter()
            .flat_map(|s| s.points.iter().flat_map(|p| [p.y - p.y_err, p.y + p.y_err])),
    );
    axes(&mut out, xr, yr, &result.axes.x, &result.axes.y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xr.0) / (xr.1 - xr.0) * pw;
    let sy = |y: f64| TOP + ph - (y - yr.0) / (yr.1 - yr.0) * ph;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.y.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                pts.join(" ")
            );
        }
        for p in s.points.iter().filter(|p| p.y.is_finite()) {
            let (cx, cy) = (sx(p.x), sy(p.y));
            let _ = writeln!(out, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{color}"/>"#);
            if p.y_err > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    sy(p.y - p.y_err),
                    sy(p.y + p.y_err)
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Blue-to-yellow ramp for `t` in [0, 1].
fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 4] = [(40.0, 30.0, 110.0), (30.0, 120.0, 160.0), (80.0, 190.0, 90.0), (250.0, 230.0, 40.0)];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |u: f64, v: f64| (u + f * (v - u)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn heatmap(result: &ExperimentResult, surface: &Series, markers: &[&Series]) -> String {
    let mut out = String::new();
    header(&mut out, &result.experiment_id);
    let mut xs: Vec<f64> = surface.points.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = surface.points.iter().filter_map(|p| p.x2).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let zr = extent(surface.points.iter().map(|p| p.y));
    let half = |v: &[f64]| if v.len() > 1 { 0.5 * (v[1] - v[0]) } else { 0.5 };
    let xr = (xs[0] - half(&xs), xs[xs.len() - 1] + half(&xs));
    let yr = (ys[0] - half(&ys), ys[ys.len() - 1] + half(&ys));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xr.0) / (xr.1 - xr.0) * pw;
    let sy = |y: f64| TOP + ph - (y - yr.0) / (yr.1 - yr.0) * ph;
    let (cw, ch) = (2.0 * half(&xs) / (xr.1 - xr.0) * pw, 2.0 * half(&ys) / (yr.1 - yr.0) * ph);
    for p in &surface.points {
        let y = p.x2.unwrap_or_default();
        let fill = if p.y.is_finite() {
            ramp((p.y - zr.0) / (zr.1 - zr.0))
        } else {
            "#ff00ff".into()
        };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            sx(p.x) - cw / 2.0,
            sy(y) - ch / 2.0,
            cw + 0.5,
            ch + 0.5
        );
    }
    axes(&mut out, xr, yr, &result.axes.x, &result.axes.x2);
    for s in markers {
        for p in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="white" stroke-width="2"/>"#,
                sx(p.x),
                sy(p.x2.unwrap_or_default())
            );
        }
    }
    let bx = WIDTH - RIGHT + 30.0;
    for i in 0..50 {
        let t = i as f64 / 49.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            TOP + ph - (i + 1) as f64 * ph / 50.0,
            ph / 50.0 + 0.5,
            ramp(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text><text x="{bx}" y="{}">{}</text>"#,
        bx + 25.0,
        TOP + ph,
        tick(zr.0),
        bx + 25.0,
        TOP + 10.0,
        tick(zr.1),
        TOP - 8.0,
        escape(if result.axes.y.is_empty() { &surface.label } else { &result.axes.y })
    );
    out.push_str("</svg>\n");
    out
}

/// Renders the first surface series as a heatmap (other surfaces as
/// markers), otherwise all series as a line chart.
pub fn to_svg(result: &ExperimentResult) -> String {
    let surfaces: Vec<&Series> = result.series.iter().filter(|s| s.is_surface()).collect();
    if let Some((first, rest)) = surfaces.split_first() {
        if !first.points.is_empty() {
            return heatmap(result, first, rest);
        }
    }
    let lines: Vec<&Series> = result.series.iter().filter(|s| !s.is_surface()).collect();
    line_chart(result, &lines)
}
