use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::summary::SummaryRow;
use crate::Result;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const PLOTTED: [&str; 2] = ["max_gap", "mean_gap"];

/// One SVG per (objective, metric, q_kind): percent gap against sweep value,
/// one series per variant with CI whiskers. Circles mark linear models and
/// triangles MLPs. Returns the written paths; an empty summary writes nothing.
pub fn render_plots(summary: &[SummaryRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut charts: BTreeMap<(String, String, String), Vec<&SummaryRow>> = BTreeMap::new();
    for s in summary {
        if PLOTTED.contains(&s.metric.as_str()) && s.group_or_all == "all" {
            charts
                .entry((s.objective.clone(), s.metric.clone(), s.q_kind.clone()))
                .or_default()
                .push(s);
        }
    }
    if charts.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for ((objective, metric, q_kind), rows) in charts {
        let path = out_dir.join(format!("{objective}_{metric}_{q_kind}.svg"));
        fs::write(&path, chart(&objective, &metric, &q_kind, &rows))?;
        paths.push(path);
    }
    Ok(paths)
}

fn chart(objective: &str, metric: &str, q_kind: &str, rows: &[&SummaryRow]) -> String {
    let mut series: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows {
        series.entry(r.model_variant.as_str()).or_default().push(r);
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
    }
    let pct = |v: f64| if v.is_finite() { 100.0 * v } else { f64::NAN };
    let xs: Vec<f64> = rows.iter().map(|r| r.sweep_value).collect();
    let (x_min, x_max) = bounds(&xs);
    let ys: Vec<f64> = rows
        .iter()
        .flat_map(|r| [pct(r.mean), pct(r.ci_low), pct(r.ci_high)])
        .filter(|v| v.is_finite())
        .collect();
    let (mut y_min, mut y_max) = bounds(&ys);
    y_min = y_min.min(0.0);
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let sx = |x: f64| {
        if x_max > x_min {
            LEFT + (x - x_min) / (x_max - x_min) * plot_w
        } else {
            LEFT + plot_w / 2.0
        }
    };
    let sy = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{objective}: percent {metric} ({q_kind})</text>"#,
        LEFT + plot_w / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#, TOP + plot_h);
    for k in 0..=4 {
        let y = y_min + (y_max - y_min) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{y:.2}</text>"#,
            LEFT - 6.0,
            sy(y) + 4.0
        );
    }
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in ticks {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{x}</text>"#,
            sx(x),
            TOP + plot_h + 18.0
        );
    }
    let sweep = rows.first().map(|r| r.sweep_param.as_str()).unwrap_or("");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{sweep}</text>"#,
        LEFT + plot_w / 2.0,
        H - 14.0
    );

    for (k, (variant, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let linear = variant.starts_with("LR");
        let path: Vec<String> = points
            .iter()
            .filter(|p| p.mean.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.sweep_value), sy(pct(p.mean))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for p in points {
            let (x, y) = (sx(p.sweep_value), pct(p.mean));
            if !y.is_finite() {
                continue;
            }
            if p.ci_low.is_finite() && p.ci_high.is_finite() {
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    sy(pct(p.ci_low)),
                    sy(pct(p.ci_high))
                );
            }
            let cy = sy(y);
            let attrs = format!(r#"fill="{color}" data-variant="{variant}" data-x="{}" data-percent="{y}""#, p.sweep_value);
            if linear {
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{cy:.2}" r="4" {attrs}/>"#);
            } else {
                let _ = writeln!(
                    s,
                    r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" {attrs}/>"#,
                    x,
                    cy - 5.0,
                    x - 4.5,
                    cy + 4.0,
                    x + 4.5,
                    cy + 4.0
                );
            }
        }
        let ly = TOP + 16.0 * k as f64 + 8.0;
        let lx = W - RIGHT + 16.0;
        if linear {
            let _ = writeln!(s, r#"<circle cx="{lx}" cy="{ly}" r="4" fill="{color}"/>"#);
        } else {
            let _ = writeln!(
                s,
                r#"<polygon points="{lx},{} {},{} {},{}" fill="{color}"/>"#,
                ly - 5.0,
                lx - 4.5,
                ly + 4.0,
                lx + 4.5,
                ly + 4.0
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}">{variant}</text>"#, lx + 10.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
