//! Deterministic SVG rendering. Every number is printed at fixed
//! precision and elements are emitted in input order.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::graphs::VertexId;
use crate::packing::{CirclePacking, IsometryKind};
use crate::stats::TailRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureKind {
    PackingSvg,
    TailCurves,
    SlopePlot,
}

impl FigureKind {
    fn name(self) -> &'static str {
        match self {
            FigureKind::PackingSvg => "packing-svg",
            FigureKind::TailCurves => "tail-curves",
            FigureKind::SlopePlot => "slope-plot",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FigureData {
    Packing {
        packing: CirclePacking,
        /// Nerve edges to draw between centers.
        edges: Vec<(VertexId, VertexId)>,
        symmetry: Option<IsometryKind>,
    },
    Tail {
        rows: Vec<TailRow>,
    },
    Slope {
        x_label: String,
        y_label: String,
        /// Named series of `(x, y)` points.
        series: Vec<(String, Vec<(f64, f64)>)>,
    },
}

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE:.0} {SIZE:.0}" width="{SIZE:.0}" height="{SIZE:.0}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{SIZE:.0}" height="{SIZE:.0}" fill="white"/>"#);
}

pub fn emit_figure(data: &FigureData, kind: FigureKind) -> Result<String, HarnessError> {
    match (data, kind) {
        (FigureData::Packing { packing, edges, symmetry }, FigureKind::PackingSvg) => Ok(packing_svg(packing, edges, symmetry.as_ref())),
        (FigureData::Tail { rows }, FigureKind::TailCurves) => Ok(tail_svg(rows)),
        (FigureData::Slope { x_label, y_label, series }, FigureKind::SlopePlot) => Ok(plot_svg(x_label, y_label, series, false)),
        _ => Err(HarnessError::FigureMismatch { expected: kind.name().into() }),
    }
}

fn packing_svg(p: &CirclePacking, edges: &[(VertexId, VertexId)], symmetry: Option<&IsometryKind>) -> String {
    let mut out = String::new();
    header(&mut out);
    if p.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in &p.circles {
        x0 = x0.min(c.cx - c.r);
        x1 = x1.max(c.cx + c.r);
        y0 = y0.min(c.cy - c.r);
        y1 = y1.max(c.cy + c.r);
    }
    let scale = (SIZE - 2.0 * MARGIN) / (x1 - x0).max(y1 - y0).max(1e-300);
    // y grows upward in packing coordinates.
    let map = |x: f64, y: f64| (MARGIN + (x - x0) * scale, SIZE - MARGIN - (y - y0) * scale);
    let _ = writeln!(out, r##"<g fill="none" stroke="#1f77b4" stroke-width="0.8">"##);
    for c in &p.circles {
        let (cx, cy) = map(c.cx, c.cy);
        let _ = writeln!(out, r#"<circle cx="{cx:.4}" cy="{cy:.4}" r="{:.4}"/>"#, c.r * scale);
    }
    out.push_str("</g>\n");
    if !edges.is_empty() {
        let _ = writeln!(out, r##"<g stroke="#888888" stroke-width="0.5">"##);
        for &(u, v) in edges {
            let (a, b) = (p.circle(u), p.circle(v));
            let (ax, ay) = map(a.cx, a.cy);
            let (bx, by) = map(b.cx, b.cy);
            let _ = writeln!(out, r#"<line x1="{ax:.4}" y1="{ay:.4}" x2="{bx:.4}" y2="{by:.4}"/>"#);
        }
        out.push_str("</g>\n");
    }
    if let Some(line) = p.line {
        let (_, y) = map(0.0, line);
        let _ = writeln!(out, r#"<line x1="0" y1="{y:.4}" x2="{SIZE:.0}" y2="{y:.4}" stroke="black" stroke-width="1"/>"#);
    }
    match symmetry {
        Some(IsometryKind::ReflectionLine { point, direction }) => {
            let reach = 2.0 * (x1 - x0).max(y1 - y0);
            let (ax, ay) = map(point.0 - reach * direction.0, point.1 - reach * direction.1);
            let (bx, by) = map(point.0 + reach * direction.0, point.1 + reach * direction.1);
            let _ = writeln!(
                out,
                r##"<line x1="{ax:.4}" y1="{ay:.4}" x2="{bx:.4}" y2="{by:.4}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="6 4"/>"##
            );
        }
        Some(IsometryKind::PointReflection { point }) => {
            let (x, y) = map(point.0, point.1);
            let _ = writeln!(out, r##"<circle cx="{x:.4}" cy="{y:.4}" r="4" fill="#d62728"/>"##);
        }
        _ => {}
    }
    out.push_str("</svg>\n");
    out
}

fn tail_svg(rows: &[TailRow]) -> String {
    let mut ns: Vec<u32> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    let series = ns
        .iter()
        .map(|&n| (format!("n={n}"), rows.iter().filter(|r| r.n == n).map(|r| (r.m.log2(), r.tail_prob)).collect()))
        .collect::<Vec<_>>();
    plot_svg("log2 M", "tail probability", &series, true)
}

fn plot_svg(x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)], unit_y: bool) -> String {
    let mut out = String::new();
    header(&mut out);
    let pts = series.iter().flat_map(|(_, s)| s.iter().copied()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if unit_y {
        (y0, y1) = (0.0, 1.0);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let w = SIZE - 2.0 * MARGIN;
    let map = |x: f64, y: f64| (MARGIN + (x - x0) / (x1 - x0) * w, SIZE - MARGIN - (y - y0) / (y1 - y0) * w);
    let (ox, oy) = map(x0, y0);
    let (ex, ey) = map(x1, y1);
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1"><line x1="{ox:.2}" y1="{oy:.2}" x2="{ex:.2}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="{oy:.2}" x2="{ox:.2}" y2="{ey:.2}"/></g>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#, SIZE / 2.0, SIZE - 15.0, x_label);
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        y_label
    );
    let _ = writeln!(out, r#"<text x="{ox:.2}" y="{:.2}" font-size="11">{x0:.3}</text>"#, oy + 15.0);
    let _ = writeln!(out, r#"<text x="{ex:.2}" y="{:.2}" font-size="11" text-anchor="end">{x1:.3}</text>"#, oy + 15.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{oy:.2}" font-size="11" text-anchor="end">{y0:.3}</text>"#, ox - 4.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{ey:.2}" font-size="11" text-anchor="end">{y1:.3}</text>"#, ox - 4.0);
    for (i, (name, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (a, b) = map(x, y);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">{name}</text>"#,
            SIZE - MARGIN - 90.0,
            MARGIN + 14.0 * i as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::Circle;

    #[test]
    fn kinds_must_match() {
        let data = FigureData::Tail { rows: vec![] };
        assert!(matches!(emit_figure(&data, FigureKind::PackingSvg), Err(HarnessError::FigureMismatch { .. })));
        let svg = emit_figure(&data, FigureKind::TailCurves).unwrap();
        assert!(svg.contains("tail probability") && svg.contains("log2 M"));
    }

    #[test]
    fn packing_is_byte_stable() {
        let p = CirclePacking::new(vec![Circle { cx: 0.0, cy: 0.0, r: 1.0 }, Circle { cx: 2.0, cy: 0.0, r: 1.0 }], 1e-8);
        let data = FigureData::Packing { packing: p, edges: vec![(0, 1)], symmetry: None };
        let a = emit_figure(&data, FigureKind::PackingSvg).unwrap();
        assert_eq!(a, emit_figure(&data, FigureKind::PackingSvg).unwrap());
        assert_eq!(a.matches("<circle").count(), 2);
    }
}
