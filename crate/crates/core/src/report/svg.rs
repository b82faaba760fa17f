//! Hand-written SVG 1.1 rendering of acceptability curves.
//!
//! Output is a pure function of the [`PlotSpec`]: no timestamps, ids derive
//! from panel indices, every coordinate is printed with two decimals.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curve::{AcceptabilityCurve, PercentileMarkers, SourceTag};
use crate::error::{Error, Result};
use crate::model::Warning;

pub const MAX_CURVES: usize = 3;
pub const X_LABEL: &str = "Acceptability threshold";
pub const Y_LABEL: &str = "Acceptability value";

/// Okabe–Ito blue, vermillion, bluish green.
pub const PALETTE: [&str; 3] = ["#0072B2", "#D55E00", "#009E73"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Faceted,
    Overlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    Unacceptable,
    Expected,
}

impl AnnotationKind {
    fn label(&self) -> &'static str {
        match self {
            AnnotationKind::Unacceptable => "Unacceptable difference",
            AnnotationKind::Expected => "Expected difference",
        }
    }
}

/// A pre-specified difference marked on a curve at `(threshold_pp, value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub kind: AnnotationKind,
    pub threshold_pp: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotCurve {
    pub curve: AcceptabilityCurve,
    pub markers: PercentileMarkers,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub curves: Vec<PlotCurve>,
    pub layout: Layout,
    pub width: f64,
    pub height: f64,
    /// Fixed x-range; by default the union of curve ranges and annotations.
    pub x_range: Option<(f64, f64)>,
}

impl PlotSpec {
    pub fn new(curves: Vec<PlotCurve>) -> Self {
        PlotSpec {
            curves,
            layout: Layout::Faceted,
            width: 900.0,
            height: 450.0,
            x_range: None,
        }
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_x_range(mut self, lo: f64, hi: f64) -> Self {
        self.x_range = Some((lo, hi));
        self
    }

    fn validate(&self) -> Result<()> {
        if self.curves.len() > MAX_CURVES {
            return Err(Error::TooManyCurves(self.curves.len()));
        }
        if self.curves.is_empty() {
            return Err(Error::EmptyCurve(String::new()));
        }
        for c in &self.curves {
            if c.curve.points.is_empty() {
                return Err(Error::EmptyCurve(c.curve.trial_name.clone()));
            }
        }
        Ok(())
    }

    /// Plotted x-range, padded by 4% on each side when derived from data.
    pub fn resolved_x_range(&self) -> (f64, f64) {
        if let Some(r) = self.x_range {
            return r;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.curves {
            if let Some((a, b)) = c.curve.x_range() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
            for a in &c.annotations {
                lo = lo.min(a.threshold_pp);
                hi = hi.max(a.threshold_pp);
            }
        }
        if !(lo < hi) {
            lo -= 1.0;
            hi += 1.0;
        }
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    }

    /// One warning per annotation that falls outside the plotted range and
    /// will be drawn clipped to the nearest edge.
    pub fn clipping_warnings(&self) -> Vec<Warning> {
        let (lo, hi) = self.resolved_x_range();
        self.curves
            .iter()
            .flat_map(|c| {
                c.annotations
                    .iter()
                    .filter(move |a| a.threshold_pp < lo || a.threshold_pp > hi)
                    .map(move |a| Warning {
                        code: "annotation_clipped".into(),
                        message: format!(
                            "{} {} for '{}' lies outside the plotted range ({lo}, {hi})",
                            a.kind.label(),
                            a.threshold_pp,
                            c.curve.trial_name
                        ),
                    })
            })
            .collect()
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick positions at a 1/2/5 × 10^k step covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x_lo: f64,
    x_hi: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        let t = t.clamp(self.x_lo, self.x_hi);
        self.left + (t - self.x_lo) / (self.x_hi - self.x_lo) * self.width
    }

    fn y(&self, v: f64) -> f64 {
        self.top + (1.0 - v.clamp(0.0, 1.0)) * self.height
    }
}

/// Path data for one curve. Empirical curves are drawn as right-continuous
/// steps starting from 1 at the first draw; analytic curves as polylines.
fn curve_path(curve: &AcceptabilityCurve, f: &Frame) -> String {
    let mut d = String::new();
    let pts = &curve.points;
    match curve.source {
        SourceTag::Bayes => {
            let mut prev = 1.0;
            for (i, p) in pts.iter().enumerate() {
                let x = num(f.x(p.threshold_pp));
                if i == 0 {
                    write!(d, "M{},{}", x, num(f.y(prev))).unwrap();
                } else {
                    write!(d, " L{},{}", x, num(f.y(prev))).unwrap();
                }
                write!(d, " L{},{}", x, num(f.y(p.value))).unwrap();
                prev = p.value;
            }
        }
        SourceTag::Freq => {
            for (i, p) in pts.iter().enumerate() {
                let cmd = if i == 0 { "M" } else { " L" };
                write!(d, "{}{},{}", cmd, num(f.x(p.threshold_pp)), num(f.y(p.value))).unwrap();
            }
        }
    }
    d
}

#[derive(Clone, Copy)]
enum Glyph {
    Square,
    Circle,
    Triangle,
    Bracket,
    Bar,
}

impl Glyph {
    fn class(&self) -> &'static str {
        match self {
            Glyph::Square => "marker-p025",
            Glyph::Circle => "marker-p50",
            Glyph::Triangle => "marker-p975",
            Glyph::Bracket => "marker-unacceptable",
            Glyph::Bar => "marker-expected",
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Glyph::Square => "2.5 percentile",
            Glyph::Circle => "50 percentile (median)",
            Glyph::Triangle => "97.5 percentile",
            Glyph::Bracket => AnnotationKind::Unacceptable.label(),
            Glyph::Bar => AnnotationKind::Expected.label(),
        }
    }

    fn draw(&self, out: &mut String, x: f64, y: f64) {
        let class = self.class();
        match self {
            Glyph::Square => writeln!(
                out,
                r#"<rect class="marker {class}" x="{}" y="{}" width="8.00" height="8.00" fill="black"/>"#,
                num(x - 4.0),
                num(y - 4.0)
            ),
            Glyph::Circle => writeln!(
                out,
                r#"<circle class="marker {class}" cx="{}" cy="{}" r="4.50" fill="black"/>"#,
                num(x),
                num(y)
            ),
            Glyph::Triangle => writeln!(
                out,
                r#"<polygon class="marker {class}" points="{},{} {},{} {},{}" fill="black"/>"#,
                num(x),
                num(y - 5.0),
                num(x - 5.0),
                num(y + 4.0),
                num(x + 5.0),
                num(y + 4.0)
            ),
            Glyph::Bracket => writeln!(
                out,
                r#"<path class="marker {class}" d="M{},{} L{},{} L{},{} L{},{}" fill="none" stroke="black" stroke-width="2"/>"#,
                num(x + 4.0),
                num(y - 9.0),
                num(x),
                num(y - 9.0),
                num(x),
                num(y + 9.0),
                num(x + 4.0),
                num(y + 9.0)
            ),
            Glyph::Bar => writeln!(
                out,
                r#"<line class="marker {class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2"/>"#,
                num(x),
                num(y - 9.0),
                num(x),
                num(y + 9.0)
            ),
        }
        .unwrap();
    }
}

fn annotation_glyph(kind: AnnotationKind) -> Glyph {
    match kind {
        AnnotationKind::Unacceptable => Glyph::Bracket,
        AnnotationKind::Expected => Glyph::Bar,
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 100.0;
const PANEL_GAP: f64 = 24.0;

fn draw_axes(out: &mut String, f: &Frame, y_labels: bool) {
    writeln!(
        out,
        r##"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333"/>"##,
        num(f.left),
        num(f.top),
        num(f.width),
        num(f.height)
    )
    .unwrap();
    let (xt, decimals) = ticks(f.x_lo, f.x_hi);
    let bottom = f.top + f.height;
    for t in xt {
        let x = f.x(t);
        let label = format!("{:.*}", decimals, t);
        let label = if label.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            "0".to_string()
        } else {
            label
        };
        writeln!(
            out,
            r##"<line class="tick" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333333"/><text x="{0}" y="{3}" text-anchor="middle" font-size="11">{4}</text>"##,
            num(x),
            num(bottom),
            num(bottom + 4.0),
            num(bottom + 17.0),
            label
        )
        .unwrap();
    }
    for k in 0..=4 {
        let v = k as f64 * 0.25;
        let y = f.y(v);
        write!(
            out,
            r##"<line class="tick" x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="#333333"/>"##,
            x1 = num(f.left - 4.0),
            y = num(y),
            x2 = num(f.left)
        )
        .unwrap();
        if y_labels {
            write!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}%</text>"#,
                num(f.left - 7.0),
                num(y + 4.0),
                k * 25
            )
            .unwrap();
        }
        out.push('\n');
    }
    if f.x_lo < 0.0 && f.x_hi > 0.0 {
        let x = num(f.x(0.0));
        writeln!(
            out,
            r##"<line class="zero-line" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#555555" stroke-dasharray="2,3"/>"##,
            num(f.top),
            num(bottom)
        )
        .unwrap();
    }
}

fn draw_curve(out: &mut String, pc: &PlotCurve, f: &Frame, color: &str) {
    writeln!(
        out,
        r#"<path class="curve curve-{}" data-trial="{}" d="{}" fill="none" stroke="{}" stroke-width="2.5"/>"#,
        pc.curve.source.as_str(),
        escape(&pc.curve.trial_name),
        curve_path(&pc.curve, f),
        color
    )
    .unwrap();
    let glyphs = [Glyph::Square, Glyph::Circle, Glyph::Triangle];
    for (g, m) in glyphs.iter().zip(pc.markers.as_array()) {
        g.draw(out, f.x(m.threshold_pp), f.y(m.value));
    }
    for a in &pc.annotations {
        annotation_glyph(a.kind).draw(out, f.x(a.threshold_pp), f.y(a.value));
    }
}

/// Render curves as a Figure-style SVG document.
///
/// Faceted layout gives one panel per trial sharing the x-axis; overlay puts
/// every curve in a single panel with a trial colour key.
pub fn render_curve_svg(spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let (x_lo, x_hi) = spec.resolved_x_range();
    let n_panels = match spec.layout {
        Layout::Faceted => spec.curves.len(),
        Layout::Overlay => 1,
    };
    let plot_w = spec.width - MARGIN_LEFT - MARGIN_RIGHT;
    let panel_w = (plot_w - PANEL_GAP * (n_panels - 1) as f64) / n_panels as f64;
    let panel_h = spec.height - MARGIN_TOP - MARGIN_BOTTOM;

    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#,
        w = num(spec.width),
        h = num(spec.height)
    )
    .unwrap();

    for panel in 0..n_panels {
        let frame = Frame {
            left: MARGIN_LEFT + panel as f64 * (panel_w + PANEL_GAP),
            top: MARGIN_TOP,
            width: panel_w,
            height: panel_h,
            x_lo,
            x_hi,
        };
        let members: Vec<(usize, &PlotCurve)> = match spec.layout {
            Layout::Faceted => vec![(panel, &spec.curves[panel])],
            Layout::Overlay => spec.curves.iter().enumerate().collect(),
        };
        writeln!(out, r#"<g class="panel" id="panel-{panel}">"#).unwrap();
        if spec.layout == Layout::Faceted {
            writeln!(
                out,
                r#"<text class="panel-title" x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
                num(frame.left + panel_w / 2.0),
                num(MARGIN_TOP - 10.0),
                escape(&members[0].1.curve.trial_name)
            )
            .unwrap();
        }
        draw_axes(&mut out, &frame, panel == 0);
        for (i, pc) in members {
            draw_curve(&mut out, pc, &frame, PALETTE[i]);
        }
        out.push_str("</g>\n");
    }

    let bottom = MARGIN_TOP + panel_h;
    writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" font-size="13">{X_LABEL}</text>"#,
        num(MARGIN_LEFT + plot_w / 2.0),
        num(bottom + 36.0)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text class="axis-label" x="18.00" y="{0}" text-anchor="middle" font-size="13" transform="rotate(-90 18.00 {0})">{Y_LABEL}</text>"#,
        num(MARGIN_TOP + panel_h / 2.0)
    )
    .unwrap();
    write_legend(&mut out, spec, bottom + 64.0);
    out.push_str("</svg>\n");
    Ok(out)
}

fn write_legend(out: &mut String, spec: &PlotSpec, y: f64) {
    let has = |kind: AnnotationKind| {
        spec.curves
            .iter()
            .any(|c| c.annotations.iter().any(|a| a.kind == kind))
    };
    let mut glyphs = vec![Glyph::Square, Glyph::Circle, Glyph::Triangle];
    if has(AnnotationKind::Unacceptable) {
        glyphs.push(Glyph::Bracket);
    }
    if has(AnnotationKind::Expected) {
        glyphs.push(Glyph::Bar);
    }
    writeln!(out, r#"<g class="legend">"#).unwrap();
    let mut x = MARGIN_LEFT;
    for g in glyphs {
        g.draw(out, x, y);
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11">{}</text>"#,
            num(x + 10.0),
            num(y + 4.0),
            g.label()
        )
        .unwrap();
        x += 22.0 + 6.2 * g.label().len() as f64;
    }
    if spec.layout == Layout::Overlay {
        let y = y + 20.0;
        let mut x = MARGIN_LEFT;
        for (i, c) in spec.curves.iter().enumerate() {
            writeln!(
                out,
                r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="2.5"/><text x="{tx}" y="{ty}" font-size="11">{name}</text>"#,
                x1 = num(x),
                y = num(y),
                x2 = num(x + 18.0),
                color = PALETTE[i],
                tx = num(x + 22.0),
                ty = num(y + 4.0),
                name = escape(&c.curve.trial_name)
            )
            .unwrap();
            x += 40.0 + 6.2 * c.curve.trial_name.len() as f64;
        }
    }
    out.push_str("</g>\n");
}
