// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! Static SVG charts: scatter with a `y = x` reference, grouped signed bars,
//! and line plots. Output depends only on the data, so reruns are
//! byte-identical.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub const BLUE: &str = "#1f5fbf";
pub const RED: &str = "#c8352b";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Cross,
}

#[derive(Debug, Clone)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub marker: Marker,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// One row of grouped bars: `(position, V value, H value)`.
#[derive(Debug, Clone)]
pub struct BarPanel {
    pub title: String,
    pub y_label: String,
    pub bars: Vec<(i64, f64, f64)>,
}

fn f(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Data-to-pixel mapping of one panel.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
}

impl Frame {
    fn new(mut x: (f64, f64), mut y: (f64, f64), top: f64) -> Self {
        for r in [&mut x, &mut y] {
            if !(r.1 > r.0) {
                *r = (r.0 - 0.5, r.0 + 0.5);
            }
        }
        Frame { x0: x.0, x1: x.1, y0: y.0, y1: y.1, top }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        self.top + MARGIN_TOP + (self.y1 - y) / (self.y1 - self.y0) * h
    }

    fn bottom(&self) -> f64 {
        self.top + PANEL_HEIGHT - MARGIN_BOTTOM
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str, x_ticks: bool) {
        let (l, r) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (t, b) = (self.top + MARGIN_TOP, self.bottom());
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="dimgray"/>"#,
            f(l),
            f(t),
            f(r - l),
            f(b - t)
        );
        let ystep = nice_step(self.y1 - self.y0);
        let mut v = (self.y0 / ystep).ceil() * ystep;
        while v <= self.y1 + 1e-9 * ystep {
            let y = self.py(v);
            let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="dimgray"/>"#, f(l - 4.0), f(y), f(l), f(y));
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
                f(l - 6.0),
                f(y + 4.0),
                tick_label(v, ystep)
            );
            v += ystep;
        }
        if x_ticks {
            let xstep = nice_step(self.x1 - self.x0);
            let mut v = (self.x0 / xstep).ceil() * xstep;
            while v <= self.x1 + 1e-9 * xstep {
                let x = self.px(v);
                let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="dimgray"/>"#, f(x), f(b), f(x), f(b + 4.0));
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
                    f(x),
                    f(b + 16.0),
                    tick_label(v, xstep)
                );
                v += xstep;
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
            f((l + r) / 2.0),
            f(self.top + 22.0),
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            f((l + r) / 2.0),
            f(b + 36.0),
            escape(x_label)
        );
        let cy = (t + b) / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            f(cy),
            f(cy),
            escape(y_label)
        );
    }
}

fn document(height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
        w = f(WIDTH),
        h = f(height)
    )
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Scatter of `points` with the dashed `y = x` line across the common range.
pub fn scatter_identity(title: &str, x_label: &str, y_label: &str, points: &[Point]) -> String {
    let (lo, hi) = range(points.iter().flat_map(|p| [p.x, p.y]));
    let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi.max(lo.min(0.0) + 1e-3)) } else { (0.0, 1.0) };
    let pad = 0.05 * (hi - lo);
    let frame = Frame::new((lo, hi + pad), (lo, hi + pad), 0.0);
    let mut body = String::new();
    frame.axes(&mut body, title, x_label, y_label, true);
    let _ = writeln!(
        body,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000" stroke-dasharray="5,4"/>"##,
        f(frame.px(lo)),
        f(frame.py(lo)),
        f(frame.px(hi + pad)),
        f(frame.py(hi + pad))
    );
    for p in points {
        let (x, y) = (frame.px(p.x), frame.py(p.y));
        match p.marker {
            Marker::Circle => {
                let _ = writeln!(body, r#"<circle cx="{}" cy="{}" r="5" fill="none" stroke="{RED}" stroke-width="1.5"/>"#, f(x), f(y));
            }
            Marker::Cross => {
                let _ = writeln!(
                    body,
                    r#"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="{BLUE}" stroke-width="1.5"/>"#,
                    f(x - 4.0),
                    f(y - 4.0),
                    f(x + 4.0),
                    f(y + 4.0),
                    f(x - 4.0),
                    f(y + 4.0),
                    f(x + 4.0),
                    f(y - 4.0)
                );
            }
        }
    }
    document(PANEL_HEIGHT, &body)
}

/// Stacked panels of V (blue) and H (red) bars per position. Bars start at
/// zero, so negative values hang below the axis.
pub fn grouped_bars(x_label: &str, panels: &[BarPanel]) -> String {
    let mut body = String::new();
    for (k, panel) in panels.iter().enumerate() {
        let (xmin, xmax) = range(panel.bars.iter().map(|b| b.0 as f64));
        let (ymin, ymax) = range(panel.bars.iter().flat_map(|b| [b.1, b.2]));
        let (xmin, xmax) = if xmin.is_finite() { (xmin - 1.0, xmax + 1.0) } else { (-1.0, 1.0) };
        let (ymin, ymax) = if ymin.is_finite() { (ymin.min(0.0), ymax.max(0.0)) } else { (0.0, 1.0) };
        let pad = 0.05 * (ymax - ymin);
        let frame = Frame::new((xmin, xmax), (ymin - if ymin < 0.0 { pad } else { 0.0 }, ymax + pad), k as f64 * PANEL_HEIGHT);
        frame.axes(&mut body, &panel.title, x_label, &panel.y_label, true);
        let _ = writeln!(
            body,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888"/>"##,
            f(frame.px(xmin)),
            f(frame.py(0.0)),
            f(frame.px(xmax)),
            f(frame.py(0.0))
        );
        let unit = frame.px(1.0) - frame.px(0.0);
        let w = (unit * 0.35).max(1.0);
        for &(x, v, h) in &panel.bars {
            for (value, color, shift) in [(v, BLUE, -w), (h, RED, 0.0)] {
                if value == 0.0 {
                    continue;
                }
                let (y_a, y_b) = (frame.py(value), frame.py(0.0));
                let _ = writeln!(
                    body,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
                    f(frame.px(x as f64) + shift),
                    f(y_a.min(y_b)),
                    f(w),
                    f((y_a - y_b).abs())
                );
            }
        }
        legend(&mut body, frame.top, &[("V", BLUE), ("H", RED)]);
    }
    document(PANEL_HEIGHT * panels.len().max(1) as f64, &body)
}

fn legend(body: &mut String, top: f64, entries: &[(&str, &str)]) {
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = top + MARGIN_TOP + 10.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN_RIGHT - 110.0;
        let _ = writeln!(body, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, f(x), f(y - 9.0));
        let _ = writeln!(body, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, f(x + 14.0), f(y), escape(name));
    }
}

/// Polylines with point markers.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (xmin, xmax) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (ymin, ymax) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (xmin, xmax) = if xmin.is_finite() { (xmin, xmax) } else { (0.0, 1.0) };
    let (ymin, ymax) = if ymin.is_finite() { (ymin.min(0.0), ymax) } else { (0.0, 1.0) };
    let frame = Frame::new((xmin, xmax + 0.02 * (xmax - xmin)), (ymin, ymax + 0.08 * (ymax - ymin)), 0.0);
    let mut body = String::new();
    frame.axes(&mut body, title, x_label, y_label, true);
    for s in series {
        let path: Vec<String> = s.points.iter().map(|(x, y)| format!("{},{}", f(frame.px(*x)), f(frame.py(*y)))).collect();
        let _ = writeln!(body, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#, path.join(" "), s.color);
        for (x, y) in &s.points {
            let _ = writeln!(body, r#"<circle cx="{}" cy="{}" r="3" fill="{}"/>"#, f(frame.px(*x)), f(frame.py(*y)), s.color);
        }
    }
    let entries: Vec<(&str, &str)> = series.iter().map(|s| (s.name.as_str(), s.color)).collect();
    legend(&mut body, 0.0, &entries);
    document(PANEL_HEIGHT, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(40.0), 10.0);
        assert_eq!(tick_label(-0.0000001, 0.2), "0.0");
        assert_eq!(tick_label(20.0, 10.0), "20");
    }

    #[test]
    fn scatter_contains_reference_line_and_markers() {
        let svg = scatter_identity(
            "t",
            "C",
            "K",
            &[Point { x: 0.2, y: 0.2, marker: Marker::Circle }, Point { x: 0.7, y: 0.7, marker: Marker::Cross }],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains(">C</text>") && svg.contains(">K</text>"));
    }

    #[test]
    fn bars_hang_below_zero() {
        let svg = grouped_bars(
            "position x",
            &[BarPanel { title: "diff".into(), y_label: "ΔP".into(), bars: vec![(0, -0.1, 0.2), (2, 0.0, 0.0)] }],
        );
        // two nonzero bars plus background and frame
        assert_eq!(svg.matches("<rect").count(), 2 + 2 + 2);
        assert!(svg.contains(RED) && svg.contains(BLUE));
    }

    #[test]
    fn empty_inputs_render() {
        assert!(line_plot("t", "x", "y", &[]).ends_with("</svg>\n"));
        assert!(grouped_bars("x", &[BarPanel { title: "e".into(), y_label: "y".into(), bars: vec![] }]).contains("</svg>"));
        assert!(scatter_identity("t", "x", "y", &[]).contains("</svg>"));
    }
}
