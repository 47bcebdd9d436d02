//! Static SVG figures: one Bloch-sphere panel per qubit followed by the
//! complex-concurrence plane.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use num_complex::Complex64;

use super::coords::CoordinateSet;

/// Markers closer than this (in pixels) are drawn as one halo group.
const COINCIDENT_PX: f64 = 3.0;
/// Offset of a marker from its halo center.
const HALO_OFFSET_PX: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// Side length of each square panel, in pixels.
    pub panel_size: f64,
    /// Viewer azimuth about the z axis.
    pub azimuth: f64,
    /// Viewer elevation above the equator.
    pub elevation: f64,
    pub title: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            panel_size: 240.0,
            azimuth: PI / 6.0,
            elevation: PI / 9.0,
            title: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Circle,
    Square,
    Triangle,
    Diamond,
}

fn shape_for(label: &str) -> Shape {
    match label {
        "c13" => Shape::Square,
        "c23" => Shape::Triangle,
        "c123" => Shape::Diamond,
        _ => Shape::Circle,
    }
}

fn color_for(label: &str) -> &'static str {
    match label {
        "c12" => "#1f77b4",
        "c13" => "#2ca02c",
        "c23" => "#d62728",
        "c123" => "#9467bd",
        _ => "#1f77b4",
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Orthographic camera for the sphere panels.
struct Camera {
    right: [f64; 3],
    up: [f64; 3],
}

impl Camera {
    fn new(azimuth: f64, elevation: f64) -> Self {
        let (sa, ca) = azimuth.sin_cos();
        let (se, ce) = elevation.sin_cos();
        Camera {
            right: [-sa, ca, 0.0],
            up: [-se * ca, -se * sa, ce],
        }
    }

    /// Screen offset (x right, y down) of a point on or in the unit ball.
    fn project(&self, p: [f64; 3], radius: f64) -> (f64, f64) {
        let dot = |v: [f64; 3]| v[0] * p[0] + v[1] * p[1] + v[2] * p[2];
        (radius * dot(self.right), -radius * dot(self.up))
    }
}

fn great_circle_path(cam: &Camera, cx: f64, cy: f64, r: f64, a: [f64; 3], b: [f64; 3]) -> String {
    let mut d = String::new();
    for k in 0..=64 {
        let t = TAU * k as f64 / 64.0;
        let (s, c) = t.sin_cos();
        let (x, y) = cam.project([c * a[0] + s * b[0], c * a[1] + s * b[1], c * a[2] + s * b[2]], r);
        let _ = write!(d, "{}{:.3},{:.3}", if k == 0 { "M" } else { " L" }, cx + x, cy + y);
    }
    d.push_str(" Z");
    d
}

fn sphere_panel(out: &mut String, cs: &CoordinateSet, q: usize, x0: f64, opts: &RenderOptions) {
    let size = opts.panel_size;
    let (cx, cy) = (x0 + size / 2.0, size / 2.0 + 10.0);
    let r = size * 0.38;
    let cam = Camera::new(opts.azimuth, opts.elevation);
    let _ = writeln!(out, r#"<g class="sphere" id="qubit{}">"#, q + 1);
    let _ = writeln!(
        out,
        r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="none" stroke="#444" stroke-width="1"/>"##
    );
    let equator = great_circle_path(&cam, cx, cy, r, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let meridian = great_circle_path(&cam, cx, cy, r, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
    let _ = writeln!(
        out,
        r##"<path class="equator" d="{equator}" fill="none" stroke="#999" stroke-width="0.8"/>"##
    );
    let _ = writeln!(
        out,
        r##"<path class="meridian" d="{meridian}" fill="none" stroke="#999" stroke-width="0.8" stroke-dasharray="3,2"/>"##
    );
    for (name, axis) in [("x", [1.0, 0.0, 0.0]), ("y", [0.0, 1.0, 0.0]), ("z", [0.0, 0.0, 1.0])] {
        let (ax, ay) = cam.project(axis, r);
        let _ = writeln!(
            out,
            r##"<line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#666" stroke-width="0.8"/>"##,
            cx - ax,
            cy - ay,
            cx + ax,
            cy + ay
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="middle">{name}</text>"#,
            cx + 1.12 * ax,
            cy + 1.12 * ay + 4.0
        );
    }
    let b = cs.bloch[q];
    let (px, py) = cam.project(b.as_array(), r);
    let _ = writeln!(
        out,
        r##"<line class="bloch-vector" x1="{cx:.3}" y1="{cy:.3}" x2="{:.3}" y2="{:.3}" stroke="#c03" stroke-width="1.5"/>"##,
        cx + px,
        cy + py
    );
    let _ = writeln!(
        out,
        r##"<circle class="bloch-point" cx="{:.3}" cy="{:.3}" r="4" fill="#c03" data-x="{:.6}" data-y="{:.6}" data-z="{:.6}"/>"##,
        cx + px,
        cy + py,
        tidy(b.x),
        tidy(b.y),
        tidy(b.z)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="13" text-anchor="middle">&#961;{}</text>"#,
        cx,
        size + 4.0,
        q + 1
    );
    out.push_str("</g>\n");
}

/// Drops the sign of values that print as zero.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-7 {
        0.0
    } else {
        x
    }
}

fn marker(out: &mut String, label: &str, x: f64, y: f64, z: Complex64) {
    let color = color_for(label);
    let data = format!(
        r#"class="marker" data-label="{label}" data-re="{:.6}" data-im="{:.6}""#,
        tidy(z.re),
        tidy(z.im)
    );
    let _ = match shape_for(label) {
        Shape::Circle => writeln!(out, r#"<circle {data} cx="{x:.3}" cy="{y:.3}" r="5" fill="{color}"/>"#),
        Shape::Square => writeln!(
            out,
            r#"<rect {data} x="{:.3}" y="{:.3}" width="9" height="9" fill="{color}"/>"#,
            x - 4.5,
            y - 4.5
        ),
        Shape::Triangle => writeln!(
            out,
            r#"<polygon {data} points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="{color}"/>"#,
            x,
            y - 6.0,
            x - 5.5,
            y + 4.0,
            x + 5.5,
            y + 4.0
        ),
        Shape::Diamond => writeln!(
            out,
            r#"<polygon {data} points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="{color}"/>"#,
            x,
            y - 6.0,
            x + 6.0,
            y,
            x,
            y + 6.0,
            x - 6.0,
            y
        ),
    };
}

/// Group markers whose screen positions coincide.
fn clusters(points: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let hit = groups.iter_mut().find(|g| {
            let q = points[g[0]];
            (p.0 - q.0).hypot(p.1 - q.1) < COINCIDENT_PX
        });
        match hit {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

fn plane_panel(out: &mut String, cs: &CoordinateSet, x0: f64, opts: &RenderOptions) {
    let size = opts.panel_size;
    let (cx, cy) = (x0 + size / 2.0, size / 2.0 + 10.0);
    let r = size * 0.38;
    out.push_str("<g class=\"concurrence-plane\">\n");
    let _ = writeln!(
        out,
        r##"<circle class="unit-circle" cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="none" stroke="#444" stroke-width="1"/>"##
    );
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="{:.3}" y1="{cy:.3}" x2="{:.3}" y2="{cy:.3}" stroke="#666" stroke-width="0.8"/>"##,
        cx - 1.15 * r,
        cx + 1.15 * r
    );
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="{cx:.3}" y1="{:.3}" x2="{cx:.3}" y2="{:.3}" stroke="#666" stroke-width="0.8"/>"##,
        cy - 1.15 * r,
        cy + 1.15 * r
    );
    for (text, dx, dy) in [("1", 1.0, 0.0), ("-1", -1.0, 0.0), ("i", 0.0, -1.0), ("-i", 0.0, 1.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="10">{text}</text>"#,
            cx + dx * r + 3.0,
            cy + dy * r - 3.0
        );
    }

    let values = cs.labeled_concurrences();
    let screen: Vec<(f64, f64)> = values.iter().map(|(_, z)| (cx + r * z.re, cy - r * z.im)).collect();
    for group in clusters(&screen) {
        let (hx, hy) = screen[group[0]];
        if group.len() == 1 {
            let (label, z) = values[group[0]];
            marker(out, label, hx, hy, z);
            continue;
        }
        let members: Vec<&str> = group.iter().map(|&i| values[i].0).collect();
        let _ = writeln!(
            out,
            r##"<circle class="halo" cx="{hx:.3}" cy="{hy:.3}" r="{:.3}" fill="none" stroke="#888" stroke-dasharray="2,2" data-members="{}"/>"##,
            HALO_OFFSET_PX + 7.0,
            members.join(" ")
        );
        for (k, &i) in group.iter().enumerate() {
            let angle = PI / 2.0 + TAU * k as f64 / group.len() as f64;
            let (label, z) = values[i];
            marker(
                out,
                label,
                hx + HALO_OFFSET_PX * angle.cos(),
                hy - HALO_OFFSET_PX * angle.sin(),
                z,
            );
        }
    }

    for (k, (label, z)) in values.iter().enumerate() {
        let ly = size + 10.0 + 16.0 * k as f64;
        marker(out, label, x0 + 16.0, ly, *z);
        let _ = writeln!(
            out,
            r#"<text class="legend" x="{:.3}" y="{:.3}" font-size="11">{label} = {:.3} {} {:.3}i</text>"#,
            x0 + 28.0,
            ly + 4.0,
            tidy(z.re),
            if tidy(z.im) < 0.0 { '-' } else { '+' },
            tidy(z.im).abs()
        );
    }
    out.push_str("</g>\n");
}

/// Render a coordinate payload. Equal inputs give byte-identical output.
pub fn render_figure(cs: &CoordinateSet, opts: &RenderOptions) -> String {
    let size = opts.panel_size;
    let panels = cs.num_qubits + 1;
    let width = size * panels as f64;
    let height = size + 20.0 + 16.0 * cs.labeled_concurrences().len().max(1) as f64;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(title) = &opts.title {
        let _ = writeln!(out, "<title>{}</title>", escape(title));
    }
    for q in 0..cs.num_qubits {
        sphere_panel(&mut out, cs, q, size * q as f64, opts);
    }
    plane_panel(&mut out, cs, size * cs.num_qubits as f64, opts);
    out.push_str("</svg>\n");
    out
}
