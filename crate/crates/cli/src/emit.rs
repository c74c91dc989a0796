//! Deterministic SVG and CSV renderings.
//!
//! Coordinates are converted to `f64` only for drawing and always printed
//! with three decimals, so output bytes depend on the input alone.

use std::fmt::Write as _;

use anyhow::Result;
use skein_core::skein::{DistanceSession, SkeinTruncation, ThreadingSpace};
use skein_core::{Rational, Thread};

type Pt = (f64, f64);

fn f(x: f64) -> String {
    // Avoid "-0.000".
    let s = format!("{x:.3}");
    if s == "-0.000" { "0.000".into() } else { s }
}

fn header(w: u32, h: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <style>.segment{{fill:none;stroke:#222;stroke-width:2}}.width{{stroke:#888;stroke-dasharray:4 3}}\
         .anchor{{fill:#b22}}.point{{fill:#246}}text{{font:12px sans-serif}}</style>\n"
    )
}

/// The closed pieces of `[0, l]` left after removing the gaps, as `[from, to]`.
fn pieces(t: &Thread) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    let mut start = Rational::zero();
    for g in t.gaps() {
        out.push((start, g.left().clone()));
        start = g.right().clone();
    }
    out.push((start, t.length().clone()));
    out
}

fn polyline(points: &[Pt], class: &str) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", f(*x), f(*y))).collect();
    format!("<polyline class=\"{class}\" points=\"{}\"/>\n", pts.join(" "))
}

/// Samples of `curve` over `[a, b]` (a single point when `a == b`).
fn sample(curve: &dyn Fn(f64) -> Pt, a: f64, b: f64) -> Vec<Pt> {
    let n = (((b - a) * 48.0).ceil() as usize).max(1);
    (0..=n).map(|i| curve(a + (b - a) * i as f64 / n as f64)).collect()
}

fn draw_curve(out: &mut String, t: &Thread, curve: &dyn Fn(f64) -> Pt) {
    let l = t.length().to_f64();
    for (a, b) in pieces(t) {
        let (a, b) = (a.to_f64() / l, b.to_f64() / l);
        if a == b {
            let (x, y) = curve(a);
            let _ = writeln!(out, "<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"1.5\"/>", f(x), f(y));
        } else {
            out.push_str(&polyline(&sample(curve, a, b), "segment"));
        }
    }
}

/// A thread as a 270° arc: gaps are omitted arc pieces, the ends are
/// labeled and joined by a dashed chord marked with the width.
pub fn thread_svg(t: &Thread) -> String {
    let (cx, cy, r) = (200.0, 200.0, 150.0);
    let start = 135f64.to_radians();
    let arc = move |s: f64| {
        let th = start + s * 270f64.to_radians();
        (cx + r * th.cos(), cy + r * th.sin())
    };
    let mut out = header(400, 400);
    draw_curve(&mut out, t, &arc);
    let (p0, p1) = (arc(0.0), arc(1.0));
    let _ = writeln!(
        out,
        "<line class=\"width\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        f(p0.0),
        f(p0.1),
        f(p1.0),
        f(p1.1)
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">0</text>", f(p0.0 - 14.0), f(p0.1 + 16.0));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", f(p1.0 + 6.0), f(p1.1 + 16.0), t.length());
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">a = {}</text>", f(cx - 24.0), f(p0.1 + 18.0), t.width());
    out.push_str("</svg>\n");
    out
}

fn bezier(p: Pt, c: Pt, q: Pt) -> impl Fn(f64) -> Pt {
    move |s| {
        let u = 1.0 - s;
        (u * u * p.0 + 2.0 * u * s * c.0 + s * s * q.0, u * u * p.1 + 2.0 * u * s * c.1 + s * s * q.1)
    }
}

/// Control point bulging off the chord `p q` by `bulge` times its length.
fn control(p: Pt, q: Pt, bulge: f64) -> Pt {
    let (mx, my) = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    (mx - dy * bulge, my + dx * bulge)
}

fn anchor(out: &mut String, p: Pt, label: &str) {
    let _ = writeln!(out, "<circle class=\"anchor\" cx=\"{}\" cy=\"{}\" r=\"4\"/>", f(p.0), f(p.1));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{label}</text>", f(p.0 - 4.0), f(p.1 - 8.0));
}

fn bulge(i: usize) -> f64 {
    let mag = 0.12 + 0.1 * (i / 2) as f64;
    if i.is_multiple_of(2) { -mag } else { mag }
}

/// Threads of a threading space as a bundle of curves between `A` and `B`.
pub fn threading_svg(ts: &ThreadingSpace) -> String {
    let (a, b) = ((80.0, 200.0), (520.0, 200.0));
    let mut out = header(600, 400);
    for (i, (gid, t)) in ts.threads().iter().enumerate() {
        let c = control(a, b, bulge(i));
        let curve = bezier(a, c, b);
        out.push_str(&format!("<g class=\"thread\" data-gamma=\"{gid}\">\n"));
        draw_curve(&mut out, t, &curve);
        out.push_str("</g>\n");
    }
    anchor(&mut out, a, "A");
    anchor(&mut out, b, "B");
    let _ = writeln!(out, "<text x=\"270\" y=\"390\">d(A,B) = {}</text>", ts.width());
    out.push_str("</svg>\n");
    out
}

/// A truncation with each thread drawn between the drawn positions of its anchors.
pub fn skein_svg(tr: &SkeinTruncation) -> String {
    let mut pos: Vec<Option<Pt>> = vec![None; tr.len()];
    pos[0] = Some((100.0, 300.0));
    pos[1] = Some((500.0, 300.0));
    let mut out = header(600, 600);
    for (i, t) in tr.threads().iter().enumerate() {
        let (p, q) = (pos[t.lower].expect("anchors precede"), pos[t.upper].expect("anchors precede"));
        let depth = tr.order_of(t.points[1.min(t.points.len() - 1)]);
        let scale = if depth <= 1 { 1.0 } else { 0.6 };
        let curve = bezier(p, control(p, q, bulge(i) * scale), q);
        out.push_str(&format!("<g class=\"thread\" data-order=\"{depth}\">\n"));
        draw_curve(&mut out, &t.thread, &curve);
        out.push_str("</g>\n");
        for &id in &t.points {
            if pos[id].is_none() {
                if let Some((_, _, _, c)) = tr.parents(id) {
                    pos[id] = Some(curve(c.to_f64()));
                }
            }
        }
    }
    anchor(&mut out, pos[0].expect("A"), "A");
    anchor(&mut out, pos[1].expect("B"), "B");
    out.push_str("</svg>\n");
    out
}

fn csv_matrix(labels: &[String], d: impl Fn(usize, usize) -> Rational) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut head = vec![String::new()];
    head.extend(labels.iter().cloned());
    w.write_record(&head)?;
    for i in 0..labels.len() {
        let mut row = vec![labels[i].clone()];
        row.extend((0..labels.len()).map(|j| d(i, j).to_string()));
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Distance matrix over the thread sampled at `step` (plus ends and gap endpoints).
pub fn thread_csv(t: &Thread, step: &Rational) -> Result<String> {
    let pts = t.sample_points(step);
    let labels: Vec<String> = pts.iter().map(ToString::to_string).collect();
    csv_matrix(&labels, |i, j| t.metric(&pts[i], &pts[j]))
}

/// Distance matrix over every materialized point, labeled by address.
pub fn skein_csv(tr: &SkeinTruncation) -> Result<String> {
    let labels: Vec<String> = tr.points().iter().map(|p| p.address.clone()).collect();
    let mut s = DistanceSession::new(tr);
    let table: Vec<Vec<Rational>> = (0..tr.len()).map(|i| (0..tr.len()).map(|j| s.distance(i, j)).collect()).collect();
    csv_matrix(&labels, |i, j| table[i][j].clone())
}
