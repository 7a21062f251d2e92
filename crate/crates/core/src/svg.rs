//! Static SVG 1.1 drawing of a horizontal foliation.
//!
//! The disk `|z| ≤ R` (`R` the escape radius used for tracing) is drawn with
//! the radial compression `r ↦ R·(r/(r+s))·((R+s)/R)`, `s = 1 + max|αᵢ|`,
//! which fixes the boundary circle and enlarges the region around the zeros.

use std::fmt::Write;

use num_complex::Complex;

use crate::cluster::triangulation::Triangulation;
use crate::foliation::{TraceParams, TrajectoryStructure};
use crate::polynomial::Polynomial;
use crate::scalar::Real;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const TICK: f64 = 10.0;

struct Frame {
    radius: f64,
    soft: f64,
    pixels_per_unit: f64,
}

impl Frame {
    fn place(&self, z: Complex<f64>) -> (f64, f64) {
        let r = z.norm();
        let w = if r > 0.0 {
            z * (self.radius * (r / (r + self.soft)) * ((self.radius + self.soft) / self.radius) / r)
        } else {
            z
        };
        let c = SIZE / 2.0;
        (c + w.re * self.pixels_per_unit, c - w.im * self.pixels_per_unit)
    }

    fn boundary(&self, theta: f64, extra_pixels: f64) -> (f64, f64) {
        let c = SIZE / 2.0;
        let r = self.radius * self.pixels_per_unit + extra_pixels;
        (c + r * theta.cos(), c - r * theta.sin())
    }
}

/// Zeros as `×`, marked directions as ticks on the boundary circle,
/// separatrices as solid curves and WKB arcs as dotted chords.
pub fn foliation_svg<T: Real>(
    p: &Polynomial<T>,
    structure: &TrajectoryStructure<T>,
    wkb: Option<&Triangulation>,
) -> String {
    let params = TraceParams::for_polynomial(p);
    let radius = params.escape_radius.to_f64_lossy();
    let frame = Frame {
        radius,
        soft: 1.0 + p.roots().max_modulus().to_f64_lossy(),
        pixels_per_unit: (SIZE / 2.0 - MARGIN) / radius,
    };
    let m = p.marked_points();
    let direction = |k: usize| std::f64::consts::TAU * k as f64 / m as f64;

    let mut out = String::new();
    let _ = writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(
        out,
        r##"<circle cx="{c:.2}" cy="{c:.2}" r="{r:.2}" fill="none" stroke="#999999" stroke-width="1"/>"##,
        c = SIZE / 2.0,
        r = radius * frame.pixels_per_unit
    );

    if let Some(t) = wkb {
        let _ = writeln!(out, r##"<g id="wkb-arcs" stroke="#1f5fbf" stroke-width="1.5" stroke-dasharray="2 4" fill="none">"##);
        for arc in t.sorted_arcs() {
            let (x1, y1) = frame.boundary(direction(arc.a), 0.0);
            let (x2, y2) = frame.boundary(direction(arc.b), 0.0);
            let _ = writeln!(out, r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"##);
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r##"<g id="separatrices" stroke="black" stroke-width="1.2" fill="none">"##);
    for tr in structure.trajectories() {
        let mut d = String::new();
        for z in tr.points.iter().map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())) {
            if z.norm() > radius {
                break;
            }
            let (x, y) = frame.place(z);
            let _ = write!(d, "{}{x:.2} {y:.2}", if d.is_empty() { "M" } else { " L" });
        }
        if !d.is_empty() {
            let _ = writeln!(out, r##"<path d="{d}"/>"##);
        }
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g id="marked-points" stroke="#444444" stroke-width="2" font-family="sans-serif" font-size="12">"##);
    for k in 0..m {
        let theta = direction(k);
        let (x1, y1) = frame.boundary(theta, -TICK / 2.0);
        let (x2, y2) = frame.boundary(theta, TICK / 2.0);
        let (lx, ly) = frame.boundary(theta, 2.0 * TICK);
        let _ = writeln!(out, r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"##);
        let _ = writeln!(
            out,
            r##"<text x="{lx:.2}" y="{ly:.2}" stroke="none" fill="#444444" text-anchor="middle" dominant-baseline="middle">{k}</text>"##
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g id="zeros" stroke="#c0392b" stroke-width="2">"##);
    for z in &p.roots().roots {
        let (x, y) = frame.place(Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()));
        let h = 5.0;
        let _ = writeln!(
            out,
            r##"<path d="M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}"/>"##,
            x - h,
            y - h,
            x + h,
            y + h,
            x - h,
            y + h,
            x + h,
            y - h
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{classify, wkb_from_structure};

    #[test]
    fn draws_every_element() {
        let p = Polynomial::from_coefficients(2, vec![Complex::new(0.3, -0.2), Complex::new(0.5, 0.4)]).unwrap();
        let s = classify(&p).unwrap();
        let t = wkb_from_structure(&p, &s).unwrap();
        let svg = foliation_svg(&p, &s, Some(&t));
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<path d=\"M").count(), 9 + 3);
        assert_eq!(svg.matches("<text").count(), 5);
        assert_eq!(svg.matches("<line").count(), 5 + 2);
        assert_eq!(svg, foliation_svg(&p, &s, Some(&t)));
    }
}
