//! Minimal deterministic SVG rendering of domains and overlays.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use circuma::{BoundaryComponent, DomainSpec, Result};

/// Extra geometry drawn over a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Overlay {
    /// A polygonal curve (stroked).
    Curve(Vec<Complex64>),
    /// A union of discs drawn translucent (a cigar).
    Discs(Vec<(Complex64, f64)>),
    /// A dashed reference circle.
    ControlCircle(Complex64, f64),
    Points(Vec<Complex64>),
}

const WIDTH: f64 = 600.0;

struct Frame {
    lo: Complex64,
    hi: Complex64,
    scale: f64,
}

impl Frame {
    fn x(&self, z: Complex64) -> f64 {
        (z.re - self.lo.re) * self.scale
    }
    fn y(&self, z: Complex64) -> f64 {
        (self.hi.im - z.im) * self.scale
    }
    fn pt(&self, z: Complex64) -> String {
        format!("{:.3},{:.3}", self.x(z), self.y(z))
    }
    fn len(&self, r: f64) -> f64 {
        r * self.scale
    }
}

fn bbox_of(points: impl Iterator<Item = Complex64>) -> Option<(Complex64, Complex64)> {
    points.fold(None, |acc, z| match acc {
        None => Some((z, z)),
        Some((lo, hi)) => Some((
            Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
            Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
        )),
    })
}

fn frame(dom: &DomainSpec, overlays: &[Overlay]) -> Frame {
    let mut pts: Vec<Complex64> = dom.components.iter().filter_map(|c| c.bbox()).flat_map(|(a, b)| [a, b]).collect();
    for o in overlays {
        match o {
            Overlay::Curve(v) | Overlay::Points(v) => pts.extend(v),
            Overlay::Discs(d) => pts.extend(d.iter().flat_map(|(c, r)| [c - Complex64::new(*r, *r), c + Complex64::new(*r, *r)])),
            Overlay::ControlCircle(c, r) => pts.extend([c - Complex64::new(*r, *r), c + Complex64::new(*r, *r)]),
        }
    }
    let (mut lo, mut hi) = bbox_of(pts.into_iter()).unwrap_or((Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0)));
    let pad = 0.1 * (hi - lo).norm().max(1.0);
    lo -= Complex64::new(pad, pad);
    hi += Complex64::new(pad, pad);
    Frame { lo, hi, scale: WIDTH / (hi.re - lo.re) }
}

/// Part of the window inside the closed half-plane `Re((z - p) conj(n)) <= 0`.
fn clip_halfplane(window: [Complex64; 4], p: Complex64, n: Complex64) -> Vec<Complex64> {
    let side = |z: Complex64| ((z - p) * n.conj()).re;
    let mut out = Vec::new();
    for k in 0..4 {
        let (a, b) = (window[k], window[(k + 1) % 4]);
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0) != (sb < 0.0) && sa != sb {
            out.push(a + (b - a) * (sa / (sa - sb)));
        }
    }
    out
}

fn component_path(c: &BoundaryComponent, f: &Frame) -> String {
    let poly = |pts: &[Complex64], close: bool| {
        let mut d = String::new();
        for (k, z) in pts.iter().enumerate() {
            write!(d, "{}{} ", if k == 0 { "M" } else { "L" }, f.pt(*z)).unwrap();
        }
        if close {
            d.push('Z');
        }
        d.trim_end().to_string()
    };
    match c {
        BoundaryComponent::Disc { cx, cy, r } => {
            let (a, b) = (Complex64::new(cx + r, *cy), Complex64::new(cx - r, *cy));
            let rr = f.len(*r);
            format!("M{} A{rr:.3},{rr:.3} 0 1 0 {} A{rr:.3},{rr:.3} 0 1 0 {} Z", f.pt(a), f.pt(b), f.pt(a))
        }
        BoundaryComponent::Segment { x1, y1, x2, y2 } => poly(&[Complex64::new(*x1, *y1), Complex64::new(*x2, *y2)], false),
        BoundaryComponent::Polyline { .. } => poly(&c.polygon(), true),
        BoundaryComponent::Point { x, y } => {
            let z = Complex64::new(*x, *y);
            let a = z + Complex64::new(3.0 / f.scale, 0.0);
            let b = z - Complex64::new(3.0 / f.scale, 0.0);
            format!("M{} A3,3 0 1 0 {} A3,3 0 1 0 {} Z", f.pt(a), f.pt(b), f.pt(a))
        }
        BoundaryComponent::Halfplane { px, py, nx, ny } => {
            let w = [f.lo, Complex64::new(f.hi.re, f.lo.im), f.hi, Complex64::new(f.lo.re, f.hi.im)];
            poly(&clip_halfplane(w, Complex64::new(*px, *py), Complex64::new(*nx, *ny)), true)
        }
    }
}

/// Render the domain's complementary components (filled) and the overlays.
pub fn render_svg(dom: &DomainSpec, overlays: &[Overlay]) -> String {
    let f = frame(dom, overlays);
    let height = (f.hi.im - f.lo.im) * f.scale;
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.3} {height:.3}\">"
    )
    .unwrap();
    writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{WIDTH:.3}\" height=\"{height:.3}\" fill=\"white\"/>").unwrap();
    for (i, c) in dom.components.iter().enumerate() {
        let d = component_path(c, &f);
        let stroke_only = matches!(c, BoundaryComponent::Segment { .. });
        let outer = dom.is_outer(i) && !matches!(c, BoundaryComponent::Halfplane { .. });
        let fill = if stroke_only || outer { "none" } else { "#8c8c8c" };
        let width = if stroke_only { 2.0 } else { 1.0 };
        writeln!(s, "<path d=\"{d}\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"{width}\"/>").unwrap();
    }
    for o in overlays {
        match o {
            Overlay::Curve(v) => {
                let pts: Vec<String> = v.iter().map(|z| f.pt(*z)).collect();
                writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>", pts.join(" ")).unwrap();
            }
            Overlay::Discs(d) => {
                writeln!(s, "<g fill=\"#2e86c1\" fill-opacity=\"0.15\" stroke=\"none\">").unwrap();
                for (c, r) in d {
                    writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\"/>", f.x(*c), f.y(*c), f.len(*r)).unwrap();
                }
                writeln!(s, "</g>").unwrap();
            }
            Overlay::ControlCircle(c, r) => {
                writeln!(
                    s,
                    "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>",
                    f.x(*c),
                    f.y(*c),
                    f.len(*r)
                )
                .unwrap();
            }
            Overlay::Points(v) => {
                for z in v {
                    writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2.5\" fill=\"#1e8449\"/>", f.x(*z), f.y(*z)).unwrap();
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, dom: &DomainSpec, overlays: &[Overlay]) -> Result<()> {
    std::fs::write(path, render_svg(dom, overlays))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom() -> DomainSpec {
        DomainSpec::new(
            "mixed",
            true,
            vec![
                BoundaryComponent::disc(0.0, 0.0, 1.0),
                BoundaryComponent::segment(2.0, 0.0, 3.0, 1.0),
                BoundaryComponent::point(-2.0, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn one_path_per_component() {
        let svg = render_svg(&dom(), &[]);
        assert_eq!(svg.matches("<path ").count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn overlays_are_drawn_and_output_is_deterministic() {
        let curve = Overlay::Curve(vec![Complex64::new(-3.0, 0.0), Complex64::new(0.0, 2.0)]);
        let a = render_svg(&dom(), &[curve.clone(), Overlay::ControlCircle(Complex64::new(0.0, 0.0), 3.0)]);
        let b = render_svg(&dom(), &[curve, Overlay::ControlCircle(Complex64::new(0.0, 0.0), 3.0)]);
        assert!(a.contains("<polyline") && a.contains("stroke-dasharray"));
        assert_eq!(a, b);
    }

    #[test]
    fn halfplane_is_clipped_to_the_window() {
        let hp = DomainSpec::new("upper", false, vec![BoundaryComponent::halfplane(0.0, 0.0, 0.0, 1.0)]).unwrap();
        let svg = render_svg(&hp, &[Overlay::Points(vec![Complex64::new(0.0, 1.0)])]);
        assert_eq!(svg.matches("<path ").count(), 1);
    }
}
