//! SVG rendering: positive intensities in red, negative in blue, stroke width
//! proportional to the absolute intensity. The potential mode fills every face
//! with a grey level given by its potential.

use std::fmt::Write as _;

use super::potential::potential;
use super::{Drawing, Point, TICKS};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RenderMode {
    #[default]
    Lines,
    Potential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgStyle {
    /// Width of the picture; the height follows the box aspect ratio.
    pub width: f64,
    /// Stroke width of the segment with the largest absolute intensity.
    pub max_stroke: f64,
    pub mode: RenderMode,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 800.0,
            max_stroke: 4.0,
            mode: RenderMode::Lines,
        }
    }
}

const RED: &str = "#d62728";
const BLUE: &str = "#1f4fd6";
const ZERO: &str = "#808080";

/// Deterministic SVG document. Fails only in potential mode, on drawings
/// violating Kirchhoff's law.
pub fn render_svg(d: &Drawing, style: &SvgStyle) -> Result<String> {
    let w = style.width;
    let h = w * d.b / d.a;
    let px = |p: Point| {
        (
            p.x as f64 / TICKS as f64 * w,
            h - p.y as f64 / TICKS as f64 * h,
        )
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );

    if style.mode == RenderMode::Potential {
        let map = potential(d)?;
        let (lo, hi) = map.min_max();
        let span = if hi > lo { hi - lo } else { 1.0 };
        for (i, face) in map.faces.faces.iter().enumerate() {
            let level = ((map.values[i] - lo) / span * 255.0).round() as u8;
            let mut path = String::new();
            for &c in &face.cycles {
                for (k, p) in map.faces.cycle_points(c).into_iter().enumerate() {
                    let (x, y) = px(p);
                    let _ = write!(path, "{}{x:.3},{y:.3} ", if k == 0 { 'M' } else { 'L' });
                }
                path.push_str("Z ");
            }
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="rgb({level},{level},{level})" fill-rule="evenodd" data-potential="{}"/>"#,
                path.trim_end(),
                map.values[i]
            );
        }
    }

    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let max_abs = d
        .segments
        .iter()
        .map(|s| d.charge_value(s.charge).abs())
        .fold(0.0f64, f64::max);
    for s in &d.segments {
        let v = d.charge_value(s.charge);
        let color = if v > 0.0 {
            RED
        } else if v < 0.0 {
            BLUE
        } else {
            ZERO
        };
        let width = if max_abs > 0.0 {
            (v.abs() / max_abs * style.max_stroke).max(0.1)
        } else {
            0.1
        };
        let (x1, y1) = px(s.from);
        let (x2, y2) = px(s.to);
        let _ = writeln!(
            out,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{color}" stroke-width="{width:.3}"/>"#
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::{Builder, Charge, ChargeKind, NodeKind};

    fn vertical(x: u64, s: f64) -> Drawing {
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Continuous);
        let ve = b.node(Point::new(x, 0), NodeKind::VE);
        let vs = b.node(Point::new(x, TICKS), NodeKind::VS);
        b.segment(ve, vs, Charge::Real(s)).unwrap();
        b.finish(Default::default(), 0)
    }

    #[test]
    fn empty_drawing_is_just_the_box() {
        let d = Drawing::empty(1.0, 2.0, ChargeKind::Continuous);
        let svg = render_svg(&d, &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1);
        assert!(!svg.contains("<line"));
    }

    #[test]
    fn positive_line_is_red() {
        let svg = render_svg(&vertical(TICKS / 3, 1.5), &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains(RED) && !svg.contains(BLUE));
    }

    #[test]
    fn potential_mode_fills_two_faces() {
        let d = vertical(TICKS / 2, 2.0);
        let style = SvgStyle {
            mode: RenderMode::Potential,
            ..SvgStyle::default()
        };
        let svg = render_svg(&d, &style).unwrap();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains(r#"data-potential="0""#));
        assert!(svg.contains(r#"data-potential="-2""#));
        assert!(svg.contains("rgb(255,255,255)") && svg.contains("rgb(0,0,0)"));
        assert_eq!(svg, render_svg(&d, &style).unwrap());
    }
}
