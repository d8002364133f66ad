//! Export of Bernoulli grid drawings as six-vertex configurations.
//!
//! Arrows: a horizontal edge points east when its intensity is the "up" value
//! of the horizontal measure (1 for both variants), otherwise west; a vertical
//! edge points north when its intensity is the "up" value of the vertical
//! measure (1 for `BerBer`, 0 for `NegBerBer`), otherwise south. With these
//! choices every crossing has two incoming and two outgoing arrows.
//!
//! Vertex types, by (west, east, south, north) arrows:
//!
//! | type | W | E | S | N |
//! |------|---|---|---|---|
//! | 1    | → | → | ↑ | ↑ |
//! | 2    | ← | ← | ↓ | ↓ |
//! | 3    | → | → | ↓ | ↓ |
//! | 4    | ← | ← | ↑ | ↑ |
//! | 5    | → | ← | ↓ | ↑ |
//! | 6    | ← | → | ↑ | ↓ |

use serde::Serialize;

use crate::drawing::{Charge, Dir, Drawing, NodeKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SixVertexVariant {
    /// `ν_V = Ber(qv)`, `ν_H = Ber(qh)`
    BerBer { qv: f64, qh: f64 },
    /// `ν_V = -Ber(qv)`, `ν_H = Ber(qh)`
    NegBerBer { qv: f64, qh: f64 },
}

impl SixVertexVariant {
    fn vertical_support(self) -> [i64; 2] {
        match self {
            SixVertexVariant::BerBer { .. } => [0, 1],
            SixVertexVariant::NegBerBer { .. } => [-1, 0],
        }
    }

    fn vertical_up(self) -> i64 {
        match self {
            SixVertexVariant::BerBer { .. } => 1,
            SixVertexVariant::NegBerBer { .. } => 0,
        }
    }

    fn nu_v(self, v: i64) -> f64 {
        match self {
            SixVertexVariant::BerBer { qv, .. } => if v == 1 { qv } else { 1.0 - qv },
            SixVertexVariant::NegBerBer { qv, .. } => if v == -1 { qv } else { 1.0 - qv },
        }
    }

    fn nu_h(self, h: i64) -> f64 {
        let qh = match self {
            SixVertexVariant::BerBer { qh, .. } | SixVertexVariant::NegBerBer { qh, .. } => qh,
        };
        if h == 1 {
            qh
        } else {
            1.0 - qh
        }
    }

    /// Vertex weights `w1..w6`.
    pub fn weights(self) -> [f64; 6] {
        match self {
            SixVertexVariant::BerBer { qv, qh } => {
                let w = qv + qh - 2.0 * qv * qh;
                let a = qh * (1.0 - qv);
                let b = qv * (1.0 - qh);
                [w, w, a, b, b, a]
            }
            SixVertexVariant::NegBerBer { qv, qh } => {
                let w = 1.0 - qv - qh + 2.0 * qv * qh;
                let a = qv * qh;
                let b = (1.0 - qv) * (1.0 - qh);
                [w, w, a, b, b, a]
            }
        }
    }

    /// Type (1 to 6) of a crossing with incoming `(sv, sh)` and outgoing
    /// `(nv, nh)`; `None` off the supports or when the ice rule fails.
    pub fn vertex_type(self, sv: i64, sh: i64, nv: i64, nh: i64) -> Option<u8> {
        let vs = self.vertical_support();
        if !vs.contains(&sv) || !vs.contains(&nv) || !(0..=1).contains(&sh) || !(0..=1).contains(&nh) {
            return None;
        }
        let up = self.vertical_up();
        let arrows = (sh == 1, nh == 1, sv == up, nv == up);
        Some(match arrows {
            (true, true, true, true) => 1,
            (false, false, false, false) => 2,
            (true, true, false, false) => 3,
            (false, false, true, true) => 4,
            (true, false, false, true) => 5,
            (false, true, true, false) => 6,
            _ => return None,
        })
    }
}

/// Vertex types on the grid of crossings, rows from south to north and
/// columns from west to east.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SixVertexConfig {
    pub variant: SixVertexVariant,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Vec<u8>>,
    pub weights: [f64; 6],
}

impl SixVertexConfig {
    pub fn counts(&self) -> [usize; 6] {
        let mut c = [0; 6];
        for t in self.cells.iter().flatten() {
            c[usize::from(*t) - 1] += 1;
        }
        c
    }

    /// One line per row, north first, type digits separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.cells.iter().rev() {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn index(d: &Drawing, c: Charge) -> Result<i64> {
    match c {
        Charge::Lattice(k) => Ok(k),
        Charge::Real(v) if v.fract() == 0.0 => Ok(v as i64),
        Charge::Real(v) => Err(Error::Precondition(format!(
            "intensity {} is not an integer",
            d.charge_value(Charge::Real(v))
        ))),
    }
}

/// Reads the drawing as a six-vertex configuration. Every internal node must
/// be a plain crossing, and every intensity must lie in the variant's support.
pub fn six_vertex_export(d: &Drawing, variant: SixVertexVariant) -> Result<SixVertexConfig> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut crossings = Vec::new();
    for (i, n) in d.nodes.iter().enumerate() {
        if n.kind.is_boundary() {
            continue;
        }
        if n.kind != NodeKind::CC {
            return Err(Error::Precondition(format!(
                "node {i} at ({}, {}) is {}, only crossings map to six-vertex configurations",
                d.x(n.pos.x),
                d.y(n.pos.y),
                n.kind
            )));
        }
        xs.push(n.pos.x);
        ys.push(n.pos.y);
        crossings.push(i);
    }
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    if xs.len() * ys.len() != crossings.len() {
        return Err(Error::Precondition("crossings do not form a full grid".into()));
    }
    let mut cells = vec![vec![0u8; xs.len()]; ys.len()];
    for i in crossings {
        let n = &d.nodes[i];
        let charge = |dir: Dir| -> Result<i64> {
            let seg = n.adj[dir as usize].ok_or_else(|| Error::Consistency(format!("crossing {i} lacks an edge")))?;
            index(d, d.segments[seg].charge)
        };
        let (sv, sh, nv, nh) = (charge(Dir::South)?, charge(Dir::West)?, charge(Dir::North)?, charge(Dir::East)?);
        let t = variant.vertex_type(sv, sh, nv, nh).ok_or_else(|| {
            Error::Precondition(format!(
                "crossing {i} has intensities in ({sv}, {sh}) out ({nv}, {nh}), outside the {variant:?} supports"
            ))
        })?;
        let r = ys.binary_search(&n.pos.y).expect("collected");
        let c = xs.binary_search(&n.pos.x).expect("collected");
        cells[r][c] = t;
    }
    Ok(SixVertexConfig {
        variant,
        rows: ys.len(),
        cols: xs.len(),
        cells,
        weights: variant.weights(),
    })
}

/// Law of the type of one crossing when the incoming intensities are
/// independent with laws `ν_V`, `ν_H` and the outgoing pair follows the
/// crossing kernel: `P = ν_V(sv) ν_H(sh) ν_V(nv) ν_H(nh) / G(sv + sh)`.
pub fn six_vertex_local_law(variant: SixVertexVariant) -> [f64; 6] {
    let vs = variant.vertical_support();
    let g = |s: i64| -> f64 {
        vs.iter()
            .map(|&v| variant.nu_v(v) * if (0..=1).contains(&(s - v)) { variant.nu_h(s - v) } else { 0.0 })
            .sum()
    };
    let mut law = [0.0; 6];
    for &sv in &vs {
        for sh in 0..=1 {
            for &nv in &vs {
                for nh in 0..=1 {
                    if sv + sh != nv + nh {
                        continue;
                    }
                    let p = variant.nu_v(sv) * variant.nu_h(sh) * variant.nu_v(nv) * variant.nu_h(nh)
                        / g(sv + sh);
                    let t = variant.vertex_type(sv, sh, nv, nh).expect("ice rule");
                    law[usize::from(t) - 1] += p;
                }
            }
        }
    }
    law
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::tests::cross;
    use crate::drawing::{Builder, ChargeKind, Point, TICKS};

    fn lattice_cross(sv: i64, sh: i64) -> Drawing {
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Lattice { step: 1.0 });
        let m = TICKS / 2;
        let ve = b.node(Point::new(m, 0), NodeKind::VE);
        let vs = b.node(Point::new(m, TICKS), NodeKind::VS);
        let he = b.node(Point::new(0, m), NodeKind::HE);
        let hs = b.node(Point::new(TICKS, m), NodeKind::HS);
        let cc = b.node(Point::new(m, m), NodeKind::CC);
        b.segment(ve, cc, Charge::Lattice(sv)).unwrap();
        b.segment(cc, vs, Charge::Lattice(sv)).unwrap();
        b.segment(he, cc, Charge::Lattice(sh)).unwrap();
        b.segment(cc, hs, Charge::Lattice(sh)).unwrap();
        b.finish(Default::default(), 0)
    }

    #[test]
    fn all_zero_crossing_is_type_two() {
        let v = SixVertexVariant::BerBer { qv: 0.3, qh: 0.6 };
        let c = six_vertex_export(&lattice_cross(0, 0), v).unwrap();
        assert_eq!(c.cells, vec![vec![2]]);
        assert_eq!(six_vertex_export(&lattice_cross(1, 1), v).unwrap().cells, vec![vec![1]]);
    }

    #[test]
    fn neg_ber_ber_weights() {
        let v = SixVertexVariant::NegBerBer { qv: 0.3, qh: 0.6 };
        let w = v.weights();
        assert!((w[2] - 0.18).abs() < 1e-15);
        assert_eq!(w[2], w[5]);
        assert!((w[0] - (1.0 - 0.3 - 0.6 + 2.0 * 0.18)).abs() < 1e-15);
    }

    #[test]
    fn empty_drawing_gives_empty_grid() {
        let d = Drawing::empty(2.0, 1.0, ChargeKind::Lattice { step: 1.0 });
        let c = six_vertex_export(&d, SixVertexVariant::BerBer { qv: 0.5, qh: 0.5 }).unwrap();
        assert_eq!((c.rows, c.cols), (0, 0));
        assert!(c.cells.is_empty());
    }

    #[test]
    fn off_support_intensity_is_a_precondition_error() {
        let d = cross(0.5, 0.5, 2.0, 0.0);
        let r = six_vertex_export(&d, SixVertexVariant::BerBer { qv: 0.5, qh: 0.5 });
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn local_law_matches_weight_ratios() {
        for v in [
            SixVertexVariant::BerBer { qv: 0.3, qh: 0.6 },
            SixVertexVariant::NegBerBer { qv: 0.3, qh: 0.6 },
        ] {
            let law = six_vertex_local_law(v);
            let w = v.weights();
            assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            // types 3 and 5 share their incoming pair, as do 4 and 6
            assert!((law[2] / law[4] - w[2] / w[4]).abs() < 1e-12);
            assert!((law[3] / law[5] - w[3] / w[5]).abs() < 1e-12);
        }
    }
}
