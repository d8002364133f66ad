//! Height function on the faces of a drawing.
//!
//! Crossing a segment from its right to its left (looking along the east or
//! north direction) raises the potential by the segment's intensity. Kirchhoff's
//! law at every internal node makes this well defined.

use std::collections::VecDeque;

use super::faces::{faces, EdgeRef, Faces};
use super::{Charge, ChargeKind, Drawing, Orientation, KIRCHHOFF_TOLERANCE};
use crate::error::{Error, Result};

/// Order in which neighbouring faces are explored. The result does not depend
/// on it for a valid drawing, which the tests exploit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraversalOrder {
    /// Cross vertical segments before horizontal ones.
    #[default]
    RowMajor,
    ColumnMajor,
}

#[derive(Clone, Debug)]
pub struct PotentialMap {
    pub faces: Faces,
    pub values: Vec<f64>,
    /// Exact values in units of the lattice step.
    pub indices: Option<Vec<i128>>,
}

impl PotentialMap {
    pub fn value(&self, face: usize) -> f64 {
        self.values[face]
    }

    pub fn at(&self, d: &Drawing, x: f64, y: f64) -> f64 {
        self.values[super::face_at(d, &self.faces, x, y)]
    }

    /// Potential sampled at `n` evenly spaced points of the horizontal line
    /// at height `y`, cell midpoints.
    pub fn horizontal_transect(&self, d: &Drawing, y: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.at(d, d.a * (i as f64 + 0.5) / n as f64, y))
            .collect()
    }

    pub fn vertical_transect(&self, d: &Drawing, x: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.at(d, x, d.b * (i as f64 + 0.5) / n as f64))
            .collect()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

pub fn potential(d: &Drawing) -> Result<PotentialMap> {
    potential_with_order(d, TraversalOrder::default())
}

pub fn potential_with_order(d: &Drawing, order: TraversalOrder) -> Result<PotentialMap> {
    if let Some((node, defect)) = d.kirchhoff_violation() {
        return Err(Error::InconsistentPotential {
            node,
            detail: format!("Kirchhoff defect {defect}"),
        });
    }
    let f = faces(d);
    let lattice = matches!(d.charges, ChargeKind::Lattice { .. });

    // (neighbour, segment, increment sign) per face, ordered as requested
    let mut adj: Vec<Vec<(usize, usize, i8)>> = vec![Vec::new(); f.len()];
    for i in 0..d.segments.len() {
        let (right, left) = f.sides(i);
        if left == right {
            // both sides in one face: crossing it would be a loop
            continue;
        }
        adj[right].push((left, i, 1));
        adj[left].push((right, i, -1));
    }
    let rank = |seg: usize| {
        let vertical = d.segments[seg].orientation == Orientation::Vertical;
        match order {
            TraversalOrder::RowMajor => !vertical,
            TraversalOrder::ColumnMajor => vertical,
        }
    };
    for list in &mut adj {
        list.sort_by_key(|&(_, seg, _)| (rank(seg), seg));
    }

    let mut exact: Vec<Option<i128>> = vec![None; f.len()];
    let mut real: Vec<Option<f64>> = vec![None; f.len()];
    let mut queue = VecDeque::from([f.base]);
    exact[f.base] = Some(0);
    real[f.base] = Some(0.0);
    let tol = KIRCHHOFF_TOLERANCE * (1.0 + d.segments.len() as f64);
    while let Some(face) = queue.pop_front() {
        for &(next, seg, sign) in &adj[face] {
            let charge = d.segments[seg].charge;
            let node = match f.half_edges[2 * seg].edge {
                EdgeRef::Segment(_) => f.half_edges[2 * seg].origin,
                EdgeRef::Side(_) => unreachable!(),
            };
            let conflict = |detail: String| Error::InconsistentPotential { node, detail };
            if lattice {
                let k = match charge {
                    Charge::Lattice(k) => k as i128,
                    Charge::Real(_) => return Err(conflict("real charge in a lattice drawing".into())),
                };
                let v = exact[face].expect("visited") + sign as i128 * k;
                match exact[next] {
                    None => {
                        exact[next] = Some(v);
                        queue.push_back(next);
                    }
                    Some(w) if w != v => {
                        return Err(conflict(format!("face {next} reached with {w} and {v}")))
                    }
                    _ => {}
                }
            } else {
                let v = real[face].expect("visited") + f64::from(sign) * charge.value(1.0);
                match real[next] {
                    None => {
                        real[next] = Some(v);
                        queue.push_back(next);
                    }
                    Some(w) if !((w - v).abs() <= tol * (1.0 + v.abs())) => {
                        return Err(conflict(format!("face {next} reached with {w} and {v}")))
                    }
                    _ => {}
                }
            }
        }
    }

    let step = d.step();
    let (values, indices) = if lattice {
        let idx: Vec<i128> = exact
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::Consistency("unreachable face".into())))
            .collect::<Result<_>>()?;
        (idx.iter().map(|&k| k as f64 * step).collect(), Some(idx))
    } else {
        let vals = real
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::Consistency("unreachable face".into())))
            .collect::<Result<_>>()?;
        (vals, None)
    };
    Ok(PotentialMap {
        faces: f,
        values,
        indices,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::cross;
    use super::*;
    use crate::drawing::{Builder, NodeKind, Point, TICKS};

    #[test]
    fn cross_potential() {
        let d = cross(0.5, 0.5, 1.0, 2.0);
        let p = potential(&d).unwrap();
        // west of the vertical line is higher by 1, north of the horizontal by 2
        assert_eq!(p.at(&d, 0.25, 0.25), 0.0);
        assert_eq!(p.at(&d, 0.75, 0.25), -1.0);
        assert_eq!(p.at(&d, 0.25, 0.75), 2.0);
        assert_eq!(p.at(&d, 0.75, 0.75), 1.0);
        let q = potential_with_order(&d, TraversalOrder::ColumnMajor).unwrap();
        assert_eq!(p.values, q.values);
    }

    #[test]
    fn broken_kirchhoff_is_reported_at_its_node() {
        let mut d = cross(0.5, 0.5, 1.0, 2.0);
        d.segments[3].charge = Charge::Real(2.5);
        match potential(&d) {
            Err(Error::InconsistentPotential { node, .. }) => assert_eq!(node, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn floating_component_is_exact() {
        let q = TICKS / 4;
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Lattice { step: 0.5 });
        let ob = b.node(Point::new(q, q), NodeKind::OB);
        let ht = b.node(Point::new(q, 3 * q), NodeKind::HT);
        let vt = b.node(Point::new(3 * q, q), NodeKind::VT);
        let oa = b.node(Point::new(3 * q, 3 * q), NodeKind::OA);
        b.segment(ob, ht, Charge::Lattice(-3)).unwrap();
        b.segment(ob, vt, Charge::Lattice(3)).unwrap();
        b.segment(ht, oa, Charge::Lattice(-3)).unwrap();
        b.segment(vt, oa, Charge::Lattice(3)).unwrap();
        let d = b.finish(Default::default(), 0);
        let p = potential(&d).unwrap();
        assert_eq!(p.at(&d, 0.1, 0.1), 0.0);
        // entering across the southern edge: +3 steps
        assert_eq!(p.at(&d, 0.5, 0.5), 1.5);
        assert_eq!(p.indices.as_ref().unwrap().iter().max(), Some(&3));
    }
}
