//! Planar subdivision of the box by the segments of a drawing.
//!
//! Faces are traced on a half-edge structure whose vertices are the nodes and
//! the four box corners. Box sides carry a single counter-clockwise half-edge,
//! so every traced cycle of positive area is the outer boundary of a face and
//! every cycle of negative area is the outline of a component floating inside
//! some face (lines born and annihilated in the interior). Such holes are
//! attached to their face by casting a ray westward.

use super::{Drawing, Orientation, Point, TICKS};

// traversal directions, counter-clockwise
const E: usize = 0;
const N: usize = 1;
const W: usize = 2;
const S: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EdgeRef {
    Segment(usize),
    Side(usize),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct HalfEdge {
    pub origin: usize,
    pub target: usize,
    pub dir: usize,
    pub edge: EdgeRef,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Area in box units.
    pub area: f64,
    /// Area in squared ticks, exact.
    pub area_ticks: i128,
    /// Vertex visits along the boundary (outer outline and holes), box
    /// corners included, `s_F`.
    pub nodes: usize,
    /// Node visits at which the boundary turns by a right angle, `c_F`.
    pub corners: usize,
    pub touches_north: bool,
    pub touches_east: bool,
    pub touches_south: bool,
    pub touches_west: bool,
    /// Lowest, then leftmost, vertex of the outer boundary.
    pub anchor: Point,
    /// Ids of the boundary cycles, outer outline first.
    pub cycles: Vec<usize>,
}

impl Face {
    pub fn touches_box(&self) -> bool {
        self.touches_north || self.touches_east || self.touches_south || self.touches_west
    }
}

/// Faces of a drawing together with the incidence data used to walk them.
#[derive(Clone, Debug)]
pub struct Faces {
    pub faces: Vec<Face>,
    pub(crate) half_edges: Vec<HalfEdge>,
    pub(crate) cycle_of: Vec<usize>,
    pub(crate) face_of_cycle: Vec<usize>,
    /// Face containing the box corner `(0, 0)`.
    pub base: usize,
    positions: Vec<Point>,
    cycles: Vec<Vec<usize>>,
    /// (x, y_lo, y_hi, southward half-edge), sorted by x
    verticals: Vec<(u64, u64, u64, usize)>,
}

impl Faces {
    /// Faces on the west/east side of a vertical segment, or south/north side
    /// of a horizontal one: `(right, left)` of its forward half-edge.
    pub fn sides(&self, segment: usize) -> (usize, usize) {
        let left = self.face_of_cycle[self.cycle_of[2 * segment]];
        let right = self.face_of_cycle[self.cycle_of[2 * segment + 1]];
        (right, left)
    }

    /// Face containing the point `(x2 / 2, y2 / 2)` given in half-ticks; the
    /// point must not lie on a segment.
    pub(crate) fn locate_half(&self, x2: u128, y2: u128) -> usize {
        let mut best: Option<(u64, usize)> = None;
        for &(x, lo, hi, h) in &self.verticals {
            if 2 * x as u128 >= x2 {
                break;
            }
            if 2 * lo as u128 <= y2 && y2 <= 2 * hi as u128 {
                best = Some((x, h));
            }
        }
        let (_, h) = best.expect("the west side of the box is always hit");
        self.face_of_cycle[self.cycle_of[h]]
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Vertices of a boundary cycle in traversal order.
    pub(crate) fn cycle_points(&self, cycle: usize) -> Vec<Point> {
        self.cycles[cycle]
            .iter()
            .map(|&h| self.positions[self.half_edges[h].origin])
            .collect()
    }
}

/// Computes the planar subdivision of the box.
pub fn faces(d: &Drawing) -> Faces {
    let n_nodes = d.nodes.len();
    let corners = [
        Point::new(0, 0),
        Point::new(TICKS, 0),
        Point::new(TICKS, TICKS),
        Point::new(0, TICKS),
    ];
    let mut positions: Vec<Point> = d.nodes.iter().map(|n| n.pos).collect();
    positions.extend(corners);
    let corner_id = |c: usize| n_nodes + c;

    let mut half_edges = Vec::with_capacity(2 * d.segments.len() + 4 + n_nodes);
    let mut endpoints = vec![(usize::MAX, usize::MAX); d.segments.len()];
    for (i, n) in d.nodes.iter().enumerate() {
        // adjacency is indexed N, E, S, W; segments leave northward or eastward
        for (k, adj) in n.adj.iter().enumerate() {
            if let Some(s) = *adj {
                if k < 2 {
                    endpoints[s].0 = i;
                } else {
                    endpoints[s].1 = i;
                }
            }
        }
    }
    for (i, s) in d.segments.iter().enumerate() {
        let (from, to) = endpoints[i];
        let (fwd, back) = match s.orientation {
            Orientation::Vertical => (N, S),
            Orientation::Horizontal => (E, W),
        };
        half_edges.push(HalfEdge {
            origin: from,
            target: to,
            dir: fwd,
            edge: EdgeRef::Segment(i),
        });
        half_edges.push(HalfEdge {
            origin: to,
            target: from,
            dir: back,
            edge: EdgeRef::Segment(i),
        });
    }

    // box sides, counter-clockwise: south going east, east going north, ...
    let mut sides: [Vec<usize>; 4] = Default::default();
    for (i, n) in d.nodes.iter().enumerate() {
        match n.kind {
            super::NodeKind::VE => sides[0].push(i),
            super::NodeKind::HS => sides[1].push(i),
            super::NodeKind::VS => sides[2].push(i),
            super::NodeKind::HE => sides[3].push(i),
            _ => {}
        }
    }
    sides[0].sort_by_key(|&v| positions[v].x);
    sides[1].sort_by_key(|&v| positions[v].y);
    sides[2].sort_by_key(|&v| std::cmp::Reverse(positions[v].x));
    sides[3].sort_by_key(|&v| std::cmp::Reverse(positions[v].y));
    for (side, dir) in [(0, E), (1, N), (2, W), (3, S)] {
        let mut chain = vec![corner_id(side)];
        chain.extend(&sides[side]);
        chain.push(corner_id((side + 1) % 4));
        for w in chain.windows(2) {
            half_edges.push(HalfEdge {
                origin: w[0],
                target: w[1],
                dir,
                edge: EdgeRef::Side(side),
            });
        }
    }

    let n_vertices = positions.len();
    let mut out = vec![[usize::MAX; 4]; n_vertices];
    for (h, e) in half_edges.iter().enumerate() {
        out[e.origin][e.dir] = h;
    }

    // trace cycles with the face kept on the left
    let mut cycle_of = vec![usize::MAX; half_edges.len()];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..half_edges.len() {
        if cycle_of[start] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            cycle_of[h] = id;
            cycle.push(h);
            let e = half_edges[h];
            let next = [(e.dir + 1) % 4, e.dir, (e.dir + 3) % 4, (e.dir + 2) % 4]
                .into_iter()
                .map(|t| out[e.target][t])
                .find(|&x| x != usize::MAX)
                .expect("every vertex has an outgoing half-edge");
            if next == start {
                break;
            }
            h = next;
        }
        cycles.push(cycle);
    }

    let area2 = |cycle: &[usize]| -> i128 {
        cycle
            .iter()
            .map(|&h| {
                let (p, q) = (
                    positions[half_edges[h].origin],
                    positions[half_edges[h].target],
                );
                p.x as i128 * q.y as i128 - q.x as i128 * p.y as i128
            })
            .sum()
    };

    let mut face_of_cycle = vec![usize::MAX; cycles.len()];
    let mut faces_out: Vec<Face> = Vec::new();
    let mut holes = Vec::new();
    let mut areas = Vec::with_capacity(cycles.len());
    for (c, cycle) in cycles.iter().enumerate() {
        let a2 = area2(cycle);
        areas.push(a2);
        if a2 > 0 {
            face_of_cycle[c] = faces_out.len();
            let anchor = cycle
                .iter()
                .map(|&h| positions[half_edges[h].origin])
                .min_by_key(|p| (p.y, p.x))
                .expect("non-empty cycle");
            faces_out.push(Face {
                area: 0.0,
                area_ticks: 0,
                nodes: 0,
                corners: 0,
                touches_north: false,
                touches_east: false,
                touches_south: false,
                touches_west: false,
                anchor,
                cycles: vec![c],
            });
        } else {
            holes.push(c);
        }
    }

    let mut verticals: Vec<(u64, u64, u64, usize)> = half_edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.dir == S)
        .map(|(h, e)| {
            let (p, q) = (positions[e.origin], positions[e.target]);
            (p.x, q.y, p.y, h)
        })
        .collect();
    verticals.sort_unstable();

    let mut faces = Faces {
        faces: faces_out,
        half_edges,
        cycle_of,
        face_of_cycle,
        base: 0,
        positions,
        cycles: Vec::new(),
        verticals,
    };

    // attach holes, resolving nested ones on demand
    let mut pending = holes.clone();
    while !pending.is_empty() {
        let mut progressed = false;
        pending.retain(|&c| {
            let anchor = cycles[c]
                .iter()
                .map(|&h| faces.positions[faces.half_edges[h].origin])
                .min_by_key(|p| (p.x, p.y))
                .expect("non-empty cycle");
            let host_cycle = locate_cycle(&faces, 2 * anchor.x as u128 - 1, 2 * anchor.y as u128 + 1);
            let host = faces.face_of_cycle[host_cycle];
            if host == usize::MAX {
                return true;
            }
            faces.face_of_cycle[c] = host;
            progressed = true;
            false
        });
        assert!(progressed, "hole nesting must resolve");
    }
    for &c in &holes {
        let f = faces.face_of_cycle[c];
        faces.faces[f].cycles.push(c);
    }

    let unit = d.a * d.b / (TICKS as f64 * TICKS as f64);
    for f in &mut faces.faces {
        let mut a2 = 0i128;
        for &c in &f.cycles {
            a2 += areas[c];
            for (k, &h) in cycles[c].iter().enumerate() {
                let e = faces.half_edges[h];
                if let EdgeRef::Side(side) = e.edge {
                    match side {
                        0 => f.touches_south = true,
                        1 => f.touches_east = true,
                        2 => f.touches_north = true,
                        _ => f.touches_west = true,
                    }
                }
                // box corners count as boundary nodes, and always turn
                f.nodes += 1;
                let next = faces.half_edges[cycles[c][(k + 1) % cycles[c].len()]];
                if next.dir != e.dir {
                    f.corners += 1;
                }
            }
        }
        f.area_ticks = a2 / 2;
        f.area = (a2 as f64 / 2.0) * unit;
    }
    // the south side's first piece leaves the origin going east
    let first_side = faces
        .half_edges
        .iter()
        .position(|e| e.edge == EdgeRef::Side(0))
        .expect("box sides exist");
    faces.base = faces.face_of_cycle[faces.cycle_of[first_side]];
    faces.cycles = cycles;
    faces
}

fn locate_cycle(faces: &Faces, x2: u128, y2: u128) -> usize {
    let mut best: Option<usize> = None;
    for &(x, lo, hi, h) in &faces.verticals {
        if 2 * x as u128 >= x2 {
            break;
        }
        if 2 * lo as u128 <= y2 && y2 <= 2 * hi as u128 {
            best = Some(h);
        }
    }
    faces.cycle_of[best.expect("the west side of the box is always hit")]
}

/// Face containing the real point `(x, y)`; points on segments resolve to an
/// adjacent face.
pub fn face_at(d: &Drawing, faces: &Faces, x: f64, y: f64) -> usize {
    let x2 = (2.0 * x / d.a * TICKS as f64).round().clamp(1.0, 2.0 * TICKS as f64) as u128;
    let mut y2 = (2.0 * y / d.b * TICKS as f64).round().clamp(1.0, 2.0 * TICKS as f64 - 1.0) as u128;
    if y2 % 2 == 0 {
        y2 += 1;
    }
    faces.locate_half(x2 | 1, y2)
}

#[cfg(test)]
mod tests {
    use super::super::tests::cross;
    use super::super::*;
    use super::*;

    #[test]
    fn empty_box_is_one_face() {
        let d = Drawing::empty(2.0, 3.0, ChargeKind::Continuous);
        let f = faces(&d);
        assert_eq!(f.len(), 1);
        assert!((f.faces[0].area - 6.0).abs() < 1e-12);
        assert_eq!((f.faces[0].nodes, f.faces[0].corners), (4, 4));
        assert!(f.faces[0].touches_box());
    }

    #[test]
    fn cross_has_four_quadrants() {
        let d = cross(0.25, 0.5, 1.0, 1.0);
        let f = faces(&d);
        assert_eq!(f.len(), 4);
        let total: i128 = f.faces.iter().map(|x| x.area_ticks).sum();
        assert_eq!(total, (TICKS as i128) * (TICKS as i128));
        for face in &f.faces {
            // box corner, crossing, two entry/exit nodes
            assert_eq!(face.nodes, 4, "{face:?}");
            assert_eq!(face.corners, 4);
        }
        let base = &f.faces[f.base];
        assert!((base.area - 0.125).abs() < 1e-12);
        assert_eq!(face_at(&d, &f, 0.1, 0.1), f.base);
        assert_ne!(face_at(&d, &f, 0.9, 0.1), f.base);
    }

    #[test]
    fn floating_square_is_a_hole() {
        // OB at (1/4,1/4), two lines meeting at OA (3/4,3/4) through HT/VT turns
        let q = TICKS / 4;
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Lattice { step: 1.0 });
        let ob = b.node(Point::new(q, q), NodeKind::OB);
        let ht = b.node(Point::new(q, 3 * q), NodeKind::HT);
        let vt = b.node(Point::new(3 * q, q), NodeKind::VT);
        let oa = b.node(Point::new(3 * q, 3 * q), NodeKind::OA);
        b.segment(ob, ht, Charge::Lattice(-1)).unwrap();
        b.segment(ob, vt, Charge::Lattice(1)).unwrap();
        b.segment(ht, oa, Charge::Lattice(-1)).unwrap();
        b.segment(vt, oa, Charge::Lattice(1)).unwrap();
        let d = b.finish(Default::default(), 0);
        d.verify().unwrap();
        let f = faces(&d);
        assert_eq!(f.len(), 2);
        let outer = &f.faces[f.base];
        assert!((outer.area - 0.75).abs() < 1e-12);
        assert_eq!(outer.cycles.len(), 2);
        assert_eq!(outer.nodes, 8);
        assert_eq!(face_at(&d, &f, 0.5, 0.5), 1 - f.base);
        assert_eq!(f.faces[1 - f.base].corners, 4);
    }

    #[test]
    fn two_by_two_grid_has_nine_faces() {
        let mut b = Builder::new(3.0, 3.0, ChargeKind::Continuous);
        let t = |k: u64| k * TICKS / 3;
        let mut grid = [[0usize; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                grid[i][j] = b.node(Point::new(t(i as u64 + 1), t(j as u64 + 1)), NodeKind::CC);
            }
        }
        for i in 0..2 {
            let ve = b.node(Point::new(t(i as u64 + 1), 0), NodeKind::VE);
            let vs = b.node(Point::new(t(i as u64 + 1), TICKS), NodeKind::VS);
            b.segment(ve, grid[i][0], Charge::Real(1.0)).unwrap();
            b.segment(grid[i][0], grid[i][1], Charge::Real(1.0)).unwrap();
            b.segment(grid[i][1], vs, Charge::Real(1.0)).unwrap();
            let he = b.node(Point::new(0, t(i as u64 + 1)), NodeKind::HE);
            let hs = b.node(Point::new(TICKS, t(i as u64 + 1)), NodeKind::HS);
            b.segment(he, grid[0][i], Charge::Real(1.0)).unwrap();
            b.segment(grid[0][i], grid[1][i], Charge::Real(1.0)).unwrap();
            b.segment(grid[1][i], hs, Charge::Real(1.0)).unwrap();
        }
        let d = b.finish(Default::default(), 0);
        d.verify().unwrap();
        let f = faces(&d);
        assert_eq!(f.len(), 9);
        let total: f64 = f.faces.iter().map(|x| x.area).sum();
        assert!((total - 9.0).abs() < 1e-9);
        let inner: Vec<_> = f.faces.iter().filter(|x| !x.touches_box()).collect();
        assert_eq!(inner.len(), 1);
        assert_eq!((inner[0].nodes, inner[0].corners), (4, 4));
    }
}
