//! The drawing of a line system inside the box `[0,a] x [0,b]`.
//!
//! Geometry is exact: positions are integer ticks on a `2^48 x 2^48` grid
//! scaled to the box, so rotation, planarity checks and face areas never
//! depend on rounding.

mod faces;
mod io;
mod potential;
mod svg;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::rng::Seed;

pub use faces::{face_at, faces, Face, Faces};
pub use io::{deserialize, serialize};
pub use potential::{potential, potential_with_order, PotentialMap, TraversalOrder};
pub use svg::{render_svg, RenderMode, SvgStyle};

/// Ticks per box side.
pub const TICKS: u64 = 1 << 48;

/// Absolute tolerance of Kirchhoff's law for real intensities.
pub const KIRCHHOFF_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: u64,
    pub y: u64,
}

impl Point {
    pub const fn new(x: u64, y: u64) -> Self {
        Point { x, y }
    }

    pub fn rotated(self) -> Self {
        Point::new(TICKS - self.x, TICKS - self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// Compass direction of a node's adjacent segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    pub fn opposite(self) -> Dir {
        Dir::ALL[(self as usize + 2) % 4]
    }
}

/// Intensity carried by a segment. Lattice intensities are exact indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Charge {
    Real(f64),
    Lattice(i64),
}

impl Charge {
    pub fn value(self, step: f64) -> f64 {
        match self {
            Charge::Real(v) => v,
            Charge::Lattice(k) => k as f64 * step,
        }
    }
}

/// How intensities are stored in a drawing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChargeKind {
    Continuous,
    Lattice { step: f64 },
}

impl ChargeKind {
    pub fn step(self) -> f64 {
        match self {
            ChargeKind::Continuous => 1.0,
            ChargeKind::Lattice { step } => step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    /// South or west end.
    pub from: Point,
    /// North or east end.
    pub to: Point,
    pub orientation: Orientation,
    pub charge: Charge,
}

impl Segment {
    pub fn length_ticks(&self) -> u64 {
        (self.to.x - self.from.x) + (self.to.y - self.from.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    /// vertical entry on the south side
    VE,
    /// vertical exit on the north side
    VS,
    /// horizontal entry on the west side
    HE,
    /// horizontal exit on the east side
    HS,
    /// vertical line splits, a horizontal line starts east
    HB,
    /// horizontal line splits, a vertical line starts north
    VB,
    /// vertical line turns east
    HT,
    /// horizontal line turns north
    VT,
    /// horizontal line stops on a vertical one
    HA,
    /// vertical line stops on a horizontal one
    VA,
    /// crossing
    CC,
    /// spontaneous creation of a pair
    OB,
    /// double coalescence
    OA,
}

impl NodeKind {
    pub const ALL: [NodeKind; 13] = [
        NodeKind::VE,
        NodeKind::VS,
        NodeKind::HE,
        NodeKind::HS,
        NodeKind::HB,
        NodeKind::VB,
        NodeKind::HT,
        NodeKind::VT,
        NodeKind::HA,
        NodeKind::VA,
        NodeKind::CC,
        NodeKind::OB,
        NodeKind::OA,
    ];

    /// Adjacent directions, as a bitmask over `Dir`.
    pub fn pattern(self) -> u8 {
        const N: u8 = 1 << Dir::North as u8;
        const E: u8 = 1 << Dir::East as u8;
        const S: u8 = 1 << Dir::South as u8;
        const W: u8 = 1 << Dir::West as u8;
        match self {
            NodeKind::VE => N,
            NodeKind::VS => S,
            NodeKind::HE => E,
            NodeKind::HS => W,
            NodeKind::HB => S | N | E,
            NodeKind::HT => S | E,
            NodeKind::HA => W | S | N,
            NodeKind::VB => W | E | N,
            NodeKind::VT => W | N,
            NodeKind::VA => W | S | E,
            NodeKind::CC => N | E | S | W,
            NodeKind::OB => N | E,
            NodeKind::OA => S | W,
        }
    }

    pub fn degree(self) -> usize {
        self.pattern().count_ones() as usize
    }

    /// Kind of the node after a half-turn of the drawing.
    pub fn rotated(self) -> NodeKind {
        match self {
            NodeKind::VE => NodeKind::VS,
            NodeKind::VS => NodeKind::VE,
            NodeKind::HE => NodeKind::HS,
            NodeKind::HS => NodeKind::HE,
            NodeKind::HB => NodeKind::HA,
            NodeKind::HA => NodeKind::HB,
            NodeKind::VB => NodeKind::VA,
            NodeKind::VA => NodeKind::VB,
            NodeKind::HT => NodeKind::VT,
            NodeKind::VT => NodeKind::HT,
            NodeKind::CC => NodeKind::CC,
            NodeKind::OB => NodeKind::OA,
            NodeKind::OA => NodeKind::OB,
        }
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, NodeKind::VE | NodeKind::VS | NodeKind::HE | NodeKind::HS)
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::VE => "VE",
            NodeKind::VS => "VS",
            NodeKind::HE => "HE",
            NodeKind::HS => "HS",
            NodeKind::HB => "HB",
            NodeKind::VB => "VB",
            NodeKind::HT => "HT",
            NodeKind::VT => "VT",
            NodeKind::HA => "HA",
            NodeKind::VA => "VA",
            NodeKind::CC => "CC",
            NodeKind::OB => "OB",
            NodeKind::OA => "OA",
        }
    }

    /// Kind matching an adjacency mask at a position, if any.
    pub fn classify(mask: u8, at: Point) -> Option<NodeKind> {
        let kind = NodeKind::ALL.into_iter().find(|k| k.pattern() == mask)?;
        let on_side = match kind {
            NodeKind::VE => at.y == 0,
            NodeKind::VS => at.y == TICKS,
            NodeKind::HE => at.x == 0,
            NodeKind::HS => at.x == TICKS,
            _ => at.x > 0 && at.x < TICKS && at.y > 0 && at.y < TICKS,
        };
        on_side.then_some(kind)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NodeKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        NodeKind::ALL.into_iter().find(|k| k.name() == s).ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub pos: Point,
    pub kind: NodeKind,
    /// Adjacent segment per `Dir`.
    pub adj: [Option<usize>; 4],
}

impl Node {
    pub fn mask(&self) -> u8 {
        self.adj
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_some())
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// Node counts per kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Census(pub [usize; 13]);

impl Index<NodeKind> for Census {
    type Output = usize;
    fn index(&self, k: NodeKind) -> &usize {
        &self.0[k as usize]
    }
}

impl IndexMut<NodeKind> for Census {
    fn index_mut(&mut self, k: NodeKind) -> &mut usize {
        &mut self.0[k as usize]
    }
}

impl Census {
    /// The census of the half-turned drawing.
    pub fn rotated(&self) -> Census {
        let mut out = Census::default();
        for k in NodeKind::ALL {
            out[k.rotated()] = self[k];
        }
        out
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Right-hand side of the half-edge identity, which equals twice the
    /// number of segments.
    pub fn half_edges(&self) -> usize {
        NodeKind::ALL.into_iter().map(|k| k.degree() * self[k]).sum()
    }

    /// `(VE + VB + VT + OB, VS + VA + HT + OA)`; the two sides are equal.
    pub fn vertical_balance(&self) -> (usize, usize) {
        use NodeKind::*;
        (
            self[VE] + self[VB] + self[VT] + self[OB],
            self[VS] + self[VA] + self[HT] + self[OA],
        )
    }

    /// `(HE + HB + HT + OB, HS + HA + VT + OA)`; the two sides are equal.
    pub fn horizontal_balance(&self) -> (usize, usize) {
        use NodeKind::*;
        (
            self[HE] + self[HB] + self[HT] + self[OB],
            self[HS] + self[HA] + self[VT] + self[OA],
        )
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = NodeKind::ALL
            .into_iter()
            .filter(|k| self[*k] > 0)
            .map(|k| format!("{k}:{}", self[k]))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A simulated (or loaded) drawing.
#[derive(Clone, Debug, PartialEq)]
pub struct Drawing {
    pub a: f64,
    pub b: f64,
    pub charges: ChargeKind,
    pub seed: Seed,
    pub params_digest: u64,
    pub segments: Vec<Segment>,
    pub nodes: Vec<Node>,
    /// Notes about numerical corner cases met while building the drawing.
    pub diagnostics: Vec<String>,
}

impl Drawing {
    pub fn empty(a: f64, b: f64, charges: ChargeKind) -> Self {
        Drawing {
            a,
            b,
            charges,
            seed: Seed::default(),
            params_digest: 0,
            segments: Vec::new(),
            nodes: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn step(&self) -> f64 {
        self.charges.step()
    }

    pub fn x(&self, ticks: u64) -> f64 {
        ticks as f64 / TICKS as f64 * self.a
    }

    pub fn y(&self, ticks: u64) -> f64 {
        ticks as f64 / TICKS as f64 * self.b
    }

    pub fn real(&self, p: Point) -> (f64, f64) {
        (self.x(p.x), self.y(p.y))
    }

    /// Nearest tick to a real abscissa, clamped to the box.
    pub fn x_ticks(&self, x: f64) -> u64 {
        to_ticks(x / self.a)
    }

    pub fn y_ticks(&self, y: f64) -> u64 {
        to_ticks(y / self.b)
    }

    pub fn charge_value(&self, c: Charge) -> f64 {
        c.value(self.step())
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        let s = &self.segments[i];
        match s.orientation {
            Orientation::Vertical => self.y(s.to.y) - self.y(s.from.y),
            Orientation::Horizontal => self.x(s.to.x) - self.x(s.from.x),
        }
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segments.len()).map(|i| self.segment_length(i)).sum()
    }

    /// Kind counts, after checking every node's adjacency against its kind.
    pub fn classify_nodes(&self) -> Result<Census> {
        let mut census = Census::default();
        for (i, n) in self.nodes.iter().enumerate() {
            let kind = NodeKind::classify(n.mask(), n.pos).ok_or_else(|| {
                Error::MalformedDrawing(format!(
                    "node {i} at ({}, {}) has an adjacency pattern matching no kind",
                    n.pos.x, n.pos.y
                ))
            })?;
            if kind != n.kind {
                return Err(Error::MalformedDrawing(format!(
                    "node {i} is labelled {} but its adjacency is that of {kind}",
                    n.kind
                )));
            }
            census[kind] += 1;
        }
        Ok(census)
    }

    /// Census from the stored labels, without checks.
    pub fn census(&self) -> Census {
        let mut census = Census::default();
        for n in &self.nodes {
            census[n.kind] += 1;
        }
        census
    }

    /// `(s_S + s_W) - (s_N + s_E)` at a node, exact for lattice charges.
    pub fn kirchhoff_defect(&self, node: usize) -> Charge {
        let n = &self.nodes[node];
        let get = |d: Dir| n.adj[d as usize].map(|s| self.segments[s].charge);
        let terms = [
            (get(Dir::South), 1),
            (get(Dir::West), 1),
            (get(Dir::North), -1),
            (get(Dir::East), -1),
        ];
        match self.charges {
            ChargeKind::Lattice { .. } => Charge::Lattice(
                terms
                    .iter()
                    .filter_map(|(c, sign)| match c {
                        Some(Charge::Lattice(k)) => Some(k * sign),
                        _ => None,
                    })
                    .sum(),
            ),
            ChargeKind::Continuous => Charge::Real(
                terms
                    .iter()
                    .filter_map(|(c, sign)| c.map(|c| c.value(1.0) * *sign as f64))
                    .sum(),
            ),
        }
    }

    /// First internal node violating Kirchhoff's law, with its defect.
    pub fn kirchhoff_violation(&self) -> Option<(usize, f64)> {
        self.nodes.iter().enumerate().find_map(|(i, n)| {
            if n.kind.is_boundary() {
                return None;
            }
            let bad = match self.kirchhoff_defect(i) {
                Charge::Lattice(k) => k != 0,
                Charge::Real(d) => !(d.abs() <= KIRCHHOFF_TOLERANCE),
            };
            bad.then(|| (i, self.charge_value(self.kirchhoff_defect(i))))
        })
    }

    /// The drawing rotated by a half-turn about the box center.
    pub fn rotate180(&self) -> Drawing {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                from: s.to.rotated(),
                to: s.from.rotated(),
                ..*s
            })
            .collect();
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                pos: n.pos.rotated(),
                kind: n.kind.rotated(),
                adj: [n.adj[2], n.adj[3], n.adj[0], n.adj[1]],
            })
            .collect();
        Drawing {
            segments,
            nodes,
            ..self.clone()
        }
    }

    /// Full structural check: geometry, node kinds, Kirchhoff's law, the
    /// counting identities and planarity.
    pub fn verify(&self) -> Result<Census> {
        let malformed = |m: String| Err(Error::MalformedDrawing(m));
        if !(self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return malformed(format!("box {} x {} is not positive", self.a, self.b));
        }
        for (i, s) in self.segments.iter().enumerate() {
            let ok = match s.orientation {
                Orientation::Vertical => s.from.x == s.to.x && s.from.y < s.to.y,
                Orientation::Horizontal => s.from.y == s.to.y && s.from.x < s.to.x,
            };
            if !ok || s.to.x > TICKS || s.to.y > TICKS {
                return malformed(format!("segment {i} is not a positive axis-aligned piece"));
            }
            let kind_ok = match (s.charge, self.charges) {
                (Charge::Real(v), ChargeKind::Continuous) => v.is_finite(),
                (Charge::Lattice(_), ChargeKind::Lattice { .. }) => true,
                _ => false,
            };
            if !kind_ok {
                return malformed(format!("segment {i} has an intensity of the wrong kind"));
            }
        }
        let mut ends = vec![[None::<usize>; 2]; self.segments.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for d in Dir::ALL {
                let Some(s) = n.adj[d as usize] else { continue };
                let seg = self.segments.get(s).ok_or_else(|| {
                    Error::MalformedDrawing(format!("node {i} refers to missing segment {s}"))
                })?;
                let (end, expected_pos, orient) = match d {
                    Dir::North => (0, seg.from, Orientation::Vertical),
                    Dir::East => (0, seg.from, Orientation::Horizontal),
                    Dir::South => (1, seg.to, Orientation::Vertical),
                    Dir::West => (1, seg.to, Orientation::Horizontal),
                };
                if seg.orientation != orient || expected_pos != n.pos {
                    return malformed(format!("node {i} and segment {s} disagree on geometry"));
                }
                if ends[s][end].replace(i).is_some() {
                    return malformed(format!("segment {s} has two nodes at one end"));
                }
            }
        }
        if let Some(s) = ends.iter().position(|e| e[0].is_none() || e[1].is_none()) {
            return malformed(format!("segment {s} has a dangling end"));
        }
        let census = self.classify_nodes()?;
        if let Some((node, defect)) = self.kirchhoff_violation() {
            return malformed(format!(
                "Kirchhoff's law fails at node {node} (defect {defect})"
            ));
        }
        if census.half_edges() != 2 * self.segments.len() {
            return Err(Error::Consistency(format!(
                "half-edge identity fails: {} vs 2 x {}",
                census.half_edges(),
                self.segments.len()
            )));
        }
        let (v_in, v_out) = census.vertical_balance();
        let (h_in, h_out) = census.horizontal_balance();
        if v_in != v_out || h_in != h_out {
            return Err(Error::Consistency(format!(
                "line balance fails: vertical {v_in} vs {v_out}, horizontal {h_in} vs {h_out}"
            )));
        }
        self.check_planarity()?;
        Ok(census)
    }

    /// Segments may meet only at shared endpoints.
    pub fn check_planarity(&self) -> Result<()> {
        let mut vertical: Vec<&Segment> = Vec::new();
        let mut horizontal: Vec<&Segment> = Vec::new();
        for s in &self.segments {
            match s.orientation {
                Orientation::Vertical => vertical.push(s),
                Orientation::Horizontal => horizontal.push(s),
            }
        }
        vertical.sort_by_key(|s| (s.from.x, s.from.y));
        horizontal.sort_by_key(|s| (s.from.y, s.from.x));
        let overlap = |m: &str| Err(Error::MalformedDrawing(format!("overlapping {m} segments")));
        for w in vertical.windows(2) {
            if w[0].from.x == w[1].from.x && w[1].from.y < w[0].to.y {
                return overlap("vertical");
            }
        }
        for w in horizontal.windows(2) {
            if w[0].from.y == w[1].from.y && w[1].from.x < w[0].to.x {
                return overlap("horizontal");
            }
        }
        for h in &horizontal {
            let start = vertical.partition_point(|v| v.from.x < h.from.x);
            for v in vertical[start..].iter().take_while(|v| v.from.x <= h.to.x) {
                if v.from.y > h.from.y || v.to.y < h.from.y {
                    continue;
                }
                let at = Point::new(v.from.x, h.from.y);
                let h_end = at == h.from || at == h.to;
                let v_end = at == v.from || at == v.to;
                if !(h_end && v_end) {
                    return Err(Error::MalformedDrawing(format!(
                        "segments cross at ({}, {}) without a shared node",
                        at.x, at.y
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn to_ticks(fraction: f64) -> u64 {
    let t = (fraction * TICKS as f64).round();
    if t <= 0.0 {
        0
    } else if t >= TICKS as f64 {
        TICKS
    } else {
        t as u64
    }
}

/// Incremental construction of a drawing: nodes first, then segments joining
/// them.
#[derive(Debug)]
pub struct Builder {
    drawing: Drawing,
}

impl Builder {
    pub fn new(a: f64, b: f64, charges: ChargeKind) -> Self {
        Builder {
            drawing: Drawing::empty(a, b, charges),
        }
    }

    pub fn node(&mut self, pos: Point, kind: NodeKind) -> usize {
        self.drawing.nodes.push(Node {
            pos,
            kind,
            adj: [None; 4],
        });
        self.drawing.nodes.len() - 1
    }

    /// Joins two nodes on a common vertical or horizontal line.
    pub fn segment(&mut self, from: usize, to: usize, charge: Charge) -> Result<usize> {
        let (p, q) = (self.drawing.nodes[from].pos, self.drawing.nodes[to].pos);
        let (orientation, out_dir, in_dir) = if p.x == q.x && p.y < q.y {
            (Orientation::Vertical, Dir::North, Dir::South)
        } else if p.y == q.y && p.x < q.x {
            (Orientation::Horizontal, Dir::East, Dir::West)
        } else {
            return Err(Error::Consistency(format!(
                "cannot join ({}, {}) to ({}, {})",
                p.x, p.y, q.x, q.y
            )));
        };
        let id = self.drawing.segments.len();
        self.drawing.segments.push(Segment {
            from: p,
            to: q,
            orientation,
            charge,
        });
        self.drawing.nodes[from].adj[out_dir as usize] = Some(id);
        self.drawing.nodes[to].adj[in_dir as usize] = Some(id);
        Ok(id)
    }

    pub fn diagnostic(&mut self, note: String) {
        self.drawing.diagnostics.push(note);
    }

    pub fn finish(mut self, seed: Seed, params_digest: u64) -> Drawing {
        self.drawing.seed = seed;
        self.drawing.params_digest = params_digest;
        self.drawing
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// One vertical line at `x` and one horizontal line at `y`, crossing.
    pub fn cross(x: f64, y: f64, sv: f64, sh: f64) -> Drawing {
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Continuous);
        let (xt, yt) = (to_ticks(x), to_ticks(y));
        let ve = b.node(Point::new(xt, 0), NodeKind::VE);
        let vs = b.node(Point::new(xt, TICKS), NodeKind::VS);
        let he = b.node(Point::new(0, yt), NodeKind::HE);
        let hs = b.node(Point::new(TICKS, yt), NodeKind::HS);
        let cc = b.node(Point::new(xt, yt), NodeKind::CC);
        b.segment(ve, cc, Charge::Real(sv)).unwrap();
        b.segment(cc, vs, Charge::Real(sv)).unwrap();
        b.segment(he, cc, Charge::Real(sh)).unwrap();
        b.segment(cc, hs, Charge::Real(sh)).unwrap();
        b.finish(Seed::default(), 0)
    }

    #[test]
    fn crossing_census_and_rotation() {
        let d = cross(0.3, 0.6, 1.0, 2.0);
        let census = d.verify().unwrap();
        assert_eq!(census.to_string(), "{VE:1, VS:1, HE:1, HS:1, CC:1}");
        let r = d.rotate180();
        assert_eq!(r.verify().unwrap(), census.rotated());
        assert_eq!(r.rotate180(), d);
        assert!((r.x(r.segments[0].from.x) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn kirchhoff_violation_is_found() {
        let mut d = cross(0.5, 0.5, 1.0, 1.0);
        d.segments[1].charge = Charge::Real(1.5);
        let (node, defect) = d.kirchhoff_violation().unwrap();
        assert_eq!(d.nodes[node].kind, NodeKind::CC);
        assert!((defect + 0.5).abs() < 1e-15);
        assert!(matches!(d.verify(), Err(Error::MalformedDrawing(_))));
    }

    #[test]
    fn unregistered_crossing_is_not_planar() {
        let mut b = Builder::new(1.0, 1.0, ChargeKind::Continuous);
        let ve = b.node(Point::new(TICKS / 2, 0), NodeKind::VE);
        let vs = b.node(Point::new(TICKS / 2, TICKS), NodeKind::VS);
        let he = b.node(Point::new(0, TICKS / 2), NodeKind::HE);
        let hs = b.node(Point::new(TICKS, TICKS / 2), NodeKind::HS);
        b.segment(ve, vs, Charge::Real(1.0)).unwrap();
        b.segment(he, hs, Charge::Real(1.0)).unwrap();
        let d = b.finish(Seed::default(), 0);
        assert!(d.check_planarity().is_err());
    }

    #[test]
    fn rotation_table_is_an_involution() {
        for k in NodeKind::ALL {
            assert_eq!(k.rotated().rotated(), k);
            let rotated_mask = (0..4)
                .filter(|i| k.pattern() & (1 << i) != 0)
                .fold(0u8, |m, i| m | 1 << ((i + 2) % 4));
            assert_eq!(k.rotated().pattern(), rotated_mask, "{k}");
        }
    }
}
