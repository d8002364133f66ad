//! Sampling one realization on `[0,a] × [0,b]`.
//!
//! The box is swept upward, `y` playing the role of time. Vertical lines are
//! particles ordered by abscissa, each carrying one exponential clock for its
//! split and turn events. Horizontal lines are created by entries on the west
//! side, by spontaneous births, or by vertical splits and turns; each one is
//! propagated eastward at once, which is exact because its own children start
//! behind its front.
//!
//! Positions live on an integer lattice of [`TICKS`] steps per side so that
//! node coordinates compare exactly. A waiting distance `d` becomes
//! `max(1, round(d · TICKS / side))` ticks. At most one horizontal line is
//! drawn per tick row; an event landing on an already processed row is moved
//! to the next one. Both adjustments are of order `2^-48` relative.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::drawing::{Builder, Charge, ChargeKind, Drawing, NodeKind, Point, TICKS};
use crate::error::{Error, Result};
use crate::measures::{
    split_rate_horizontal, split_rate_vertical, turn_rate_horizontal, turn_rate_vertical,
    LatticeKernel, MeasureKind, PksParams,
};
use crate::rng::Seed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationOptions {
    /// Multiplies the vertical turn rate. Anything but 1 simulates a wrong
    /// model; the statistical suite uses it to check that it has power.
    pub vertical_turn_factor: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            vertical_turn_factor: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// South side, vertical entries.
    X,
    /// West side, horizontal entries.
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryAtom {
    pub axis: Axis,
    pub coordinate: f64,
    pub intensity: Charge,
}

/// Spontaneous birth at `(x, y)`: a horizontal line of `intensity` and a
/// vertical line of its opposite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpontaneousAtom {
    pub x: f64,
    pub y: f64,
    pub intensity: Charge,
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let law = Poisson::new(mean)
        .map_err(|e| Error::Parameter(format!("Poisson mean {mean}: {e}")))?;
    Ok(law.sample(rng) as u64)
}

fn draw_intensity<R: Rng + ?Sized>(nu: &crate::measures::IntensityMeasure, rng: &mut R) -> Charge {
    match nu.kind() {
        MeasureKind::Continuous => Charge::Real(nu.sample(rng)),
        MeasureKind::Lattice => Charge::Lattice(nu.sample_index(rng)),
    }
}

/// Entry atoms on the south (`X`) and west (`Y`) sides.
pub fn sample_boundary<R: Rng + ?Sized>(
    params: &PksParams,
    a: f64,
    b: f64,
    rng: &mut R,
) -> Result<(Vec<BoundaryAtom>, Vec<BoundaryAtom>)> {
    check_box(a, b)?;
    let mut side = |axis, len: f64, nu: &crate::measures::IntensityMeasure| -> Result<Vec<BoundaryAtom>> {
        let n = poisson_count(len * nu.mass(), rng)?;
        Ok((0..n)
            .map(|_| {
                let coordinate = len * rng.gen::<f64>();
                BoundaryAtom {
                    axis,
                    coordinate,
                    intensity: draw_intensity(nu, rng),
                }
            })
            .collect())
    };
    let xs = side(Axis::X, a, params.nu_v())?;
    let ys = side(Axis::Y, b, params.nu_h())?;
    Ok((xs, ys))
}

/// Spontaneous births: a Poisson process of rate `p_0 G(0)` on the box, each
/// carrying a horizontal share drawn from the crossing kernel at total 0.
pub fn sample_spontaneous<R: Rng + ?Sized>(
    params: &PksParams,
    a: f64,
    b: f64,
    rng: &mut R,
) -> Result<Vec<SpontaneousAtom>> {
    check_box(a, b)?;
    if params.p0() == 0.0 {
        return Ok(Vec::new());
    }
    if params.kind() == MeasureKind::Continuous {
        return Err(Error::Parameter(
            "p_0 > 0 requires lattice intensity measures".into(),
        ));
    }
    let g0 = params.convolution_index(0);
    let n = poisson_count(a * b * params.p0() * g0, rng)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let law = params.kernel_index(0)?;
    Ok((0..n)
        .map(|_| {
            let x = a * rng.gen::<f64>();
            let y = b * rng.gen::<f64>();
            SpontaneousAtom {
                x,
                y,
                intensity: Charge::Lattice(law.sample(rng)),
            }
        })
        .collect())
}

fn check_box(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("box {a} x {b} must have positive finite sides")))
    }
}

pub fn simulate(params: &PksParams, a: f64, b: f64, seed: Seed) -> Result<Drawing> {
    simulate_with(params, a, b, seed, &SimulationOptions::default())
}

/// Samples one drawing. The result is a pure function of the arguments.
pub fn simulate_with(
    params: &PksParams,
    a: f64,
    b: f64,
    seed: Seed,
    options: &SimulationOptions,
) -> Result<Drawing> {
    check_box(a, b)?;
    params.check()?;
    let mut rng = seed.rng();
    let (xs, ys) = sample_boundary(params, a, b, &mut rng)?;
    let births = sample_spontaneous(params, a, b, &mut rng)?;
    let mut st = SweepState::new(params, a, b, *options);
    for atom in &xs {
        st.add_vertical_entry(atom.coordinate, atom.intensity, &mut rng)?;
    }
    let mut rows = std::collections::HashSet::new();
    for atom in &ys {
        let y = free_tick(crate::drawing::to_ticks(atom.coordinate / b), |t| rows.contains(&t));
        rows.insert(y);
        st.push(y, 0, EventKind::Entry(atom.intensity));
    }
    for atom in &births {
        let x = crate::drawing::to_ticks(atom.x / a).clamp(1, TICKS - 1);
        let y = crate::drawing::to_ticks(atom.y / b).clamp(1, TICKS - 1);
        st.push(y, x, EventKind::Spontaneous(atom.intensity));
    }
    st.run(&mut rng)?;
    Ok(st.finish(seed, params.digest()))
}

/// First tick at or after `t` (clamped into the open side) that is not taken,
/// searching downward if the upper end is reached.
fn free_tick(t: u64, taken: impl Fn(u64) -> bool) -> u64 {
    let t = t.clamp(1, TICKS - 1);
    (t..TICKS)
        .chain((1..t).rev())
        .find(|&u| !taken(u))
        .expect("more than 2^48 atoms on one side")
}

#[derive(Clone, Copy, Debug)]
enum EventKind {
    Entry(Charge),
    Spontaneous(Charge),
    Clock { generation: u64 },
}

impl EventKind {
    fn rank(&self) -> u8 {
        match self {
            EventKind::Entry(_) => 0,
            EventKind::Spontaneous(_) => 1,
            EventKind::Clock { .. } => 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Event {
    y: u64,
    x: u64,
    seq: u64,
    kind: EventKind,
}

impl Event {
    fn key(&self) -> (u64, u64, u8, u64) {
        (self.y, self.x, self.kind.rank(), self.seq)
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key().cmp(&self.key())
    }
}

#[derive(Clone, Copy, Debug)]
struct Particle {
    charge: Charge,
    /// Node where the open segment starts.
    start: usize,
    generation: u64,
}

/// How a horizontal line ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HorizontalEnd {
    /// Left through the east side.
    Exit,
    /// Turned north.
    Turned,
    /// Absorbed by a vertical line.
    Absorbed,
    /// Annihilated together with a vertical line.
    Annihilated,
}

/// Summary of one horizontal propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Propagation {
    pub end: HorizontalEnd,
    /// Abscissa where the line ended, in ticks.
    pub end_x: u64,
    pub crossings: usize,
    pub splits: usize,
}

/// State of the sweep: open vertical lines and pending events.
pub struct SweepState<'p> {
    params: &'p PksParams,
    options: SimulationOptions,
    a: f64,
    b: f64,
    lattice: bool,
    builder: Builder,
    particles: BTreeMap<u64, Particle>,
    events: BinaryHeap<Event>,
    seq: u64,
    generation: u64,
    y: u64,
    last_row: Option<u64>,
    kernels: HashMap<i64, LatticeKernel>,
    vertical_rates: HashMap<i64, (f64, f64)>,
    horizontal_rates: HashMap<i64, (f64, f64)>,
}

impl<'p> SweepState<'p> {
    pub fn new(params: &'p PksParams, a: f64, b: f64, options: SimulationOptions) -> Self {
        let lattice = params.kind() == MeasureKind::Lattice;
        let charges = if lattice {
            ChargeKind::Lattice { step: params.step() }
        } else {
            ChargeKind::Continuous
        };
        SweepState {
            params,
            options,
            a,
            b,
            lattice,
            builder: Builder::new(a, b, charges),
            particles: BTreeMap::new(),
            events: BinaryHeap::new(),
            seq: 0,
            generation: 0,
            y: 0,
            last_row: None,
            kernels: HashMap::new(),
            vertical_rates: HashMap::new(),
            horizontal_rates: HashMap::new(),
        }
    }

    /// Number of open vertical lines.
    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    fn push(&mut self, y: u64, x: u64, kind: EventKind) {
        self.seq += 1;
        self.events.push(Event {
            y,
            x,
            seq: self.seq,
            kind,
        });
    }

    fn value(&self, c: Charge) -> f64 {
        c.value(self.params.step())
    }

    /// Waiting distance in ticks along a side of length `len`, or `None` when
    /// it leaves the box.
    fn ticks<R: Rng + ?Sized>(&self, rate: f64, len: f64, rng: &mut R) -> Option<u64> {
        if !(rate > 0.0) {
            return None;
        }
        let d: f64 = Exp1.sample(rng);
        let t = d / rate / len * TICKS as f64;
        (t < TICKS as f64).then(|| (t.round() as u64).max(1))
    }

    fn rates(&mut self, c: Charge, vertical: bool) -> (f64, f64) {
        let params = self.params;
        let factor = self.options.vertical_turn_factor;
        let compute = |s: f64| {
            if vertical {
                (split_rate_vertical(params, s), factor * turn_rate_vertical(params, s))
            } else {
                (split_rate_horizontal(params, s), turn_rate_horizontal(params, s))
            }
        };
        match c {
            Charge::Lattice(k) => {
                let s = self.value(c);
                let cache = if vertical {
                    &mut self.vertical_rates
                } else {
                    &mut self.horizontal_rates
                };
                *cache.entry(k).or_insert_with(|| compute(s))
            }
            Charge::Real(s) => compute(s),
        }
    }

    fn schedule<R: Rng + ?Sized>(&mut self, x: u64, rng: &mut R) {
        let charge = self.particles[&x].charge;
        let (split, turn) = self.rates(charge, true);
        self.generation += 1;
        let generation = self.generation;
        self.particles.get_mut(&x).expect("particle").generation = generation;
        if let Some(dy) = self.ticks(split + turn, self.b, rng) {
            let y = self.y.saturating_add(dy);
            if y < TICKS {
                self.push(y, x, EventKind::Clock { generation });
            }
        }
    }

    fn insert<R: Rng + ?Sized>(&mut self, x: u64, charge: Charge, start: usize, rng: &mut R) {
        self.particles.insert(
            x,
            Particle {
                charge,
                start,
                generation: 0,
            },
        );
        self.schedule(x, rng);
    }

    /// Draws the crossing split of `total`: `(horizontal share, vertical share)`.
    fn share<R: Rng + ?Sized>(&mut self, total: Charge, rng: &mut R) -> Result<(Charge, Charge)> {
        let (v, h) = (self.params.nu_v(), self.params.nu_h());
        match total {
            Charge::Lattice(k) => {
                if !self.kernels.contains_key(&k) {
                    let law = self.params.kernel_index(k)?;
                    self.kernels.insert(k, law);
                }
                let t = self.kernels[&k].sample(rng);
                if !(h.contains_index(t) && v.contains_index(k - t)) {
                    return Err(Error::Consistency(format!(
                        "kernel at index {k} drew {t}, outside the supports"
                    )));
                }
                Ok((Charge::Lattice(t), Charge::Lattice(k - t)))
            }
            Charge::Real(s) => {
                let mut t = self.params.kernel(s)?.sample(rng);
                if !(h.contains(t) && v.contains(s - t)) {
                    let (lo, hi) = self.params.kernel_range(s);
                    let clamped = t.clamp(lo, hi);
                    if !(h.contains(clamped) && v.contains(s - clamped)) {
                        return Err(Error::Consistency(format!(
                            "kernel at total {s} drew {t}, outside the supports"
                        )));
                    }
                    self.builder.diagnostic(format!(
                        "kernel draw {t} at total {s} clamped to {clamped}"
                    ));
                    t = clamped;
                }
                Ok((Charge::Real(t), Charge::Real(s - t)))
            }
        }
    }

    fn add(&self, a: Charge, b: Charge) -> Result<Charge> {
        match (a, b) {
            (Charge::Lattice(x), Charge::Lattice(y)) => Ok(Charge::Lattice(x + y)),
            (Charge::Real(x), Charge::Real(y)) => Ok(Charge::Real(x + y)),
            _ => Err(Error::Consistency("mixed charge kinds".into())),
        }
    }

    fn check_charge(&self, c: Charge) -> Result<()> {
        match (c, self.lattice) {
            (Charge::Lattice(_), true) | (Charge::Real(_), false) => Ok(()),
            _ => Err(Error::Precondition(format!(
                "intensity {c:?} does not match the measure kind"
            ))),
        }
    }

    /// Opens a vertical line entering through the south side at abscissa `x`.
    /// Returns its tick abscissa.
    pub fn add_vertical_entry<R: Rng + ?Sized>(
        &mut self,
        x: f64,
        intensity: Charge,
        rng: &mut R,
    ) -> Result<u64> {
        self.check_charge(intensity)?;
        if !self.params.nu_v().contains(self.value(intensity)) {
            return Err(Error::Consistency(format!(
                "vertical entry intensity {} outside the support",
                self.value(intensity)
            )));
        }
        let x = free_tick(crate::drawing::to_ticks(x / self.a), |t| {
            self.particles.contains_key(&t)
        });
        let node = self.builder.node(Point::new(x, 0), NodeKind::VE);
        self.insert(x, intensity, node, rng);
        Ok(x)
    }

    /// Sends a horizontal line of `intensity` into the box from the west side
    /// at height `y`, which must lie above every row already processed.
    pub fn propagate_horizontal<R: Rng + ?Sized>(
        &mut self,
        y: f64,
        intensity: Charge,
        rng: &mut R,
    ) -> Result<Propagation> {
        self.check_charge(intensity)?;
        let row = crate::drawing::to_ticks(y / self.b);
        if row == 0 || row >= TICKS || self.last_row.is_some_and(|l| row <= l) {
            return Err(Error::Precondition(format!(
                "row {y} is outside the box or already processed"
            )));
        }
        self.y = row;
        self.last_row = Some(row);
        let node = self.builder.node(Point::new(0, row), NodeKind::HE);
        self.propagate(0, node, intensity, rng)
    }

    fn propagate<R: Rng + ?Sized>(
        &mut self,
        mut x: u64,
        mut start: usize,
        mut c: Charge,
        rng: &mut R,
    ) -> Result<Propagation> {
        let y = self.y;
        let mut record = Propagation {
            end: HorizontalEnd::Exit,
            end_x: TICKS,
            crossings: 0,
            splits: 0,
        };
        loop {
            let s = self.value(c);
            if !self.params.nu_h().contains(s) {
                return Err(Error::Consistency(format!(
                    "horizontal intensity {s} outside the support"
                )));
            }
            let (split, turn) = self.rates(c, false);
            let clock = self
                .ticks(split + turn, self.a, rng)
                .map(|d| x.saturating_add(d));
            let next = self.particles.range(x + 1..).next().map(|(&k, _)| k);
            let barrier = next.unwrap_or(TICKS);

            if let Some(cx) = clock.filter(|&cx| cx < barrier) {
                let is_split = rng.gen::<f64>() * (split + turn) < split;
                let kind = if is_split { NodeKind::VB } else { NodeKind::VT };
                let node = self.builder.node(Point::new(cx, y), kind);
                self.builder.segment(start, node, c)?;
                if is_split {
                    let (t, rest) = self.share(c, rng)?;
                    self.insert(cx, rest, node, rng);
                    record.splits += 1;
                    c = t;
                    start = node;
                    x = cx;
                    continue;
                }
                self.insert(cx, c, node, rng);
                record.end = HorizontalEnd::Turned;
                record.end_x = cx;
                return Ok(record);
            }

            let Some(px) = next else {
                let node = self.builder.node(Point::new(TICKS, y), NodeKind::HS);
                self.builder.segment(start, node, c)?;
                return Ok(record);
            };

            // rule 3 at the crossing with the particle at px
            record.crossings += 1;
            let p = self.particles[&px];
            let total = self.add(p.charge, c)?;
            let sum = self.value(total);
            let (pv, ph) = (self.params.p_v(sum), self.params.p_h(sum));
            let p0 = match total {
                Charge::Lattice(0) => self.params.p0(),
                _ => 0.0,
            };
            let u = rng.gen::<f64>();
            let kind = if u < pv {
                NodeKind::HA
            } else if u < pv + ph {
                NodeKind::VA
            } else if u < pv + ph + p0 {
                NodeKind::OA
            } else {
                NodeKind::CC
            };
            let node = self.builder.node(Point::new(px, y), kind);
            self.builder.segment(start, node, c)?;
            self.builder.segment(p.start, node, p.charge)?;
            match kind {
                NodeKind::HA => {
                    let q = self.particles.get_mut(&px).expect("particle");
                    q.charge = total;
                    q.start = node;
                    self.schedule(px, rng);
                    record.end = HorizontalEnd::Absorbed;
                    record.end_x = px;
                    return Ok(record);
                }
                NodeKind::VA => {
                    self.particles.remove(&px);
                    c = total;
                }
                NodeKind::OA => {
                    self.particles.remove(&px);
                    record.end = HorizontalEnd::Annihilated;
                    record.end_x = px;
                    return Ok(record);
                }
                _ => {
                    let (t, rest) = self.share(total, rng)?;
                    let q = self.particles.get_mut(&px).expect("particle");
                    q.charge = rest;
                    q.start = node;
                    self.schedule(px, rng);
                    c = t;
                }
            }
            start = node;
            x = px;
        }
    }

    /// Processes every pending event below the north side.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        while let Some(mut ev) = self.events.pop() {
            if ev.y >= TICKS {
                break;
            }
            if let EventKind::Clock { generation } = ev.kind {
                match self.particles.get(&ev.x) {
                    Some(p) if p.generation == generation => {}
                    _ => continue,
                }
            }
            if let Some(last) = self.last_row {
                if ev.y <= last {
                    ev.y = last + 1;
                    if ev.y < TICKS {
                        self.seq += 1;
                        ev.seq = self.seq;
                        self.events.push(ev);
                    }
                    continue;
                }
            }
            self.y = ev.y;
            self.last_row = Some(ev.y);
            match ev.kind {
                EventKind::Entry(c) => {
                    let node = self.builder.node(Point::new(0, ev.y), NodeKind::HE);
                    self.propagate(0, node, c, rng)?;
                }
                EventKind::Spontaneous(c) => {
                    let Charge::Lattice(t) = c else {
                        return Err(Error::Consistency("continuous spontaneous birth".into()));
                    };
                    let x = free_tick(ev.x, |u| self.particles.contains_key(&u));
                    let node = self.builder.node(Point::new(x, ev.y), NodeKind::OB);
                    self.insert(x, Charge::Lattice(-t), node, rng);
                    self.propagate(x, node, c, rng)?;
                }
                EventKind::Clock { .. } => self.vertical_event(ev.x, rng)?,
            }
        }
        Ok(())
    }

    fn vertical_event<R: Rng + ?Sized>(&mut self, x: u64, rng: &mut R) -> Result<()> {
        let p = self.particles[&x];
        let (split, turn) = self.rates(p.charge, true);
        let is_split = rng.gen::<f64>() * (split + turn) < split;
        let kind = if is_split { NodeKind::HB } else { NodeKind::HT };
        let node = self.builder.node(Point::new(x, self.y), kind);
        self.builder.segment(p.start, node, p.charge)?;
        if is_split {
            let (t, rest) = self.share(p.charge, rng)?;
            let q = self.particles.get_mut(&x).expect("particle");
            q.charge = rest;
            q.start = node;
            self.schedule(x, rng);
            self.propagate(x, node, t, rng)?;
        } else {
            self.particles.remove(&x);
            self.propagate(x, node, p.charge, rng)?;
        }
        Ok(())
    }

    /// Closes the open vertical lines on the north side.
    pub fn finish(mut self, seed: Seed, params_digest: u64) -> Drawing {
        let open = std::mem::take(&mut self.particles);
        for (x, p) in open {
            let node = self.builder.node(Point::new(x, TICKS), NodeKind::VS);
            self.builder
                .segment(p.start, node, p.charge)
                .expect("open lines start below the north side");
        }
        self.builder.finish(seed, params_digest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::Census;
    use crate::expr::Expr;
    use crate::measures::IntensityMeasure;

    fn dirac0(pv: &str, ph: &str, q: &str) -> PksParams {
        let d = IntensityMeasure::dirac(0);
        PksParams::new(
            d.clone(),
            d,
            Expr::parse(pv).unwrap(),
            Expr::parse(ph).unwrap(),
            Expr::parse(q).unwrap(),
            0.0,
        )
        .unwrap()
    }

    fn hammersley() -> PksParams {
        PksParams::new(
            IntensityMeasure::dirac(-1),
            IntensityMeasure::dirac(1),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn vertical_coalescence_when_p_v_is_one() {
        let p = dirac0("1{s==0}", "0", "0");
        let mut rng = Seed::new(1, 0).rng();
        let mut st = SweepState::new(&p, 1.0, 1.0, SimulationOptions::default());
        let x = st.add_vertical_entry(0.5, Charge::Lattice(0), &mut rng).unwrap();
        let rec = st.propagate_horizontal(0.5, Charge::Lattice(0), &mut rng).unwrap();
        assert_eq!(rec.end, HorizontalEnd::Absorbed);
        assert_eq!(rec.end_x, x);
        assert_eq!(st.particle_count(), 1);
        let d = st.finish(Seed::default(), 0);
        let census = d.verify().unwrap();
        assert_eq!(census[NodeKind::HA], 1);
        assert_eq!(census[NodeKind::VS], 1);
        assert_eq!(d.segments[0].to, Point::new(x, TICKS / 2));
    }

    #[test]
    fn plain_crossing_exits_east() {
        let p = dirac0("0", "0", "0");
        let mut rng = Seed::new(2, 0).rng();
        let mut st = SweepState::new(&p, 1.0, 1.0, SimulationOptions::default());
        st.add_vertical_entry(0.5, Charge::Lattice(0), &mut rng).unwrap();
        let rec = st.propagate_horizontal(0.5, Charge::Lattice(0), &mut rng).unwrap();
        assert_eq!((rec.end, rec.end_x, rec.crossings), (HorizontalEnd::Exit, TICKS, 1));
        let census = st.finish(Seed::default(), 0).verify().unwrap();
        assert_eq!(census.to_string(), "{VE:1, VS:1, HE:1, HS:1, CC:1}");
    }

    #[test]
    fn hammersley_pair_annihilates() {
        let p = hammersley();
        let mut rng = Seed::new(3, 0).rng();
        let mut st = SweepState::new(&p, 1.0, 1.0, SimulationOptions::default());
        st.add_vertical_entry(0.3, Charge::Lattice(-1), &mut rng).unwrap();
        let rec = st.propagate_horizontal(0.6, Charge::Lattice(1), &mut rng).unwrap();
        assert_eq!(rec.end, HorizontalEnd::Annihilated);
        let d = st.finish(Seed::default(), 0);
        assert_eq!(d.verify().unwrap().to_string(), "{VE:1, HE:1, OA:1}");
    }

    #[test]
    fn inert_model_draws_a_grid() {
        let p = dirac0("0", "0", "0");
        for seed in 0..5 {
            let d = simulate(&p, 6.0, 4.0, Seed::new(seed, 0)).unwrap();
            let c = d.verify().unwrap();
            assert_eq!(c[NodeKind::CC], c[NodeKind::VE] * c[NodeKind::HE]);
            assert_eq!(c[NodeKind::VE], c[NodeKind::VS]);
            assert_eq!(c[NodeKind::HE], c[NodeKind::HS]);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_consistent() {
        let n = IntensityMeasure::normal(0.0, 1.0).unwrap();
        let p = PksParams::new(
            n.clone(),
            n,
            Expr::constant(0.4),
            Expr::constant(0.4),
            Expr::constant(0.1),
            0.0,
        )
        .unwrap();
        let d1 = simulate(&p, 8.0, 8.0, Seed::new(11, 2)).unwrap();
        let d2 = simulate(&p, 8.0, 8.0, Seed::new(11, 2)).unwrap();
        assert_eq!(d1, d2);
        let census = d1.verify().unwrap();
        assert!(census.total() > 20, "{census}");
        assert_ne!(d1, simulate(&p, 8.0, 8.0, Seed::new(11, 3)).unwrap());
    }

    #[test]
    fn hammersley_births_and_deaths_balance() {
        let p = hammersley();
        let d = simulate(&p, 5.0, 5.0, Seed::new(4, 0)).unwrap();
        let c: Census = d.verify().unwrap();
        assert!(c[NodeKind::OB] > 0);
        assert_eq!(c[NodeKind::CC] + c[NodeKind::HB] + c[NodeKind::VB], 0);
    }

    #[test]
    fn continuous_births_are_rejected() {
        let n = IntensityMeasure::normal(0.0, 1.0).unwrap();
        let p = PksParams::new(n.clone(), n, Expr::zero(), Expr::zero(), Expr::zero(), 0.5).unwrap();
        let mut rng = Seed::new(0, 0).rng();
        assert!(matches!(
            sample_spontaneous(&p, 1.0, 1.0, &mut rng),
            Err(Error::Parameter(_))
        ));
    }
}
