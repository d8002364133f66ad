//! Replica summaries and the tests evaluated on them.

use rayon::prelude::*;
use serde::Serialize;

use super::hypothesis::{
    chi_square_gof, chi_square_two_sided, ks_one_sample, ks_two_sample, normal_two_sided, pearson,
    Moments,
};
use super::oracles::{expected_face_count, expected_face_limits, expected_node_counts};
use super::{bonferroni, Criterion, Levels, StatReport};
use crate::drawing::{faces, Census, Dir, Drawing, NodeKind, Orientation};
use crate::dynamics::{simulate_with, SimulationOptions};
use crate::error::Result;
use crate::measures::{IntensityMeasure, MeasureKind, PksParams};
use crate::rng::Seed;

/// Box, replica count, seed and thresholds of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub a: f64,
    pub b: f64,
    pub replicas: usize,
    /// Replica `i` runs on `seed.replica(i)`.
    pub seed: Seed,
    pub options: SimulationOptions,
    pub levels: Levels,
}

impl EnsembleConfig {
    pub fn new(a: f64, b: f64, replicas: usize, seed: Seed) -> Self {
        EnsembleConfig {
            a,
            b,
            replicas,
            seed,
            options: SimulationOptions::default(),
            levels: Levels::default(),
        }
    }
}

/// Curve along which the line system is cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Section {
    /// Straight segment of slope `-alpha` joining the west (or north) side to
    /// the south (or east) side through the south-west half of the box.
    /// `alpha = 0` is the horizontal line `y = b/2`, an infinite `alpha` the
    /// vertical line `x = a/2`.
    Diagonal { alpha: f64 },
    /// Down-right staircase of `steps` horizontal pieces of length `a/steps`
    /// joined by `steps - 1` vertical pieces of length `b/steps`.
    Staircase { steps: usize },
}

/// Intersections of one drawing with a [`Section`]. Positions are measured
/// along the pieces each family can hit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hits {
    /// `(position, intensity)` of vertical segments crossing the section
    pub vertical: Vec<(f64, f64)>,
    pub horizontal: Vec<(f64, f64)>,
    pub vertical_length: f64,
    pub horizontal_length: f64,
    /// Expected vertical hits per unit length, relative to `ν_V(ℝ)`.
    pub vertical_scale: f64,
    pub horizontal_scale: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FaceSummary {
    /// Faces touching neither the north nor the east side.
    pub ne_free: usize,
    /// `Σ area · s_F` and `Σ area · c_F` over all faces
    pub area_nodes: f64,
    pub area_corners: f64,
    pub area: f64,
    /// Faces touching no side, with their node and corner totals.
    pub interior: usize,
    pub interior_nodes: usize,
    pub interior_corners: usize,
}

/// What [`summarize`] extracts besides the census.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Needs {
    pub exits: bool,
    pub section: Option<Section>,
    pub reversibility: bool,
    pub faces: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaSummary {
    pub seed: Seed,
    pub census: Census,
    /// Whether [`Drawing::verify`] accepted the drawing.
    pub verified: bool,
    /// `(x, intensity)` of lines leaving through the north side
    pub top_exits: Vec<(f64, f64)>,
    /// `(y, intensity)` of lines leaving through the east side
    pub right_exits: Vec<(f64, f64)>,
    pub hits: Option<Hits>,
    /// Statistic vector of the drawing and of its rotation by 180 degrees.
    pub vectors: Option<(Vec<f64>, Vec<f64>)>,
    pub faces: Option<FaceSummary>,
}

fn exits(d: &Drawing) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let mut top = Vec::new();
    let mut right = Vec::new();
    for n in &d.nodes {
        match n.kind {
            NodeKind::VS => {
                let s = n.adj[Dir::South as usize].expect("exit has a segment");
                top.push((d.x(n.pos.x), d.charge_value(d.segments[s].charge)));
            }
            NodeKind::HS => {
                let s = n.adj[Dir::West as usize].expect("exit has a segment");
                right.push((d.y(n.pos.y), d.charge_value(d.segments[s].charge)));
            }
            _ => {}
        }
    }
    top.sort_by(|p, q| p.0.total_cmp(&q.0));
    right.sort_by(|p, q| p.0.total_cmp(&q.0));
    (top, right)
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - i as f64) * (sorted[j] - sorted[i])
}

const QUANTILES: [f64; 3] = [0.25, 0.5, 0.75];

fn vector_names() -> Vec<String> {
    let mut names: Vec<String> = NodeKind::ALL.iter().map(|k| format!("census {k}")).collect();
    for side in ["north exit x", "east exit y"] {
        for q in QUANTILES {
            names.push(format!("{side} q{}", (q * 100.0) as u32));
        }
    }
    names.push("vertical length in the south half".into());
    names.push("horizontal length in the west half".into());
    names
}

/// Length of vertical segments below `y = b/2` and of horizontal segments
/// left of `x = a/2`. The rotation swaps each half with its opposite, so
/// unlike the total length these can tell a drawing from its image.
fn half_lengths(d: &Drawing) -> (f64, f64) {
    let (mut v, mut h) = (0.0, 0.0);
    for seg in &d.segments {
        match seg.orientation {
            Orientation::Vertical => {
                v += (d.y(seg.to.y).min(d.b / 2.0) - d.y(seg.from.y)).max(0.0);
            }
            Orientation::Horizontal => {
                h += (d.x(seg.to.x).min(d.a / 2.0) - d.x(seg.from.x)).max(0.0);
            }
        }
    }
    (v, h)
}

/// Census (13), exit-position quartiles on the north and east sides, and the
/// half-box line lengths.
fn statistic_vector(d: &Drawing) -> Vec<f64> {
    let census = d.census();
    let mut v: Vec<f64> = census.0.iter().map(|&c| c as f64).collect();
    let (top, right) = exits(d);
    for side in [top, right] {
        let xs: Vec<f64> = side.iter().map(|p| p.0).collect();
        v.extend(QUANTILES.iter().map(|&q| quantile(&xs, q)));
    }
    let (south, west) = half_lengths(d);
    v.push(south);
    v.push(west);
    v
}

fn face_summary(d: &Drawing) -> FaceSummary {
    let f = faces(d);
    let mut s = FaceSummary::default();
    for face in &f.faces {
        if !face.touches_north && !face.touches_east {
            s.ne_free += 1;
        }
        s.area_nodes += face.area * face.nodes as f64;
        s.area_corners += face.area * face.corners as f64;
        s.area += face.area;
        if !face.touches_box() {
            s.interior += 1;
            s.interior_nodes += face.nodes;
            s.interior_corners += face.corners;
        }
    }
    s
}

fn section_hits(d: &Drawing, section: Section) -> Hits {
    let mut h = Hits::default();
    let segs = d.segments.iter().map(|s| {
        (
            s.orientation,
            d.x(s.from.x),
            d.y(s.from.y),
            d.x(s.to.x),
            d.y(s.to.y),
            d.charge_value(s.charge),
        )
    });
    match section {
        Section::Diagonal { alpha } if alpha == 0.0 => {
            let y0 = d.b / 2.0;
            h.vertical_length = d.a;
            h.vertical_scale = 1.0;
            for (o, x, ylo, _, yhi, s) in segs {
                if o == Orientation::Vertical && ylo <= y0 && y0 < yhi {
                    h.vertical.push((x, s));
                }
            }
        }
        Section::Diagonal { alpha } if alpha.is_infinite() => {
            let x0 = d.a / 2.0;
            h.horizontal_length = d.b;
            h.horizontal_scale = 1.0;
            for (o, xlo, y, xhi, _, s) in segs {
                if o == Orientation::Horizontal && xlo <= x0 && x0 < xhi {
                    h.horizontal.push((d.b - y, s));
                }
            }
        }
        Section::Diagonal { alpha } => {
            // from (0, y0) down to (x1, 0)
            let y0 = d.b.min(alpha * d.a);
            let x1 = y0 / alpha;
            let stretch = (1.0 + alpha * alpha).sqrt();
            let len = x1 * stretch;
            h.vertical_length = len;
            h.horizontal_length = len;
            h.vertical_scale = 1.0 / stretch;
            h.horizontal_scale = alpha / stretch;
            for (o, x0, y0s, x1s, y1s, s) in segs {
                match o {
                    Orientation::Vertical => {
                        let y = y0 - alpha * x0;
                        if x0 <= x1 && y0s <= y && y < y1s {
                            h.vertical.push((x0 * stretch, s));
                        }
                    }
                    Orientation::Horizontal => {
                        let x = (y0 - y0s) / alpha;
                        if y0s <= y0 && x0 <= x && x < x1s {
                            h.horizontal.push((x * stretch, s));
                        }
                    }
                }
            }
        }
        Section::Staircase { steps } => {
            let k = steps.max(1);
            let dx = d.a / k as f64;
            let dy = d.b / k as f64;
            let level = |i: usize| d.b * (1.0 - (i as f64 + 0.5) / k as f64);
            h.vertical_length = d.a;
            h.horizontal_length = dy * (k - 1) as f64;
            h.vertical_scale = 1.0;
            h.horizontal_scale = 1.0;
            for (o, xa, ya, xb, yb, s) in segs {
                match o {
                    Orientation::Vertical => {
                        let i = ((xa / dx).floor() as usize).min(k - 1);
                        let y = level(i);
                        if ya <= y && y < yb {
                            h.vertical.push((xa, s));
                        }
                    }
                    Orientation::Horizontal => {
                        // vertical piece i sits at x = (i+1) dx between levels i and i+1
                        for i in 0..k - 1 {
                            let x = (i + 1) as f64 * dx;
                            let (hi, lo) = (level(i), level(i + 1));
                            if xa <= x && x < xb && lo < ya && ya <= hi {
                                h.horizontal.push((i as f64 * dy + (hi - ya), s));
                            }
                        }
                    }
                }
            }
        }
    }
    h.vertical.sort_by(|p, q| p.0.total_cmp(&q.0));
    h.horizontal.sort_by(|p, q| p.0.total_cmp(&q.0));
    h
}

fn summary_of(d: &Drawing, seed: Seed, needs: &Needs) -> ReplicaSummary {
    let (top_exits, right_exits) = if needs.exits { exits(d) } else { (Vec::new(), Vec::new()) };
    ReplicaSummary {
        seed,
        census: d.census(),
        verified: d.verify().is_ok(),
        top_exits,
        right_exits,
        hits: needs.section.map(|s| section_hits(d, s)),
        vectors: needs
            .reversibility
            .then(|| (statistic_vector(d), statistic_vector(&d.rotate180()))),
        faces: needs.faces.then(|| face_summary(d)),
    }
}

/// Simulates the ensemble in parallel and keeps one summary per replica, in
/// replica order.
pub fn summarize(params: &PksParams, cfg: &EnsembleConfig, needs: &Needs) -> Result<Vec<ReplicaSummary>> {
    (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.replica(i);
            let d = simulate_with(params, cfg.a, cfg.b, seed, &cfg.options)?;
            Ok(summary_of(&d, seed, needs))
        })
        .collect()
}

/// z-score of a sample mean against `expected`; infinite when the sample is
/// constant and off target.
fn mean_z(m: &Moments, expected: f64) -> f64 {
    let se = m.se();
    let diff = m.mean - expected;
    if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-9 * (1.0 + expected.abs()) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn count_reports(name: &str, counts: &[f64], expected: f64, levels: &Levels, out: &mut Vec<StatReport>) {
    let m = Moments::of(counts);
    out.push(StatReport::new(
        format!("{name} mean count"),
        m.mean,
        format!("Poisson mean {expected:.6}"),
        Criterion::ZScore {
            z: mean_z(&m, expected),
            band: levels.band,
        },
    ));
    if m.mean > 0.0 && m.n > 1 {
        let stat = (m.n - 1) as f64 * m.var / m.mean;
        out.push(StatReport::new(
            format!("{name} dispersion index"),
            m.var / m.mean,
            "1 (Poisson)",
            Criterion::PValue {
                p: chi_square_two_sided(stat, m.n - 1),
                level: levels.level,
            },
        ));
    }
}

fn intensity_report(name: &str, nu: &IntensityMeasure, values: &[f64], levels: &Levels) -> StatReport {
    match nu.kind() {
        MeasureKind::Continuous => {
            let (d, p) = ks_one_sample(values, |x| nu.cdf(x));
            StatReport::new(
                format!("{name} intensities (KS)"),
                d,
                format!("{nu}"),
                Criterion::PValue { p, level: levels.level },
            )
        }
        MeasureKind::Lattice => {
            let (lo, hi) = nu.index_range().expect("lattice");
            let mut observed = vec![0u64; (hi - lo + 1) as usize];
            let mut outside = 0u64;
            for &v in values {
                match nu.index_of(v) {
                    Some(k) if (lo..=hi).contains(&k) => observed[(k - lo) as usize] += 1,
                    _ => outside += 1,
                }
            }
            let probs: Vec<f64> = (lo..=hi).map(|k| nu.atom(k)).collect();
            let (stat, _, p) = chi_square_gof(&observed, &probs);
            StatReport::new(
                format!("{name} intensities (chi-square)"),
                stat,
                format!("{nu}"),
                Criterion::PValue {
                    p: if outside > 0 { 0.0 } else { p },
                    level: levels.level,
                },
            )
        }
    }
}

fn position_report(name: &str, positions: &[f64], len: f64, levels: &Levels) -> StatReport {
    let (d, p) = ks_one_sample(positions, |x| (x / len).clamp(0.0, 1.0));
    StatReport::new(
        format!("{name} positions (KS)"),
        d,
        format!("Uniform[0, {len}]"),
        Criterion::PValue { p, level: levels.level },
    )
}

fn correlation_report(name: &str, xs: &[f64], ys: &[f64], levels: &Levels) -> StatReport {
    let r = pearson(xs, ys);
    StatReport::new(
        format!("{name} count correlation"),
        r,
        "0 (independence)",
        Criterion::ZScore {
            z: r * (xs.len() as f64).sqrt(),
            band: levels.band,
        },
    )
}

/// Point-process family of one side or one section family.
struct Family<'a> {
    name: &'a str,
    nu: &'a IntensityMeasure,
    expected: f64,
    length: f64,
    marks: Vec<&'a [(f64, f64)]>,
}

fn family_reports(f: &Family<'_>, levels: &Levels, out: &mut Vec<StatReport>) {
    let counts: Vec<f64> = f.marks.iter().map(|m| m.len() as f64).collect();
    if f.expected == 0.0 {
        let violations = counts.iter().filter(|&&c| c != 0.0).count();
        out.push(StatReport::new(
            format!("{} count", f.name),
            counts.iter().sum(),
            "0",
            Criterion::Exact { violations },
        ));
        return;
    }
    count_reports(f.name, &counts, f.expected, levels, out);
    let positions: Vec<f64> = f.marks.iter().flat_map(|m| m.iter().map(|p| p.0)).collect();
    out.push(position_report(f.name, &positions, f.length, levels));
    let values: Vec<f64> = f.marks.iter().flat_map(|m| m.iter().map(|p| p.1)).collect();
    out.push(intensity_report(f.name, f.nu, &values, levels));
}

/// Exit processes on the north and east sides against the entry laws.
pub fn evaluate_exits(params: &PksParams, cfg: &EnsembleConfig, reps: &[ReplicaSummary]) -> Vec<StatReport> {
    let levels = &cfg.levels;
    let mut out = Vec::new();
    let top = Family {
        name: "north exits",
        nu: params.nu_v(),
        expected: cfg.a * params.nu_v().mass(),
        length: cfg.a,
        marks: reps.iter().map(|r| r.top_exits.as_slice()).collect(),
    };
    let right = Family {
        name: "east exits",
        nu: params.nu_h(),
        expected: cfg.b * params.nu_h().mass(),
        length: cfg.b,
        marks: reps.iter().map(|r| r.right_exits.as_slice()).collect(),
    };
    family_reports(&top, levels, &mut out);
    family_reports(&right, levels, &mut out);
    let xs: Vec<f64> = reps.iter().map(|r| r.top_exits.len() as f64).collect();
    let ys: Vec<f64> = reps.iter().map(|r| r.right_exits.len() as f64).collect();
    out.push(correlation_report("north/east exit", &xs, &ys, levels));
    bonferroni(&mut out, levels.level);
    out
}

/// Hit processes along the section recorded in the summaries.
pub fn evaluate_cross_section(params: &PksParams, cfg: &EnsembleConfig, reps: &[ReplicaSummary]) -> Vec<StatReport> {
    let levels = &cfg.levels;
    let mut out = Vec::new();
    let hits: Vec<&Hits> = reps.iter().filter_map(|r| r.hits.as_ref()).collect();
    let Some(first) = hits.first() else {
        return out;
    };
    for (name, nu, len, scale, marks) in [
        (
            "vertical hits",
            params.nu_v(),
            first.vertical_length,
            first.vertical_scale,
            hits.iter().map(|h| h.vertical.as_slice()).collect::<Vec<_>>(),
        ),
        (
            "horizontal hits",
            params.nu_h(),
            first.horizontal_length,
            first.horizontal_scale,
            hits.iter().map(|h| h.horizontal.as_slice()).collect(),
        ),
    ] {
        let rate = scale * nu.mass();
        if len > 0.0 {
            let m = Moments::of(&marks.iter().map(|m| m.len() as f64 / len).collect::<Vec<_>>());
            out.push(StatReport::new(
                format!("{name} per unit length"),
                m.mean,
                format!("{rate:.6}"),
                Criterion::ZScore {
                    z: mean_z(&m, rate),
                    band: levels.band,
                },
            ));
        }
        let fam = Family {
            name,
            nu,
            expected: rate * len,
            length: len,
            marks,
        };
        family_reports(&fam, levels, &mut out);
    }
    let xs: Vec<f64> = hits.iter().map(|h| h.vertical.len() as f64).collect();
    let ys: Vec<f64> = hits.iter().map(|h| h.horizontal.len() as f64).collect();
    out.push(correlation_report("vertical/horizontal hit", &xs, &ys, levels));
    bonferroni(&mut out, levels.level);
    out
}

/// Compares the statistic vectors of the drawings with those of their
/// rotations: paired z-tests on the census, two-sample KS on the rest.
pub fn evaluate_reversibility(cfg: &EnsembleConfig, reps: &[ReplicaSummary]) -> Vec<StatReport> {
    let levels = &cfg.levels;
    let pairs: Vec<&(Vec<f64>, Vec<f64>)> = reps.iter().filter_map(|r| r.vectors.as_ref()).collect();
    let mut out = Vec::new();
    for (c, name) in vector_names().into_iter().enumerate() {
        let orig: Vec<f64> = pairs.iter().map(|p| p.0[c]).filter(|v| v.is_finite()).collect();
        let rot: Vec<f64> = pairs.iter().map(|p| p.1[c]).filter(|v| v.is_finite()).collect();
        if c < NodeKind::ALL.len() {
            let diffs: Vec<f64> = pairs.iter().map(|p| p.1[c] - p.0[c]).collect();
            let m = Moments::of(&diffs);
            let z = mean_z(&m, 0.0);
            out.push(StatReport::new(
                format!("{name} vs rotated (paired)"),
                m.mean,
                "0",
                Criterion::PValue {
                    p: normal_two_sided(z),
                    level: levels.level,
                },
            ));
        } else {
            let (d, p) = ks_two_sample(&orig, &rot);
            out.push(StatReport::new(
                format!("{name} vs rotated (KS)"),
                d,
                "same law",
                Criterion::PValue { p, level: levels.level },
            ));
        }
    }
    bonferroni(&mut out, levels.level);
    out
}

/// Mean node counts and face count against the oracles.
pub fn evaluate_mean_counts(params: &PksParams, cfg: &EnsembleConfig, reps: &[ReplicaSummary]) -> Vec<StatReport> {
    let levels = &cfg.levels;
    let expected = expected_node_counts(params, cfg.a, cfg.b);
    let mut out = Vec::new();
    for k in NodeKind::ALL {
        if params.kind() == MeasureKind::Continuous && matches!(k, NodeKind::OB | NodeKind::OA) {
            continue;
        }
        let xs: Vec<f64> = reps.iter().map(|r| r.census[k] as f64).collect();
        let m = Moments::of(&xs);
        out.push(StatReport::new(
            format!("mean |{k}|"),
            m.mean,
            format!("{:.6}", expected[k]),
            Criterion::ZScore {
                z: mean_z(&m, expected[k]),
                band: levels.band,
            },
        ));
    }
    let faces: Vec<f64> = reps.iter().filter_map(|r| r.faces.map(|f| f.ne_free as f64)).collect();
    if !faces.is_empty() {
        let m = Moments::of(&faces);
        let e = expected_face_count(params, cfg.a, cfg.b);
        out.push(StatReport::new(
            "mean face count",
            m.mean,
            format!("{e:.6}"),
            Criterion::ZScore {
                z: mean_z(&m, e),
                band: levels.band,
            },
        ));
    }
    let inert = params.p_v_expr().as_constant() == Some(0.0)
        && params.p_h_expr().as_constant() == Some(0.0)
        && params.q_expr().as_constant() == Some(0.0)
        && params.p0() == 0.0;
    if inert {
        let violations = reps
            .iter()
            .filter(|r| r.census[NodeKind::CC] != r.census[NodeKind::VE] * r.census[NodeKind::HE])
            .count();
        out.push(StatReport::new(
            "|CC| = |VE| |HE| per replica",
            reps.len() as f64,
            "exact",
            Criterion::Exact { violations },
        ));
    }
    out
}

/// Face statistics against their large-box limits: the area-biased means
/// (a face chosen by a uniform point of the box) and the per-face means over
/// faces not touching the box.
pub fn evaluate_face_limits(params: &PksParams, cfg: &EnsembleConfig, reps: &[ReplicaSummary]) -> Vec<StatReport> {
    let lim = expected_face_limits(params);
    let tol = cfg.levels.face_tolerance;
    let mut t = FaceSummary::default();
    for f in reps.iter().filter_map(|r| r.faces) {
        t.area_nodes += f.area_nodes;
        t.area_corners += f.area_corners;
        t.area += f.area;
        t.interior += f.interior;
        t.interior_nodes += f.interior_nodes;
        t.interior_corners += f.interior_corners;
    }
    let report = |name: &str, value: f64, target: f64| {
        StatReport::new(
            name,
            value,
            format!("{target:.6}"),
            Criterion::Tolerance {
                deviation: value - target,
                tolerance: tol,
            },
        )
    };
    let per_face = |n: usize| n as f64 / t.interior.max(1) as f64;
    vec![
        report("area-biased mean s_F", t.area_nodes / t.area, lim.nodes),
        report("area-biased mean c_F", t.area_corners / t.area, lim.corners),
        report("per-face mean s_F (interior faces)", per_face(t.interior_nodes), lim.nodes),
        report("per-face mean c_F (interior faces)", per_face(t.interior_corners), lim.corners),
    ]
}

fn run(params: &PksParams, cfg: &EnsembleConfig, needs: Needs) -> Result<Vec<ReplicaSummary>> {
    params.check()?;
    summarize(params, cfg, &needs)
}

pub fn test_exit_processes(params: &PksParams, a: f64, b: f64, replicas: usize, seed: Seed) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let reps = run(params, &cfg, Needs { exits: true, ..Needs::default() })?;
    Ok(evaluate_exits(params, &cfg, &reps))
}

pub fn test_cross_section(
    params: &PksParams,
    a: f64,
    b: f64,
    alpha: f64,
    replicas: usize,
    seed: Seed,
) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let needs = Needs {
        section: Some(Section::Diagonal { alpha }),
        ..Needs::default()
    };
    let reps = run(params, &cfg, needs)?;
    Ok(evaluate_cross_section(params, &cfg, &reps))
}

pub fn test_staircase(params: &PksParams, a: f64, b: f64, steps: usize, replicas: usize, seed: Seed) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let needs = Needs {
        section: Some(Section::Staircase { steps }),
        ..Needs::default()
    };
    let reps = run(params, &cfg, needs)?;
    Ok(evaluate_cross_section(params, &cfg, &reps))
}

pub fn test_reversibility(params: &PksParams, a: f64, b: f64, replicas: usize, seed: Seed) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let reps = run(params, &cfg, Needs { reversibility: true, ..Needs::default() })?;
    Ok(evaluate_reversibility(&cfg, &reps))
}

pub fn test_mean_counts(params: &PksParams, a: f64, b: f64, replicas: usize, seed: Seed) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let reps = run(params, &cfg, Needs { faces: true, ..Needs::default() })?;
    Ok(evaluate_mean_counts(params, &cfg, &reps))
}

pub fn test_face_limits(params: &PksParams, a: f64, b: f64, replicas: usize, seed: Seed) -> Result<Vec<StatReport>> {
    let cfg = EnsembleConfig::new(a, b, replicas, seed);
    let reps = run(params, &cfg, Needs { faces: true, ..Needs::default() })?;
    Ok(evaluate_face_limits(params, &cfg, &reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_preset, preset, PresetArgs};

    fn grid() -> PksParams {
        let mut args = PresetArgs::new();
        for k in ["pv", "ph", "q"] {
            args.insert(k.into(), 0.0);
        }
        preset("normal", &args).unwrap().params
    }

    #[test]
    fn grid_model_passes_trivially() {
        let p = grid();
        let seed = Seed::new(11, 0);
        for r in test_exit_processes(&p, 5.0, 5.0, 40, seed).unwrap() {
            assert!(r.passed(), "{r}");
        }
        let reports = test_mean_counts(&p, 5.0, 5.0, 40, seed).unwrap();
        assert!(reports.iter().any(|r| matches!(r.criterion, Criterion::Exact { violations: 0 })));
        assert!(reports.iter().all(StatReport::passed));
        let rev = test_reversibility(&p, 5.0, 5.0, 40, seed).unwrap();
        assert!(rev.iter().all(StatReport::passed));
    }

    #[test]
    fn tests_are_deterministic() {
        let p = default_preset("normal").unwrap().params;
        let a = test_cross_section(&p, 6.0, 6.0, 1.0, 20, Seed::new(3, 0)).unwrap();
        let b = test_cross_section(&p, 6.0, 6.0, 1.0, 20, Seed::new(3, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn staircase_pieces_are_counted_once() {
        let p = grid();
        let cfg = EnsembleConfig::new(4.0, 4.0, 10, Seed::new(5, 0));
        let needs = Needs {
            section: Some(Section::Staircase { steps: 4 }),
            ..Needs::default()
        };
        for r in summarize(&p, &cfg, &needs).unwrap() {
            // every vertical line crosses exactly one horizontal piece, and
            // every horizontal line below the first level crosses one vertical piece
            let h = r.hits.unwrap();
            assert_eq!(h.vertical.len(), r.census[NodeKind::VE]);
            assert!(h.horizontal.len() <= r.census[NodeKind::HE]);
            assert_eq!(h.horizontal_length, 3.0);
        }
    }

    #[test]
    fn diagonal_hits_in_the_grid_model() {
        let p = grid();
        let cfg = EnsembleConfig::new(4.0, 4.0, 10, Seed::new(5, 0));
        let needs = Needs {
            section: Some(Section::Diagonal { alpha: 1.0 }),
            ..Needs::default()
        };
        for r in summarize(&p, &cfg, &needs).unwrap() {
            let h = r.hits.unwrap();
            // the anti-diagonal of a square meets every line once
            assert_eq!(h.vertical.len(), r.census[NodeKind::VE]);
            assert_eq!(h.horizontal.len(), r.census[NodeKind::HE]);
        }
    }
}
