//! Expected node and face counts.

use std::ops::Index;

use serde::Serialize;

use crate::drawing::NodeKind;
use crate::measures::quadrature::{integrate, DEFAULT_REL_TOL};
use crate::measures::{MeasureKind, PksParams};

/// `∫ f(s) G(s) ds` (or the sum over the lattice) over the support of `G`.
fn against_convolution<F: Fn(f64) -> f64>(params: &PksParams, f: F) -> f64 {
    let (v, h) = (params.nu_v(), params.nu_h());
    match params.kind() {
        MeasureKind::Continuous => {
            let (vlo, vhi) = v.effective_range();
            let (hlo, hhi) = h.effective_range();
            integrate(
                |s| {
                    let w = f(s);
                    if w == 0.0 {
                        0.0
                    } else {
                        w * params.convolution(s)
                    }
                },
                vlo + hlo,
                vhi + hhi,
                DEFAULT_REL_TOL,
            )
            .value
        }
        MeasureKind::Lattice => {
            let (vlo, vhi) = v.index_range().expect("lattice");
            let (hlo, hhi) = h.index_range().expect("lattice");
            let step = params.step();
            (vlo + hlo..=vhi + hhi)
                .map(|k| {
                    let w = f(k as f64 * step);
                    if w == 0.0 {
                        0.0
                    } else {
                        w * params.convolution_index(k)
                    }
                })
                .sum()
        }
    }
}

/// `∫ q(s) √(g_V(s) g_H(s)) ds`.
fn turn_integral(params: &PksParams) -> f64 {
    let (v, h) = (params.nu_v(), params.nu_h());
    match params.kind() {
        MeasureKind::Continuous => {
            let (vlo, vhi) = v.effective_range();
            let (hlo, hhi) = h.effective_range();
            let (lo, hi) = (vlo.max(hlo), vhi.min(hhi));
            if !(hi > lo) {
                return 0.0;
            }
            integrate(
                |s| {
                    let q = params.q(s);
                    if q == 0.0 {
                        0.0
                    } else {
                        q * (params.g_v(s) * params.g_h(s)).sqrt()
                    }
                },
                lo,
                hi,
                DEFAULT_REL_TOL,
            )
            .value
        }
        MeasureKind::Lattice => {
            let (vlo, vhi) = v.index_range().expect("lattice");
            let (hlo, hhi) = h.index_range().expect("lattice");
            let step = params.step();
            (vlo.max(hlo)..=vhi.min(hhi))
                .map(|k| params.q(k as f64 * step) * (v.atom(k) * h.atom(k)).sqrt())
                .sum()
        }
    }
}

/// The integrals every expectation is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateIntegrals {
    /// `ν_V(ℝ)`
    pub mass_v: f64,
    pub mass_h: f64,
    /// `∬ p_V(s+t) g_V(s) g_H(t)`
    pub vertical_split: f64,
    pub horizontal_split: f64,
    /// `∫ q √(g_V g_H)`
    pub turn: f64,
    /// `p_0 G(0)`; zero for continuous measures
    pub annihilation: f64,
}

impl RateIntegrals {
    pub fn of(params: &PksParams) -> RateIntegrals {
        let annihilation = match params.kind() {
            MeasureKind::Lattice if params.p0() > 0.0 => params.p0() * params.convolution_index(0),
            _ => 0.0,
        };
        RateIntegrals {
            mass_v: params.nu_v().mass(),
            mass_h: params.nu_h().mass(),
            vertical_split: against_convolution(params, |s| params.p_v(s)),
            horizontal_split: against_convolution(params, |s| params.p_h(s)),
            turn: turn_integral(params),
            annihilation,
        }
    }

    /// Crossing rate per unit area: meetings that neither merge nor annihilate.
    pub fn crossing(&self) -> f64 {
        self.mass_v * self.mass_h - self.vertical_split - self.horizontal_split - self.annihilation
    }
}

/// Expected count per node kind, indexable by [`NodeKind`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedCounts(pub [f64; 13]);

impl Index<NodeKind> for ExpectedCounts {
    type Output = f64;
    fn index(&self, k: NodeKind) -> &f64 {
        &self.0[k as usize]
    }
}

/// Mean number of nodes of each kind in `[0,a] × [0,b]`.
pub fn expected_node_counts(params: &PksParams, a: f64, b: f64) -> ExpectedCounts {
    let r = RateIntegrals::of(params);
    let ab = a * b;
    let mut out = [0.0; 13];
    let mut set = |kinds: &[NodeKind], v: f64| {
        for &k in kinds {
            out[k as usize] = v;
        }
    };
    set(&[NodeKind::VE, NodeKind::VS], a * r.mass_v);
    set(&[NodeKind::HE, NodeKind::HS], b * r.mass_h);
    set(&[NodeKind::HB, NodeKind::HA], ab * r.vertical_split);
    set(&[NodeKind::VB, NodeKind::VA], ab * r.horizontal_split);
    set(&[NodeKind::HT, NodeKind::VT], ab * r.turn);
    set(&[NodeKind::CC], ab * r.crossing());
    set(&[NodeKind::OB, NodeKind::OA], ab * r.annihilation);
    ExpectedCounts(out)
}

/// Mean number of faces touching neither the north nor the east side.
pub fn expected_face_count(params: &PksParams, a: f64, b: f64) -> f64 {
    a * b * params.nu_v().mass() * params.nu_h().mass()
}

/// Large-box limits of the mean number of nodes and of corners around a face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaceLimits {
    pub nodes: f64,
    pub corners: f64,
}

pub fn expected_face_limits(params: &PksParams) -> FaceLimits {
    let r = RateIntegrals::of(params);
    let m = r.mass_v * r.mass_h;
    FaceLimits {
        nodes: 4.0 + 2.0 * (r.vertical_split + r.horizontal_split + 2.0 * r.turn) / m,
        corners: 4.0 + 4.0 * r.turn / m,
    }
}
