//! Closed forms for the convolution `G = g_V * g_H` and the crossing kernel of
//! known family pairs. Anything not recognised here goes through quadrature,
//! exact sums or tabulated inversion.

use super::intensity::{IntensityMeasure, Law};
use super::kernel::{ContinuousKernel, LatticeKernel};

/// A continuous law after reflection, in the coordinates the dynamics sees.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `sign * Exp(rate)`
    Exp { rate: f64, sign: f64 },
    /// `sign * Gamma(shape, scale)`
    Gamma { shape: f64, scale: f64, sign: f64 },
}

fn shape(m: &IntensityMeasure) -> Option<Shape> {
    let sign = if m.is_reflected() { -1.0 } else { 1.0 };
    Some(match *m.law() {
        Law::Normal { mean, sd } => Shape::Normal {
            mean: sign * mean,
            sd,
        },
        Law::Uniform { lo, hi } => {
            if sign > 0.0 {
                Shape::Uniform { lo, hi }
            } else {
                Shape::Uniform { lo: -hi, hi: -lo }
            }
        }
        Law::Exponential(rate) => Shape::Exp { rate, sign },
        Law::Gamma { shape, scale } => Shape::Gamma { shape, scale, sign },
        _ => return None,
    })
}

/// Recognised continuous pair; evaluates `G` per unit masses and the kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ContinuousPair {
    v: Shape,
    h: Shape,
}

impl ContinuousPair {
    pub fn detect(nu_v: &IntensityMeasure, nu_h: &IntensityMeasure) -> Option<Self> {
        let (v, h) = (shape(nu_v)?, shape(nu_h)?);
        let pair = ContinuousPair { v, h };
        pair.supported().then_some(pair)
    }

    fn supported(&self) -> bool {
        match (self.v, self.h) {
            (Shape::Normal { .. }, Shape::Normal { .. })
            | (Shape::Uniform { .. }, Shape::Uniform { .. })
            | (Shape::Exp { .. }, Shape::Exp { .. }) => true,
            (
                Shape::Gamma {
                    scale: sv, sign: gv, ..
                },
                Shape::Gamma {
                    scale: sh, sign: gh, ..
                },
            ) => sv == sh && gv == gh,
            _ => false,
        }
    }

    /// Convolution density of the two normalized laws at `s`.
    pub fn convolution(&self, s: f64) -> f64 {
        match (self.v, self.h) {
            (Shape::Normal { mean: mv, sd: sv }, Shape::Normal { mean: mh, sd: sh }) => {
                let var = sv * sv + sh * sh;
                let z = s - mv - mh;
                (-0.5 * z * z / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
            }
            (Shape::Uniform { lo: lv, hi: hv }, Shape::Uniform { lo: lh, hi: hh }) => {
                let lo = lh.max(s - hv);
                let hi = hh.min(s - lv);
                (hi - lo).max(0.0) / ((hv - lv) * (hh - lh))
            }
            (
                Shape::Exp {
                    rate: gv,
                    sign: sv,
                },
                Shape::Exp {
                    rate: gh,
                    sign: sh,
                },
            ) => exp_pair_convolution(gv, sv, gh, sh, s),
            (
                Shape::Gamma {
                    shape: kv,
                    scale,
                    sign,
                },
                Shape::Gamma { shape: kh, .. },
            ) => {
                let x = sign * s;
                if x <= 0.0 {
                    return 0.0;
                }
                let k = kv + kh;
                ((k - 1.0) * x.ln()
                    - x / scale
                    - statrs::function::gamma::ln_gamma(k)
                    - k * scale.ln())
                .exp()
            }
            _ => unreachable!("unsupported pair was filtered by detect"),
        }
    }

    /// Law of the horizontal share given the total `s`; `None` if `G(s) = 0`.
    pub fn kernel(&self, s: f64) -> Option<ContinuousKernel> {
        if !(self.convolution(s) > 0.0) {
            return None;
        }
        Some(match (self.v, self.h) {
            (Shape::Normal { mean: mv, sd: sv }, Shape::Normal { mean: mh, sd: sh }) => {
                let (vv, vh) = (sv * sv, sh * sh);
                ContinuousKernel::Normal {
                    mean: mh + vh / (vv + vh) * (s - mv - mh),
                    var: vv * vh / (vv + vh),
                }
            }
            (Shape::Uniform { lo: lv, hi: hv }, Shape::Uniform { lo: lh, hi: hh }) => {
                ContinuousKernel::Uniform {
                    lo: lh.max(s - hv),
                    hi: hh.min(s - lv),
                }
            }
            (
                Shape::Exp {
                    rate: gv,
                    sign: sv,
                },
                Shape::Exp {
                    rate: gh,
                    sign: sh,
                },
            ) => match (sv > 0.0, sh > 0.0) {
                // density in t proportional to exp((γ_V - γ_H) t) on [0, s]
                (true, true) => ContinuousKernel::TruncatedExponential {
                    lo: 0.0,
                    hi: s,
                    tilt: gv - gh,
                },
                (false, false) => ContinuousKernel::TruncatedExponential {
                    lo: s,
                    hi: 0.0,
                    tilt: gh - gv,
                },
                (false, true) => ContinuousKernel::ShiftedExponential {
                    shift: s.max(0.0),
                    rate: gv + gh,
                    downward: false,
                },
                (true, false) => ContinuousKernel::ShiftedExponential {
                    shift: s.min(0.0),
                    rate: gv + gh,
                    downward: true,
                },
            },
            (Shape::Gamma { shape: kv, .. }, Shape::Gamma { shape: kh, .. }) => {
                ContinuousKernel::ScaledBeta {
                    scale: s,
                    alpha: kh,
                    beta: kv,
                }
            }
            _ => unreachable!("unsupported pair was filtered by detect"),
        })
    }
}

fn exp_pair_convolution(gv: f64, sv: f64, gh: f64, sh: f64, s: f64) -> f64 {
    let prod = gv * gh;
    match (sv > 0.0, sh > 0.0) {
        (true, true) | (false, false) => {
            let x = if sv > 0.0 { s } else { -s };
            if x < 0.0 {
                return 0.0;
            }
            let (a, b) = (gv.min(gh), gv.max(gh));
            if b - a <= 1e-12 * b {
                prod * x * (-a * x).exp()
            } else {
                // (e^{-a x} - e^{-b x}) / (b - a), stable for small x
                prod * (-a * x).exp() * -(-(b - a) * x).exp_m1() / (b - a)
            }
        }
        (false, true) => prod / (gv + gh) * (gv * s - (gv + gh) * s.max(0.0)).exp(),
        (true, false) => prod / (gv + gh) * (-gv * s + (gv + gh) * s.min(0.0)).exp(),
    }
}

/// Support of a lattice law after reflection, as an index interval with
/// possibly unbounded ends.
#[derive(Clone, Copy, Debug, PartialEq)]
struct IndexSpan {
    lo: Option<i64>,
    hi: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum LatticeShape {
    Dirac(i64),
    /// `sign * (start + Geom(p))`
    Geometric { p: f64, start: i64, sign: i64 },
    Poisson { mean: f64 },
}

fn lattice_shape(m: &IntensityMeasure) -> Option<LatticeShape> {
    let sign = if m.is_reflected() { -1 } else { 1 };
    Some(match *m.law() {
        Law::Dirac(a) => LatticeShape::Dirac(sign * a),
        Law::Geometric { p, start } if p < 1.0 => LatticeShape::Geometric { p, start, sign },
        Law::Poisson(mean) if !m.is_reflected() && mean > 0.0 => LatticeShape::Poisson { mean },
        _ => return None,
    })
}

impl LatticeShape {
    fn span(self) -> IndexSpan {
        match self {
            LatticeShape::Dirac(a) => IndexSpan {
                lo: Some(a),
                hi: Some(a),
            },
            LatticeShape::Geometric { start, sign, .. } => {
                if sign > 0 {
                    IndexSpan {
                        lo: Some(start),
                        hi: None,
                    }
                } else {
                    IndexSpan {
                        lo: None,
                        hi: Some(-start),
                    }
                }
            }
            LatticeShape::Poisson { .. } => IndexSpan {
                lo: Some(0),
                hi: None,
            },
        }
    }
}

/// Closed-form lattice kernel for recognised pairs, `None` otherwise.
pub(crate) fn lattice_kernel(
    nu_v: &IntensityMeasure,
    nu_h: &IntensityMeasure,
    s: i64,
) -> Option<LatticeKernel> {
    let v = lattice_shape(nu_v);
    let h = lattice_shape(nu_h);
    match (v, h) {
        (Some(LatticeShape::Dirac(a)), _) => Some(LatticeKernel::Point(s - a)),
        (_, Some(LatticeShape::Dirac(b))) => Some(LatticeKernel::Point(b)),
        (
            Some(LatticeShape::Geometric {
                p: pv, sign: gv, ..
            }),
            Some(LatticeShape::Geometric {
                p: ph, sign: gh, ..
            }),
        ) => {
            let (vs, hs) = (v?.span(), h?.span());
            // t ranges over span_H ∩ (s - span_V)
            let lo = max_opt(hs.lo, vs.hi.map(|x| s - x));
            let hi = min_opt(hs.hi, vs.lo.map(|x| s - x));
            if gv == gh && pv == ph {
                let (lo, hi) = (lo?, hi?);
                (lo <= hi).then_some(LatticeKernel::UniformInt { lo, hi })
            } else if gv < 0 && gh > 0 {
                Some(LatticeKernel::ShiftedGeometric {
                    shift: lo?,
                    p: pv + ph - pv * ph,
                })
            } else {
                None
            }
        }
        (Some(LatticeShape::Poisson { mean: gv }), Some(LatticeShape::Poisson { mean: gh })) => {
            (s >= 0).then(|| LatticeKernel::Binomial {
                n: s as u64,
                p: gh / (gv + gh),
            })
        }
        _ => None,
    }
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::quadrature::{integrate, DEFAULT_REL_TOL};

    fn check_against_quadrature(v: IntensityMeasure, h: IntensityMeasure, points: &[f64]) {
        let pair = ContinuousPair::detect(&v, &h).expect("recognised pair");
        for &s in points {
            let closed = pair.convolution(s);
            let (vlo, vhi) = v.effective_range();
            let (hlo, hhi) = h.effective_range();
            let numeric = integrate(
                |t| v.weight(s - t) * h.weight(t),
                hlo.max(s - vhi),
                hhi.min(s - vlo),
                DEFAULT_REL_TOL,
            )
            .value;
            assert!(
                (closed - numeric).abs() <= 1e-8 * closed.max(1e-300),
                "{v} * {h} at {s}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn exponential_pairs() {
        let e = |r: f64| IntensityMeasure::exponential(r).unwrap();
        check_against_quadrature(e(1.0), e(1.0), &[0.1, 1.0, 5.0]);
        check_against_quadrature(e(1.0), e(2.5), &[0.1, 1.0, 5.0]);
        check_against_quadrature(e(2.0).reflected(), e(0.5).reflected(), &[-0.1, -1.0, -5.0]);
        check_against_quadrature(e(2.0).reflected(), e(0.5), &[-3.0, -0.2, 0.0, 0.7, 4.0]);
        check_against_quadrature(e(2.0), e(0.5).reflected(), &[-3.0, -0.2, 0.7, 4.0]);
    }

    #[test]
    fn other_pairs() {
        check_against_quadrature(
            IntensityMeasure::normal(1.0, 2.0).unwrap(),
            IntensityMeasure::normal(-0.5, 0.25).unwrap(),
            &[-3.0, 0.5, 2.0],
        );
        check_against_quadrature(
            IntensityMeasure::gamma(2.5, 0.7).unwrap(),
            IntensityMeasure::gamma(1.5, 0.7).unwrap(),
            &[0.2, 1.0, 6.0],
        );
        check_against_quadrature(
            IntensityMeasure::uniform(0.0, 1.0).unwrap().reflected(),
            IntensityMeasure::uniform(0.0, 2.0).unwrap(),
            &[-0.5, 0.5, 1.5],
        );
    }

    #[test]
    fn lattice_kernels() {
        let g = |p| IntensityMeasure::geometric(p).unwrap();
        assert_eq!(
            lattice_kernel(&g(0.3), &g(0.3), 4),
            Some(LatticeKernel::UniformInt { lo: 0, hi: 4 })
        );
        assert_eq!(
            lattice_kernel(&g(0.3).reflected(), &g(0.4), -2),
            Some(LatticeKernel::ShiftedGeometric {
                shift: 0,
                p: 0.3 + 0.4 - 0.12
            })
        );
        let shifted_v = IntensityMeasure::geometric_from(0.3, 1).unwrap().reflected();
        let shifted_h = IntensityMeasure::geometric_from(0.4, 1).unwrap();
        assert_eq!(
            lattice_kernel(&shifted_v, &shifted_h, 3),
            Some(LatticeKernel::ShiftedGeometric {
                shift: 4,
                p: 0.3 + 0.4 - 0.12
            })
        );
        assert_eq!(lattice_kernel(&g(0.3), &g(0.4), 3), None);
    }
}
