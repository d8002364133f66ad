//! Closed forms of the normalized split rates and crossing kernels.

use statrs::function::gamma::ln_gamma;

use crate::measures::{ContinuousKernel, LatticeKernel};

/// Family of a preset, carrying the parameters its closed forms need.
/// Bernoulli and geometric parameters follow `P(X = 1) = q` and
/// `P(X = k) = q (1-q)^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    DiracDirac { a: i64, b: i64 },
    BerBer { qv: f64, qh: f64 },
    NegBerBer { qv: f64, qh: f64 },
    UnifUnif { a: f64, b: f64 },
    NegUnifUnif { a: f64, b: f64 },
    GeomGeom { q: f64 },
    ExpExp { gamma: f64 },
    GammaGamma { kv: f64, kh: f64, theta: f64 },
    NegBerGeom { qv: f64, qh: f64 },
    NegGeomGeom { qv: f64, qh: f64 },
    NegExpExp { gv: f64, gh: f64 },
    Normal,
    Poisson { gv: f64, gh: f64 },
    /// No closed form; only the generic path applies.
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelLaw {
    Continuous(ContinuousKernel),
    Lattice(LatticeKernel),
}

fn ind(c: bool) -> f64 {
    f64::from(u8::from(c))
}

/// `s` as an integer, when it is one.
fn int(s: f64) -> Option<i64> {
    (s.fract() == 0.0 && s.abs() < 1e15).then_some(s as i64)
}

impl Family {
    /// `λ_V(s) / (ν_H(ℝ) p_V(s))` at a point `s` of the support of `ν_V`.
    pub fn vertical_rate_ratio(&self, s: f64) -> Option<f64> {
        Some(match *self {
            Family::DiracDirac { a, b } => ind(int(s) == Some(a) && b == 0),
            Family::BerBer { qv, qh } => match int(s) {
                Some(0) => 1.0 - qh,
                Some(1) => 1.0 + qh * (1.0 / qv - 2.0),
                _ => 0.0,
            },
            Family::NegBerBer { qv, qh } => match int(s) {
                Some(-1) => 1.0 - qh,
                Some(0) => 1.0 + qh * (2.0 * qv - 1.0) / (1.0 - qv),
                _ => 0.0,
            },
            Family::UnifUnif { a, b } => ind((0.0..=a).contains(&s)) * (s / b).min(1.0),
            Family::NegUnifUnif { a, b } => ind((-a..=0.0).contains(&s)) * ((a + s) / b).min(1.0),
            Family::GeomGeom { q } => match int(s) {
                Some(k) if k >= 0 => (k + 1) as f64 * q,
                _ => 0.0,
            },
            Family::ExpExp { gamma } => ind(s >= 0.0) * gamma * s,
            Family::GammaGamma { kv, kh, theta } => gamma_ratio(kv, kh, theta, s),
            Family::NegBerGeom { qv, qh } => match int(s) {
                Some(-1) => qh,
                Some(0) => qh * (1.0 - qv * qh) / (1.0 - qv),
                _ => 0.0,
            },
            Family::NegGeomGeom { qv, qh } => match int(s) {
                Some(k) if k <= 0 => qh / (qv + qh - qv * qh),
                _ => 0.0,
            },
            Family::NegExpExp { gv, gh } => ind(s <= 0.0) * gh / (gv + gh),
            Family::Normal => (s * s / 4.0).exp() / 2f64.sqrt(),
            Family::Poisson { gv, gh } => match int(s) {
                Some(k) if k >= 0 => (-gh + k as f64 * (gh / gv).ln_1p()).exp(),
                _ => 0.0,
            },
            Family::Generic => return None,
        })
    }

    /// `λ_H(s) / (ν_V(ℝ) p_H(s))` at a point `s` of the support of `ν_H`.
    pub fn horizontal_rate_ratio(&self, s: f64) -> Option<f64> {
        Some(match *self {
            Family::DiracDirac { a, b } => ind(int(s) == Some(b) && a == 0),
            Family::BerBer { qv, qh } => Family::BerBer { qv: qh, qh: qv }.vertical_rate_ratio(s)?,
            Family::NegBerBer { qv, qh } => match int(s) {
                Some(0) => 1.0 + qv * (2.0 * qh - 1.0) / (1.0 - qh),
                Some(1) => 1.0 - qv,
                _ => 0.0,
            },
            Family::UnifUnif { a, b } => ind((0.0..=b).contains(&s)) * (s / a).min(1.0),
            Family::NegUnifUnif { a, b } => ind((0.0..=b).contains(&s)) * ((b - s) / a).min(1.0),
            Family::GeomGeom { .. } | Family::ExpExp { .. } | Family::Normal => {
                self.vertical_rate_ratio(s)?
            }
            Family::GammaGamma { kv, kh, theta } => gamma_ratio(kh, kv, theta, s),
            Family::NegBerGeom { qv, qh } => match int(s) {
                Some(k) if k >= 0 => 1.0 - qv * qh,
                _ => 0.0,
            },
            Family::NegGeomGeom { qv, qh } => match int(s) {
                Some(k) if k >= 0 => qv / (qv + qh - qv * qh),
                _ => 0.0,
            },
            Family::NegExpExp { gv, gh } => ind(s >= 0.0) * gv / (gv + gh),
            Family::Poisson { gv, gh } => Family::Poisson { gv: gh, gh: gv }.vertical_rate_ratio(s)?,
            Family::Generic => return None,
        })
    }

    /// Law of the horizontal share at total `s`; `None` for [`Family::Generic`]
    /// or when `s` cannot be a total.
    pub fn kernel(&self, s: f64) -> Option<KernelLaw> {
        use ContinuousKernel as C;
        use LatticeKernel as L;
        let lattice = |k: LatticeKernel| Some(KernelLaw::Lattice(k));
        let continuous = |k: ContinuousKernel| Some(KernelLaw::Continuous(k));
        match *self {
            Family::DiracDirac { a, b } => (int(s)? == a + b).then_some(KernelLaw::Lattice(L::Point(b))),
            Family::BerBer { qv, qh } => match int(s)? {
                0 => lattice(L::Point(0)),
                1 => lattice(L::ShiftedBernoulli {
                    shift: 0,
                    p: qh * (1.0 - qv) / (qv + qh - 2.0 * qv * qh),
                }),
                2 => lattice(L::Point(1)),
                _ => None,
            },
            Family::NegBerBer { qv, qh } => match int(s)? {
                -1 => lattice(L::Point(0)),
                0 => lattice(L::ShiftedBernoulli {
                    shift: 0,
                    p: qv * qh / (1.0 - qv - qh + 2.0 * qv * qh),
                }),
                1 => lattice(L::Point(1)),
                _ => None,
            },
            Family::UnifUnif { a, b } => (0.0..=a + b).contains(&s).then_some(KernelLaw::Continuous(
                C::Uniform {
                    lo: (s - a).max(0.0),
                    hi: s.min(b),
                },
            )),
            Family::NegUnifUnif { a, b } => (-a..=b).contains(&s).then_some(KernelLaw::Continuous(
                C::Uniform {
                    lo: s.max(0.0),
                    hi: b.min(s + a),
                },
            )),
            Family::GeomGeom { .. } => {
                let k = int(s)?;
                (k >= 0).then_some(KernelLaw::Lattice(L::UniformInt { lo: 0, hi: k }))
            }
            Family::ExpExp { .. } => {
                (s >= 0.0).then_some(KernelLaw::Continuous(C::Uniform { lo: 0.0, hi: s }))
            }
            Family::GammaGamma { kv, kh, .. } => (s > 0.0).then_some(KernelLaw::Continuous(
                C::ScaledBeta {
                    scale: s,
                    alpha: kh,
                    beta: kv,
                },
            )),
            Family::NegBerGeom { qv, qh } => match int(s)? {
                -1 => lattice(L::Point(0)),
                k if k >= 0 => lattice(L::ShiftedBernoulli {
                    shift: k,
                    p: qv * (1.0 - qh) / (1.0 - qv * qh),
                }),
                _ => None,
            },
            Family::NegGeomGeom { qv, qh } => lattice(L::ShiftedGeometric {
                shift: int(s)?.max(0),
                p: qv + qh - qv * qh,
            }),
            Family::NegExpExp { gv, gh } => continuous(C::ShiftedExponential {
                shift: s.max(0.0),
                rate: gv + gh,
                downward: false,
            }),
            Family::Normal => continuous(C::Normal {
                mean: s / 2.0,
                var: 0.5,
            }),
            Family::Poisson { gv, gh } => {
                let k = int(s)?;
                (k >= 0).then_some(KernelLaw::Lattice(L::Binomial {
                    n: k as u64,
                    p: gh / (gv + gh),
                }))
            }
            Family::Generic => None,
        }
    }
}

/// `Γ(k)/Γ(k+l) (s/θ)^l` for the measure with shape `k` against shape `l`.
fn gamma_ratio(k: f64, l: f64, theta: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    (ln_gamma(k) - ln_gamma(k + l) + l * (s / theta).ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_probabilities_are_probabilities() {
        let f = Family::NegBerBer { qv: 0.9, qh: 0.8 };
        match f.kernel(0.0) {
            Some(KernelLaw::Lattice(LatticeKernel::ShiftedBernoulli { p, .. })) => {
                assert!((0.0..=1.0).contains(&p))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(Family::BerBer { qv: 0.5, qh: 0.5 }.kernel(3.0), None);
    }

    #[test]
    fn ber_ber_symmetric_case() {
        // qv = qh = 1/2: G(1) = 1/2, g_V(1) = 1/2, so the ratio is 1
        let f = Family::BerBer { qv: 0.5, qh: 0.5 };
        assert_eq!(f.vertical_rate_ratio(1.0), Some(1.0));
        assert_eq!(f.horizontal_rate_ratio(0.0), Some(0.5));
    }
}
