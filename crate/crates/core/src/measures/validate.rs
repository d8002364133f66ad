//! Probe-grid check of the admissibility conditions on `(p_V, p_H, q, p_0)`.

use std::fmt;

use super::intensity::MeasureKind;
use super::params::PksParams;

/// Number of probe points on the continuous grid.
pub const CONTINUOUS_PROBES: usize = 10_000;

const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `p_V(s) > 0` where `g_V(s) = 0`
    VerticalSplitOffSupport,
    /// `p_H(s) > 0` where `g_H(s) = 0`
    HorizontalSplitOffSupport,
    /// `q(s) > 0` where `g_V(s) = 0` or `g_H(s) = 0`
    TurnOffSupport,
    /// `p_V(s)` or `p_H(s)` outside `[0, 1]`
    ProbabilityRange,
    /// `p_V + p_H > 1` (plus `p_0` at `s = 0` on the lattice)
    ProbabilitySum,
    NegativeTurn,
    NonFinite,
    /// `p_0` outside `[0, 1]`
    AnnihilationRange,
    /// `p_0 > 0` with continuous measures
    ContinuousAnnihilation,
}

impl Rule {
    fn describe(self) -> &'static str {
        match self {
            Rule::VerticalSplitOffSupport => "p_V(s) != 0 where g_V(s) = 0",
            Rule::HorizontalSplitOffSupport => "p_H(s) != 0 where g_H(s) = 0",
            Rule::TurnOffSupport => "q(s) != 0 where g_V(s) = 0 or g_H(s) = 0",
            Rule::ProbabilityRange => "p_V(s) or p_H(s) outside [0,1]",
            Rule::ProbabilitySum => "p_V+p_H>1",
            Rule::NegativeTurn => "q(s) < 0",
            Rule::NonFinite => "non-finite p_V, p_H or q",
            Rule::AnnihilationRange => "p_0 outside [0,1]",
            Rule::ContinuousAnnihilation => "p_0 > 0 with continuous measures",
        }
    }
}

/// A rule broken on a run of consecutive probe points `from..=to`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub rule: Rule,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::AnnihilationRange | Rule::ContinuousAnnihilation => {
                write!(f, "{} (p_0 = {})", self.rule.describe(), self.from)
            }
            _ if self.count == 1 => write!(f, "{} at s = {}", self.rule.describe(), self.from),
            _ => write!(
                f,
                "{} at s in [{}, {}] ({} probe points)",
                self.rule.describe(),
                self.from,
                self.to,
                self.count
            ),
        }
    }
}

/// Probe points: every lattice index in reach of the atoms and their sums, or
/// a uniform grid of [`CONTINUOUS_PROBES`] points over the effective supports
/// widened by 5% on each side.
pub fn probe_points(params: &PksParams) -> Vec<f64> {
    let (v, h) = (params.nu_v(), params.nu_h());
    match params.kind() {
        MeasureKind::Lattice => {
            let (vl, vh) = v.index_range().expect("lattice");
            let (hl, hh) = h.index_range().expect("lattice");
            let lo = vl.min(hl).min(vl + hl) - 1;
            let hi = vh.max(hh).max(vh + hh) + 1;
            (lo..=hi).map(|k| k as f64 * params.step()).collect()
        }
        MeasureKind::Continuous => {
            let (vl, vh) = v.effective_range();
            let (hl, hh) = h.effective_range();
            let (lo, hi) = (vl.min(hl), vh.max(hh));
            let pad = 0.05 * (hi - lo);
            let (lo, hi) = (lo - pad, hi + pad);
            let n = CONTINUOUS_PROBES;
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        }
    }
}

/// All violations of the admissibility conditions, collapsed into runs.
pub fn validate(params: &PksParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let p0 = params.p0();
    if !(0.0..=1.0).contains(&p0) {
        out.push(Violation {
            rule: Rule::AnnihilationRange,
            from: p0,
            to: p0,
            count: 1,
        });
    }
    if params.kind() == MeasureKind::Continuous && p0 != 0.0 {
        out.push(Violation {
            rule: Rule::ContinuousAnnihilation,
            from: p0,
            to: p0,
            count: 1,
        });
    }
    let (v, h) = (params.nu_v(), params.nu_h());
    let lattice = params.kind() == MeasureKind::Lattice;
    let mut runs: Vec<(Rule, usize, f64, f64, usize)> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; 9];
    for (i, s) in probe_points(params).into_iter().enumerate() {
        let (pv, ph, q) = (params.p_v(s), params.p_h(s), params.q(s));
        let (in_v, in_h) = (v.contains(s), h.contains(s));
        let zero = lattice && v.index_of(s) == Some(0);
        let mut broken = Vec::new();
        if !(pv.is_finite() && ph.is_finite() && q.is_finite()) {
            broken.push(Rule::NonFinite);
        } else {
            if !(0.0..=1.0).contains(&pv) || !(0.0..=1.0).contains(&ph) {
                broken.push(Rule::ProbabilityRange);
            }
            if q < 0.0 {
                broken.push(Rule::NegativeTurn);
            }
            if !in_v && pv != 0.0 {
                broken.push(Rule::VerticalSplitOffSupport);
            }
            if !in_h && ph != 0.0 {
                broken.push(Rule::HorizontalSplitOffSupport);
            }
            if q != 0.0 && !(in_v && in_h) {
                broken.push(Rule::TurnOffSupport);
            }
            let total = pv + ph + if zero { p0 } else { 0.0 };
            if total > 1.0 + SLACK {
                broken.push(Rule::ProbabilitySum);
            }
        }
        for rule in broken {
            let slot = rule as usize;
            match open[slot] {
                Some(r) if runs[r].4 + 1 == i => {
                    runs[r].3 = s;
                    runs[r].4 = i;
                    runs[r].1 += 1;
                }
                _ => {
                    open[slot] = Some(runs.len());
                    runs.push((rule, 1, s, s, i));
                }
            }
        }
    }
    out.extend(runs.into_iter().map(|(rule, count, from, to, _)| Violation {
        rule,
        from,
        to,
        count,
    }));
    out
}

impl PksParams {
    /// `Ok` iff [`validate`] finds nothing.
    pub fn check(&self) -> crate::error::Result<()> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::error::Error::Invalid(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::measures::IntensityMeasure;

    fn make(v: IntensityMeasure, h: IntensityMeasure, pv: &str, ph: &str, q: &str, p0: f64) -> PksParams {
        PksParams::new(
            v,
            h,
            Expr::parse(pv).unwrap(),
            Expr::parse(ph).unwrap(),
            Expr::parse(q).unwrap(),
            p0,
        )
        .unwrap()
    }

    #[test]
    fn probability_sum_is_one_run() {
        let n = IntensityMeasure::normal(0.0, 1.0).unwrap();
        let p = make(n.clone(), n, "0.7", "0.5", "0", 0.0);
        let v = validate(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::ProbabilitySum);
        assert_eq!(v[0].count, CONTINUOUS_PROBES);
        assert!(v[0].to_string().starts_with("p_V+p_H>1 at s in"));
    }

    #[test]
    fn hammersley_is_admissible() {
        let p = make(
            IntensityMeasure::dirac(-1),
            IntensityMeasure::dirac(1),
            "0",
            "0",
            "0",
            1.0,
        );
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn turning_off_support_is_reported() {
        let e = IntensityMeasure::exponential(1.0).unwrap();
        let p = make(e.clone(), e, "0", "0", "1", 0.0);
        let v = validate(&p);
        assert!(v.iter().any(|x| x.rule == Rule::TurnOffSupport && x.to < 0.0));
        let p = make(
            IntensityMeasure::exponential(1.0).unwrap(),
            IntensityMeasure::exponential(1.0).unwrap(),
            "0.5*1{s>=0}",
            "0.5*1{s>=0}",
            "1{s>=0}",
            0.0,
        );
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn annihilation_budget_at_zero() {
        let b = IntensityMeasure::bernoulli(0.5).unwrap();
        let p = make(
            b.clone().reflected(),
            b,
            "0.5*1{s>=-1 && s<=0}",
            "0.5*1{s>=0 && s<=1}",
            "0",
            0.5,
        );
        let v = validate(&p);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].rule, v[0].from, v[0].count), (Rule::ProbabilitySum, 0.0, 1));
        let n = IntensityMeasure::normal(0.0, 1.0).unwrap();
        let p = make(n.clone(), n, "0", "0", "0", 0.2);
        assert_eq!(validate(&p)[0].rule, Rule::ContinuousAnnihilation);
    }
}
