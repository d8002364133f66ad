use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::intensity::{AtomTable, IntensityMeasure, MeasureKind};
use super::kernel::{ContinuousKernel, InverseCdf, LatticeKernel};
use super::pair::{self, ContinuousPair};
use super::quadrature;
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Which path computes `G` and the crossing kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Evaluation {
    /// Closed forms for recognised family pairs, generic otherwise.
    #[default]
    ClosedForm,
    /// Always quadrature / exact sums and tabulated inversion.
    Generic,
}

/// The parameter tuple `(ν_V, ν_H, p_V, p_H, q, p_0)`.
#[derive(Clone, Debug)]
pub struct PksParams {
    nu_v: IntensityMeasure,
    nu_h: IntensityMeasure,
    p_v: Expr,
    p_h: Expr,
    q: Expr,
    p0: f64,
    evaluation: Evaluation,
    pair: Option<ContinuousPair>,
    /// `G` on the lattice, indexed from `first`.
    lattice_g: Option<Arc<AtomTable>>,
}

impl PksParams {
    /// Builds the tuple. Structural errors (kind or step mismatch) are reported
    /// here; the probe-grid conditions are left to [`super::validate`].
    pub fn new(
        nu_v: IntensityMeasure,
        nu_h: IntensityMeasure,
        p_v: Expr,
        p_h: Expr,
        q: Expr,
        p0: f64,
    ) -> Result<Self> {
        if nu_v.kind() != nu_h.kind() {
            return Err(Error::Parameter(format!(
                "measures {nu_v} and {nu_h} do not share a kind; mixed supports are out of scope"
            )));
        }
        if nu_v.kind() == MeasureKind::Lattice && nu_v.step() != nu_h.step() {
            return Err(Error::Parameter(format!(
                "lattice steps differ: {} vs {}",
                nu_v.step(),
                nu_h.step()
            )));
        }
        let pair = ContinuousPair::detect(&nu_v, &nu_h);
        let lattice_g = match (nu_v.atoms(), nu_h.atoms()) {
            (Some(v), Some(h)) => Some(Arc::new(convolve_tables(v, h))),
            _ => None,
        };
        Ok(PksParams {
            nu_v,
            nu_h,
            p_v,
            p_h,
            q,
            p0,
            evaluation: Evaluation::ClosedForm,
            pair,
            lattice_g,
        })
    }

    /// Same parameters, forced onto the given evaluation path.
    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn evaluation(&self) -> Evaluation {
        self.evaluation
    }
    pub fn kind(&self) -> MeasureKind {
        self.nu_v.kind()
    }
    /// Lattice spacing (1 for continuous parameters).
    pub fn step(&self) -> f64 {
        match self.kind() {
            MeasureKind::Lattice => self.nu_v.step(),
            MeasureKind::Continuous => 1.0,
        }
    }
    pub fn nu_v(&self) -> &IntensityMeasure {
        &self.nu_v
    }
    pub fn nu_h(&self) -> &IntensityMeasure {
        &self.nu_h
    }
    pub fn p_v_expr(&self) -> &Expr {
        &self.p_v
    }
    pub fn p_h_expr(&self) -> &Expr {
        &self.p_h
    }
    pub fn q_expr(&self) -> &Expr {
        &self.q
    }
    pub fn p0(&self) -> f64 {
        self.p0
    }

    #[inline]
    pub fn p_v(&self, s: f64) -> f64 {
        self.p_v.eval(s)
    }
    #[inline]
    pub fn p_h(&self, s: f64) -> f64 {
        self.p_h.eval(s)
    }
    #[inline]
    pub fn q(&self, s: f64) -> f64 {
        self.q.eval(s)
    }
    #[inline]
    pub fn g_v(&self, s: f64) -> f64 {
        self.nu_v.weight(s)
    }
    #[inline]
    pub fn g_h(&self, s: f64) -> f64 {
        self.nu_h.weight(s)
    }

    /// `G(s)`: density (continuous) or atom mass (lattice) of `ν_V ∗ ν_H` at `s`.
    pub fn convolution(&self, s: f64) -> f64 {
        match self.kind() {
            MeasureKind::Continuous => match (self.evaluation, &self.pair) {
                (Evaluation::ClosedForm, Some(pair)) => {
                    self.nu_v.mass() * self.nu_h.mass() * pair.convolution(s)
                }
                _ => continuous_convolution(&self.nu_v, &self.nu_h, s),
            },
            MeasureKind::Lattice => match self.nu_v.index_of(s) {
                Some(k) => self.convolution_index(k),
                None => 0.0,
            },
        }
    }

    /// `G` at the lattice index `k`.
    pub fn convolution_index(&self, k: i64) -> f64 {
        match (self.evaluation, &self.lattice_g) {
            (Evaluation::ClosedForm, Some(table)) => table.get(k),
            _ => lattice_convolution(&self.nu_v, &self.nu_h, k),
        }
    }

    /// Law of `X_H` given `X_V + X_H = s`.
    pub fn kernel(&self, s: f64) -> Result<Kernel> {
        match self.kind() {
            MeasureKind::Continuous => self.continuous_kernel(s),
            MeasureKind::Lattice => {
                let k = self.nu_v.index_of(s).ok_or_else(|| {
                    Error::ImpossibleEvent(format!("total {s} is not a lattice point"))
                })?;
                Ok(Kernel::Lattice {
                    law: self.kernel_index(k)?,
                    step: self.step(),
                })
            }
        }
    }

    fn continuous_kernel(&self, s: f64) -> Result<Kernel> {
        let impossible = || Error::ImpossibleEvent(format!("G({s}) = 0: no crossing kernel"));
        if let (Evaluation::ClosedForm, Some(pair)) = (self.evaluation, &self.pair) {
            return pair.kernel(s).map(Kernel::Exact).ok_or_else(impossible);
        }
        let (lo, hi) = self.kernel_range(s);
        let table = InverseCdf::build(|t| self.g_v(s - t) * self.g_h(t), lo, hi);
        match table {
            Some(table) => Ok(Kernel::Tabulated(Arc::new(table))),
            None if lo == hi && self.g_v(s - lo) * self.g_h(lo) > 0.0 => {
                Ok(Kernel::Exact(ContinuousKernel::Uniform { lo, hi }))
            }
            None => Err(impossible()),
        }
    }

    /// Interval of admissible horizontal shares `t` at total `s`.
    pub(crate) fn kernel_range(&self, s: f64) -> (f64, f64) {
        let (vlo, vhi) = self.nu_v.effective_range();
        let (hlo, hhi) = self.nu_h.effective_range();
        (hlo.max(s - vhi), hhi.min(s - vlo))
    }

    /// Lattice kernel at the index total `k`.
    pub fn kernel_index(&self, k: i64) -> Result<LatticeKernel> {
        if !(self.convolution_index(k) > 0.0) {
            return Err(Error::ImpossibleEvent(format!(
                "G at lattice index {k} is zero: no crossing kernel"
            )));
        }
        if self.evaluation == Evaluation::ClosedForm {
            if let Some(law) = pair::lattice_kernel(&self.nu_v, &self.nu_h, k) {
                return Ok(law);
            }
        }
        let (v, h) = (
            self.nu_v.atoms().expect("lattice"),
            self.nu_h.atoms().expect("lattice"),
        );
        let lo = h.first.max(k - v.last());
        let hi = h.last().min(k - v.first);
        let probs: Vec<f64> = match self.evaluation {
            Evaluation::ClosedForm => (lo..=hi).map(|t| v.get(k - t) * h.get(t)).collect(),
            Evaluation::Generic => (lo..=hi)
                .map(|t| self.nu_v.atom(k - t) * self.nu_h.atom(t))
                .collect(),
        };
        let total: f64 = probs.iter().sum();
        Ok(LatticeKernel::Table {
            first: lo,
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    /// Short canonical description, stable across runs.
    pub fn describe(&self) -> String {
        format!(
            "nu_v={}; nu_h={}; p_v={}; p_h={}; q={}; p0={}",
            self.nu_v, self.nu_h, self.p_v, self.p_h, self.q, self.p0
        )
    }

    /// 64-bit FNV-1a digest of [`Self::describe`], used to tag drawings.
    pub fn digest(&self) -> u64 {
        fnv1a(self.describe().as_bytes())
    }
}

impl fmt::Display for PksParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// A ready-to-sample crossing kernel.
#[derive(Clone, Debug)]
pub enum Kernel {
    Exact(ContinuousKernel),
    Tabulated(Arc<InverseCdf>),
    Lattice { law: LatticeKernel, step: f64 },
}

impl Kernel {
    /// One draw of the horizontal share, as a real intensity.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Kernel::Exact(k) => k.sample(rng),
            Kernel::Tabulated(t) => t.sample(rng),
            Kernel::Lattice { law, step } => law.sample(rng) as f64 * step,
        }
    }
}

fn convolve_tables(v: &AtomTable, h: &AtomTable) -> AtomTable {
    let mut masses = vec![0.0; v.masses.len() + h.masses.len() - 1];
    for (i, a) in v.masses.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        for (j, b) in h.masses.iter().enumerate() {
            masses[i + j] += a * b;
        }
    }
    AtomTable {
        first: v.first + h.first,
        masses,
    }
}

fn continuous_convolution(nu_v: &IntensityMeasure, nu_h: &IntensityMeasure, s: f64) -> f64 {
    let (vlo, vhi) = nu_v.effective_range();
    let (hlo, hhi) = nu_h.effective_range();
    quadrature::integrate(
        |t| nu_v.weight(s - t) * nu_h.weight(t),
        hlo.max(s - vhi),
        hhi.min(s - vlo),
        quadrature::DEFAULT_REL_TOL,
    )
    .value
}

fn lattice_convolution(nu_v: &IntensityMeasure, nu_h: &IntensityMeasure, k: i64) -> f64 {
    let (v_lo, v_hi) = nu_v.index_range().expect("lattice");
    let (h_lo, h_hi) = nu_h.index_range().expect("lattice");
    (h_lo.max(k - v_hi)..=h_hi.min(k - v_lo))
        .map(|t| nu_v.atom(k - t) * nu_h.atom(t))
        .sum()
}

/// `(ν_V ∗ ν_H)` at `s` by the generic path: adaptive quadrature over the
/// effective supports (continuous) or an exact sum over the truncated atoms
/// (lattice).
pub fn convolution(nu_v: &IntensityMeasure, nu_h: &IntensityMeasure, s: f64) -> Result<f64> {
    if nu_v.kind() != nu_h.kind() {
        return Err(Error::Parameter("convolution of measures of different kinds".into()));
    }
    Ok(match nu_v.kind() {
        MeasureKind::Continuous => continuous_convolution(nu_v, nu_h, s),
        MeasureKind::Lattice => match nu_v.index_of(s) {
            Some(k) if nu_v.step() == nu_h.step() => lattice_convolution(nu_v, nu_h, k),
            Some(_) => return Err(Error::Parameter("lattice steps differ".into())),
            None => 0.0,
        },
    })
}

/// `λ_V(s) = p_V(s) G(s) / g_V(s)`, with `0/0 = 0`.
pub fn split_rate_vertical(params: &PksParams, s: f64) -> f64 {
    let p = params.p_v(s);
    if p == 0.0 || !params.nu_v.contains(s) {
        return 0.0;
    }
    ratio(p * params.convolution(s), params.g_v(s))
}

/// `λ_H(s) = p_H(s) G(s) / g_H(s)`, with `0/0 = 0`.
pub fn split_rate_horizontal(params: &PksParams, s: f64) -> f64 {
    let p = params.p_h(s);
    if p == 0.0 || !params.nu_h.contains(s) {
        return 0.0;
    }
    ratio(p * params.convolution(s), params.g_h(s))
}

/// Rate at which a vertical line of intensity `s` turns east: `q(s) √(g_H/g_V)`.
pub fn turn_rate_vertical(params: &PksParams, s: f64) -> f64 {
    let q = params.q(s);
    if q == 0.0 {
        return 0.0;
    }
    q * ratio(params.g_h(s), params.g_v(s)).sqrt()
}

/// Rate at which a horizontal line of intensity `s` turns north: `q(s) √(g_V/g_H)`.
pub fn turn_rate_horizontal(params: &PksParams, s: f64) -> f64 {
    let q = params.q(s);
    if q == 0.0 {
        return 0.0;
    }
    q * ratio(params.g_v(s), params.g_h(s)).sqrt()
}

#[inline]
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Draws the horizontal share `T` of a crossing with total `s`.
pub fn crossing_kernel_sample<R: Rng + ?Sized>(params: &PksParams, s: f64, rng: &mut R) -> Result<f64> {
    Ok(params.kernel(s)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(v: IntensityMeasure, h: IntensityMeasure, p: f64) -> PksParams {
        PksParams::new(v, h, Expr::constant(p), Expr::constant(p), Expr::constant(0.1), 0.0).unwrap()
    }

    #[test]
    fn normal_convolution_and_rates() {
        let n = IntensityMeasure::normal(0.0, 1.0).unwrap();
        let p = params(n.clone(), n.clone(), 0.4);
        let expected = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
        assert!((p.convolution(0.0) - expected).abs() < 1e-12);
        assert!((convolution(&n, &n, 0.0).unwrap() - expected).abs() < 1e-10);
        assert!((split_rate_vertical(&p, 0.0) - 0.4 / 2f64.sqrt()).abs() < 1e-12);
        assert!((turn_rate_vertical(&p, 1.7) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn exponential_split_rate() {
        let e = IntensityMeasure::exponential(1.0).unwrap();
        let p = params(e.clone(), e, 1.0);
        assert!((split_rate_vertical(&p, 2.0) - 2.0).abs() < 1e-12);
        assert_eq!(split_rate_vertical(&p, -1.0), 0.0);
    }

    #[test]
    fn orthogonal_measures_never_turn() {
        let e = IntensityMeasure::exponential(1.0).unwrap();
        let p = params(e.clone().reflected(), e, 0.0);
        for s in [-2.0, -0.1, 0.3, 5.0] {
            assert_eq!(turn_rate_vertical(&p, s) * turn_rate_horizontal(&p, s), 0.0);
        }
    }

    #[test]
    fn lattice_convolution_matches_direct_sum() {
        let g = IntensityMeasure::geometric(0.5).unwrap();
        assert!((convolution(&g, &g, 3.0).unwrap() - 0.125).abs() < 1e-15);
        let p = params(g.clone(), g, 0.0);
        assert!((p.convolution(3.0) - 0.125).abs() < 1e-15);
        assert_eq!(p.convolution(2.5), 0.0);
    }

    #[test]
    fn lattice_kernel_sums_to_one() {
        let v = IntensityMeasure::bernoulli(0.3).unwrap().reflected();
        let h = IntensityMeasure::geometric(0.6).unwrap();
        let p = params(v, h, 0.0);
        for k in -1..6 {
            let law = p.kernel_index(k).unwrap();
            let total: f64 = (-5..60).map(|t| law.pmf(t)).sum();
            assert!((total - 1.0).abs() < 1e-12, "k={k}: {total}");
        }
        assert!(p.kernel_index(-2).is_err());
    }

    #[test]
    fn kernel_rejects_impossible_totals() {
        let e = IntensityMeasure::exponential(1.0).unwrap();
        let p = params(e.clone(), e, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            crossing_kernel_sample(&p, -1.0, &mut rng),
            Err(Error::ImpossibleEvent(_))
        ));
        let d = IntensityMeasure::dirac(0);
        let p = params(d.clone(), d, 0.0);
        assert_eq!(crossing_kernel_sample(&p, 0.0, &mut rng).unwrap(), 0.0);
    }
}
