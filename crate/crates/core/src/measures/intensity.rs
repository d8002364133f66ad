//! Finite intensity measures on the real line.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal};
use statrs::function::erf::erfc;
use statrs::function::factorial::{ln_binomial, ln_factorial};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::kernel::{invert_table, InverseCdf};
use super::quadrature;
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Relative tail mass dropped when tabulating an infinite lattice law.
pub const TAIL_CUTOFF: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Continuous,
    Lattice,
}

/// A probability law before reflection and scaling.
///
/// Lattice laws live on integer indices; the measure's `step` maps an index
/// `k` to the real intensity `k * step`.
#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    Dirac(i64),
    /// `P(X = 1) = p`, `P(X = 0) = 1 - p`
    Bernoulli(f64),
    Binomial { n: u64, p: f64 },
    /// pmf `p (1 - p)^(k - start)` for `k >= start`
    Geometric { p: f64, start: i64 },
    Poisson(f64),
    DiscreteUniform { lo: i64, hi: i64 },
    /// unnormalized weights on `first..first + weights.len()`
    Pmf { first: i64, weights: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    Exponential(f64),
    Gamma { shape: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    /// unnormalized density on `[lo, hi]`
    Density { expr: Expr, lo: f64, hi: f64 },
}

impl Law {
    pub fn kind(&self) -> MeasureKind {
        match self {
            Law::Dirac(_)
            | Law::Bernoulli(_)
            | Law::Binomial { .. }
            | Law::Geometric { .. }
            | Law::Poisson(_)
            | Law::DiscreteUniform { .. }
            | Law::Pmf { .. } => MeasureKind::Lattice,
            _ => MeasureKind::Continuous,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        match self {
            Law::Bernoulli(p) if !unit(*p) => bad(format!("Bernoulli parameter {p} outside [0,1]")),
            Law::Binomial { p, .. } if !unit(*p) => {
                bad(format!("binomial parameter {p} outside [0,1]"))
            }
            Law::Geometric { p, .. } if !(*p > 0.0 && *p <= 1.0) => {
                bad(format!("geometric parameter {p} outside (0,1]"))
            }
            Law::Poisson(l) if !(*l >= 0.0 && l.is_finite()) => {
                bad(format!("Poisson mean {l} must be finite and nonnegative"))
            }
            Law::DiscreteUniform { lo, hi } if lo > hi => {
                bad(format!("empty discrete uniform range {lo}..={hi}"))
            }
            Law::Pmf { weights, .. }
                if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
                    || !weights.iter().any(|w| *w > 0.0) =>
            {
                bad("pmf weights must be finite, nonnegative and not all zero".into())
            }
            Law::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && hi > lo) => {
                bad(format!("uniform interval [{lo}, {hi}] must be finite and non-degenerate"))
            }
            Law::Exponential(r) if !(*r > 0.0 && r.is_finite()) => {
                bad(format!("exponential rate {r} must be positive"))
            }
            Law::Gamma { shape, scale }
                if !(*shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()) =>
            {
                bad(format!("gamma parameters ({shape}, {scale}) must be positive"))
            }
            Law::Normal { mean, sd } if !(mean.is_finite() && *sd > 0.0 && sd.is_finite()) => {
                bad(format!("normal parameters ({mean}, {sd}) invalid"))
            }
            Law::Density { lo, hi, .. } if !(lo.is_finite() && hi.is_finite() && hi > lo) => {
                bad(format!("density support [{lo}, {hi}] must be finite and non-degenerate"))
            }
            _ => Ok(()),
        }
    }

    /// Normalized pmf at lattice index `k`.
    fn pmf(&self, k: i64) -> f64 {
        match self {
            Law::Dirac(a) => f64::from(u8::from(k == *a)),
            Law::Bernoulli(p) => match k {
                0 => 1.0 - p,
                1 => *p,
                _ => 0.0,
            },
            Law::Binomial { n, p } => {
                if k < 0 || k as u64 > *n {
                    return 0.0;
                }
                let k = k as u64;
                if *p == 0.0 {
                    return f64::from(u8::from(k == 0));
                }
                if *p == 1.0 {
                    return f64::from(u8::from(k == *n));
                }
                (ln_binomial(*n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
            }
            Law::Geometric { p, start } => {
                if k < *start {
                    0.0
                } else if *p == 1.0 {
                    f64::from(u8::from(k == *start))
                } else {
                    p * ((k - start) as f64 * (-p).ln_1p()).exp()
                }
            }
            Law::Poisson(l) => {
                if k < 0 {
                    0.0
                } else if *l == 0.0 {
                    f64::from(u8::from(k == 0))
                } else {
                    (k as f64 * l.ln() - l - ln_factorial(k as u64)).exp()
                }
            }
            Law::DiscreteUniform { lo, hi } => {
                if (*lo..=*hi).contains(&k) {
                    1.0 / (hi - lo + 1) as f64
                } else {
                    0.0
                }
            }
            Law::Pmf { first, weights } => {
                let i = k - first;
                if i < 0 || i as usize >= weights.len() {
                    0.0
                } else {
                    weights[i as usize] / weights.iter().sum::<f64>()
                }
            }
            _ => 0.0,
        }
    }

    /// Structural support membership of a lattice index, immune to underflow.
    fn contains_index(&self, k: i64) -> bool {
        match self {
            Law::Dirac(a) => k == *a,
            Law::Bernoulli(p) => (k == 0 && *p < 1.0) || (k == 1 && *p > 0.0),
            Law::Binomial { n, p } => {
                k >= 0
                    && k as u64 <= *n
                    && (*p > 0.0 || k == 0)
                    && (*p < 1.0 || k as u64 == *n)
            }
            Law::Geometric { p, start } => k >= *start && (*p < 1.0 || k == *start),
            Law::Poisson(l) => k >= 0 && (*l > 0.0 || k == 0),
            Law::DiscreteUniform { lo, hi } => (*lo..=*hi).contains(&k),
            Law::Pmf { first, weights } => {
                let i = k - first;
                i >= 0 && (i as usize) < weights.len() && weights[i as usize] > 0.0
            }
            _ => false,
        }
    }

    /// Finite index range holding all but a relative `TAIL_CUTOFF` of the mass.
    fn index_range(&self) -> (i64, i64) {
        match self {
            Law::Dirac(a) => (*a, *a),
            Law::Bernoulli(p) => (i64::from(*p == 1.0), i64::from(*p > 0.0)),
            Law::Binomial { n, .. } => (0, *n as i64),
            Law::Geometric { p, start } => {
                if *p >= 1.0 {
                    (*start, *start)
                } else {
                    let len = (TAIL_CUTOFF.ln() / (-p).ln_1p()).ceil() as i64;
                    (*start, start + len.max(1))
                }
            }
            Law::Poisson(l) => {
                let mut k = 0i64;
                let mut cumulative = 0.0;
                loop {
                    cumulative += self.pmf(k);
                    if (k as f64 > *l && 1.0 - cumulative < TAIL_CUTOFF) || k > 100_000 {
                        return (0, k);
                    }
                    k += 1;
                }
            }
            Law::DiscreteUniform { lo, hi } => (*lo, *hi),
            Law::Pmf { first, weights } => (*first, first + weights.len() as i64 - 1),
            _ => (0, 0),
        }
    }

    /// Normalized density of a continuous law.
    fn pdf(&self, y: f64, density_norm: f64) -> f64 {
        match self {
            Law::Uniform { lo, hi } => {
                if (*lo..=*hi).contains(&y) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Law::Exponential(r) => {
                if y >= 0.0 {
                    r * (-r * y).exp()
                } else {
                    0.0
                }
            }
            Law::Gamma { shape, scale } => {
                if y < 0.0 {
                    0.0
                } else if y == 0.0 {
                    if *shape == 1.0 {
                        1.0 / scale
                    } else if *shape < 1.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    ((shape - 1.0) * y.ln() - y / scale - ln_gamma(*shape) - shape * scale.ln())
                        .exp()
                }
            }
            Law::Normal { mean, sd } => {
                let z = (y - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
            }
            Law::Density { expr, lo, hi } => {
                if (*lo..=*hi).contains(&y) {
                    expr.eval(y).max(0.0) / density_norm
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    fn contains_value(&self, y: f64) -> bool {
        match self {
            Law::Uniform { lo, hi } => (*lo..=*hi).contains(&y),
            Law::Exponential(_) | Law::Gamma { .. } => y >= 0.0 && y.is_finite(),
            Law::Normal { .. } => y.is_finite(),
            Law::Density { expr, lo, hi } => (*lo..=*hi).contains(&y) && expr.eval(y) > 0.0,
            _ => false,
        }
    }

    /// Finite range outside of which the density underflows or vanishes.
    fn value_range(&self) -> (f64, f64) {
        match self {
            Law::Uniform { lo, hi } | Law::Density { lo, hi, .. } => (*lo, *hi),
            Law::Exponential(r) => (0.0, 746.0 / r),
            Law::Gamma { shape, scale } => (0.0, scale * (shape + 40.0 * shape.sqrt() + 750.0)),
            Law::Normal { mean, sd } => (mean - 40.0 * sd, mean + 40.0 * sd),
            _ => (0.0, 0.0),
        }
    }

    fn cdf(&self, y: f64, density_norm: f64) -> f64 {
        match self {
            Law::Uniform { lo, hi } => ((y - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::Exponential(r) => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-r * y).exp_m1()
                }
            }
            Law::Gamma { shape, scale } => {
                if y <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, y / scale)
                }
            }
            Law::Normal { mean, sd } => 0.5 * erfc(-(y - mean) / (sd * std::f64::consts::SQRT_2)),
            Law::Density { expr, lo, hi } => {
                if y <= *lo {
                    0.0
                } else if y >= *hi {
                    1.0
                } else {
                    let q = quadrature::integrate(
                        |t| expr.eval(t).max(0.0),
                        *lo,
                        y,
                        quadrature::DEFAULT_REL_TOL,
                    );
                    (q.value / density_norm).clamp(0.0, 1.0)
                }
            }
            _ => 0.0,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Dirac(a) => write!(f, "dirac({a})"),
            Law::Bernoulli(p) => write!(f, "ber({p})"),
            Law::Binomial { n, p } => write!(f, "bin({n}, {p})"),
            Law::Geometric { p, start: 0 } => write!(f, "geom({p})"),
            Law::Geometric { p, start } => write!(f, "geom({p}, {start})"),
            Law::Poisson(l) => write!(f, "poisson({l})"),
            Law::DiscreteUniform { lo, hi } => write!(f, "dunif({lo}, {hi})"),
            Law::Pmf { first, weights } => {
                write!(f, "pmf({first}")?;
                for w in weights {
                    write!(f, ", {w}")?;
                }
                write!(f, ")")
            }
            Law::Uniform { lo, hi } => write!(f, "unif({lo}, {hi})"),
            Law::Exponential(r) => write!(f, "exp({r})"),
            Law::Gamma { shape, scale } => write!(f, "gamma({shape}, {scale})"),
            Law::Normal { mean, sd } => write!(f, "normal({mean}, {})", sd * sd),
            Law::Density { expr, lo, hi } => write!(f, "density({lo}, {hi}; {expr})"),
        }
    }
}

/// Truncated table of atoms in oriented index order, scaled by the mass.
#[derive(Clone, Debug)]
pub(crate) struct AtomTable {
    pub first: i64,
    pub masses: Vec<f64>,
}

impl AtomTable {
    pub fn last(&self) -> i64 {
        self.first + self.masses.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.first;
        if i < 0 || i as usize >= self.masses.len() {
            0.0
        } else {
            self.masses[i as usize]
        }
    }
}

#[derive(Clone, Debug)]
enum Cache {
    None,
    Atoms(Arc<AtomTable>),
    Density { norm: f64, sampler: Arc<InverseCdf> },
}

/// A finite measure `mass * (±law)`, either absolutely continuous or carried by
/// the lattice `step * Z`.
#[derive(Clone, Debug)]
pub struct IntensityMeasure {
    law: Law,
    reflected: bool,
    mass: f64,
    step: f64,
    cache: Cache,
}

impl PartialEq for IntensityMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.law == other.law
            && self.reflected == other.reflected
            && self.mass == other.mass
            && self.step == other.step
    }
}

impl IntensityMeasure {
    /// Unit-mass measure with the given law.
    pub fn new(law: Law) -> Result<Self> {
        law.check()?;
        let mut m = IntensityMeasure {
            law,
            reflected: false,
            mass: 1.0,
            step: 1.0,
            cache: Cache::None,
        };
        m.rebuild()?;
        Ok(m)
    }

    /// Measure with density exactly `expr` on `[lo, hi]`; its mass is the integral.
    pub fn from_density(expr: Expr, lo: f64, hi: f64) -> Result<Self> {
        let m = Self::new(Law::Density { expr, lo, hi })?;
        let norm = match &m.cache {
            Cache::Density { norm, .. } => *norm,
            _ => unreachable!("density law caches its norm"),
        };
        m.with_mass(norm)
    }

    /// Measure with atoms `weights[i]` at `first + i`; its mass is the sum.
    pub fn from_pmf(first: i64, weights: Vec<f64>) -> Result<Self> {
        let total = weights.iter().sum();
        Self::new(Law::Pmf { first, weights })?.with_mass(total)
    }

    pub fn dirac(a: i64) -> Self {
        Self::new(Law::Dirac(a)).expect("dirac is always valid")
    }
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(Law::Bernoulli(p))
    }
    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        Self::new(Law::Binomial { n, p })
    }
    pub fn geometric(p: f64) -> Result<Self> {
        Self::new(Law::Geometric { p, start: 0 })
    }
    pub fn geometric_from(p: f64, start: i64) -> Result<Self> {
        Self::new(Law::Geometric { p, start })
    }
    pub fn poisson(mean: f64) -> Result<Self> {
        Self::new(Law::Poisson(mean))
    }
    pub fn discrete_uniform(lo: i64, hi: i64) -> Result<Self> {
        Self::new(Law::DiscreteUniform { lo, hi })
    }
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Law::Uniform { lo, hi })
    }
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Law::Exponential(rate))
    }
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Law::Gamma { shape, scale })
    }
    /// `N(mean, variance)`, parametrized by the variance as in the usual notation.
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        Self::new(Law::Normal {
            mean,
            sd: variance.sqrt(),
        })
    }

    /// The image measure under `x ↦ -x`.
    pub fn reflected(mut self) -> Self {
        self.reflected = !self.reflected;
        if let Cache::Atoms(t) = &self.cache {
            let mut masses = t.masses.clone();
            masses.reverse();
            self.cache = Cache::Atoms(Arc::new(AtomTable {
                first: -t.last(),
                masses,
            }));
        }
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Parameter(format!(
                "total mass {mass} must be positive and finite"
            )));
        }
        let factor = mass / self.mass;
        self.mass = mass;
        if let Cache::Atoms(t) = &self.cache {
            self.cache = Cache::Atoms(Arc::new(AtomTable {
                first: t.first,
                masses: t.masses.iter().map(|m| m * factor).collect(),
            }));
        }
        Ok(self)
    }

    /// Lattice spacing; index `k` carries intensity `k * step`.
    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if self.kind() != MeasureKind::Lattice {
            return Err(Error::Parameter("only lattice measures have a step".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parameter(format!("lattice step {step} must be positive")));
        }
        self.step = step;
        Ok(self)
    }

    fn rebuild(&mut self) -> Result<()> {
        self.cache = match &self.law {
            Law::Density { expr, lo, hi } => {
                let norm = quadrature::integrate(
                    |t| expr.eval(t).max(0.0),
                    *lo,
                    *hi,
                    quadrature::DEFAULT_REL_TOL,
                )
                .value;
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "density {expr} has non-positive or infinite integral on [{lo}, {hi}]"
                    )));
                }
                let sampler = InverseCdf::build(|t| expr.eval(t).max(0.0), *lo, *hi)
                    .ok_or_else(|| Error::Parameter(format!("density {expr} cannot be tabulated")))?;
                Cache::Density {
                    norm,
                    sampler: Arc::new(sampler),
                }
            }
            law if law.kind() == MeasureKind::Lattice => {
                let (lo, hi) = law.index_range();
                let masses: Vec<f64> = (lo..=hi).map(|k| self.mass * law.pmf(k)).collect();
                Cache::Atoms(Arc::new(AtomTable { first: lo, masses }))
            }
            _ => Cache::None,
        };
        Ok(())
    }

    pub fn law(&self) -> &Law {
        &self.law
    }
    pub fn is_reflected(&self) -> bool {
        self.reflected
    }
    pub fn kind(&self) -> MeasureKind {
        self.law.kind()
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    fn orient(&self, x: f64) -> f64 {
        if self.reflected {
            -x
        } else {
            x
        }
    }

    #[inline]
    fn orient_index(&self, k: i64) -> i64 {
        if self.reflected {
            -k
        } else {
            k
        }
    }

    /// Mass implied by the law text alone: the weight sum or density integral
    /// for explicit tables and densities, 1 for named families.
    fn natural_mass(&self) -> f64 {
        match &self.law {
            Law::Pmf { weights, .. } => weights.iter().sum(),
            Law::Density { .. } => self.density_norm(),
            _ => 1.0,
        }
    }

    fn density_norm(&self) -> f64 {
        match &self.cache {
            Cache::Density { norm, .. } => *norm,
            _ => 1.0,
        }
    }

    pub(crate) fn atoms(&self) -> Option<&AtomTable> {
        match &self.cache {
            Cache::Atoms(t) => Some(t),
            _ => None,
        }
    }

    /// Mass of the atom at lattice index `k` (0 for continuous measures).
    #[inline]
    pub fn atom(&self, k: i64) -> f64 {
        self.mass * self.law.pmf(self.orient_index(k))
    }

    /// Density at `x` (continuous) or mass of the atom at `x` (lattice; zero off
    /// the lattice).
    pub fn weight(&self, x: f64) -> f64 {
        match self.kind() {
            MeasureKind::Continuous => self.mass * self.law.pdf(self.orient(x), self.density_norm()),
            MeasureKind::Lattice => match self.index_of(x) {
                Some(k) => self.atom(k),
                None => 0.0,
            },
        }
    }

    /// Lattice index of `x`, if `x` is a lattice point.
    pub fn index_of(&self, x: f64) -> Option<i64> {
        let r = x / self.step;
        let k = r.round();
        ((r - k).abs() <= 1e-9 * (1.0 + r.abs())).then_some(k as i64)
    }

    /// Support membership of a lattice index.
    pub fn contains_index(&self, k: i64) -> bool {
        self.law.contains_index(self.orient_index(k))
    }

    /// Support membership, decided structurally rather than by `weight(x) > 0`.
    pub fn contains(&self, x: f64) -> bool {
        match self.kind() {
            MeasureKind::Continuous => self.law.contains_value(self.orient(x)),
            MeasureKind::Lattice => self.index_of(x).is_some_and(|k| self.contains_index(k)),
        }
    }

    /// Finite interval carrying all the mass up to underflow or truncation.
    pub fn effective_range(&self) -> (f64, f64) {
        let (lo, hi) = match self.atoms() {
            Some(t) => (t.first as f64 * self.step, t.last() as f64 * self.step),
            None => self.law.value_range(),
        };
        if self.reflected && self.atoms().is_none() {
            (-hi, -lo)
        } else {
            (lo, hi)
        }
    }

    /// Lattice index range of the truncated atom table.
    pub fn index_range(&self) -> Option<(i64, i64)> {
        self.atoms().map(|t| (t.first, t.last()))
    }

    /// Distribution function of the normalized measure.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind() {
            MeasureKind::Continuous => {
                let y = self.orient(x);
                let c = self.law.cdf(y, self.density_norm());
                if self.reflected {
                    1.0 - c
                } else {
                    c
                }
            }
            MeasureKind::Lattice => {
                let t = self.atoms().expect("lattice table");
                let k = (x / self.step + 1e-9).floor() as i64;
                let total: f64 = t.masses.iter().sum();
                let below: f64 = t
                    .masses
                    .iter()
                    .enumerate()
                    .take_while(|(i, _)| t.first + (*i as i64) <= k)
                    .map(|(_, m)| m)
                    .sum();
                (below / total).clamp(0.0, 1.0)
            }
        }
    }

    /// Draw from the normalized continuous measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let y = match (&self.law, &self.cache) {
            (Law::Uniform { lo, hi }, _) => lo + (hi - lo) * rng.gen::<f64>(),
            (Law::Exponential(r), _) => Exp::new(*r).expect("checked").sample(rng),
            (Law::Gamma { shape, scale }, _) => {
                Gamma::new(*shape, *scale).expect("checked").sample(rng)
            }
            (Law::Normal { mean, sd }, _) => Normal::new(*mean, *sd).expect("checked").sample(rng),
            (Law::Density { .. }, Cache::Density { sampler, .. }) => sampler.sample(rng),
            _ => return self.sample_index(rng) as f64 * self.step,
        };
        self.orient(y)
    }

    /// Draw a lattice index from the normalized (truncated) lattice measure.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let t = self.atoms().expect("sample_index needs a lattice measure");
        t.first + invert_table(&t.masses, rng.gen())
    }
}

impl fmt::Display for IntensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mass != self.natural_mass() {
            write!(f, "{}*", self.mass)?;
        }
        if self.reflected {
            write!(f, "-")?;
        }
        self.law.write(f)?;
        if self.step != 1.0 {
            write!(f, "@{}", self.step)?;
        }
        Ok(())
    }
}

impl FromStr for IntensityMeasure {
    type Err = Error;

    /// Parses `[mass*][-]name(args)[@step]`, the format written by `Display`.
    /// A `mass*` prefix sets the total mass.
    fn from_str(src: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parameter(format!("measure {src:?}: {msg}"));
        let mut rest = src.trim();
        let mut mass = None;
        let mut step = None;
        if let Some(open) = rest.find('(') {
            if let Some(star) = rest[..open].find('*') {
                mass = Some(rest[..star].trim().parse().map_err(|_| bad("bad mass"))?);
                rest = rest[star + 1..].trim();
            }
        }
        if let Some(close) = rest.rfind(')') {
            if let Some(at) = rest[close..].find('@') {
                let s = rest[close + at + 1..].trim();
                step = Some(s.parse::<f64>().map_err(|_| bad("bad step"))?);
                rest = rest[..close + 1].trim();
            }
        }
        let reflected = rest.starts_with('-');
        if reflected {
            rest = rest[1..].trim();
        }
        let open = rest.find('(').ok_or_else(|| bad("missing '('"))?;
        if !rest.ends_with(')') {
            return Err(bad("missing ')'"));
        }
        let name = rest[..open].trim().to_ascii_lowercase();
        let inner = &rest[open + 1..rest.len() - 1];
        let (head, tail) = match inner.split_once(';') {
            Some((h, t)) => (h, Some(t.trim())),
            None => (inner, None),
        };
        let args: Vec<f64> = if head.trim().is_empty() {
            Vec::new()
        } else {
            head.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad("bad number")))
                .collect::<Result<_>>()?
        };
        let n = args.len();
        let arity = |want: &[usize]| {
            if want.contains(&n) {
                Ok(())
            } else {
                Err(bad(&format!("{name} takes {want:?} arguments, got {n}")))
            }
        };
        let int = |x: f64| -> Result<i64> {
            if x.fract() == 0.0 && x.abs() < 9e15 {
                Ok(x as i64)
            } else {
                Err(bad("expected an integer"))
            }
        };
        let law = match name.as_str() {
            "dirac" => {
                arity(&[1])?;
                Law::Dirac(int(args[0])?)
            }
            "ber" | "bernoulli" => {
                arity(&[1])?;
                Law::Bernoulli(args[0])
            }
            "bin" | "binomial" => {
                arity(&[2])?;
                Law::Binomial {
                    n: u64::try_from(int(args[0])?).map_err(|_| bad("negative n"))?,
                    p: args[1],
                }
            }
            "geom" | "geometric" => {
                arity(&[1, 2])?;
                Law::Geometric {
                    p: args[0],
                    start: if n == 2 { int(args[1])? } else { 0 },
                }
            }
            "poisson" | "poi" => {
                arity(&[1])?;
                Law::Poisson(args[0])
            }
            "dunif" => {
                arity(&[2])?;
                Law::DiscreteUniform {
                    lo: int(args[0])?,
                    hi: int(args[1])?,
                }
            }
            "pmf" => {
                if n < 2 {
                    return Err(bad("pmf needs a first index and at least one weight"));
                }
                let m = Self::from_pmf(int(args[0])?, args[1..].to_vec())?;
                return finish(m, mass, reflected, step);
            }
            "unif" | "uniform" => {
                arity(&[2])?;
                Law::Uniform {
                    lo: args[0],
                    hi: args[1],
                }
            }
            "exp" | "expo" | "exponential" => {
                arity(&[1])?;
                Law::Exponential(args[0])
            }
            "gamma" => {
                arity(&[2])?;
                Law::Gamma {
                    shape: args[0],
                    scale: args[1],
                }
            }
            "normal" | "norm" => {
                arity(&[2])?;
                if !(args[1] > 0.0) {
                    return Err(bad("variance must be positive"));
                }
                Law::Normal {
                    mean: args[0],
                    sd: args[1].sqrt(),
                }
            }
            "density" => {
                arity(&[2])?;
                let expr = Expr::parse(tail.ok_or_else(|| bad("density needs '; expr'"))?)?;
                let m = Self::from_density(expr, args[0], args[1])?;
                return finish(m, mass, reflected, step);
            }
            other => return Err(bad(&format!("unknown family {other:?}"))),
        };
        finish(Self::new(law)?, mass, reflected, step)
    }
}

fn finish(
    mut m: IntensityMeasure,
    mass: Option<f64>,
    reflected: bool,
    step: Option<f64>,
) -> Result<IntensityMeasure> {
    if let Some(mass) = mass {
        m = m.with_mass(mass)?;
    }
    if reflected {
        m = m.reflected();
    }
    if let Some(step) = step {
        m = m.with_step(step)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lattice_tables_hold_the_mass() {
        for m in [
            IntensityMeasure::geometric(0.1).unwrap(),
            IntensityMeasure::poisson(7.5).unwrap(),
            IntensityMeasure::binomial(12, 0.3).unwrap(),
            IntensityMeasure::bernoulli(0.2).unwrap(),
        ] {
            let t = m.atoms().unwrap();
            let total: f64 = t.masses.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{m}: {total}");
        }
    }

    #[test]
    fn reflection_and_mass() {
        let m = IntensityMeasure::geometric(0.5)
            .unwrap()
            .with_mass(2.0)
            .unwrap()
            .reflected();
        assert_eq!(m.atom(-1), 0.5);
        assert_eq!(m.atom(1), 0.0);
        assert!(m.contains(-3.0) && !m.contains(1.0));
        let t = m.atoms().unwrap();
        assert_eq!(t.last(), 0);
        assert_eq!(t.get(0), 1.0);
        assert!((m.cdf(-1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn continuous_density_and_cdf() {
        let e = IntensityMeasure::exponential(2.0).unwrap().reflected();
        assert!((e.weight(-0.5) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(e.weight(0.5), 0.0);
        assert!((e.cdf(-0.5) - (-1.0f64).exp()).abs() < 1e-15);
        let n = IntensityMeasure::normal(1.0, 4.0).unwrap();
        assert!((n.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!(n.contains(1e6) && n.weight(1e6) == 0.0);
    }

    #[test]
    fn density_measures_take_their_integral_as_mass() {
        let m = IntensityMeasure::from_density(Expr::parse("3*s^2").unwrap(), 0.0, 2.0).unwrap();
        assert!((m.mass() - 8.0).abs() < 1e-9);
        assert!((m.weight(1.0) - 3.0).abs() < 1e-9);
        assert!((m.cdf(1.0) - 0.125).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mean: f64 = (0..20_000).map(|_| m.sample(&mut rng)).sum::<f64>() / 20_000.0;
        assert!((mean - 1.5).abs() < 0.02, "{mean}");
    }

    #[test]
    fn text_round_trip() {
        for src in [
            "normal(0, 1)",
            "-exp(1.5)",
            "2*-geom(0.25)",
            "3*pmf(0, 1, 1)",
            "ber(0.3)@0.5",
            "geom(0.5, 1)",
            "pmf(-1, 1, 3)",
            "density(0, 1; 2*s)",
            "-dirac(1)",
        ] {
            let m: IntensityMeasure = src.parse().unwrap();
            let again: IntensityMeasure = m.to_string().parse().unwrap();
            assert_eq!(m, again, "{src} -> {m}");
        }
        assert!("normal(0)".parse::<IntensityMeasure>().is_err());
        assert!("weird(1)".parse::<IntensityMeasure>().is_err());
    }
}
