//! Conditional crossing kernels and convolution densities.
//!
//! The kernel at total `s` is the law of the horizontal share `X_H` given
//! `X_V + X_H = s`. Known family pairs get exact samplers; everything else
//! falls back to lattice inversion or a tabulated inverse CDF.

use rand::Rng;
use rand_distr::{Beta, Binomial, Distribution, Exp, Geometric, Normal};
use statrs::function::erf::erfc;

const GRID_POINTS: usize = 2048;
const MAX_GRID_POINTS: usize = 1 << 16;
const GRID_REL_TOL: f64 = 1e-6;

/// Exact law of the horizontal share for a continuous pair.
#[derive(Clone, Debug, PartialEq)]
pub enum ContinuousKernel {
    Normal { mean: f64, var: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `scale * Beta(alpha, beta)`
    ScaledBeta { scale: f64, alpha: f64, beta: f64 },
    /// `shift + Exp(rate)`, or `shift - Exp(rate)` when `downward`.
    ShiftedExponential { shift: f64, rate: f64, downward: bool },
    /// density proportional to `exp(tilt * t)` on `[lo, hi]`
    TruncatedExponential { lo: f64, hi: f64, tilt: f64 },
}

impl ContinuousKernel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ContinuousKernel::Normal { mean, var } => Normal::new(mean, var.sqrt())
                .expect("finite normal")
                .sample(rng),
            ContinuousKernel::Uniform { lo, hi } => {
                if hi > lo {
                    lo + (hi - lo) * rng.gen::<f64>()
                } else {
                    lo
                }
            }
            ContinuousKernel::ScaledBeta { scale, alpha, beta } => {
                scale * Beta::new(alpha, beta).expect("beta shape").sample(rng)
            }
            ContinuousKernel::ShiftedExponential {
                shift,
                rate,
                downward,
            } => {
                let e: f64 = Exp::new(rate).expect("positive rate").sample(rng);
                if downward {
                    shift - e
                } else {
                    shift + e
                }
            }
            ContinuousKernel::TruncatedExponential { lo, hi, tilt } => {
                let u: f64 = rng.gen();
                truncated_exponential_quantile(lo, hi, tilt, u)
            }
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            ContinuousKernel::Normal { mean, var } => {
                0.5 * erfc(-(t - mean) / (2.0 * var).sqrt())
            }
            ContinuousKernel::Uniform { lo, hi } => {
                if t < lo {
                    0.0
                } else if t >= hi {
                    1.0
                } else {
                    (t - lo) / (hi - lo)
                }
            }
            ContinuousKernel::ScaledBeta { scale, alpha, beta } => {
                let x = (t / scale).clamp(0.0, 1.0);
                let c = statrs::function::beta::beta_reg(alpha, beta, x);
                // a negative scale reverses the order of t
                if scale < 0.0 {
                    1.0 - c
                } else {
                    c
                }
            }
            ContinuousKernel::ShiftedExponential {
                shift,
                rate,
                downward,
            } => {
                if downward {
                    if t >= shift {
                        1.0
                    } else {
                        (-rate * (shift - t)).exp()
                    }
                } else if t <= shift {
                    0.0
                } else {
                    -(-rate * (t - shift)).exp_m1()
                }
            }
            ContinuousKernel::TruncatedExponential { lo, hi, tilt } => {
                if t <= lo {
                    0.0
                } else if t >= hi {
                    1.0
                } else if tilt == 0.0 {
                    (t - lo) / (hi - lo)
                } else {
                    (tilt * (t - lo)).exp_m1() / (tilt * (hi - lo)).exp_m1()
                }
            }
        }
    }
}

fn truncated_exponential_quantile(lo: f64, hi: f64, tilt: f64, u: f64) -> f64 {
    if tilt == 0.0 || !(hi > lo) {
        return lo + (hi - lo) * u;
    }
    let t = lo + (u * (tilt * (hi - lo)).exp_m1()).ln_1p() / tilt;
    t.clamp(lo, hi)
}

/// Exact law of the horizontal share for a lattice pair (values are lattice indices).
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeKernel {
    Point(i64),
    UniformInt { lo: i64, hi: i64 },
    Binomial { n: u64, p: f64 },
    /// `shift + Geometric(p)` with pmf `p (1-p)^k`
    ShiftedGeometric { shift: i64, p: f64 },
    /// `shift + Bernoulli(p)`
    ShiftedBernoulli { shift: i64, p: f64 },
    /// explicit probabilities on `first..first + probs.len()`
    Table { first: i64, probs: Vec<f64> },
}

impl LatticeKernel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match self {
            LatticeKernel::Point(t) => *t,
            LatticeKernel::UniformInt { lo, hi } => rng.gen_range(*lo..=*hi),
            LatticeKernel::Binomial { n, p } => {
                Binomial::new(*n, *p).expect("binomial").sample(rng) as i64
            }
            LatticeKernel::ShiftedGeometric { shift, p } => {
                shift + Geometric::new(*p).expect("geometric").sample(rng) as i64
            }
            LatticeKernel::ShiftedBernoulli { shift, p } => {
                shift + i64::from(rng.gen::<f64>() < *p)
            }
            LatticeKernel::Table { first, probs } => first + invert_table(probs, rng.gen()),
        }
    }

    /// Probability of the value `t`.
    pub fn pmf(&self, t: i64) -> f64 {
        match self {
            LatticeKernel::Point(v) => f64::from(u8::from(*v == t)),
            LatticeKernel::UniformInt { lo, hi } => {
                if (*lo..=*hi).contains(&t) {
                    1.0 / (hi - lo + 1) as f64
                } else {
                    0.0
                }
            }
            LatticeKernel::Binomial { n, p } => {
                if t < 0 || t as u64 > *n {
                    return 0.0;
                }
                let k = t as u64;
                let ln = statrs::function::factorial::ln_binomial(*n, k);
                (ln + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
            }
            LatticeKernel::ShiftedGeometric { shift, p } => {
                if t < *shift {
                    0.0
                } else {
                    p * (1.0 - p).powi((t - shift) as i32)
                }
            }
            LatticeKernel::ShiftedBernoulli { shift, p } => {
                if t == *shift {
                    1.0 - p
                } else if t == shift + 1 {
                    *p
                } else {
                    0.0
                }
            }
            LatticeKernel::Table { first, probs } => {
                let i = t - first;
                if i < 0 || i as usize >= probs.len() {
                    0.0
                } else {
                    probs[i as usize]
                }
            }
        }
    }
}

/// Index of the cell hit by `u` in the (not necessarily normalized) weights.
pub(crate) fn invert_table(weights: &[f64], u: f64) -> i64 {
    let total: f64 = weights.iter().sum();
    let mut target = u * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            if target < w {
                return i as i64;
            }
            target -= w;
        }
    }
    last_positive as i64
}

/// Tabulated inverse CDF of an unnormalized density on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct InverseCdf {
    lo: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl InverseCdf {
    /// Builds the table on a 2048-point grid, doubling the resolution until the
    /// trapezoid and Simpson totals agree to a relative 1e-6.
    pub fn build<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64) -> Option<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        let mut points = GRID_POINTS;
        loop {
            let step = (hi - lo) / points as f64;
            let values: Vec<f64> = (0..=points)
                .map(|i| {
                    let v = density(lo + step * i as f64);
                    // integrable endpoint singularities are dropped from the grid
                    if v.is_finite() {
                        v.max(0.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let mut cumulative = Vec::with_capacity(points + 1);
            cumulative.push(0.0);
            let mut acc = 0.0;
            for w in values.windows(2) {
                acc += 0.5 * step * (w[0] + w[1]);
                cumulative.push(acc);
            }
            let simpson: f64 = values
                .chunks_exact(2)
                .zip(values[1..].chunks_exact(2))
                .map(|(a, b)| step / 3.0 * (a[0] + 4.0 * a[1] + b[1]))
                .sum();
            if acc <= 0.0 {
                return None;
            }
            if ((acc - simpson) / acc).abs() < GRID_REL_TOL || points >= MAX_GRID_POINTS {
                return Some(InverseCdf {
                    lo,
                    step,
                    cumulative,
                });
            }
            points *= 2;
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let total = *self.cumulative.last().expect("non-empty");
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        let cell = idx.clamp(1, self.cumulative.len() - 1) - 1;
        let (c0, c1) = (self.cumulative[cell], self.cumulative[cell + 1]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.lo + self.step * (cell as f64 + frac.clamp(0.0, 1.0))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_cdf_of_triangle() {
        // density 2t on [0,1], quantile sqrt(u)
        let table = InverseCdf::build(|t| 2.0 * t, 0.0, 1.0).unwrap();
        for u in [0.01, 0.25, 0.5, 0.9] {
            assert!((table.quantile(u) - u.sqrt()).abs() < 1e-4);
        }
    }

    #[test]
    fn truncated_exponential_matches_cdf() {
        let k = ContinuousKernel::TruncatedExponential {
            lo: 0.0,
            hi: 2.0,
            tilt: -1.5,
        };
        for u in [0.1, 0.5, 0.95] {
            let t = truncated_exponential_quantile(0.0, 2.0, -1.5, u);
            assert!((k.cdf(t) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn table_inversion_skips_empty_cells() {
        let w = [0.0, 1.0, 0.0, 3.0];
        assert_eq!(invert_table(&w, 0.0), 1);
        assert_eq!(invert_table(&w, 0.24), 1);
        assert_eq!(invert_table(&w, 0.26), 3);
        assert_eq!(invert_table(&w, 0.999_999), 3);
    }

    #[test]
    fn lattice_pmfs_sum_to_one() {
        let laws = [
            LatticeKernel::UniformInt { lo: 0, hi: 4 },
            LatticeKernel::Binomial { n: 7, p: 0.3 },
            LatticeKernel::ShiftedBernoulli { shift: 2, p: 0.25 },
        ];
        for law in &laws {
            let total: f64 = (-5..20).map(|t| law.pmf(t)).sum();
            assert!((total - 1.0).abs() < 1e-12, "{law:?}");
        }
        let g = LatticeKernel::ShiftedGeometric { shift: 3, p: 0.4 };
        let total: f64 = (0..200).map(|t| g.pmf(t)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| g.sample(&mut rng) >= 3));
    }
}
