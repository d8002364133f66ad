//! Test statistics and their p-values.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

/// One-sample Kolmogorov–Smirnov test: `(D, p)`. An empty sample gives `(0, 1)`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> (f64, f64) {
    if sample.is_empty() {
        return (0.0, 1.0);
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    (d, ks_p_value(d, n))
}

/// Two-sample Kolmogorov–Smirnov test: `(D, p)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 1.0);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    (d, ks_p_value(d, n * m / (n + m)))
}

/// Pearson chi-square goodness of fit of `observed` counts against cell
/// probabilities. Adjacent cells are pooled until each expects at least 5
/// observations. Returns `(statistic, degrees of freedom, p)`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> (f64, usize, f64) {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let total: f64 = probs.iter().sum();
    if n == 0 {
        return (0.0, 0, 1.0);
    }
    // an observation in an impossible cell refutes the law outright
    if observed.iter().zip(probs).any(|(&o, &p)| o > 0 && p <= 0.0) {
        return (f64::INFINITY, observed.len().saturating_sub(1), 0.0);
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probs) {
        o += obs as f64;
        e += p / total * n as f64;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    if cells.len() < 2 {
        return (0.0, 0, 1.0);
    }
    let stat: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = cells.len() - 1;
    let p = if stat.is_finite() {
        1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(stat)
    } else {
        0.0
    };
    (stat, dof, p)
}

/// Two-sided p-value of a standard normal score.
pub fn normal_two_sided(z: f64) -> f64 {
    if !z.is_finite() {
        return if z.is_nan() { 1.0 } else { 0.0 };
    }
    2.0 * (1.0 - Normal::new(0.0, 1.0).expect("standard").cdf(z.abs()))
}

/// Two-sided p-value of a chi-square statistic with `dof` degrees of freedom,
/// used for dispersion indices.
pub fn chi_square_two_sided(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let c = ChiSquared::new(dof as f64).expect("dof > 0").cdf(stat);
    (2.0 * c.min(1.0 - c)).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// unbiased sample variance
    pub var: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Moments {
        let n = xs.len();
        if n == 0 {
            return Moments { n, mean: f64::NAN, var: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Moments { n, mean, var }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        (self.var / self.n as f64).sqrt()
    }
}

/// Pearson correlation; zero when either sample is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (Moments::of(xs), Moments::of(ys));
    if !(mx.var > 0.0 && my.var > 0.0) {
        return 0.0;
    }
    let cov = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx.mean) * (y - my.mean))
        .sum::<f64>()
        / (xs.len() - 1) as f64;
    cov / (mx.var * my.var).sqrt()
}
