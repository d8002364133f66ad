//! Closed forms of a preset against the generic computations.

use super::{KernelLaw, ModelPreset};
use crate::error::Result;
use crate::measures::{Evaluation, IntensityMeasure, Kernel, MeasureKind};
use crate::rng::Seed;
use crate::statistics::hypothesis::{chi_square_gof, ks_one_sample};
use crate::statistics::{Criterion, StatReport};

/// Relative tolerance of the rate comparison.
pub const RATE_TOLERANCE: f64 = 1e-6;

/// Densities below this are treated as underflowed and skipped.
const MIN_WEIGHT: f64 = 1e-250;

fn quantile(nu: &IntensityMeasure, p: f64) -> f64 {
    let (mut lo, mut hi) = nu.effective_range();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if nu.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Up to `n` distinct points of the support of `nu`: quantiles at evenly
/// spaced levels in `[1e-6, 1 - 1e-6]` (continuous) or evenly spaced atoms
/// between those quantiles (lattice). Far tails are left out because the
/// generic path truncates them.
pub fn support_points(nu: &IntensityMeasure, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = match nu.kind() {
        MeasureKind::Continuous => (0..n)
            .map(|i| {
                let p = 1e-6 + (1.0 - 2e-6) * i as f64 / (n.max(2) - 1) as f64;
                quantile(nu, p)
            })
            .collect(),
        MeasureKind::Lattice => {
            let (first, last) = nu.index_range().expect("lattice");
            let at = |k: i64| nu.cdf(k as f64 * nu.step());
            let lo = (first..=last).find(|&k| at(k) >= 1e-6).unwrap_or(first);
            let hi = (first..=last).find(|&k| at(k) >= 1.0 - 1e-6).unwrap_or(last);
            let span = (hi - lo) as usize;
            (0..n)
                .map(|i| lo + (i * span / (n.max(2) - 1)) as i64)
                .filter(|&k| nu.atom(k) > 0.0)
                .map(|k| k as f64 * nu.step())
                .collect()
        }
    };
    out.dedup();
    out
}

fn relative_error(generic: f64, closed: f64) -> f64 {
    if generic == closed {
        0.0
    } else {
        (generic - closed).abs() / closed.abs().max(f64::MIN_POSITIVE)
    }
}

/// Largest relative deviation between the closed-form normalized rates and
/// `G(s) / (g(s) ν(ℝ))` computed by the generic path, on `n` support points of
/// each measure. Empty for presets without closed forms.
pub fn check_rates(preset: &ModelPreset, n: usize) -> Vec<StatReport> {
    let generic = preset.params.clone().with_evaluation(Evaluation::Generic);
    let (v, h) = (generic.nu_v(), generic.nu_h());
    let mut out = Vec::new();
    for (side, nu, other_mass, closed) in [
        ("vertical", v, h.mass(), &|s| preset.vertical_rate_ratio(s) as Option<f64>),
        ("horizontal", h, v.mass(), &|s| preset.horizontal_rate_ratio(s)),
    ] as [(&str, &IntensityMeasure, f64, &dyn Fn(f64) -> Option<f64>); 2]
    {
        let mut worst: f64 = 0.0;
        let mut at = f64::NAN;
        let mut points = 0;
        for s in support_points(nu, n) {
            let g = nu.weight(s);
            let Some(c) = closed(s) else {
                return Vec::new();
            };
            if !(g > MIN_WEIGHT) || !c.is_finite() {
                continue;
            }
            points += 1;
            let e = relative_error(generic.convolution(s) / (g * other_mass), c);
            if !(e <= worst) || at.is_nan() {
                worst = e;
                at = s;
            }
        }
        out.push(StatReport::new(
            format!("{} {side} rate ratio ({points} points, worst at s={at})", preset.name),
            worst,
            "closed form",
            Criterion::Tolerance {
                deviation: worst,
                tolerance: RATE_TOLERANCE,
            },
        ));
    }
    out
}

/// `n` totals drawn from `ν_V ∗ ν_H`.
pub fn kernel_totals(preset: &ModelPreset, n: usize, seed: Seed) -> Vec<f64> {
    let p = &preset.params;
    let mut rng = seed.rng();
    (0..n)
        .map(|_| match p.kind() {
            MeasureKind::Continuous => p.nu_v().sample(&mut rng) + p.nu_h().sample(&mut rng),
            MeasureKind::Lattice => {
                (p.nu_v().sample_index(&mut rng) + p.nu_h().sample_index(&mut rng)) as f64 * p.step()
            }
        })
        .collect()
}

/// Draws `samples` generic-path kernel samples at each of three totals and
/// tests them against the closed-form law (KS or chi-square), at `level`
/// split over the three tests.
pub fn check_kernels(preset: &ModelPreset, samples: usize, seed: Seed, level: f64) -> Result<Vec<StatReport>> {
    let generic = preset.params.clone().with_evaluation(Evaluation::Generic);
    let mut out = Vec::new();
    let totals = kernel_totals(preset, 3, seed);
    for (j, &s) in totals.iter().enumerate() {
        let Some(law) = preset.kernel(s) else {
            return Ok(Vec::new());
        };
        let kernel = generic.kernel(s)?;
        let mut rng = seed.replica(j as u64 + 1).rng();
        let draws: Vec<f64> = (0..samples).map(|_| kernel.sample(&mut rng)).collect();
        let name = format!("{} kernel at s={s}", preset.name);
        let report = match (&law, &kernel) {
            (KernelLaw::Continuous(c), _) => {
                let (d, p) = ks_one_sample(&draws, |t| c.cdf(t));
                StatReport::new(format!("{name} (KS)"), d, format!("{c:?}"), Criterion::PValue { p, level: level / 3.0 })
            }
            (KernelLaw::Lattice(l), Kernel::Lattice { step, .. }) => {
                let idx: Vec<i64> = draws.iter().map(|t| (t / step).round() as i64).collect();
                let lo = *idx.iter().min().expect("samples");
                let hi = *idx.iter().max().expect("samples");
                // cells lo..=hi, plus one for the closed-form mass outside them
                let mut observed = vec![0u64; (hi - lo + 2) as usize];
                for &t in &idx {
                    observed[(t - lo) as usize] += 1;
                }
                let mut probs: Vec<f64> = (lo..=hi).map(|t| l.pmf(t)).collect();
                probs.push((1.0 - probs.iter().sum::<f64>()).max(0.0));
                let (stat, _, p) = chi_square_gof(&observed, &probs);
                StatReport::new(
                    format!("{name} (chi-square)"),
                    stat,
                    format!("{l:?}"),
                    Criterion::PValue { p, level: level / 3.0 },
                )
            }
            (KernelLaw::Lattice(_), _) => unreachable!("lattice preset with a continuous kernel"),
        };
        out.push(report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::default_preset;

    #[test]
    fn support_points_stay_in_the_support() {
        let p = default_preset("negexp-exp").unwrap();
        let pts = support_points(p.params.nu_v(), 100);
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|&s| s <= 0.0));
        let p = default_preset("ber-ber").unwrap();
        assert_eq!(support_points(p.params.nu_v(), 100), vec![0.0, 1.0]);
    }

    #[test]
    fn normal_rates_and_kernel() {
        let p = default_preset("normal").unwrap();
        assert!(check_rates(&p, 100).iter().all(StatReport::passed));
        let k = check_kernels(&p, 20_000, Seed::new(1, 0), 0.001).unwrap();
        assert_eq!(k.len(), 3);
        assert!(k.iter().all(StatReport::passed), "{k:?}");
    }

    #[test]
    fn a_wrong_closed_form_is_caught() {
        let mut p = default_preset("exp-exp").unwrap();
        p.family = crate::catalog::Family::ExpExp { gamma: 1.001 };
        assert!(!check_rates(&p, 100).iter().all(StatReport::passed));
        p.family = crate::catalog::Family::Normal;
        let k = check_kernels(&p, 20_000, Seed::new(1, 0), 0.001).unwrap();
        assert!(!k.iter().all(StatReport::passed));
    }
}
