//! Expected-value oracles and the statistical harness run on simulated
//! ensembles.
//!
//! Every test is a deterministic function of its arguments: replicas are
//! simulated in parallel, one per derived seed, and folded in replica order.

mod ensemble;
pub mod hypothesis;
mod oracles;

use std::fmt::{self, Write as _};

use serde::Serialize;

pub use ensemble::{
    evaluate_cross_section, evaluate_exits, evaluate_face_limits, evaluate_mean_counts,
    evaluate_reversibility, summarize, test_cross_section, test_exit_processes, test_face_limits,
    test_mean_counts, test_reversibility, test_staircase, EnsembleConfig, FaceSummary, Hits, Needs,
    ReplicaSummary, Section,
};
pub use oracles::{
    expected_face_count, expected_face_limits, expected_node_counts, ExpectedCounts, FaceLimits,
    RateIntegrals,
};

/// Thresholds shared by a suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Levels {
    /// Family-wise level of the p-value tests of one suite, split evenly
    /// among them.
    pub level: f64,
    /// Width of the acceptance band for means, in standard errors.
    pub band: f64,
    /// Absolute tolerance on face-limit statistics.
    pub face_tolerance: f64,
}

impl Default for Levels {
    fn default() -> Self {
        Levels {
            level: 0.001,
            band: 3.0,
            face_tolerance: 0.1,
        }
    }
}

/// How a report is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// pass iff `p >= level`
    PValue { p: f64, level: f64 },
    /// pass iff `|z| <= band`
    ZScore { z: f64, band: f64 },
    /// pass iff `|deviation| <= tolerance`
    Tolerance { deviation: f64, tolerance: f64 },
    /// a property that must hold in every replica
    Exact { violations: usize },
}

impl Criterion {
    pub fn passed(&self) -> bool {
        match *self {
            Criterion::PValue { p, level } => p >= level,
            Criterion::ZScore { z, band } => z.abs() <= band,
            Criterion::Tolerance { deviation, tolerance } => deviation.abs() <= tolerance,
            Criterion::Exact { violations } => violations == 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatReport {
    pub name: String,
    /// Observed value of the statistic.
    pub statistic: f64,
    /// Reference value or law.
    pub reference: String,
    pub criterion: Criterion,
}

impl StatReport {
    pub fn new(name: impl Into<String>, statistic: f64, reference: impl Into<String>, criterion: Criterion) -> Self {
        StatReport {
            name: name.into(),
            statistic,
            reference: reference.into(),
            criterion,
        }
    }

    pub fn passed(&self) -> bool {
        self.criterion.passed()
    }
}

impl fmt::Display for StatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} statistic={} reference={} ", self.name, self.statistic, self.reference)?;
        match self.criterion {
            Criterion::PValue { p, level } => write!(f, "p={p:.6} level={level}"),
            Criterion::ZScore { z, band } => write!(f, "z={z:.4} band={band}"),
            Criterion::Tolerance { deviation, tolerance } => {
                write!(f, "deviation={deviation:.3e} tolerance={tolerance}")
            }
            Criterion::Exact { violations } => write!(f, "violations={violations}"),
        }
    }
}

/// Line-oriented report document.
pub fn reports_to_text(suite: &str, reports: &[StatReport]) -> String {
    let mut out = String::from("pks-report 1\n");
    let _ = writeln!(out, "suite {suite}");
    let _ = writeln!(out, "reports {}", reports.len());
    for r in reports {
        let _ = writeln!(out, "{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "verdict {}", if failed == 0 { "pass" } else { "fail" });
    out.push_str("end\n");
    out
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    format: &'static str,
    suite: &'a str,
    passed: bool,
    reports: Vec<ReportEntry<'a>>,
}

#[derive(Serialize)]
struct ReportEntry<'a> {
    #[serde(flatten)]
    report: &'a StatReport,
    passed: bool,
}

/// Machine-readable report document.
pub fn reports_to_json(suite: &str, reports: &[StatReport]) -> String {
    let doc = ReportDocument {
        format: "pks-report 1",
        suite,
        passed: reports.iter().all(StatReport::passed),
        reports: reports
            .iter()
            .map(|report| ReportEntry {
                report,
                passed: report.passed(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

/// Splits `level` evenly among the p-value reports.
pub(crate) fn bonferroni(reports: &mut [StatReport], level: f64) {
    let k = reports
        .iter()
        .filter(|r| matches!(r.criterion, Criterion::PValue { .. }))
        .count()
        .max(1);
    for r in reports {
        if let Criterion::PValue { level: l, .. } = &mut r.criterion {
            *l = level / k as f64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_depends_only_on_statistic_and_level() {
        let r = StatReport::new("x", 0.3, "U", Criterion::PValue { p: 0.002, level: 0.001 });
        assert!(r.passed());
        let r = StatReport::new("x", 0.3, "U", Criterion::PValue { p: 0.0009, level: 0.001 });
        assert!(!r.passed());
        assert!(Criterion::ZScore { z: -3.0, band: 3.0 }.passed());
        assert!(!Criterion::Tolerance { deviation: 0.11, tolerance: 0.1 }.passed());
    }

    #[test]
    fn bonferroni_splits_the_level() {
        let mut rs = vec![
            StatReport::new("a", 0.0, "", Criterion::PValue { p: 0.5, level: 0.0 }),
            StatReport::new("b", 0.0, "", Criterion::PValue { p: 0.5, level: 0.0 }),
            StatReport::new("c", 0.0, "", Criterion::ZScore { z: 0.0, band: 3.0 }),
        ];
        bonferroni(&mut rs, 0.001);
        assert_eq!(rs[0].criterion, Criterion::PValue { p: 0.5, level: 0.0005 });
    }

    #[test]
    fn documents() {
        let rs = vec![StatReport::new("mean", 1.0, "1", Criterion::ZScore { z: 0.5, band: 3.0 })];
        let text = reports_to_text("means", &rs);
        assert!(text.starts_with("pks-report 1\nsuite means\nreports 1\nPASS mean"));
        assert!(text.ends_with("verdict pass\nend\n"));
        let json: serde_json::Value = serde_json::from_str(&reports_to_json("means", &rs)).unwrap();
        assert_eq!(json["passed"], true);
        assert_eq!(json["reports"][0]["criterion"]["kind"], "z_score");
    }
}
