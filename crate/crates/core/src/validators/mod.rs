//! Tests of the four Poisson assumptions on one observed timeline.
//!
//! No single test is prescribed for any of the assumptions, so each one is
//! checked by a standard proxy:
//!
//! | assumption | test |
//! |---|---|
//! | proportionality | exponential goodness of fit of the gaps ([`exp_gof_test`]) |
//! | singularity | minimum gap above a tolerance ([`singularity_check`]) |
//! | homogeneity | Laplace trend test ([`laplace_trend_test`]) |
//! | independence | two-sided index-of-dispersion test ([`dispersion_test`]) |
//!
//! The same mapping is written into every [`AssumptionReport`].

mod dispersion;
mod gof;
mod laplace;
mod singularity;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use dispersion::dispersion_test;
pub use gof::{exp_gof_test, exponential_ks_distance};
pub use laplace::laplace_trend_test;
pub use singularity::singularity_check;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::timeline::EventTimeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientData,
}

impl Verdict {
    pub fn from_p(p: f64, significance: f64) -> Verdict {
        if p >= significance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::InsufficientData => "INSUFFICIENT DATA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub method: String,
    /// `None` when there was too little data to compute it.
    pub statistic: Option<f64>,
    /// `None` for checks that have no sampling distribution.
    pub p_value: Option<f64>,
    pub verdict: Verdict,
    pub parameters: BTreeMap<String, f64>,
    pub details: String,
}

impl TestResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub(crate) fn check_significance(significance: f64) -> Result<()> {
    if significance > 0.0 && significance < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "significance must lie in (0, 1), got {significance}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Per-test significance level.
    pub significance: f64,
    pub bins: usize,
    /// Coincidence tolerance for the singularity check, in hours.
    pub epsilon: f64,
    pub resamples: usize,
    /// Divide the significance by four (Bonferroni) to bound the family-wise error.
    pub family_wise: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            significance: 0.05,
            bins: 20,
            epsilon: 0.0,
            resamples: 1000,
            family_wise: false,
        }
    }
}

impl SuiteConfig {
    pub fn per_test_significance(&self) -> f64 {
        if self.family_wise {
            self.significance / 4.0
        } else {
            self.significance
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub window_end: f64,
    pub events: usize,
    pub proportionality: TestResult,
    pub singularity: TestResult,
    pub homogeneity: TestResult,
    pub independence: TestResult,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl AssumptionReport {
    pub fn results(&self) -> [(&'static str, &TestResult); 4] {
        [
            ("proportionality", &self.proportionality),
            ("singularity", &self.singularity),
            ("homogeneity", &self.homogeneity),
            ("independence", &self.independence),
        ]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        for (key, r) in self.results() {
            obj.insert(
                key.to_string(),
                serde_json::json!({
                    "test": r.name,
                    "statistic": r.statistic,
                    "p_value": r.p_value,
                    "verdict": r.verdict,
                    "method": r.method,
                    "parameters": r.parameters,
                    "details": r.details,
                }),
            );
        }
        obj.insert("overall".into(), serde_json::json!(self.overall));
        obj.insert("window_end".into(), serde_json::json!(self.window_end));
        obj.insert("events".into(), serde_json::json!(self.events));
        obj.insert("notes".into(), serde_json::json!(self.notes));
        serde_json::Value::Object(obj)
    }

    pub fn text_summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "Poisson assumption report: {} events on (0, {}] h",
            self.events, self.window_end
        );
        for (key, r) in self.results() {
            let stat = r
                .statistic
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into());
            let p = r
                .p_value
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{key:<16} {:<17} {:<28} statistic={stat} p={p}",
                r.verdict.label(),
                r.name
            );
            if !r.details.is_empty() {
                let _ = writeln!(s, "{:<16} {}", "", r.details);
            }
        }
        let _ = writeln!(
            s,
            "{:<16} {}",
            "overall",
            if self.overall { "PASS" } else { "FAIL" }
        );
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Runs all four checks and combines them; `overall` passes only if each one does.
pub fn assess_poisson(
    t: &EventTimeline,
    config: &SuiteConfig,
    rng: &mut RngStream,
) -> Result<AssumptionReport> {
    let alpha = config.per_test_significance();
    let proportionality = exp_gof_test(t, alpha, config.resamples, rng)?;
    let singularity = singularity_check(t, config.epsilon)?;
    let homogeneity = laplace_trend_test(t, alpha)?;
    let independence = dispersion_test(t, config.bins, alpha)?;
    let overall = [&proportionality, &singularity, &homogeneity, &independence]
        .iter()
        .all(|r| r.passed());
    let mut notes = vec![
        "proportionality: exponential gaps (KS, parametric bootstrap); singularity: minimum gap; \
         homogeneity: Laplace trend; independence: two-sided index of dispersion"
            .to_string(),
    ];
    if config.family_wise {
        notes.push(format!(
            "family-wise correction on: each test run at {alpha} (= {} / 4)",
            config.significance
        ));
    } else {
        notes.push(format!(
            "no family-wise correction: each test run at {alpha}, so the joint false-alarm rate exceeds {alpha}"
        ));
    }
    Ok(AssumptionReport {
        window_end: t.window_end(),
        events: t.len(),
        proportionality,
        singularity,
        homogeneity,
        independence,
        overall,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_timeline_is_insufficient_on_three_tests() {
        let t = EventTimeline::empty(100.0).unwrap();
        let r = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(0, 0)).unwrap();
        assert!(!r.overall);
        let insufficient = r
            .results()
            .iter()
            .filter(|(_, x)| x.verdict == Verdict::InsufficientData)
            .count();
        assert_eq!(insufficient, 3);
        assert!(r.singularity.passed());
    }

    #[test]
    fn json_has_one_entry_per_assumption() {
        let t = EventTimeline::new(10.0, vec![1.0, 2.0, 3.5, 4.0, 6.0, 8.5, 9.0], None).unwrap();
        let r = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(0, 0)).unwrap();
        let j = r.to_json();
        for key in [
            "proportionality",
            "singularity",
            "homogeneity",
            "independence",
        ] {
            let e = &j[key];
            for field in ["statistic", "p_value", "verdict", "method", "parameters"] {
                assert!(e.get(field).is_some(), "{key}.{field}");
            }
        }
        assert_eq!(j["overall"], serde_json::json!(r.overall));
    }

    #[test]
    fn family_wise_divides_by_four() {
        let c = SuiteConfig {
            family_wise: true,
            ..SuiteConfig::default()
        };
        assert_eq!(c.per_test_significance(), 0.0125);
    }

    #[test]
    fn summary_is_stable() {
        let t = EventTimeline::new(10.0, vec![1.0, 2.0, 3.5, 4.0, 6.0, 8.5, 9.0], None).unwrap();
        let a = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(4, 0)).unwrap();
        let b = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(4, 0)).unwrap();
        assert_eq!(a.text_summary(), b.text_summary());
        assert!(a
            .text_summary()
            .lines()
            .next()
            .unwrap()
            .contains("7 events"));
    }
}
