use std::collections::BTreeMap;

use statrs::function::gamma::{gamma_lr, gamma_ur};

use super::{check_significance, TestResult, Verdict};
use crate::error::{Error, Result};
use crate::timeline::EventTimeline;

/// Counts per bin for `k` equal bins on `(0, T]`; bin `j` is `(jT/k, (j+1)T/k]`.
pub(crate) fn bin_counts(t: &EventTimeline, k: usize) -> Vec<u64> {
    let window = t.window_end();
    let mut counts = vec![0u64; k];
    for &x in t.events() {
        let pos = x * k as f64 / window;
        let j = (pos.ceil() as usize).clamp(1, k) - 1;
        counts[j] += 1;
    }
    counts
}

/// Index-of-dispersion test over `k_bins` equal bins:
/// `D = Σ (c_j − c̄)² / c̄`, compared with χ²(k − 1).
///
/// Two-sided: clustering (too variable) and regularity (too even) both fail.
pub fn dispersion_test(t: &EventTimeline, k_bins: usize, significance: f64) -> Result<TestResult> {
    check_significance(significance)?;
    if k_bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "dispersion test needs at least 2 bins, got {k_bins}"
        )));
    }
    let n = t.len();
    let mut parameters = BTreeMap::new();
    parameters.insert("significance".into(), significance);
    parameters.insert("bins".into(), k_bins as f64);
    parameters.insert("n".into(), n as f64);

    let mut r = TestResult {
        name: "index_of_dispersion".into(),
        method: format!("index of dispersion over {k_bins} equal bins vs chi-square, two-sided"),
        statistic: None,
        p_value: None,
        verdict: Verdict::InsufficientData,
        parameters,
        details: String::new(),
    };
    if n == 0 {
        r.details = "insufficient data: no events".into();
        return Ok(r);
    }
    let counts = bin_counts(t, k_bins);
    let mean = n as f64 / k_bins as f64;
    let d: f64 = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / mean;
    let df = (k_bins - 1) as f64;
    let (lower, upper) = if d > 0.0 {
        (gamma_lr(df / 2.0, d / 2.0), gamma_ur(df / 2.0, d / 2.0))
    } else {
        (0.0, 1.0)
    };
    let p = (2.0 * lower.min(upper)).clamp(0.0, 1.0);
    r.statistic = Some(d);
    r.p_value = Some(p);
    r.verdict = Verdict::from_p(p, significance);
    let ratio = d / df;
    r.parameters.insert("dispersion_ratio".into(), ratio);
    let mut details = vec![format!("variance/mean ratio {ratio:.4}")];
    if r.verdict == Verdict::Fail {
        details.push(if lower < upper {
            "counts too even (under-dispersed)".into()
        } else {
            "counts too variable (over-dispersed)".into()
        });
    }
    if mean < 5.0 {
        details.push(format!(
            "warning: {mean:.2} expected events per bin (< 5); chi-square approximation is rough"
        ));
    }
    r.details = details.join("; ");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_open_closed() {
        let t = EventTimeline::new(10.0, vec![0.5, 5.0, 5.0001, 10.0], None).unwrap();
        assert_eq!(bin_counts(&t, 2), vec![2, 2]);
        assert_eq!(bin_counts(&t, 10), vec![1, 0, 0, 0, 1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn regular_process_is_underdispersed() {
        let t = EventTimeline::new(100.0, (1..=100).map(|i| i as f64).collect(), None).unwrap();
        let r = dispersion_test(&t, 10, 0.05).unwrap();
        assert_eq!(r.statistic, Some(0.0));
        assert!(r.p_value.unwrap() < 1e-6);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.details.contains("under-dispersed"));
    }

    #[test]
    fn clustered_process_is_overdispersed() {
        let mut ev: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 * 0.01).collect();
        ev.extend((0..50).map(|i| 90.0 + i as f64 * 0.01));
        let t = EventTimeline::new(100.0, ev, None).unwrap();
        let r = dispersion_test(&t, 10, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.details.contains("over-dispersed"));
    }

    #[test]
    fn known_p_value() {
        // counts [3, 1] -> mean 2, D = (1 + 1) / 2 = 1, df = 1
        // p = 2 * P(chi2_1 > 1) = 0.6346210157 (scipy)
        let t = EventTimeline::new(2.0, vec![0.2, 0.4, 0.6, 1.5], None).unwrap();
        let r = dispersion_test(&t, 2, 0.05).unwrap();
        assert_eq!(r.statistic, Some(1.0));
        let p = r.p_value.unwrap();
        assert!((p - 0.634_621_015_7).abs() < 1e-9, "{p}");
        assert!(r.details.contains("warning"));
    }

    #[test]
    fn bad_inputs() {
        let t = EventTimeline::new(2.0, vec![1.0], None).unwrap();
        assert!(dispersion_test(&t, 1, 0.05).is_err());
        assert!(dispersion_test(&t, 0, 0.05).is_err());
        let e = EventTimeline::empty(2.0).unwrap();
        assert_eq!(
            dispersion_test(&e, 4, 0.05).unwrap().verdict,
            Verdict::InsufficientData
        );
    }
}
