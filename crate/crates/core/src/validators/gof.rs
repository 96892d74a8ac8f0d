use std::collections::BTreeMap;

use rand::RngCore;
use rayon::prelude::*;

use super::{check_significance, TestResult, Verdict};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::timeline::EventTimeline;

const MIN_GAPS: usize = 5;

/// Kolmogorov–Smirnov distance between the sample and an exponential law
/// whose rate is estimated from the same sample (`n / Σ x`).
///
/// Sorts `xs` in place.
pub fn exponential_ks_distance(xs: &mut [f64]) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let total: f64 = xs.iter().sum();
    if total <= 0.0 {
        return 1.0;
    }
    let rate = n as f64 / total;
    let nf = n as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = -(-rate * x).exp_m1();
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Exponential goodness of fit of the inter-arrival gaps (first gap from 0).
///
/// The rate is estimated from the data, so the KS null distribution is
/// obtained by parametric bootstrap: `resamples` samples of `n` unit
/// exponentials, each scored with its own estimated rate. The statistic is
/// scale-free, so the unit rate loses nothing. The p-value is
/// `(1 + #{D* >= D}) / (resamples + 1)`.
///
/// One value is drawn from `rng` to key the bootstrap; resample `b` then uses
/// its own substream, so the result is reproducible and parallel-safe.
pub fn exp_gof_test(
    t: &EventTimeline,
    significance: f64,
    resamples: usize,
    rng: &mut RngStream,
) -> Result<TestResult> {
    check_significance(significance)?;
    if resamples == 0 {
        return Err(Error::InvalidArgument(
            "resamples must be at least 1".into(),
        ));
    }
    let mut gaps = t.gaps();
    let n = gaps.len();
    let mut parameters = BTreeMap::new();
    parameters.insert("significance".into(), significance);
    parameters.insert("resamples".into(), resamples as f64);
    parameters.insert("n".into(), n as f64);

    let mut r = TestResult {
        name: "exponential_gaps_ks".into(),
        method: "Kolmogorov-Smirnov vs exponential with estimated rate, parametric bootstrap"
            .into(),
        statistic: None,
        p_value: None,
        verdict: Verdict::InsufficientData,
        parameters,
        details: String::new(),
    };
    if n < MIN_GAPS {
        r.details = format!("insufficient data: {n} gaps, need at least {MIN_GAPS}");
        return Ok(r);
    }
    let d = exponential_ks_distance(&mut gaps);
    let rate = n as f64 / t.events()[n - 1];
    r.parameters.insert("rate_estimate".into(), rate);

    let base = RngStream::new(rng.seed(), rng.next_u64());
    let exceed = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut s = base.substream(b);
            let mut xs: Vec<f64> = (0..n).map(|_| -s.open01().ln()).collect();
            exponential_ks_distance(&mut xs)
        })
        .filter(|&dstar| dstar >= d)
        .count();
    let p = (1 + exceed) as f64 / (resamples + 1) as f64;
    r.statistic = Some(d);
    r.p_value = Some(p);
    r.verdict = Verdict::from_p(p, significance);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_distance_small_case() {
        // xs = {1, 2, 3}: rate = 0.5, F(x) = 1 - exp(-x/2)
        let mut xs = vec![3.0, 1.0, 2.0];
        let d = exponential_ks_distance(&mut xs);
        let f = |x: f64| 1.0 - (-x / 2.0).exp();
        let expect = [
            (1.0 / 3.0 - f(1.0)).max(f(1.0)),
            (2.0 / 3.0 - f(2.0)).max(f(2.0) - 1.0 / 3.0),
            (1.0 - f(3.0)).max(f(3.0) - 2.0 / 3.0),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        assert!((d - expect).abs() < 1e-15);
    }

    #[test]
    fn ks_is_scale_free() {
        let mut a = vec![0.3, 1.7, 0.2, 4.1, 0.9, 2.2];
        let mut b: Vec<f64> = a.iter().map(|x| x * 1234.5).collect();
        assert!((exponential_ks_distance(&mut a) - exponential_ks_distance(&mut b)).abs() < 1e-12);
    }

    #[test]
    fn equal_gaps_are_rejected() {
        let t = EventTimeline::new(100.0, (1..=100).map(|i| i as f64).collect(), None).unwrap();
        let r = exp_gof_test(&t, 0.05, 1000, &mut RngStream::new(1, 0)).unwrap();
        // all gaps equal -> F(1) = 1 - e^-1 at a single atom, D = max(1 - 0.632, 0.632)
        assert!((r.statistic.unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.p_value.unwrap() <= 1.0 / 1001.0 + 1e-15);
    }

    #[test]
    fn four_events_are_insufficient() {
        let t = EventTimeline::new(10.0, vec![1.0, 2.0, 4.0, 7.0], None).unwrap();
        let r = exp_gof_test(&t, 0.05, 100, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::InsufficientData);
    }

    #[test]
    fn deterministic_given_rng() {
        let t = EventTimeline::new(10.0, vec![0.5, 1.0, 2.0, 4.0, 7.0, 9.5], None).unwrap();
        let a = exp_gof_test(&t, 0.05, 200, &mut RngStream::new(9, 2)).unwrap();
        let b = exp_gof_test(&t, 0.05, 200, &mut RngStream::new(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_resamples_rejected() {
        let t = EventTimeline::empty(1.0).unwrap();
        assert!(exp_gof_test(&t, 0.05, 0, &mut RngStream::new(1, 0)).is_err());
    }
}
