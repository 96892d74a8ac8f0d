use std::collections::BTreeMap;

use super::{TestResult, Verdict};
use crate::error::{Error, Result};
use crate::timeline::EventTimeline;

/// Passes iff the smallest gap between consecutive events exceeds `epsilon` hours.
pub fn singularity_check(t: &EventTimeline, epsilon: f64) -> Result<TestResult> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("epsilon".into(), epsilon);
    let min_gap = t
        .events()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(None, |acc: Option<f64>, g| {
            Some(acc.map_or(g, |a| a.min(g)))
        });
    let (verdict, details) = match min_gap {
        None => (
            Verdict::Pass,
            "fewer than 2 events; nothing can coincide".to_string(),
        ),
        Some(g) if g > epsilon => (Verdict::Pass, String::new()),
        Some(g) => (
            Verdict::Fail,
            format!("consecutive events {g} h apart, not more than the tolerance {epsilon} h"),
        ),
    };
    Ok(TestResult {
        name: "minimum_gap".into(),
        method: "minimum consecutive gap compared with tolerance".into(),
        statistic: min_gap,
        p_value: None,
        verdict,
        parameters,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_coincidence_fails() {
        let t = EventTimeline::new(10.0, vec![1.0, 1.0 + 1e-9, 5.0], None).unwrap();
        assert_eq!(singularity_check(&t, 1e-6).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn unit_spacing_passes() {
        let t = EventTimeline::new(10.0, vec![1.0, 2.0, 3.0], None).unwrap();
        let r = singularity_check(&t, 0.5).unwrap();
        assert!(r.passed());
        assert_eq!(r.statistic, Some(1.0));
    }

    #[test]
    fn empty_and_single_pass() {
        let e = EventTimeline::empty(10.0).unwrap();
        assert!(singularity_check(&e, 0.1).unwrap().passed());
        let one = EventTimeline::new(10.0, vec![3.0], None).unwrap();
        assert!(singularity_check(&one, 0.1).unwrap().passed());
    }

    #[test]
    fn exact_duplicates_fail_at_zero_tolerance() {
        let t = EventTimeline::new(10.0, vec![2.0, 2.0, 3.0], None).unwrap();
        assert_eq!(singularity_check(&t, 0.0).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let e = EventTimeline::empty(10.0).unwrap();
        assert!(singularity_check(&e, -1.0).is_err());
    }
}
