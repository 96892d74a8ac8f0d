use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use super::{check_significance, TestResult, Verdict};
use crate::error::Result;
use crate::timeline::EventTimeline;

/// Laplace trend test on a time-truncated window `(0, T]`:
///
/// ```text
/// U = (Σ t_i − n T / 2) / (T √(n / 12))
/// ```
///
/// standard normal under a homogeneous Poisson process; two-sided p-value.
/// With fewer than 3 events `U` is still reported but no verdict is given.
pub fn laplace_trend_test(t: &EventTimeline, significance: f64) -> Result<TestResult> {
    check_significance(significance)?;
    let n = t.len();
    let window = t.window_end();
    let mut parameters = BTreeMap::new();
    parameters.insert("significance".into(), significance);
    parameters.insert("n".into(), n as f64);
    parameters.insert("window_end".into(), window);

    let statistic = (n > 0).then(|| {
        let nf = n as f64;
        let sum: f64 = t.events().iter().sum();
        (sum - nf * window / 2.0) / (window * (nf / 12.0).sqrt())
    });

    let mut r = TestResult {
        name: "laplace_trend".into(),
        method: "Laplace trend test, two-sided normal p-value".into(),
        statistic,
        p_value: None,
        verdict: Verdict::InsufficientData,
        parameters,
        details: String::new(),
    };
    if n < 3 {
        r.details = format!("insufficient data: {n} events, need at least 3");
        return Ok(r);
    }
    let u = statistic.expect("n >= 3");
    let p = erfc(u.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    r.p_value = Some(p);
    r.verdict = Verdict::from_p(p, significance);
    r.details = if r.verdict == Verdict::Pass {
        String::new()
    } else if u > 0.0 {
        "events drift toward the end of the window".into()
    } else {
        "events drift toward the start of the window".into()
    };
    Ok(r)
}
