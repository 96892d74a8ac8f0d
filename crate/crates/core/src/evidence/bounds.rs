use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};

fn chi_square_pdf(k: f64, x: f64) -> f64 {
    let h = k / 2.0;
    ((h - 1.0) * x.ln() - x / 2.0 - h * std::f64::consts::LN_2 - ln_gamma(h)).exp()
}

/// Quantile of the chi-square law with `df` degrees of freedom.
///
/// Newton steps on the regularized incomplete gamma function inside a
/// shrinking bisection bracket. The tail farther from 1/2 is inverted
/// directly (lower tail for `p < 1/2`, upper tail otherwise) so extreme
/// probabilities keep full relative accuracy.
pub fn chi_square_quantile(df: u32, p: f64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument("df must be at least 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "probability must lie in (0, 1), got {p}"
        )));
    }
    let k = df as f64;
    if df == 2 {
        return Ok(-2.0 * (-p).ln_1p());
    }
    let upper_tail = p >= 0.5;
    let target = if upper_tail { 1.0 - p } else { p };
    // Signed miss: positive when x is too large.
    let miss = |x: f64| {
        if upper_tail {
            target - gamma_ur(k / 2.0, x / 2.0)
        } else {
            gamma_lr(k / 2.0, x / 2.0) - target
        }
    };

    let mut x = k;
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for _ in 0..500 {
        let m = miss(x);
        if m == 0.0 {
            return Ok(x);
        }
        if m > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let mut next = x - m / chi_square_pdf(k, x);
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * x.max(1.0)
            };
        }
        if (next - x).abs() <= 1e-15 * x {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// One-sided upper confidence bound on a constant failure rate after `r`
/// failures in `exposure_hours`: `χ²(confidence; 2r + 2) / (2T)`.
/// For `r = 0` this is `−ln(1 − confidence) / T`.
pub fn rate_upper_bound(exposure_hours: f64, r: u64, confidence: f64) -> Result<f64> {
    if !(exposure_hours.is_finite() && exposure_hours > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "exposure must be finite and > 0 hours, got {exposure_hours}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let df = u32::try_from(2 * r + 2)
        .map_err(|_| Error::InvalidArgument(format!("failure count {r} too large")))?;
    Ok(chi_square_quantile(df, confidence)? / (2.0 * exposure_hours))
}

/// Exposure at which `rate_upper_bound(T, r, confidence)` equals `rate_limit`.
pub fn required_exposure(r: u64, confidence: f64, rate_limit: f64) -> Result<f64> {
    if !(rate_limit.is_finite() && rate_limit > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rate limit must be finite and > 0, got {rate_limit}"
        )));
    }
    Ok(rate_upper_bound(1.0, r, confidence)? / rate_limit)
}
