//! Renewal and Poisson process generators.

use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::timeline::EventTimeline;

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidHorizon(horizon))
    }
}

/// Appends `start, start + X1, start + X1 + X2, ...` up to `horizon`.
fn fill_renewals(first: f64, horizon: f64, next_gap: &mut dyn FnMut() -> f64, out: &mut Vec<f64>) {
    let mut t = first;
    while t <= horizon {
        // Guard against a gap too small to advance the clock at this magnitude.
        if out.last().is_none_or(|&prev| t > prev) {
            out.push(t);
        }
        t += next_gap();
    }
}

/// Ordinary renewal process: the first event is one full inter-arrival draw after 0.
pub fn simulate_renewal(
    dist: &DistributionSpec,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    check_horizon(horizon)?;
    let s = dist.sampler();
    let mut events = Vec::new();
    let first = s.sample(rng);
    fill_renewals(first, horizon, &mut || s.sample(rng), &mut events);
    EventTimeline::new(horizon, events, None)
}

/// Stationary (equilibrium) renewal process: the first event is drawn from
/// the forward recurrence law, so the expected count on `(0, t]` is exactly
/// `t / mean` for every `t`.
pub fn simulate_stationary_renewal(
    dist: &DistributionSpec,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    check_horizon(horizon)?;
    let s = dist.sampler();
    let mut events = Vec::new();
    let first = s.sample_forward_recurrence(rng);
    fill_renewals(first, horizon, &mut || s.sample(rng), &mut events);
    EventTimeline::new(horizon, events, None)
}

/// Intensity law of a Poisson process, in events per hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntensityProfile {
    /// `λ(t) = lambda0`
    Constant { lambda0: f64 },
    /// `λ(t) = lambda0 · exp(beta · t)`
    Loglinear { lambda0: f64, beta: f64 },
    /// `λ(t) = lambda0 · shape · t^(shape - 1)`
    Powerlaw { lambda0: f64, shape: f64 },
}

/// How an NHPP sample path was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NhppMethod {
    InverseTimeTransform,
    Thinning,
}

impl IntensityProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidIntensity(m));
        match *self {
            IntensityProfile::Constant { lambda0 } => {
                if !(lambda0.is_finite() && lambda0 > 0.0) {
                    return bad(format!("lambda0 must be finite and > 0, got {lambda0}"));
                }
            }
            IntensityProfile::Loglinear { lambda0, beta } => {
                if !(lambda0.is_finite() && lambda0 > 0.0) {
                    return bad(format!("lambda0 must be finite and > 0, got {lambda0}"));
                }
                if !beta.is_finite() {
                    return bad(format!("beta must be finite, got {beta}"));
                }
            }
            IntensityProfile::Powerlaw { lambda0, shape } => {
                if !(lambda0.is_finite() && lambda0 > 0.0) {
                    return bad(format!("lambda0 must be finite and > 0, got {lambda0}"));
                }
                if !(shape.is_finite() && shape > 0.0) {
                    return bad(format!("shape must be finite and > 0, got {shape}"));
                }
            }
        }
        Ok(())
    }

    pub fn intensity(&self, t: f64) -> f64 {
        match *self {
            IntensityProfile::Constant { lambda0 } => lambda0,
            IntensityProfile::Loglinear { lambda0, beta } => lambda0 * (beta * t).exp(),
            IntensityProfile::Powerlaw { lambda0, shape } => lambda0 * shape * t.powf(shape - 1.0),
        }
    }

    /// `Λ(t) = ∫_0^t λ(s) ds`
    pub fn cumulative(&self, t: f64) -> f64 {
        match *self {
            IntensityProfile::Constant { lambda0 } => lambda0 * t,
            IntensityProfile::Loglinear { lambda0, beta } => {
                if beta == 0.0 {
                    lambda0 * t
                } else {
                    lambda0 * (beta * t).exp_m1() / beta
                }
            }
            IntensityProfile::Powerlaw { lambda0, shape } => lambda0 * t.powf(shape),
        }
    }

    /// Inverse of [`cumulative`](Self::cumulative); `None` when `Λ` never reaches `s`.
    pub fn inverse_cumulative(&self, s: f64) -> Option<f64> {
        match *self {
            IntensityProfile::Constant { lambda0 } => Some(s / lambda0),
            IntensityProfile::Loglinear { lambda0, beta } => {
                if beta == 0.0 {
                    return Some(s / lambda0);
                }
                let arg = beta * s / lambda0;
                // A decaying intensity has finite total mass lambda0 / -beta.
                (arg > -1.0).then(|| arg.ln_1p() / beta)
            }
            IntensityProfile::Powerlaw { lambda0, shape } => Some((s / lambda0).powf(1.0 / shape)),
        }
    }

    /// Supremum of `λ` on `(0, horizon]`, or `None` when unbounded.
    pub fn sup_on(&self, horizon: f64) -> Option<f64> {
        match *self {
            IntensityProfile::Constant { lambda0 } => Some(lambda0),
            IntensityProfile::Loglinear { lambda0, beta } => {
                Some(lambda0 * (beta * horizon).exp().max(1.0))
            }
            IntensityProfile::Powerlaw { lambda0, shape } => {
                if shape < 1.0 {
                    None
                } else {
                    Some(lambda0 * shape * horizon.powf(shape - 1.0))
                }
            }
        }
    }

    /// Every supported profile has a closed-form inverse cumulative intensity.
    pub fn generation_method(&self) -> NhppMethod {
        NhppMethod::InverseTimeTransform
    }
}

/// Poisson process with intensity `profile` on `(0, horizon]`.
///
/// Unit-rate Poisson arrivals `S_1 < S_2 < ...` are mapped through `Λ⁻¹`
/// (inverse time transform); see [`IntensityProfile::generation_method`].
pub fn simulate_nhpp(
    profile: &IntensityProfile,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    check_horizon(horizon)?;
    profile.validate()?;
    let total = profile.cumulative(horizon);
    let mut events = Vec::new();
    let mut s = 0.0;
    loop {
        s += -rng.open01().ln();
        if s > total {
            break;
        }
        let Some(t) = profile.inverse_cumulative(s) else {
            break;
        };
        let t = t.min(horizon);
        if t > 0.0 && events.last().is_none_or(|&p| t > p) {
            events.push(t);
        }
    }
    EventTimeline::new(horizon, events, None)
}

/// Poisson process with intensity `profile` by Lewis–Shedler thinning of a
/// homogeneous process at the window supremum of `λ`.
pub fn simulate_nhpp_thinning(
    profile: &IntensityProfile,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    check_horizon(horizon)?;
    profile.validate()?;
    let bound = profile.sup_on(horizon).ok_or_else(|| {
        Error::InvalidIntensity(format!(
            "{profile:?} is unbounded on (0, {horizon}]; thinning needs a finite bound"
        ))
    })?;
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += -rng.open01().ln() / bound;
        if t > horizon {
            break;
        }
        if rng.open01() * bound <= profile.intensity(t) && events.last().is_none_or(|&p| t > p) {
            events.push(t);
        }
    }
    EventTimeline::new(horizon, events, None)
}
