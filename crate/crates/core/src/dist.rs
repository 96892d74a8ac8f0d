//! Inter-arrival laws for renewal processes.
//!
//! All durations are in hours. A [`DistributionSpec`] can only be built
//! through its validating constructors (or deserialized, which runs the same
//! checks), so every value in circulation has strictly positive parameters
//! and a finite, positive mean.

use rand_distr::{Distribution, Exp, Gamma, LogNormal, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Parametric family and parameters, as written in spec files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Law {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Lognormal { log_mean: f64, log_sd: f64 },
    Degenerate { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Law", into = "Law")]
pub struct DistributionSpec(Law);

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl TryFrom<Law> for DistributionSpec {
    type Error = Error;

    fn try_from(law: Law) -> Result<Self> {
        match law {
            Law::Exponential { rate } => positive("rate", rate)?,
            Law::Weibull { shape, scale } | Law::Gamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            Law::Lognormal { log_mean, log_sd } => {
                if !log_mean.is_finite() {
                    return Err(Error::InvalidDistribution(format!(
                        "log_mean must be finite, got {log_mean}"
                    )));
                }
                positive("log_sd", log_sd)?;
            }
            Law::Degenerate { value } => positive("value", value)?,
        }
        let spec = DistributionSpec(law);
        let m = spec.mean();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "{law:?} has non-finite or non-positive mean {m}"
            )));
        }
        Ok(spec)
    }
}

impl From<DistributionSpec> for Law {
    fn from(d: DistributionSpec) -> Law {
        d.0
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        Law::Exponential { rate }.try_into()
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Law::Weibull { shape, scale }.try_into()
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Law::Gamma { shape, scale }.try_into()
    }

    pub fn lognormal(log_mean: f64, log_sd: f64) -> Result<Self> {
        Law::Lognormal { log_mean, log_sd }.try_into()
    }

    pub fn degenerate(value: f64) -> Result<Self> {
        Law::Degenerate { value }.try_into()
    }

    pub fn law(&self) -> Law {
        self.0
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.0, Law::Degenerate { .. })
    }

    /// Analytic mean of the law, in hours.
    pub fn mean(&self) -> f64 {
        match self.0 {
            Law::Exponential { rate } => 1.0 / rate,
            Law::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
            Law::Gamma { shape, scale } => shape * scale,
            Law::Lognormal { log_mean, log_sd } => (log_mean + 0.5 * log_sd * log_sd).exp(),
            Law::Degenerate { value } => value,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.0 {
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Weibull { shape, scale } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                scale * scale * (gamma(1.0 + 2.0 / shape) - g1 * g1)
            }
            Law::Gamma { shape, scale } => shape * scale * scale,
            Law::Lognormal { log_mean, log_sd } => {
                let s2 = log_sd * log_sd;
                (s2.exp() - 1.0) * (2.0 * log_mean + s2).exp()
            }
            Law::Degenerate { .. } => 0.0,
        }
    }

    /// Same family and shape, rescaled so that the mean equals `mean`.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        positive("mean", mean)?;
        match self.0 {
            Law::Exponential { .. } => Self::exponential(1.0 / mean),
            Law::Weibull { shape, .. } => Self::weibull(shape, mean / gamma(1.0 + 1.0 / shape)),
            Law::Gamma { shape, .. } => Self::gamma(shape, mean / shape),
            Law::Lognormal { log_sd, .. } => {
                Self::lognormal(mean.ln() - 0.5 * log_sd * log_sd, log_sd)
            }
            Law::Degenerate { .. } => Self::degenerate(mean),
        }
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(*self)
    }
}

/// Mean inter-arrival time of `dist`, in hours.
pub fn mean_of(dist: &DistributionSpec) -> f64 {
    dist.mean()
}

/// One strictly positive draw from `dist`.
pub fn sample(dist: &DistributionSpec, rng: &mut RngStream) -> f64 {
    dist.sampler().sample(rng)
}

#[derive(Debug, Clone)]
enum Kernel {
    Exponential(Exp<f64>),
    Weibull(Weibull<f64>),
    Gamma(Gamma<f64>),
    LogNormal(LogNormal<f64>),
    Degenerate(f64),
}

/// Pre-built sampling kernels for one law.
///
/// Besides ordinary draws, a sampler produces draws from the forward
/// recurrence (equilibrium) law with density `(1 - F(x)) / mean`, which is what
/// a renewal process observed from a random time looks like. It is drawn as
/// `U * L` with `U` uniform and `L` from the length-biased law `x f(x) / mean`:
///
/// | law | length-biased law |
/// |---|---|
/// | exponential(r) | (forward recurrence is exponential(r) directly) |
/// | weibull(k, s) | `s * Y^(1/k)`, `Y ~ gamma(1 + 1/k, 1)` |
/// | gamma(a, s) | gamma(a + 1, s) |
/// | lognormal(m, v) | lognormal(m + v^2, v) |
/// | degenerate(v) | v |
#[derive(Debug, Clone)]
pub struct Sampler {
    kernel: Kernel,
    length_biased: Kernel,
    weibull: Option<(f64, f64)>,
}

fn build(law: Law) -> Kernel {
    // Parameters were validated when the spec was built.
    match law {
        Law::Exponential { rate } => Kernel::Exponential(Exp::new(rate).unwrap()),
        Law::Weibull { shape, scale } => Kernel::Weibull(Weibull::new(scale, shape).unwrap()),
        Law::Gamma { shape, scale } => Kernel::Gamma(Gamma::new(shape, scale).unwrap()),
        Law::Lognormal { log_mean, log_sd } => {
            Kernel::LogNormal(LogNormal::new(log_mean, log_sd).unwrap())
        }
        Law::Degenerate { value } => Kernel::Degenerate(value),
    }
}

fn draw(kernel: &Kernel, rng: &mut RngStream) -> f64 {
    match kernel {
        Kernel::Exponential(d) => d.sample(rng),
        Kernel::Weibull(d) => d.sample(rng),
        Kernel::Gamma(d) => d.sample(rng),
        Kernel::LogNormal(d) => d.sample(rng),
        Kernel::Degenerate(v) => *v,
    }
}

impl Sampler {
    fn new(spec: DistributionSpec) -> Self {
        let law = spec.law();
        let (length_biased, weibull) = match law {
            Law::Exponential { .. } | Law::Degenerate { .. } => (build(law), None),
            Law::Weibull { shape, scale } => (
                Kernel::Gamma(Gamma::new(1.0 + 1.0 / shape, 1.0).unwrap()),
                Some((shape, scale)),
            ),
            Law::Gamma { shape, scale } => {
                (Kernel::Gamma(Gamma::new(shape + 1.0, scale).unwrap()), None)
            }
            Law::Lognormal { log_mean, log_sd } => (
                Kernel::LogNormal(LogNormal::new(log_mean + log_sd * log_sd, log_sd).unwrap()),
                None,
            ),
        };
        Sampler {
            kernel: build(law),
            length_biased,
            weibull,
        }
    }

    /// A strictly positive draw; zero draws (possible in floating point) are redrawn.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        loop {
            let x = draw(&self.kernel, rng);
            if x > 0.0 {
                return x;
            }
        }
    }

    /// A strictly positive draw from the forward recurrence law.
    pub fn sample_forward_recurrence(&self, rng: &mut RngStream) -> f64 {
        if let Kernel::Exponential(_) = self.kernel {
            return self.sample(rng);
        }
        loop {
            let mut len = draw(&self.length_biased, rng);
            if let Some((shape, scale)) = self.weibull {
                len = scale * len.powf(1.0 / shape);
            }
            let x = rng.open01() * len;
            if x > 0.0 {
                return x;
            }
        }
    }
}
