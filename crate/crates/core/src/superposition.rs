//! Superposition of many rare renewal processes and the rare-event hitting model.
//!
//! Grigelionis' theorem: let `X(t) = Σ X_i(t)` be a sum of independent point
//! processes with `E X_i(t) = t / a_i`. Suppose `Σ 1/a_i → λ`, and suppose
//! every component is uniformly negligible, i.e.
//! `max_i P(X_i(B) ≥ 1) → 0` on bounded sets `B`. Then `X` converges to a
//! homogeneous Poisson process with intensity `λ`.
//!
//! Components here are stationary renewal processes, for which
//! `E X_i(t) = t / a_i` holds exactly. The negligibility condition is met in
//! [`convergence_study`] by holding `λ` fixed and stretching every component
//! mean to `n / λ` as the component count `n` grows.

use std::io::Write;

use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::process::simulate_stationary_renewal;
use crate::rng::RngStream;
use crate::timeline::EventTimeline;
use crate::validators::{assess_poisson, SuiteConfig};

/// One latent fault and the renewal law of its activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub dist: DistributionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ComponentSpec {
    pub fn new(dist: DistributionSpec) -> Self {
        ComponentSpec { dist, label: None }
    }

    /// `a_i`, the mean time between activations.
    pub fn mean(&self) -> f64 {
        self.dist.mean()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    components: Vec<ComponentSpec>,
    horizon: f64,
}

impl SuperpositionSpec {
    pub fn new(components: Vec<ComponentSpec>, horizon: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSuperposition("no components".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidHorizon(horizon));
        }
        Ok(SuperpositionSpec {
            components,
            horizon,
        })
    }

    /// `count` identical components.
    pub fn homogeneous(dist: DistributionSpec, count: usize, horizon: f64) -> Result<Self> {
        Self::new(vec![ComponentSpec::new(dist); count], horizon)
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn theoretical_rate(&self) -> f64 {
        self.components.iter().map(|c| 1.0 / c.mean()).sum()
    }
}

/// `Σ 1 / a_i` over the component means.
pub fn grigelionis_intensity(component_means: &[f64]) -> Result<f64> {
    if component_means.is_empty() {
        return Err(Error::InvalidArgument("no component means".into()));
    }
    if let Some(bad) = component_means
        .iter()
        .find(|m| !(m.is_finite() && **m > 0.0))
    {
        return Err(Error::InvalidArgument(format!(
            "component means must be finite and > 0, got {bad}"
        )));
    }
    Ok(component_means.iter().map(|m| 1.0 / m).sum())
}

/// Sorted union of the events of timelines that share one window.
///
/// Exact ties keep input order (component index). The result carries no
/// unit id, so any permutation of the inputs gives an identical timeline.
pub fn superpose(timelines: &[EventTimeline]) -> Result<EventTimeline> {
    let first = timelines
        .first()
        .ok_or_else(|| Error::InvalidSuperposition("nothing to superpose".into()))?;
    let window = first.window_end();
    if let Some(t) = timelines.iter().find(|t| t.window_end() != window) {
        return Err(Error::WindowMismatch(window, t.window_end()));
    }
    let mut events: Vec<f64> = timelines
        .iter()
        .flat_map(|t| t.events().iter().copied())
        .collect();
    events.sort_by(f64::total_cmp);
    EventTimeline::new(window, events, None)
}

/// Simulates every component as an independent stationary renewal process
/// (component `i` on `rng.substream(i)`) and superposes them. Returns the merged
/// timeline and the theoretical limit rate `Σ 1/a_i`.
pub fn simulate_superposition(
    spec: &SuperpositionSpec,
    rng: &RngStream,
) -> Result<(EventTimeline, f64)> {
    let horizon = spec.horizon();
    let parts = spec
        .components()
        .par_iter()
        .enumerate()
        .map(|(i, c)| simulate_stationary_renewal(&c.dist, horizon, &mut rng.substream(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let merged = superpose(&parts)?;
    let means: Vec<f64> = spec.components().iter().map(ComponentSpec::mean).collect();
    Ok((merged, grigelionis_intensity(&means)?))
}

/// A walk of `n_steps` discrete steps of `step_duration` hours, each landing in
/// the fault set independently with probability `p_fault`. Step `k` (1-based)
/// ends at `k * step_duration`; the hit times are returned.
///
/// The walk is sampled by geometric skipping (the number of misses before
/// the next hit), which has the same law as one Bernoulli draw per step.
pub fn rare_event_hitting(
    p_fault: f64,
    n_steps: u64,
    step_duration: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    if !(p_fault > 0.0 && p_fault < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p_fault must lie in (0, 1), got {p_fault}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    if !(step_duration.is_finite() && step_duration > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step_duration must be finite and > 0, got {step_duration}"
        )));
    }
    let misses = Geometric::new(p_fault).expect("p_fault checked");
    let mut events = Vec::new();
    let mut step: u64 = 0;
    loop {
        step = step.saturating_add(misses.sample(rng)).saturating_add(1);
        if step > n_steps {
            break;
        }
        events.push(step as f64 * step_duration);
    }
    EventTimeline::new(n_steps as f64 * step_duration, events, None)
}

/// Family of superpositions with fixed total intensity.
///
/// For component count `n`, each of the `n` components follows `dist`
/// rescaled to mean `n / total_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTemplate {
    pub dist: DistributionSpec,
    pub total_rate: f64,
    pub horizon: f64,
}

impl ConvergenceTemplate {
    pub fn validate(&self) -> Result<()> {
        if self.dist.is_degenerate() {
            return Err(Error::InvalidSuperposition(
                "degenerate component laws are lattice processes and are not studied for \
                 Poisson convergence"
                    .into(),
            ));
        }
        if !(self.total_rate.is_finite() && self.total_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total_rate must be finite and > 0, got {}",
                self.total_rate
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidHorizon(self.horizon));
        }
        Ok(())
    }

    pub fn spec_for(&self, n: usize) -> Result<SuperpositionSpec> {
        let dist = self.dist.with_mean(n as f64 / self.total_rate)?;
        SuperpositionSpec::homogeneous(dist, n, self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replications: usize,
    pub pass_fraction: f64,
    pub empirical_rate_mean: f64,
    pub theoretical_rate: f64,
}

/// For each component count, the fraction of replications whose merged
/// timeline passes the full Poisson assumption suite.
///
/// Replication `r` at count `n` runs on `rng.substream(n).substream(r)`; its
/// validation bootstrap runs on that stream's substream `n`, which no
/// component uses. With `replications == 0` the table is empty.
pub fn convergence_study(
    template: &ConvergenceTemplate,
    n_values: &[usize],
    replications: usize,
    suite: &SuiteConfig,
    rng: &RngStream,
) -> Result<Vec<ConvergenceRow>> {
    template.validate()?;
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("no component counts given".into()));
    }
    if let Some(&bad) = n_values.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidArgument(format!(
            "component counts must be at least 1, got {bad}"
        )));
    }
    if replications == 0 {
        return Ok(Vec::new());
    }
    n_values
        .iter()
        .map(|&n| {
            let spec = template.spec_for(n)?;
            let level = rng.substream(n as u64);
            let outcomes = (0..replications as u64)
                .into_par_iter()
                .map(|r| {
                    let stream = level.substream(r);
                    let (merged, _) = simulate_superposition(&spec, &stream)?;
                    let report = assess_poisson(&merged, suite, &mut stream.substream(n as u64))?;
                    Ok((report.overall, merged.empirical_rate()))
                })
                .collect::<Result<Vec<_>>>()?;
            let passes = outcomes.iter().filter(|(ok, _)| *ok).count();
            let rate_sum: f64 = outcomes.iter().map(|(_, r)| r).sum();
            Ok(ConvergenceRow {
                n,
                replications,
                pass_fraction: passes as f64 / replications as f64,
                empirical_rate_mean: rate_sum / replications as f64,
                theoretical_rate: spec.theoretical_rate(),
            })
        })
        .collect()
}

pub const CONVERGENCE_CSV_HEADER: &str =
    "n,replications,pass_fraction,empirical_rate_mean,theoretical_rate";

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> Result<()> {
    writeln!(out, "{CONVERGENCE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n, r.replications, r.pass_fraction, r.empirical_rate_mean, r.theoretical_rate
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tl(w: f64, ev: &[f64]) -> EventTimeline {
        EventTimeline::new(w, ev.to_vec(), None).unwrap()
    }

    #[test]
    fn intensity_sums_reciprocals() {
        assert_eq!(grigelionis_intensity(&[2.0, 2.0]).unwrap(), 1.0);
        assert!((grigelionis_intensity(&[10.0, 20.0, 40.0]).unwrap() - 0.175).abs() < 1e-15);
        let many = vec![1000.0; 1000];
        assert!((grigelionis_intensity(&many).unwrap() - 1.0).abs() < 1e-12);
        assert!(grigelionis_intensity(&[]).is_err());
        assert!(grigelionis_intensity(&[1.0, 0.0]).is_err());
        assert!(grigelionis_intensity(&[-2.0]).is_err());
    }

    #[test]
    fn merge_small_cases() {
        let m = superpose(&[tl(5.0, &[1.0, 3.0]), tl(5.0, &[2.0])]).unwrap();
        assert_eq!(m.events(), &[1.0, 2.0, 3.0]);
        let e = superpose(&[tl(5.0, &[]), tl(5.0, &[])]).unwrap();
        assert!(e.is_empty());
        assert!(matches!(
            superpose(&[tl(5.0, &[]), tl(6.0, &[])]),
            Err(Error::WindowMismatch(..))
        ));
        assert!(superpose(&[]).is_err());
    }

    #[test]
    fn merge_keeps_ties() {
        let m = superpose(&[tl(5.0, &[1.0, 2.0]), tl(5.0, &[2.0])]).unwrap();
        assert_eq!(m.events(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn single_component_is_itself() {
        let d = DistributionSpec::exponential(1.0).unwrap();
        let spec = SuperpositionSpec::homogeneous(d, 1, 1000.0).unwrap();
        let root = RngStream::new(8, 0);
        let (merged, rate) = simulate_superposition(&spec, &root).unwrap();
        let alone = simulate_stationary_renewal(&d, 1000.0, &mut root.substream(0)).unwrap();
        assert_eq!(merged.events(), alone.events());
        assert_eq!(rate, 1.0);
    }

    #[test]
    fn hundred_components_conserve_count() {
        let d = DistributionSpec::exponential(0.01).unwrap();
        let root = RngStream::new(12, 0);
        let parts: Vec<_> = (0..100)
            .map(|i| simulate_stationary_renewal(&d, 1000.0, &mut root.substream(i)).unwrap())
            .collect();
        let total: usize = parts.iter().map(EventTimeline::len).sum();
        assert_eq!(superpose(&parts).unwrap().len(), total);
    }

    #[test]
    fn hitting_mean_gap_for_fair_coin() {
        let mut rng = RngStream::new(21, 0);
        let t = rare_event_hitting(0.5, 100_000, 1.0, &mut rng).unwrap();
        let mean_gap = t.events().last().unwrap() / t.len() as f64;
        // geometric(0.5) gap: mean 2, sd sqrt(2); n ~ 50000
        assert!(
            (mean_gap - 2.0).abs() < 4.0 * 2f64.sqrt() / (50_000f64).sqrt(),
            "{mean_gap}"
        );
        assert_eq!(t.window_end(), 100_000.0);
        assert!(t.events().iter().all(|x| x.fract() == 0.0));
    }

    #[test]
    fn hitting_can_be_empty() {
        let mut rng = RngStream::new(3, 0);
        let t = rare_event_hitting(1e-9, 10, 1.0, &mut rng).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.window_end(), 10.0);
    }

    #[test]
    fn hitting_rejects_bad_inputs() {
        let mut rng = RngStream::new(3, 0);
        assert!(rare_event_hitting(0.0, 10, 1.0, &mut rng).is_err());
        assert!(rare_event_hitting(1.0, 10, 1.0, &mut rng).is_err());
        assert!(rare_event_hitting(0.1, 0, 1.0, &mut rng).is_err());
        assert!(rare_event_hitting(0.1, 10, 0.0, &mut rng).is_err());
    }

    #[test]
    fn convergence_edge_cases() {
        let template = ConvergenceTemplate {
            dist: DistributionSpec::weibull(3.0, 1.0).unwrap(),
            total_rate: 1.0,
            horizon: 100.0,
        };
        let rng = RngStream::new(1, 0);
        let suite = SuiteConfig::default();
        assert!(convergence_study(&template, &[500], 0, &suite, &rng)
            .unwrap()
            .is_empty());
        assert!(convergence_study(&template, &[], 5, &suite, &rng).is_err());
        assert!(convergence_study(&template, &[0], 5, &suite, &rng).is_err());
        let lattice = ConvergenceTemplate {
            dist: DistributionSpec::degenerate(1.0).unwrap(),
            ..template
        };
        assert!(convergence_study(&lattice, &[10], 5, &suite, &rng).is_err());
    }

    #[test]
    fn template_scales_means() {
        let template = ConvergenceTemplate {
            dist: DistributionSpec::weibull(1.5, 1.0).unwrap(),
            total_rate: 2.0,
            horizon: 100.0,
        };
        let spec = template.spec_for(40).unwrap();
        assert_eq!(spec.components().len(), 40);
        assert!((spec.components()[0].mean() - 20.0).abs() < 1e-9);
        assert!((spec.theoretical_rate() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header_only_when_empty() {
        let mut buf = Vec::new();
        write_convergence_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{CONVERGENCE_CSV_HEADER}\n")
        );
    }
}
