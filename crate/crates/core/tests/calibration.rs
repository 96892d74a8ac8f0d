//! Seeded Monte Carlo checks of test calibration and power.

use proven_in_use::superposition::{
    convergence_study, rare_event_hitting, simulate_superposition, ConvergenceTemplate,
    SuperpositionSpec,
};
use proven_in_use::validators::{
    assess_poisson, dispersion_test, exp_gof_test, laplace_trend_test, SuiteConfig,
};
use proven_in_use::{
    simulate_nhpp, simulate_renewal, DistributionSpec, EventTimeline, IntensityProfile, RngStream,
};

const SEED: u64 = 8_675_309;

#[test]
fn exponential_renewals_pass_gof() {
    let d = DistributionSpec::exponential(1.0).unwrap();
    let root = RngStream::new(SEED, 1);
    let passes = (0..100)
        .filter(|&r| {
            let mut rng = root.substream(r);
            let t = simulate_renewal(&d, 1000.0, &mut rng).unwrap();
            exp_gof_test(&t, 0.01, 500, &mut rng).unwrap().passed()
        })
        .count();
    assert!(passes >= 98, "{passes}/100");
}

#[test]
fn constant_nhpp_passes_dispersion() {
    let p = IntensityProfile::Constant { lambda0: 0.5 };
    let root = RngStream::new(SEED, 2);
    let runs = 2000;
    let passes = (0..runs)
        .filter(|&r| {
            let t = simulate_nhpp(&p, 2000.0, &mut root.substream(r)).unwrap();
            dispersion_test(&t, 20, 0.01).unwrap().passed()
        })
        .count();
    assert!(passes as f64 >= 0.98 * runs as f64, "{passes}/{runs}");
}

#[test]
fn lattice_fails_gof_and_dispersion() {
    let d = DistributionSpec::degenerate(1.0).unwrap();
    let root = RngStream::new(SEED, 3);
    let lattice = simulate_renewal(&d, 1000.0, &mut root.substream(0)).unwrap();
    assert_eq!(lattice.len(), 1000);
    let mut rejected = 0;
    for r in 0..100 {
        let mut rng = root.substream(r + 1);
        let gof = exp_gof_test(&lattice, 0.05, 200, &mut rng).unwrap();
        let disp = dispersion_test(&lattice, 20, 0.05).unwrap();
        rejected += usize::from(!gof.passed() && !disp.passed());
    }
    assert!(rejected >= 99, "{rejected}/100");
}

#[test]
fn growing_intensity_is_detected() {
    let p = IntensityProfile::Loglinear {
        lambda0: 1.0,
        beta: 0.002,
    };
    let root = RngStream::new(SEED, 4);
    let detected = (0..100)
        .filter(|&r| {
            let t = simulate_nhpp(&p, 1000.0, &mut root.substream(r)).unwrap();
            !laplace_trend_test(&t, 0.05).unwrap().passed()
        })
        .count();
    assert!(detected >= 80, "{detected}/100");
}

#[test]
fn homogeneous_poisson_passes_the_suite() {
    let p = IntensityProfile::Constant { lambda0: 1.0 };
    let root = RngStream::new(SEED, 5);
    let cfg = SuiteConfig {
        resamples: 500,
        ..SuiteConfig::default()
    };
    let passes = (0..100)
        .filter(|&r| {
            let mut rng = root.substream(r);
            let t = simulate_nhpp(&p, 2000.0, &mut rng).unwrap();
            assess_poisson(&t, &cfg, &mut rng).unwrap().overall
        })
        .count();
    assert!(passes >= 85, "{passes}/100");
}

#[test]
fn rare_hits_look_poisson() {
    let root = RngStream::new(SEED, 6);
    let passes = (0..100)
        .filter(|&r| {
            let mut rng = root.substream(r);
            let t = rare_event_hitting(1e-4, 10_000_000, 1.0, &mut rng).unwrap();
            exp_gof_test(&t, 0.01, 300, &mut rng).unwrap().passed()
        })
        .count();
    assert!(passes >= 95, "{passes}/100");

    let mut rng = RngStream::new(SEED, 7);
    let t = rare_event_hitting(0.5, 100_000, 1.0, &mut rng).unwrap();
    let mean_gap = t.window_end() / t.len() as f64;
    assert!((mean_gap - 2.0).abs() < 0.03, "{mean_gap}");
    assert!(t.events().iter().all(|x| x.fract() == 0.0));
}

#[test]
fn superposition_rate_is_unbiased() {
    let d = DistributionSpec::gamma(0.5, 200.0).unwrap();
    let spec = SuperpositionSpec::homogeneous(d, 50, 500.0).unwrap();
    let root = RngStream::new(SEED, 8);
    let reps = 400;
    let rates: Vec<f64> = (0..reps)
        .map(|r| {
            simulate_superposition(&spec, &root.substream(r))
                .unwrap()
                .0
                .empirical_rate()
        })
        .collect();
    let theory = spec.theoretical_rate();
    assert!((theory - 0.5).abs() < 1e-12);
    let mean = rates.iter().sum::<f64>() / reps as f64;
    let sd = (rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    assert!(
        (mean - theory).abs() < 3.0 * sd / (reps as f64).sqrt(),
        "{mean} vs {theory}"
    );
}

#[test]
fn regular_components_converge_only_in_number() {
    let template = ConvergenceTemplate {
        dist: DistributionSpec::weibull(3.0, 1.0).unwrap(),
        total_rate: 1.0,
        horizon: 2000.0,
    };
    let cfg = SuiteConfig {
        resamples: 300,
        ..SuiteConfig::default()
    };
    let rows =
        convergence_study(&template, &[1, 10, 500], 40, &cfg, &RngStream::new(SEED, 9)).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].pass_fraction <= 0.05, "{:?}", rows[0]);
    assert!(rows[2].pass_fraction >= 0.7, "{:?}", rows[2]);
    assert!(rows[2].pass_fraction > rows[0].pass_fraction);
    for row in &rows {
        assert_eq!(row.replications, 40);
        assert!((row.theoretical_rate - 1.0).abs() < 1e-12);
        assert!((row.empirical_rate_mean - 1.0).abs() < 0.05, "{row:?}");
    }

    let exp = ConvergenceTemplate {
        dist: DistributionSpec::exponential(1.0).unwrap(),
        ..template
    };
    let rows = convergence_study(&exp, &[1], 40, &cfg, &RngStream::new(SEED, 10)).unwrap();
    assert!(rows[0].pass_fraction >= 0.7, "{:?}", rows[0]);
}

#[test]
fn empty_timelines_are_inconclusive_not_failures() {
    let t = EventTimeline::empty(100.0).unwrap();
    let r = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(SEED, 11)).unwrap();
    assert!(!r.overall);
    assert_eq!(r.events, 0);
}
