//! A reliability-growth style NHPP with rising intensity, generated two ways,
//! and what the trend test makes of it.

use proven_in_use::process::simulate_nhpp_thinning;
use proven_in_use::validators::laplace_trend_test;
use proven_in_use::{simulate_nhpp, IntensityProfile, RngStream};

fn main() -> proven_in_use::Result<()> {
    let horizon = 1000.0;
    let profile = IntensityProfile::Loglinear {
        lambda0: 0.3,
        beta: 2.0 / horizon,
    };
    println!(
        "expected events on (0, {horizon}]: {:.2}",
        profile.cumulative(horizon)
    );

    let root = RngStream::new(11, 0);
    let runs = 500u64;
    let (mut inv, mut thin, mut detected) = (0usize, 0usize, 0usize);
    for r in 0..runs {
        let a = simulate_nhpp(&profile, horizon, &mut root.substream(2 * r))?;
        let b = simulate_nhpp_thinning(&profile, horizon, &mut root.substream(2 * r + 1))?;
        inv += a.len();
        thin += b.len();
        if !laplace_trend_test(&a, 0.05)?.passed() {
            detected += 1;
        }
    }
    println!(
        "mean count, inverse time transform: {:.2}",
        inv as f64 / runs as f64
    );
    println!(
        "mean count, thinning:               {:.2}",
        thin as f64 / runs as f64
    );
    println!("trend detected in {detected} of {runs} runs");

    let flat = IntensityProfile::Constant { lambda0: 0.958 };
    let t = simulate_nhpp(&flat, horizon, &mut root.substream(runs * 2))?;
    let r = laplace_trend_test(&t, 0.05)?;
    println!(
        "constant intensity: U = {:.3}, p = {:.3}",
        r.statistic.unwrap_or(f64::NAN),
        r.p_value.unwrap_or(f64::NAN)
    );
    Ok(())
}
