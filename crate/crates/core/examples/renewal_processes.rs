//! Ordinary and stationary renewal processes for several inter-arrival laws.
//!
//! An ordinary process starts with a fresh lifetime at 0, so for wear-out
//! laws it undercounts early on. The stationary start draws the first event
//! from the forward recurrence law and has `E[N(0, t]] = t / mean` exactly.

use proven_in_use::process::simulate_stationary_renewal;
use proven_in_use::{simulate_renewal, DistributionSpec, RngStream};

fn main() -> proven_in_use::Result<()> {
    let laws = [
        ("exponential(1)", DistributionSpec::exponential(1.0)?),
        ("weibull(3, 1)", DistributionSpec::weibull(3.0, 1.0)?),
        ("gamma(4, 0.25)", DistributionSpec::gamma(4.0, 0.25)?),
        ("lognormal(0, 1)", DistributionSpec::lognormal(0.0, 1.0)?),
    ];
    let horizon = 3.0;
    let runs = 20_000u64;
    println!(
        "{:<18} {:>8} {:>10} {:>11}",
        "law", "t/mean", "ordinary", "stationary"
    );
    for (name, d) in laws {
        let root = RngStream::new(2024, 0);
        let (mut ord, mut sta) = (0usize, 0usize);
        for r in 0..runs {
            ord += simulate_renewal(&d, horizon, &mut root.substream(2 * r))?.len();
            sta += simulate_stationary_renewal(&d, horizon, &mut root.substream(2 * r + 1))?.len();
        }
        println!(
            "{name:<18} {:>8.4} {:>10.4} {:>11.4}",
            horizon / d.mean(),
            ord as f64 / runs as f64,
            sta as f64 / runs as f64
        );
    }
    Ok(())
}
