//! Superposing more and more rare, strongly regular renewal processes at a
//! fixed total rate drives the merged stream toward a Poisson process.

use proven_in_use::superposition::{convergence_study, ConvergenceTemplate};
use proven_in_use::validators::SuiteConfig;
use proven_in_use::{DistributionSpec, RngStream};

fn main() -> proven_in_use::Result<()> {
    let template = ConvergenceTemplate {
        dist: DistributionSpec::weibull(3.0, 1.0)?,
        total_rate: 1.0,
        horizon: 1000.0,
    };
    let suite = SuiteConfig {
        resamples: 200,
        ..SuiteConfig::default()
    };
    let rows = convergence_study(
        &template,
        &[1, 2, 5, 20, 100],
        40,
        &suite,
        &RngStream::new(5, 0),
    )?;
    println!("{:>5} {:>14} {:>12}", "n", "pass fraction", "mean rate");
    for row in rows {
        println!(
            "{:>5} {:>14.3} {:>12.4}",
            row.n, row.pass_fraction, row.empirical_rate_mean
        );
    }
    Ok(())
}
