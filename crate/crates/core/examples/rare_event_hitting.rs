//! A program that takes one step per millisecond and lands in a fault region
//! with tiny probability per step. Hits form a Bernoulli stream that is, at
//! this scale, indistinguishable from a Poisson process.

use proven_in_use::superposition::rare_event_hitting;
use proven_in_use::validators::{assess_poisson, SuiteConfig};
use proven_in_use::RngStream;

fn main() -> proven_in_use::Result<()> {
    let (p, steps, dt) = (1e-4, 10_000_000u64, 1e-3);
    let mut rng = RngStream::new(3, 0);
    let t = rare_event_hitting(p, steps, dt, &mut rng)?;
    println!(
        "{} hits in {} h; expected rate {:.4}/h, observed {:.4}/h",
        t.len(),
        t.window_end(),
        p / dt,
        t.empirical_rate()
    );
    let report = assess_poisson(&t, &SuiteConfig::default(), &mut rng.substream(1))?;
    print!("{}", report.text_summary());
    Ok(())
}
