//! Runs the four Poisson assumption checks on a timeline CSV.
//!
//! `cargo run --example assumption_report -- path/to/timeline.csv`
//! (defaults to a seeded homogeneous Poisson fixture).

use proven_in_use::validators::{assess_poisson, SuiteConfig};
use proven_in_use::{EventTimeline, RngStream};

fn main() -> proven_in_use::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/timelines/hpp_seed1.csv"
        )
        .to_string()
    });
    let t = EventTimeline::read_csv_file(&path)?;
    let report = assess_poisson(&t, &SuiteConfig::default(), &mut RngStream::new(1, 0))?;
    print!("{}", report.text_summary());
    Ok(())
}
