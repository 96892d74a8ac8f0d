//! Failure-free operating hours needed for each SIL at several confidence
//! levels, and how the bound grows with observed failures.

use proven_in_use::evidence::{rate_upper_bound, required_exposure, sil_for_rate, Sil, SilBands};

fn main() -> proven_in_use::Result<()> {
    let bands = SilBands::default();
    println!(
        "{:>6} {:>14} {:>14} {:>14}",
        "SIL", "c = 0.90", "c = 0.95", "c = 0.99"
    );
    for sil in [Sil::Sil1, Sil::Sil2, Sil::Sil3, Sil::Sil4] {
        let limit = bands.limit(sil).expect("leveled");
        let hours: Vec<String> = [0.90, 0.95, 0.99]
            .iter()
            .map(|&c| required_exposure(0, c, limit).map(|h| format!("{h:>14.0}")))
            .collect::<Result<_, _>>()?;
        println!("{:>6} {}", sil.level(), hours.join(" "));
    }
    let b = rate_upper_bound(300_000.0, 0, 0.95)?;
    println!(
        "300000 h, no failures: bound {b:.4e} /h -> {}",
        sil_for_rate(b, &bands)
    );
    for r in 0..=4 {
        let b = rate_upper_bound(1e6, r, 0.95)?;
        println!(
            "1e6 h, {r} failures: bound {b:.4e} /h -> {}",
            sil_for_rate(b, &bands)
        );
    }
    Ok(())
}
