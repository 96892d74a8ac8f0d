//! The railway recommendation for SIL 3/4 proven-in-use arguments: at least
//! 1e6 operating hours, 2 years of experience and 2 distinct equipments.

use proven_in_use::evidence::{
    en50129_check, evaluate_claim, Checklist, FleetLog, ServiceInterval, ServiceRecord,
};

fn main() -> proven_in_use::Result<()> {
    for (h, y, n) in [
        (1e6, 2.0, 2),
        (9.9e5, 5.0, 10),
        (2e6, 1.0, 3),
        (2e6, 3.0, 1),
    ] {
        println!(
            "{h:>9} h, {y} years, {n} equipments: {}",
            en50129_check(h, y, n)
        );
    }

    // 60 interlocking controllers, each in service for 2.5 years.
    let span = 2.5 * 8760.0;
    let records = (0..60)
        .map(|i| ServiceRecord {
            unit_id: format!("ixl-{i:02}"),
            intervals: vec![ServiceInterval {
                start: 0.0,
                end: span,
                version: "4.2".into(),
            }],
            out_of_service: vec![],
            failures: vec![],
        })
        .collect();
    let fleet = FleetLog::new(records)?;
    let claim = evaluate_claim(&fleet, &Checklist::all_true(), 0.95, None)?;
    print!("{}", claim.text_summary());
    Ok(())
}
