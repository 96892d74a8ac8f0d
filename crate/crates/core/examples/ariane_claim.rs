//! 116 flawless one-hour missions of an inertial reference system, reused on
//! a launcher with a different flight profile. The statistics are weak; the
//! environment change voids the argument outright.

use proven_in_use::evidence::{evaluate_claim, Checklist, FleetLog};

fn main() -> proven_in_use::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let fleet = FleetLog::read_jsonl_file(format!("{dir}/ariane.jsonl"))?;
    for name in ["checklist_all_true.json", "checklist_env_change.json"] {
        let checklist = Checklist::load(format!("{dir}/{name}"))?;
        let claim = evaluate_claim(&fleet, &checklist, 0.95, None)?;
        println!(
            "{name}: bound {:.3e} /h, SIL {}, valid {}",
            claim.rate_upper_bound, claim.sil, claim.valid
        );
    }
    Ok(())
}
