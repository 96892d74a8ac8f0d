//! Operating experience of a fleet of 11 radiation therapy machines, judged
//! before the first incident and again after six overdoses.

use proven_in_use::evidence::{evaluate_claim, Checklist, FleetLog};

fn main() -> proven_in_use::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let checklist = Checklist::load(format!("{dir}/checklist_all_true.json"))?;
    for file in ["therac.jsonl", "therac_1987.jsonl"] {
        let fleet = FleetLog::read_jsonl_file(format!("{dir}/{file}"))?;
        let claim = evaluate_claim(&fleet, &checklist, 0.95, None)?;
        println!("== {file}");
        print!("{}", claim.text_summary());
    }
    Ok(())
}
