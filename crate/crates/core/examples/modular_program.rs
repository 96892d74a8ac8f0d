//! A modular program as a semi-Markov process: each module fails at a small
//! constant rate while it runs, and control transfers may fail. The long-run
//! failure rate from the embedded chain is compared with simulation.

use proven_in_use::modular::{
    asymptotic_failure_rate, rarity_warning, simulate_modular, stationary_embedded,
    RarityThresholds, SemiMarkovModel,
};
use proven_in_use::validators::exp_gof_test;
use proven_in_use::RngStream;

fn main() -> proven_in_use::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/specs/modular_two_state.json"
    );
    let model = SemiMarkovModel::from_json(&std::fs::read_to_string(path)?)?;
    let pi = stationary_embedded(model.transitions())?;
    let rate = asymptotic_failure_rate(&model)?;
    println!(
        "states {:?}, embedded stationary law {pi:?}",
        model.states()
    );
    println!("asymptotic failure rate {rate:.6e} /h");
    for d in rarity_warning(&model, &RarityThresholds::default()) {
        println!("warning: {d}");
    }

    let horizon = 1000.0 / rate;
    let mut rng = RngStream::new(17, 0);
    let t = simulate_modular(&model, horizon, &mut rng)?;
    println!(
        "simulated {} failures over {horizon:.0} h: rate {:.6e} /h ({:+.2}%)",
        t.len(),
        t.empirical_rate(),
        100.0 * (t.empirical_rate() / rate - 1.0)
    );
    let gof = exp_gof_test(&t, 0.01, 1000, &mut rng.substream(1))?;
    println!(
        "exponential inter-failure times: KS D = {:.4}, p = {:.3} -> {}",
        gof.statistic.unwrap_or(f64::NAN),
        gof.p_value.unwrap_or(f64::NAN),
        gof.verdict.label()
    );
    Ok(())
}
