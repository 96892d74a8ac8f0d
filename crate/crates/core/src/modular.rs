//! Semi-Markov model of a modular program.
//!
//! Modules are the states. Control stays in module `i` for a sojourn drawn
//! from that module's law and then moves to module `j` with probability
//! `P[i][j]`. Failures come from two sources:
//!
//! - inside module `i`, as a Poisson process with rate `module_rate[i]`;
//! - at each transfer `i -> j`, with probability `transfer_fail[i][j]`.
//!
//! A failure does not disturb the control flow (restart in place), so the
//! failure process inherits the stationarity of the module process.
//!
//! Long-run failure rate (renewal-reward over the embedded chain with
//! stationary law `π` and mean sojourns `m`):
//!
//! ```text
//!          Σ_i π_i m_i λ_i  +  Σ_i π_i Σ_j P_ij q_ij
//! rate  =  -----------------------------------------
//!                       Σ_i π_i m_i
//! ```
//!
//! Model file (JSON):
//!
//! ```json
//! {
//!   "states": ["io", "control"],
//!   "P": [[0.9, 0.1], [0.5, 0.5]],
//!   "sojourn": [{"kind": "exponential", "rate": 0.5}, {"kind": "exponential", "rate": 1.0}],
//!   "module_rate": [1e-4, 4e-4],
//!   "transfer_fail": [[0.0, 0.0], [0.0, 0.0]]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::dist::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::timeline::EventTimeline;

const ROW_SUM_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct SemiMarkovModel {
    states: Vec<String>,
    transitions: Vec<Vec<f64>>,
    sojourn: Vec<DistributionSpec>,
    module_rate: Vec<f64>,
    transfer_fail: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<String>,
    #[serde(rename = "P")]
    transitions: Vec<Vec<f64>>,
    sojourn: Vec<DistributionSpec>,
    module_rate: Vec<f64>,
    transfer_fail: Vec<Vec<f64>>,
}

impl TryFrom<RawModel> for SemiMarkovModel {
    type Error = Error;

    fn try_from(r: RawModel) -> Result<Self> {
        SemiMarkovModel::new(
            r.states,
            r.transitions,
            r.sojourn,
            r.module_rate,
            r.transfer_fail,
        )
    }
}

impl From<SemiMarkovModel> for RawModel {
    fn from(m: SemiMarkovModel) -> Self {
        RawModel {
            states: m.states,
            transitions: m.transitions,
            sojourn: m.sojourn,
            module_rate: m.module_rate,
            transfer_fail: m.transfer_fail,
        }
    }
}

fn bad<T>(msg: String) -> Result<T> {
    Err(Error::InvalidModel(msg))
}

fn check_stochastic(p: &[Vec<f64>]) -> Result<()> {
    let k = p.len();
    if k == 0 {
        return bad("transition matrix is empty".into());
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != k {
            return bad(format!("row {i} has {} entries, expected {k}", row.len()));
        }
        if let Some(x) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return bad(format!("row {i} has entry {x} outside [0, 1]"));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return bad(format!("row {i} sums to {s}, not 1"));
        }
    }
    Ok(())
}

fn reaches_all(p: &[Vec<f64>], forward: bool) -> bool {
    let k = p.len();
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..k {
            let edge = if forward { p[i][j] } else { p[j][i] };
            if edge > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn check_irreducible(p: &[Vec<f64>]) -> Result<()> {
    if reaches_all(p, true) && reaches_all(p, false) {
        Ok(())
    } else {
        bad("embedded chain is reducible (more than one communicating class)".into())
    }
}

impl SemiMarkovModel {
    pub fn new(
        states: Vec<String>,
        transitions: Vec<Vec<f64>>,
        sojourn: Vec<DistributionSpec>,
        module_rate: Vec<f64>,
        transfer_fail: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = states.len();
        if k == 0 {
            return bad("no states".into());
        }
        if transitions.len() != k || sojourn.len() != k || module_rate.len() != k {
            return bad(format!(
                "{k} states but P has {} rows, {} sojourn laws, {} module rates",
                transitions.len(),
                sojourn.len(),
                module_rate.len()
            ));
        }
        check_stochastic(&transitions)?;
        check_irreducible(&transitions)?;
        if let Some(r) = module_rate.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return bad(format!("module rate {r} must be finite and >= 0"));
        }
        if transfer_fail.len() != k || transfer_fail.iter().any(|row| row.len() != k) {
            return bad(format!("transfer_fail must be {k} x {k}"));
        }
        if let Some(q) = transfer_fail
            .iter()
            .flatten()
            .find(|q| !(0.0..=1.0).contains(*q))
        {
            return bad(format!("transfer failure probability {q} outside [0, 1]"));
        }
        Ok(SemiMarkovModel {
            states,
            transitions,
            sojourn,
            module_rate,
            transfer_fail,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn sojourn(&self) -> &[DistributionSpec] {
        &self.sojourn
    }

    pub fn module_rate(&self) -> &[f64] {
        &self.module_rate
    }

    pub fn transfer_fail(&self) -> &[Vec<f64>] {
        &self.transfer_fail
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn residual(p: &[Vec<f64>], pi: &[f64]) -> f64 {
    let k = pi.len();
    (0..k)
        .map(|j| ((0..k).map(|i| pi[i] * p[i][j]).sum::<f64>() - pi[j]).abs())
        .fold(0.0, f64::max)
}

fn normalized(mut pi: Vec<f64>) -> Vec<f64> {
    for x in pi.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= s);
    pi
}

/// Stationary law of an irreducible row-stochastic matrix.
///
/// Direct solve of `π (P − I) = 0` with one equation replaced by `Σ π = 1`;
/// falls back to power iteration on the lazy chain `(P + I) / 2` if the
/// residual `‖πP − π‖∞` is not below 1e-10.
pub fn stationary_embedded(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_stochastic(p)?;
    check_irreducible(p)?;
    let k = p.len();
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            (0..k)
                .map(|i| p[i][j] - if i == j { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    a[k - 1] = vec![1.0; k];
    let mut b = vec![0.0; k];
    b[k - 1] = 1.0;
    if let Some(pi) = solve(a, b).map(normalized) {
        if residual(p, &pi) < RESIDUAL_TOL {
            return Ok(pi);
        }
    }
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..1_000_000 {
        let next: Vec<f64> = (0..k)
            .map(|j| 0.5 * pi[j] + 0.5 * (0..k).map(|i| pi[i] * p[i][j]).sum::<f64>())
            .collect();
        pi = normalized(next);
        if residual(p, &pi) < RESIDUAL_TOL {
            return Ok(pi);
        }
    }
    bad(format!(
        "stationary law did not converge (residual {})",
        residual(p, &pi)
    ))
}

/// Expected failures per hour in the stationary regime.
pub fn asymptotic_failure_rate(model: &SemiMarkovModel) -> Result<f64> {
    let pi = stationary_embedded(&model.transitions)?;
    let k = pi.len();
    let mut time = 0.0;
    let mut module_failures = 0.0;
    let mut transfer_failures = 0.0;
    for i in 0..k {
        let m = model.sojourn[i].mean();
        time += pi[i] * m;
        module_failures += pi[i] * m * model.module_rate[i];
        transfer_failures += pi[i]
            * (0..k)
                .map(|j| model.transitions[i][j] * model.transfer_fail[i][j])
                .sum::<f64>();
    }
    Ok((module_failures + transfer_failures) / time)
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

/// One failure timeline of the modular program on `(0, horizon]`.
///
/// The run starts in the stationary regime: the initial module is drawn with
/// probability `π_i m_i / Σ π m` and its first sojourn from the forward
/// recurrence law of that module's sojourn time.
pub fn simulate_modular(
    model: &SemiMarkovModel,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<EventTimeline> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidHorizon(horizon));
    }
    let k = model.states.len();
    let pi = stationary_embedded(&model.transitions)?;
    let samplers: Vec<Sampler> = model
        .sojourn
        .iter()
        .map(DistributionSpec::sampler)
        .collect();
    let cumulative = |row: &[f64]| -> Vec<f64> {
        row.iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };
    let rows: Vec<Vec<f64>> = model.transitions.iter().map(|r| cumulative(r)).collect();
    let time_weights: Vec<f64> = (0..k).map(|i| pi[i] * model.sojourn[i].mean()).collect();
    let total: f64 = time_weights.iter().sum();
    let start: Vec<f64> = cumulative(&time_weights.iter().map(|w| w / total).collect::<Vec<_>>());

    let mut events = Vec::new();
    let mut state = pick(&start, rng.open01());
    let mut t = 0.0;
    let mut sojourn = samplers[state].sample_forward_recurrence(rng);
    // Remaining cumulative in-module hazard before the next module failure.
    let mut budget = -rng.open01().ln();
    loop {
        let end = (t + sojourn).min(horizon);
        let rate = model.module_rate[state];
        if rate > 0.0 {
            let mut pos = t;
            while budget <= rate * (end - pos) {
                pos += budget / rate;
                events.push(pos);
                budget = -rng.open01().ln();
            }
            budget -= rate * (end - pos);
        }
        if t + sojourn > horizon {
            break;
        }
        t += sojourn;
        let next = pick(&rows[state], rng.open01());
        let q = model.transfer_fail[state][next];
        if q > 0.0 && rng.open01() < q {
            events.push(t);
        }
        state = next;
        sojourn = samplers[state].sample(rng);
    }
    events.retain(|&x| x > 0.0);
    EventTimeline::new(horizon, events, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RarityThresholds {
    /// Limit on `module_rate[i] * mean_sojourn[i]` (expected failures per visit).
    pub module: f64,
    /// Limit on any `transfer_fail[i][j]`.
    pub transfer: f64,
}

impl Default for RarityThresholds {
    fn default() -> Self {
        RarityThresholds {
            module: 0.01,
            transfer: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RarityDiagnostic {
    Module {
        state: String,
        failures_per_visit: f64,
        threshold: f64,
    },
    Transfer {
        from: String,
        to: String,
        probability: f64,
        threshold: f64,
    },
}

impl std::fmt::Display for RarityDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RarityDiagnostic::Module {
                state,
                failures_per_visit,
                threshold,
            } => write!(
                f,
                "module {state:?}: {failures_per_visit} expected failures per visit exceeds {threshold}"
            ),
            RarityDiagnostic::Transfer {
                from,
                to,
                probability,
                threshold,
            } => write!(
                f,
                "transfer {from:?} -> {to:?}: failure probability {probability} exceeds {threshold}"
            ),
        }
    }
}

/// Modules and transfers that are not rare compared with switching.
/// An empty list means the Poisson-limit regime is plausible.
pub fn rarity_warning(
    model: &SemiMarkovModel,
    thresholds: &RarityThresholds,
) -> Vec<RarityDiagnostic> {
    let mut out = Vec::new();
    for (i, state) in model.states.iter().enumerate() {
        let per_visit = model.module_rate[i] * model.sojourn[i].mean();
        if per_visit > thresholds.module {
            out.push(RarityDiagnostic::Module {
                state: state.clone(),
                failures_per_visit: per_visit,
                threshold: thresholds.module,
            });
        }
    }
    for (i, from) in model.states.iter().enumerate() {
        for (j, to) in model.states.iter().enumerate() {
            let q = model.transfer_fail[i][j];
            if q > thresholds.transfer {
                out.push(RarityDiagnostic::Transfer {
                    from: from.clone(),
                    to: to.clone(),
                    probability: q,
                    threshold: thresholds.transfer,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_mean(m: f64) -> DistributionSpec {
        DistributionSpec::exponential(1.0 / m).unwrap()
    }

    fn two_state(lambda: [f64; 2], q: f64) -> SemiMarkovModel {
        SemiMarkovModel::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            vec![exp_mean(2.0), exp_mean(1.0)],
            lambda.to_vec(),
            vec![vec![q, q], vec![q, q]],
        )
        .unwrap()
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_embedded(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        let pi = stationary_embedded(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((pi[1] - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(stationary_embedded(&[vec![1.0]]).unwrap(), vec![1.0]);
    }

    #[test]
    fn stationary_rejects_bad_matrices() {
        assert!(stationary_embedded(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(stationary_embedded(&[vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(stationary_embedded(&[vec![1.2, -0.2], vec![0.5, 0.5]]).is_err());
        assert!(stationary_embedded(&[vec![1.0, 0.0], vec![0.5, 0.5]]).is_err());
        assert!(stationary_embedded(&[]).is_err());
    }

    #[test]
    fn single_module_rate_is_its_own() {
        let m = SemiMarkovModel::new(
            vec!["only".into()],
            vec![vec![1.0]],
            vec![exp_mean(1.0)],
            vec![0.001],
            vec![vec![0.0]],
        )
        .unwrap();
        assert!((asymptotic_failure_rate(&m).unwrap() - 0.001).abs() < 1e-18);
    }

    #[test]
    fn alternating_transfers() {
        let m = SemiMarkovModel::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![exp_mean(1.0), exp_mean(1.0)],
            vec![0.0, 0.0],
            vec![vec![0.0, 1e-3], vec![1e-3, 0.0]],
        )
        .unwrap();
        assert!((asymptotic_failure_rate(&m).unwrap() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn two_state_rate_by_hand() {
        let m = two_state([1e-4, 4e-4], 0.0);
        let (p1, p2) = (5.0 / 6.0, 1.0 / 6.0);
        let expect = (p1 * 2.0 * 1e-4 + p2 * 1.0 * 4e-4) / (p1 * 2.0 + p2 * 1.0);
        assert!((asymptotic_failure_rate(&m).unwrap() - expect).abs() < 1e-18);
        // = 7 / 55000
        assert!((expect - 7.0 / 55_000.0).abs() < 1e-18);
    }

    #[test]
    fn silent_model_never_fails() {
        let m = two_state([0.0, 0.0], 0.0);
        let t = simulate_modular(&m, 10_000.0, &mut RngStream::new(1, 0)).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.window_end(), 10_000.0);
    }

    #[test]
    fn single_state_is_pure_hpp() {
        let m = SemiMarkovModel::new(
            vec!["only".into()],
            vec![vec![1.0]],
            vec![exp_mean(1.0)],
            vec![0.01],
            vec![vec![0.0]],
        )
        .unwrap();
        let t = simulate_modular(&m, 1e5, &mut RngStream::new(2, 0)).unwrap();
        // Poisson(1000): 3 sigma ~ 95
        assert!((905..=1095).contains(&t.len()), "{}", t.len());
    }

    #[test]
    fn model_validation() {
        let ok = || {
            (
                vec!["a".to_string(), "b".to_string()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
                vec![exp_mean(1.0), exp_mean(1.0)],
                vec![0.0, 0.0],
                vec![vec![0.0; 2]; 2],
            )
        };
        let (s, p, so, r, q) = ok();
        assert!(SemiMarkovModel::new(s, p, so, r, q).is_ok());
        let (s, p, so, _, q) = ok();
        assert!(SemiMarkovModel::new(s, p, so, vec![-1.0, 0.0], q).is_err());
        let (s, p, so, r, _) = ok();
        assert!(SemiMarkovModel::new(s, p, so, r, vec![vec![0.0, 1.5], vec![0.0, 0.0]]).is_err());
        let (s, _, so, r, q) = ok();
        assert!(SemiMarkovModel::new(s, vec![vec![1.0, 0.0], vec![0.0, 1.0]], so, r, q).is_err());
        let (s, p, _, r, q) = ok();
        assert!(SemiMarkovModel::new(s, p, vec![exp_mean(1.0)], r, q).is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{
            "states": ["io", "control"],
            "P": [[0.9, 0.1], [0.5, 0.5]],
            "sojourn": [{"kind": "exponential", "rate": 0.5}, {"kind": "exponential", "rate": 1.0}],
            "module_rate": [1e-4, 4e-4],
            "transfer_fail": [[0.0, 0.0], [0.0, 0.0]]
        }"#;
        let m = SemiMarkovModel::from_json(text).unwrap();
        assert_eq!(m.states(), &["io".to_string(), "control".to_string()]);
        let back = SemiMarkovModel::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(SemiMarkovModel::from_json(&text.replace("0.9, 0.1", "0.9, 0.2")).is_err());
    }

    #[test]
    fn rarity_flags() {
        let quiet = SemiMarkovModel::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![exp_mean(1.0), exp_mean(1.0)],
            vec![1e-4, 1e-4],
            vec![vec![0.0, 1e-4], vec![1e-4, 0.0]],
        )
        .unwrap();
        assert!(rarity_warning(&quiet, &RarityThresholds::default()).is_empty());

        let loud = SemiMarkovModel::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![exp_mean(1.0), exp_mean(1.0)],
            vec![0.5, 1e-4],
            vec![vec![0.0; 2]; 2],
        )
        .unwrap();
        let w = rarity_warning(&loud, &RarityThresholds::default());
        assert_eq!(w.len(), 1);
        assert!(matches!(&w[0], RarityDiagnostic::Module { state, .. } if state == "a"));

        let zero = RarityThresholds {
            module: 0.0,
            transfer: 0.0,
        };
        // two module rates and two nonzero transfer probabilities
        assert_eq!(rarity_warning(&quiet, &zero).len(), 4);
    }
}
