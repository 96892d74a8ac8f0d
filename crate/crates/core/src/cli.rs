//! The `piu` command line.
//!
//! ```text
//! piu simulate    SPEC.json  --out DIR [--seed N] [--horizon H]
//! piu validate    TIMELINE.csv [--out DIR] [--json] [--seed N] [suite flags]
//! piu claim       FLEET.jsonl --checklist FILE.json [--confidence C] [--version V]
//!                 [--bands FILE.toml] [--target-sil K] [--out DIR] [--json]
//! piu convergence TEMPLATE.json --out DIR [--n 1,10,500] [--replications R] [suite flags]
//! ```
//!
//! Exit status: 0 success or pass, 1 analysed with a negative verdict,
//! 2 unreadable or invalid input.
//!
//! Simulation spec files are JSON objects tagged by `"kind"`:
//!
//! ```json
//! {"kind": "renewal", "dist": {"kind": "weibull", "shape": 1.5, "scale": 1000}, "horizon": 5000, "stationary": false}
//! {"kind": "nhpp", "profile": {"kind": "loglinear", "lambda0": 0.5, "beta": 0.002}, "horizon": 1000, "method": "thinning"}
//! {"kind": "superposition", "horizon": 2000, "components": [{"dist": {...}, "count": 500}]}
//! {"kind": "rare_event", "p_fault": 1e-4, "n_steps": 10000000, "step_duration": 0.001}
//! {"kind": "modular", "horizon": 1e6, "model": {"states": [...], "P": [...], ...}}
//! ```
//!
//! A bare semi-Markov model (an object with a `"states"` key) is accepted too;
//! its horizon then comes from `--horizon`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::evidence::{evaluate_claim_with_bands, Checklist, FleetLog, Sil, SilBands};
use crate::modular::{
    asymptotic_failure_rate, rarity_warning, simulate_modular, RarityThresholds, SemiMarkovModel,
};
use crate::process::{
    simulate_nhpp, simulate_nhpp_thinning, simulate_renewal, simulate_stationary_renewal,
    IntensityProfile, NhppMethod,
};
use crate::rng::RngStream;
use crate::superposition::{
    convergence_study, rare_event_hitting, simulate_superposition, write_convergence_csv,
    ComponentSpec, ConvergenceTemplate, SuperpositionSpec,
};
use crate::timeline::EventTimeline;
use crate::validators::{assess_poisson, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "piu",
    version,
    about = "Failure-process simulation, Poisson checks and proven-in-use claims"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a failure process and write its timeline.
    Simulate(SimulateArgs),
    /// Check a timeline against the Poisson assumptions.
    Validate(ValidateArgs),
    /// Evaluate a proven-in-use claim from a fleet log.
    Claim(ClaimArgs),
    /// Tabulate suite pass rates of superpositions with growing component counts.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the horizon in the spec file.
    #[arg(long)]
    horizon: Option<f64>,
    /// Output directory for timeline.csv and metadata.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Clone, Copy)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Run each of the four tests at significance / 4.
    #[arg(long)]
    family_wise: bool,
}

impl SuiteArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            significance: self.significance,
            bins: self.bins,
            epsilon: self.epsilon,
            resamples: self.resamples,
            family_wise: self.family_wise,
        }
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    timeline: PathBuf,
    /// Seeds the bootstrap of the exponential goodness-of-fit test.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    suite: SuiteArgs,
    /// Output directory for report.json and report.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ClaimArgs {
    fleet: PathBuf,
    #[arg(long)]
    checklist: PathBuf,
    #[arg(long, default_value_t = crate::evidence::DEFAULT_CONFIDENCE)]
    confidence: f64,
    /// Component version to evaluate; required when the log holds several.
    #[arg(long = "version")]
    version_filter: Option<String>,
    /// SIL band table (TOML); the high-demand table is used otherwise.
    #[arg(long)]
    bands: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    target_sil: Option<u8>,
    /// Output directory for claim.json and claim.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    template: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Component counts; overrides `n_values` in the template.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[command(flatten)]
    suite: SuiteArgs,
    /// Output directory for convergence.csv and metadata.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SimulationSpec {
    Renewal {
        dist: DistributionSpec,
        horizon: Option<f64>,
        #[serde(default)]
        stationary: bool,
    },
    Nhpp {
        profile: IntensityProfile,
        horizon: Option<f64>,
        method: Option<NhppMethod>,
    },
    Superposition {
        components: Vec<ComponentGroup>,
        horizon: Option<f64>,
    },
    RareEvent {
        p_fault: f64,
        n_steps: u64,
        step_duration: f64,
    },
    Modular {
        model: SemiMarkovModel,
        horizon: Option<f64>,
    },
}

/// `count` identical components.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentGroup {
    pub dist: DistributionSpec,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub label: Option<String>,
}

fn one() -> usize {
    1
}

impl SimulationSpec {
    /// Parses a spec file body, accepting a bare semi-Markov model as `modular`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        if v.get("states").is_some() && v.get("kind").is_none() {
            let model: SemiMarkovModel = serde_json::from_value(v)?;
            return Ok(SimulationSpec::Modular {
                model,
                horizon: None,
            });
        }
        Ok(serde_json::from_value(v)?)
    }
}

/// Result of one simulation run: the timeline plus what the metadata records.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub timeline: EventTimeline,
    pub metadata: Value,
    pub warnings: Vec<String>,
}

fn need_horizon(spec: Option<f64>, flag: Option<f64>) -> Result<f64> {
    flag.or(spec).ok_or_else(|| {
        Error::InvalidArgument("no horizon: set it in the spec or pass --horizon".into())
    })
}

/// Runs a simulation spec from `seed`. The same spec and seed always give the
/// same timeline.
pub fn run_simulation(
    spec: &SimulationSpec,
    seed: u64,
    horizon_override: Option<f64>,
) -> Result<SimulationRun> {
    let mut rng = RngStream::new(seed, 0);
    let mut meta = serde_json::Map::new();
    let mut warnings = Vec::new();
    let timeline = match spec {
        SimulationSpec::Renewal {
            dist,
            horizon,
            stationary,
        } => {
            let h = need_horizon(*horizon, horizon_override)?;
            meta.insert("horizon".into(), json!(h));
            meta.insert("theoretical_rate".into(), json!(1.0 / dist.mean()));
            if *stationary {
                simulate_stationary_renewal(dist, h, &mut rng)?
            } else {
                simulate_renewal(dist, h, &mut rng)?
            }
        }
        SimulationSpec::Nhpp {
            profile,
            horizon,
            method,
        } => {
            let h = need_horizon(*horizon, horizon_override)?;
            let method = method.unwrap_or(profile.generation_method());
            meta.insert("horizon".into(), json!(h));
            meta.insert("method".into(), json!(method));
            meta.insert("expected_events".into(), json!(profile.cumulative(h)));
            match method {
                NhppMethod::InverseTimeTransform => simulate_nhpp(profile, h, &mut rng)?,
                NhppMethod::Thinning => simulate_nhpp_thinning(profile, h, &mut rng)?,
            }
        }
        SimulationSpec::Superposition {
            components,
            horizon,
        } => {
            let h = need_horizon(*horizon, horizon_override)?;
            let expanded: Vec<ComponentSpec> = components
                .iter()
                .flat_map(|g| {
                    std::iter::repeat_n(
                        ComponentSpec {
                            dist: g.dist,
                            label: g.label.clone(),
                        },
                        g.count,
                    )
                })
                .collect();
            let s = SuperpositionSpec::new(expanded, h)?;
            let (t, rate) = simulate_superposition(&s, &rng)?;
            meta.insert("horizon".into(), json!(h));
            meta.insert("components".into(), json!(s.components().len()));
            meta.insert("theoretical_rate".into(), json!(rate));
            t
        }
        SimulationSpec::RareEvent {
            p_fault,
            n_steps,
            step_duration,
        } => {
            let t = rare_event_hitting(*p_fault, *n_steps, *step_duration, &mut rng)?;
            meta.insert("horizon".into(), json!(t.window_end()));
            meta.insert("theoretical_rate".into(), json!(p_fault / step_duration));
            t
        }
        SimulationSpec::Modular { model, horizon } => {
            let h = need_horizon(*horizon, horizon_override)?;
            let rate = asymptotic_failure_rate(model)?;
            let diags = rarity_warning(model, &RarityThresholds::default());
            warnings.extend(diags.iter().map(|d| format!("rarity warning: {d}")));
            meta.insert("horizon".into(), json!(h));
            meta.insert("theoretical_rate".into(), json!(rate));
            meta.insert("rarity_warnings".into(), json!(diags));
            simulate_modular(model, h, &mut rng)?
        }
    };
    meta.insert("command".into(), json!("simulate"));
    meta.insert("seed".into(), json!(seed));
    meta.insert("stream_id".into(), json!(0));
    meta.insert("spec".into(), serde_json::to_value(spec)?);
    meta.insert("events".into(), json!(timeline.len()));
    meta.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    Ok(SimulationRun {
        timeline,
        metadata: Value::Object(meta),
        warnings,
    })
}

/// Template file of the convergence command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceFile {
    pub dist: DistributionSpec,
    pub total_rate: f64,
    pub horizon: f64,
    #[serde(default)]
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub replications: Option<usize>,
}

pub const DEFAULT_REPLICATIONS: usize = 100;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::open(path, e))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("json value");
    s.push(b'\n');
    s
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Json(j) => Error::Config(format!("{}: {j}", path.display())),
        other => other,
    }
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let text = read_text(&a.spec)?;
    let spec = SimulationSpec::from_json(&text).map_err(|e| in_file(&a.spec, e))?;
    let run = run_simulation(&spec, a.seed, a.horizon)?;
    for w in &run.warnings {
        writeln!(err, "{w}")?;
    }
    let mut meta = run.metadata;
    meta["spec_path"] = json!(a.spec.display().to_string());
    meta["horizon_override"] = json!(a.horizon);
    write_file(
        &a.out,
        "timeline.csv",
        run.timeline.to_csv_string().as_bytes(),
    )?;
    write_file(&a.out, "metadata.json", &pretty(&meta))?;
    writeln!(
        out,
        "{} events on (0, {}] h written to {}",
        run.timeline.len(),
        run.timeline.window_end(),
        a.out.join("timeline.csv").display()
    )?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let timeline = EventTimeline::read_csv_file(&a.timeline)?;
    let suite = a.suite.config();
    let report = assess_poisson(&timeline, &suite, &mut RngStream::new(a.seed, 0))?;
    let mut j = report.to_json();
    j["config"] = json!({
        "command": "validate",
        "input": a.timeline.display().to_string(),
        "seed": a.seed,
        "significance": suite.significance,
        "bins": suite.bins,
        "epsilon": suite.epsilon,
        "resamples": suite.resamples,
        "family_wise": suite.family_wise,
    });
    let text = report.text_summary();
    if let Some(dir) = &a.out {
        write_file(dir, "report.json", &pretty(&j))?;
        write_file(dir, "report.txt", text.as_bytes())?;
    }
    if a.json {
        out.write_all(&pretty(&j))?;
    } else {
        out.write_all(text.as_bytes())?;
    }
    Ok(if report.overall {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_claim(a: &ClaimArgs, out: &mut dyn Write) -> Result<i32> {
    let fleet = FleetLog::read_jsonl_file(&a.fleet)?;
    let checklist = Checklist::load(&a.checklist)?;
    let bands = match &a.bands {
        Some(p) => SilBands::load(p)?,
        None => SilBands::default(),
    };
    let result = evaluate_claim_with_bands(
        &fleet,
        &checklist,
        a.confidence,
        a.version_filter.as_deref(),
        &bands,
    )?;
    let target = a.target_sil.and_then(Sil::from_level);
    let mut j = serde_json::to_value(&result)?;
    j["config"] = json!({
        "command": "claim",
        "fleet": a.fleet.display().to_string(),
        "checklist": a.checklist.display().to_string(),
        "confidence": a.confidence,
        "version": a.version_filter,
        "bands": a.bands.as_ref().map(|p| p.display().to_string()),
        "band_table": bands,
        "target_sil": a.target_sil,
    });
    let mut text = result.text_summary();
    if let Some(t) = target {
        let met = result.valid && result.sil >= t;
        text.push_str(&format!(
            "target {t}: {}\n",
            if met { "met" } else { "not met" }
        ));
    }
    if let Some(dir) = &a.out {
        write_file(dir, "claim.json", &pretty(&j))?;
        write_file(dir, "claim.txt", text.as_bytes())?;
    }
    if a.json {
        out.write_all(&pretty(&j))?;
    } else {
        out.write_all(text.as_bytes())?;
    }
    let pass = result.valid && target.is_none_or(|t| result.sil >= t);
    Ok(if pass { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_convergence(a: &ConvergenceArgs, out: &mut dyn Write) -> Result<i32> {
    let text = read_text(&a.template)?;
    let file: ConvergenceFile =
        serde_json::from_str(&text).map_err(|e| in_file(&a.template, e.into()))?;
    let template = ConvergenceTemplate {
        dist: file.dist,
        total_rate: file.total_rate,
        horizon: a.horizon.unwrap_or(file.horizon),
    };
    let n_values = a.n.clone().unwrap_or(file.n_values);
    let replications = a
        .replications
        .or(file.replications)
        .unwrap_or(DEFAULT_REPLICATIONS);
    let suite = a.suite.config();
    let rows = convergence_study(
        &template,
        &n_values,
        replications,
        &suite,
        &RngStream::new(a.seed, 0),
    )?;
    let mut csv = Vec::new();
    write_convergence_csv(&rows, &mut csv)?;
    let meta = json!({
        "command": "convergence",
        "template_path": a.template.display().to_string(),
        "seed": a.seed,
        "template": template,
        "n_values": n_values,
        "replications": replications,
        "suite": suite,
        "tool_version": env!("CARGO_PKG_VERSION"),
    });
    write_file(&a.out, "convergence.csv", &csv)?;
    write_file(&a.out, "metadata.json", &pretty(&meta))?;
    out.write_all(&csv)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out` and diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Claim(a) => cmd_claim(a, out),
        Command::Convergence(a) => cmd_convergence(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "piu: {e}");
            EXIT_INPUT
        }
    }
}

/// Entry point of the `piu` binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
