//! `rig-lab`: sampling, statistics, property checks, coupling runs and sweeps.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use rig_lab::coupling::{coupon_collector_trial, run_coupling_trial};
use rig_lab::experiment::{emit_outputs, run_sweep, wilson_interval, ExperimentConfig};
use rig_lab::generators::{sample_g_star, sample_g_star_poisson, sample_h_independent, sample_rig};
use rig_lab::properties::{
    has_perfect_matching, hamiltonicity_seeded, is_k_connected, maximum_matching, min_degree, structure_audit,
    AuditParams, ConnectivityMode,
};
use rig_lab::threshold::{
    coupling_parameters, default_omega, homogeneous_p_for_target, summary_stats, StatsReport, ThresholdForm, Variant,
};
use rig_lab::{Error, FeatureProbabilities, Seed, SimpleGraph};

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Parser)]
#[command(name = "rig-lab", version, about = "Random intersection graph laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and print it as an edge list.
    Gen(GenArgs),
    /// Print threshold statistics and coupling parameters as JSON.
    Stats(StatsArgs),
    /// Decide a property of an edge-list graph.
    Check(CheckArgs),
    /// Run the full coupling chain below the intersection graph.
    Couple(TrialArgs),
    /// Run the coupon-collector coupling.
    Collector(TrialArgs),
    /// Run a threshold sweep from a JSON config.
    Sweep(SweepArgs),
}

/// Feature probabilities: a common value, a JSON array file, or a grid value.
#[derive(Args, Clone)]
struct ProfileArgs {
    #[arg(long)]
    n: usize,
    /// Number of features (homogeneous profiles).
    #[arg(long)]
    m: Option<usize>,
    /// Common feature probability.
    #[arg(long, conflicts_with_all = ["probabilities", "c"])]
    p: Option<f64>,
    /// JSON file holding an array of per-feature probabilities.
    #[arg(long, conflicts_with = "c")]
    probabilities: Option<PathBuf>,
    /// Homogeneous profile with S1 = n (ln n + c).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
}

impl ProfileArgs {
    fn resolve(&self) -> Result<FeatureProbabilities, CliError> {
        if let Some(path) = &self.probabilities {
            let values: Vec<f64> = read_json(path)?;
            return Ok(FeatureProbabilities::new(values)?);
        }
        let m = self.m.ok_or_else(|| CliError::usage("--m is required with --p or --c"))?;
        let p = match (self.p, self.c) {
            (Some(p), _) => p,
            (None, Some(c)) => {
                let target = ThresholdForm::Connectivity { k: 1 }.target_s1(self.n, c)?;
                homogeneous_p_for_target(self.n, m, target / (self.n as f64 * m as f64))?
            }
            (None, None) => return Err(CliError::usage("one of --p, --probabilities, --c is required")),
        };
        Ok(FeatureProbabilities::homogeneous(m, p)?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Model {
    /// Intersection graph G(n, m, p).
    Rig,
    /// Independent i-uniform hypergraph H_i(n, p_hat).
    Hypergraph,
    /// Union of `draws` uniform i-subsets.
    GStar,
    /// Union of Po(lambda) uniform i-subsets.
    GStarPoisson,
}

#[derive(Args)]
struct GenArgs {
    /// JSON file with the same fields as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    arity: Option<usize>,
    #[arg(long)]
    p_hat: Option<f64>,
    #[arg(long)]
    draws: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the hypergraph (or feature sets) instead of the projection.
    #[arg(long)]
    raw: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenSpec {
    model: Model,
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    arity: Option<usize>,
    p_hat: Option<f64>,
    draws: Option<u64>,
    lambda: Option<f64>,
    #[serde(default)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Coupling slack; defaults to max(2, ln ln n).
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, value_enum, default_value = "linear")]
    variant: VariantArg,
    /// Largest t in S1t; defaults to min(n, 12).
    #[arg(long)]
    t_max: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Linear,
    Exponential,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Property {
    Mindeg,
    Kconn,
    Pm,
    Hc,
    Audit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Vertex,
    Edge,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    property: Property,
    /// Edge-list file (`n m` header, then `u v` lines); `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "vertex")]
    mode: ModeArg,
    /// Hamiltonicity work budget.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Audit: sets have at least n^gamma vertices.
    #[arg(long, default_value_t = 0.6)]
    gamma: f64,
    /// Audit: low-degree cutoff; defaults to 4k + 15.
    #[arg(long)]
    low_degree: Option<usize>,
    /// Audit: random sets per size class.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct TrialArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for `trials.jsonl` and `summary.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 1, message: msg.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source: e }.into()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Planning { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::io(path, e));
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Prints to stdout; a closed pipe is not an error.
fn print_json(value: &impl Serialize) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn require<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("model needs `{name}`")))
}

fn gen(args: GenArgs) -> Result<(), CliError> {
    let mut doc: serde_json::Map<String, Value> = match &args.config {
        Some(path) => read_json(path)?,
        None => serde_json::Map::new(),
    };
    let flags = [
        ("model", args.model.map(|m| serde_json::to_value(m).unwrap())),
        ("n", args.n.map(Value::from)),
        ("m", args.m.map(Value::from)),
        ("p", args.p.map(Value::from)),
        ("arity", args.arity.map(Value::from)),
        ("p_hat", args.p_hat.map(Value::from)),
        ("draws", args.draws.map(Value::from)),
        ("lambda", args.lambda.map(Value::from)),
        ("seed", args.seed.map(Value::from)),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            doc.insert(key.into(), v);
        }
    }
    let spec: GenSpec = serde_json::from_value(Value::Object(doc)).map_err(|e| CliError::usage(e.to_string()))?;
    let seed = Seed::new(spec.seed);
    let text = match spec.model {
        Model::Rig => {
            let probs = match spec.probabilities {
                Some(v) => FeatureProbabilities::new(v)?,
                None => FeatureProbabilities::homogeneous(require(spec.m, "m")?, require(spec.p, "p")?)?,
            };
            let rig = sample_rig(spec.n, &probs, seed)?;
            if args.raw {
                let mut out = format!("{} {}\n", spec.n, rig.feature_count());
                for set in rig.feature_sets() {
                    let line: Vec<String> = set.iter().map(usize::to_string).collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
                out
            } else {
                rig.project().to_edge_list()
            }
        }
        model => {
            let arity = require(spec.arity, "arity")?;
            let h = match model {
                Model::Hypergraph => sample_h_independent(spec.n, arity, require(spec.p_hat, "p_hat")?, seed)?,
                Model::GStar => sample_g_star(spec.n, arity, require(spec.draws, "draws")?, seed)?,
                _ => sample_g_star_poisson(spec.n, arity, require(spec.lambda, "lambda")?, seed)?,
            };
            if args.raw {
                h.to_text()
            } else {
                h.project().to_edge_list()
            }
        }
    };
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn stats(args: StatsArgs) -> Result<(), CliError> {
    let n = args.profile.n;
    let probs = args.profile.resolve()?;
    let s = summary_stats(n, &probs, args.t_max.unwrap_or(n.min(12)))?;
    let variant = match args.variant {
        VariantArg::Linear => Variant::Linear,
        VariantArg::Exponential => Variant::Exponential,
    };
    let params = coupling_parameters(&s, args.omega.unwrap_or_else(|| default_omega(n)), variant)?;
    print_json(&StatsReport::new(&s, &params));
    Ok(())
}

fn check(args: CheckArgs) -> Result<(), CliError> {
    let g = SimpleGraph::parse_edge_list(&read_text(&args.input)?)?;
    let n = g.vertex_count();
    let base = json!({ "n": n, "edges": g.edge_count() });
    let mode = match args.mode {
        ModeArg::Vertex => ConnectivityMode::Vertex,
        ModeArg::Edge => ConnectivityMode::Edge,
    };
    let details = match args.property {
        Property::Mindeg => {
            let d = min_degree(&g);
            json!({ "property": "mindeg", "k": args.k, "min_degree": d, "verdict": d >= args.k })
        }
        Property::Kconn => json!({
            "property": "kconn",
            "k": args.k,
            "mode": mode,
            "verdict": is_k_connected(&g, args.k, mode)?,
        }),
        Property::Pm => {
            let matched = maximum_matching(&g).iter().filter(|m| m.is_some()).count() / 2;
            json!({ "property": "pm", "matching_size": matched, "verdict": has_perfect_matching(&g) })
        }
        Property::Hc => {
            let v = hamiltonicity_seeded(&g, args.budget, Seed::new(args.seed))?;
            json!({ "property": "hc", "verdict": v.verdict, "certificate": v.certificate, "effort": v.effort })
        }
        Property::Audit => {
            let params = AuditParams {
                gamma: args.gamma,
                k: args.k,
                low_degree: args.low_degree.unwrap_or(4 * args.k + 15),
                samples_per_class: args.samples,
            };
            let report = structure_audit(&g, &params, Seed::new(args.seed))?;
            json!({
                "property": "audit",
                "params": params,
                "total_violations": report.total_violations(),
                "verdict": report.total_violations() == 0,
                "report": report,
            })
        }
    };
    let mut doc = base;
    doc.as_object_mut().unwrap().extend(details.as_object().unwrap().clone());
    print_json(&doc);
    Ok(())
}

fn run_trials<R, F>(args: &TrialArgs, trial: F) -> Result<Vec<R>, CliError>
where
    R: Send,
    F: Fn(usize, &FeatureProbabilities, f64, Seed) -> rig_lab::Result<R> + Sync,
{
    let n = args.profile.n;
    let probs = args.profile.resolve()?;
    let omega = args.omega.unwrap_or_else(|| default_omega(n));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    let results: rig_lab::Result<Vec<R>> = pool.install(|| {
        (0..args.trials).into_par_iter().map(|t| trial(n, &probs, omega, Seed::new(args.seed).with_trial(t))).collect()
    });
    Ok(results?)
}

fn write_trial_outputs<R: Serialize>(dir: &Path, records: &[R], summary: Value) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut lines = String::new();
    for r in records {
        lines.push_str(&serde_json::to_string(r).expect("records serialize"));
        lines.push('\n');
    }
    write_file(&dir.join("trials.jsonl"), &lines)?;
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_file(&dir.join("summary.json"), &text)?;
    print_json(&summary);
    Ok(())
}

fn rate(count: usize, total: usize) -> Value {
    let w = wilson_interval(count, total, Z_95);
    json!({ "count": count, "rate": count as f64 / total.max(1) as f64, "wilson": w })
}

fn couple(args: TrialArgs) -> Result<(), CliError> {
    let reports = run_trials(&args, run_coupling_trial)?;
    let total = reports.len();
    let guarded = reports.iter().filter(|r| r.guard_events.all()).count();
    let summary = json!({
        "n": args.profile.n,
        "trials": total,
        "seed": args.seed,
        "omega": reports.first().map(|r| r.omega),
        "regime_infeasible": reports.first().map(|r| r.regime_infeasible),
        "guards_all": rate(guarded, total),
        "poisson_m2_ok": rate(reports.iter().filter(|r| r.guard_events.poisson_m2_ok).count(), total),
        "poisson_m3_ok": rate(reports.iter().filter(|r| r.guard_events.poisson_m3_ok).count(), total),
        "y_concentration_ok": rate(reports.iter().filter(|r| r.guard_events.y_concentration_ok).count(), total),
        "contained": rate(reports.iter().filter(|r| r.contained).count(), total),
        "containment_failures_under_guards": reports.iter().filter(|r| r.guard_events.all() && !r.contained).count(),
        "per_feature_failures": reports.iter().filter(|r| !r.per_feature_contained).count(),
    });
    write_trial_outputs(&args.out, &reports, summary)
}

fn collector(args: TrialArgs) -> Result<(), CliError> {
    let reports = run_trials(&args, coupon_collector_trial)?;
    let total = reports.len();
    let count = |f: &dyn Fn(&rig_lab::coupling::CollectorReport) -> bool| reports.iter().filter(|r| f(r)).count();
    let mean_overhead = reports.iter().map(|r| r.overhead as f64).sum::<f64>() / total.max(1) as f64;
    let summary = json!({
        "n": args.profile.n,
        "trials": total,
        "seed": args.seed,
        "omega": reports.first().map(|r| r.omega),
        "min_degree_ge_1": rate(count(&|r| r.delta_ge_1), total),
        "a_minus": rate(count(&|r| r.events.a_minus), total),
        "a_plus": rate(count(&|r| r.events.a_plus), total),
        "b": rate(count(&|r| r.events.b), total),
        "sandwich_violations": count(&|r| !r.sandwich_holds),
        "mean_overhead": mean_overhead,
    });
    write_trial_outputs(&args.out, &reports, summary)
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::from_json(&read_text(&args.config)?)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let result = run_sweep(&cfg, args.threads)?;
    // Partial results are still written when a trial aborts the sweep.
    emit_outputs(&result, &args.out)?;
    let written = args.out.display();
    match result.into_checked() {
        Ok(r) => {
            eprintln!("{} trials written to {written}", r.trial_count());
            Ok(())
        }
        Err(e) => Err(CliError { code: 1, message: format!("{e}; partial results in {written}") }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Stats(a) => stats(a),
        Command::Check(a) => check(a),
        Command::Couple(a) => couple(a),
        Command::Collector(a) => collector(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rig-lab: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
