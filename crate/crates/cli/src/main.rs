//! `laakso-lab`: generate trees and graphs, run the verification suites,
//! analyze map tables, search for forks and tabulate moduli.
//!
//! Exit status is 0 on success, 1 when a check fails (a JSON failure report
//! is written), and 2 on usage, parse or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use laakso_lab::export::{laakso_dot, laakso_json, tree_json};
use laakso_lab::james_model::{
    parse_theta, verify_atd_bilipschitz, verify_biorthogonality, verify_eq_james, verify_lemma_3_1,
};
use laakso_lab::moduli::{check_beta_leq_auc, half_unit_grid, LpModel, ModulusKind, ModulusTable};
use laakso_lab::quotient_analysis::beta_bound_from_fork;
use laakso_lab::tree_to_laakso::{Sampling, DEFAULT_SAMPLES, EXHAUSTIVE_LIMIT};
use laakso_lab::verify::{verify_all, PhiReplay, VerifyConfig, SCHEMA_VERSION};
use laakso_lab::{BuildLimits, LaaksoGraph, MetricMapTable, PhiMap, TreeNode, TreeSpace};

#[derive(Parser)]
#[command(name = "laakso-lab", version, about = "Laakso graphs, the tree quotient map and its metric checks")]
struct Cli {
    /// Print elapsed wall time to stderr.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree truncation or a Laakso graph.
    #[command(subcommand)]
    Generate(Generate),
    /// Run verification suites.
    #[command(subcommand)]
    Verify(Verify),
    /// Analyze a map table.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Search a map table (or the tree map) for a fork.
    Fork(ForkArgs),
    /// Tabulate a modulus, or compare β with the convexity modulus.
    Moduli(ModuliArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Generate {
    Tree {
        #[arg(long)]
        b: u32,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        output: Output,
    },
    Laakso {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Surjectivity, level preservation, 1-Lipschitz and lift exactness of φ.
    Phi {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        b: u32,
        /// Check every preimage and every pair.
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Preimages sampled per vertex.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Swap two branches of φ below {1}.
        #[arg(long)]
        inject_fault: bool,
        /// Re-run the counterexamples of an earlier failure report.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Exact checks of the staircase vectors.
    James {
        #[arg(long, default_value = "3/4")]
        theta: String,
        #[arg(long, default_value_t = 12)]
        indices: u32,
        #[arg(long, default_value_t = 6)]
        maxsize: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Every suite with default parameters.
    All {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        inject_fault: bool,
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Lipschitz and co-Lipschitz profile and quotient moduli of a map table.
    Map {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated scales δ (also used as radii for the quotient moduli).
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        delta_grid: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct ForkArgs {
    /// Map table JSON; without it the map φ: T_{b,3^n} → G_n is used.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1, conflicts_with = "input")]
    n: u32,
    #[arg(long, default_value_t = 2, conflicts_with = "input")]
    b: u32,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    rmin: f64,
    /// Largest number of arms to collect.
    #[arg(long)]
    arms: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ModuliArgs {
    #[command(subcommand)]
    action: Option<ModuliAction>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value = "beta")]
    kind: String,
    #[arg(long, default_value_t = 0.01)]
    tmin: f64,
    #[arg(long, default_value_t = 0.5)]
    tmax: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Geometric instead of even spacing.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum ModuliAction {
    /// Check β(t) ≤ δ(2t) on an even grid in (0, 1/2].
    CheckLemma42 {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, &text)
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn tree_cap() -> Result<usize> {
    Ok(BuildLimits::from_env()?.max_vertices)
}

fn build_graph(n: u32, b: u32) -> Result<LaaksoGraph> {
    Ok(LaaksoGraph::build_with(n, b, &BuildLimits::from_env()?)?)
}

/// Pulls replay cases out of a failure report, or reads a single case.
fn replay_cases(text: &str) -> Result<Vec<(String, PhiReplay)>> {
    let value: Value = serde_json::from_str(text).context("replay file is not JSON")?;
    if let Some(failures) = value.get("failures").and_then(Value::as_array) {
        let mut cases = Vec::new();
        for f in failures {
            if let Some(r) = f.get("replay") {
                let invariant = f.get("invariant").and_then(Value::as_str).unwrap_or("").to_string();
                cases.push((invariant, serde_json::from_value(r.clone())?));
            }
        }
        return Ok(cases);
    }
    Ok(vec![(String::new(), serde_json::from_value(value).context("not a replay case")?)])
}

fn run_replay(path: &Path, output: &Output) -> Result<ExitCode> {
    let cases = replay_cases(&read(path)?)?;
    if cases.is_empty() {
        bail!("{} contains no replayable counterexamples", path.display());
    }
    let mut results = Vec::new();
    let mut reproduced = false;
    for (invariant, case) in cases {
        let still_failing = case.run()?;
        reproduced |= still_failing;
        results.push(json!({
            "invariant": invariant,
            "case": case,
            "still_failing": still_failing,
        }));
    }
    emit_json(output, &json!({ "schema": SCHEMA_VERSION, "replayed": results, "passed": !reproduced }))?;
    Ok(status(!reproduced))
}

fn generate(cmd: Generate) -> Result<ExitCode> {
    match cmd {
        Generate::Tree { b, d, output } => {
            let tree = TreeSpace::new(b, d, tree_cap()?)?;
            let mut text = tree_json(&tree);
            text.push('\n');
            emit(&output, &text)?;
        }
        Generate::Laakso { n, b, format, output } => {
            let graph = build_graph(n, b)?;
            let text = match format {
                GraphFormat::Json => laakso_json(&graph) + "\n",
                GraphFormat::Dot => laakso_dot(&graph),
            };
            emit(&output, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cmd: Verify) -> Result<ExitCode> {
    match cmd {
        Verify::Phi { n, b, exhaustive, samples, seed, inject_fault, replay, output } => {
            if let Some(path) = replay {
                return run_replay(&path, &output);
            }
            let mut map = PhiMap::new(build_graph(n, b)?);
            let fault = inject_fault.then(|| TreeNode::new(vec![1]).expect("valid node"));
            if let Some(at) = &fault {
                map = map.with_fault(at.clone());
            }
            let nodes = TreeSpace::node_count(b, map.depth()).unwrap_or(usize::MAX);
            let sampling = match (exhaustive, samples) {
                (true, _) => Sampling::Exhaustive,
                (false, Some(k)) => Sampling::Sampled { per_target: k, seed },
                (false, None) if nodes <= EXHAUSTIVE_LIMIT => Sampling::Exhaustive,
                (false, None) => Sampling::Sampled { per_target: DEFAULT_SAMPLES, seed },
            };
            let report = map.verify(sampling)?;
            let mut failures = Vec::new();
            for (invariant, summary) in [
                ("surjective and level preserving", &report.surjective_levels),
                ("1-Lipschitz", &report.lipschitz),
                ("lift exactness", &report.lift),
            ] {
                if let Some(cx) = summary.counterexamples.first() {
                    let replay = PhiReplay { n, b, fault: fault.clone(), counterexample: cx.clone() };
                    failures.push(json!({ "suite": "phi", "invariant": invariant, "counterexample": cx, "replay": replay }));
                }
            }
            emit_json(
                &output,
                &json!({ "schema": SCHEMA_VERSION, "passed": report.passed, "report": report, "failures": failures }),
            )?;
            Ok(status(report.passed))
        }
        Verify::James { theta, indices, maxsize, output } => {
            let theta = parse_theta(&theta)?;
            let reports = vec![
                verify_lemma_3_1(theta, indices, maxsize),
                verify_eq_james(indices, maxsize),
                verify_atd_bilipschitz(theta, indices, maxsize),
                verify_biorthogonality(theta, indices),
            ];
            let passed = reports.iter().all(|r| r.passed);
            let failures: Vec<Value> = reports
                .iter()
                .flat_map(|r| r.checks.iter().map(move |c| (r, c)))
                .filter(|(_, c)| !c.passed())
                .map(|(r, c)| json!({ "suite": "james", "invariant": format!("{} {}", r.suite, c.name), "counterexample": c.first_violation }))
                .collect();
            emit_json(
                &output,
                &json!({ "schema": SCHEMA_VERSION, "passed": passed, "reports": reports, "failures": failures }),
            )?;
            Ok(status(passed))
        }
        Verify::All { seed, inject_fault, replay, output } => {
            if let Some(path) = replay {
                return run_replay(&path, &output);
            }
            let config = VerifyConfig { seed, inject_fault, ..VerifyConfig::default() };
            let report = verify_all(&config)?;
            emit_json(&output, &serde_json::to_value(&report)?)?;
            Ok(status(report.passed))
        }
    }
}

fn analyze(cmd: Analyze) -> Result<ExitCode> {
    let Analyze::Map { input, delta_grid, output } = cmd;
    let map = MetricMapTable::from_json(&read(&input)?)?;
    let mut report = json!({
        "schema": SCHEMA_VERSION,
        "source_points": map.source().len(),
        "target_points": map.target().len(),
        "surjective": map.is_surjective(),
        "lipschitz": map.lipschitz_constant(),
    });
    if map.is_surjective() {
        report["profile"] = serde_json::to_value(map.coarse_profile(&delta_grid)?)?;
        let moduli = delta_grid
            .iter()
            .map(|&r| map.quotient_moduli(r).map(|(lo, hi)| json!({ "r": r, "omega": lo, "big_omega": hi })))
            .collect::<laakso_lab::Result<Vec<_>>>()?;
        report["quotient_moduli"] = json!(moduli);
    }
    emit_json(&output, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn fork(args: ForkArgs) -> Result<ExitCode> {
    let map = match &args.input {
        Some(path) => MetricMapTable::from_json(&read(path)?)?,
        None => {
            let phi = PhiMap::new(build_graph(args.n, args.b)?);
            phi.to_map_table(&phi.source_space(tree_cap()?)?)?
        }
    };
    let arms = args.arms.unwrap_or(usize::MAX);
    let witness = map.fork_search(args.eps, args.rmin, arms)?;
    let c_inf = map
        .coarse_profile(&map.source().realized_distances())?
        .atd_colipschitz_inf;
    let check = match (&witness, c_inf) {
        (Some(w), Some(c)) => Some(w.verify(&map, c)),
        _ => None,
    };
    let passed = check.is_none_or(|c| c.passed());
    emit_json(
        &args.output,
        &json!({
            "schema": SCHEMA_VERSION,
            "found": witness.is_some(),
            "eps": args.eps,
            "c_inf": c_inf,
            "witness": witness,
            "check": check,
            "beta_bound": beta_bound_from_fork(args.eps),
            "passed": passed,
        }),
    )?;
    Ok(status(passed))
}

fn moduli(args: ModuliArgs) -> Result<ExitCode> {
    match args.action {
        Some(ModuliAction::CheckLemma42 { p, points, output }) => {
            let model = LpModel::new(p)?;
            let report = check_beta_leq_auc(&model, &half_unit_grid(points))?;
            let passed = report.passed;
            let failures: Vec<Value> = report
                .violations
                .iter()
                .map(|(t, b, a)| json!({ "suite": "moduli", "invariant": "beta(t) <= auc(2t)", "counterexample": { "t": t, "beta": b, "auc_2t": a } }))
                .collect();
            emit_json(
                &output,
                &json!({ "schema": SCHEMA_VERSION, "passed": passed, "report": report, "failures": failures }),
            )?;
            Ok(status(passed))
        }
        None => {
            let kind: ModulusKind = args.kind.parse()?;
            let model = LpModel::new(args.p)?;
            let table = ModulusTable::tabulate(model, kind, args.tmin, args.tmax, args.points, args.log)?;
            emit(&args.output, &table.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(cmd) => generate(cmd),
        Command::Verify(cmd) => verify(cmd),
        Command::Analyze(cmd) => analyze(cmd),
        Command::Fork(args) => fork(args),
        Command::Moduli(args) => moduli(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timings = cli.timings;
    let start = Instant::now();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("laakso-lab: {err:#}");
            ExitCode::from(2)
        }
    };
    if timings {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    code
}
