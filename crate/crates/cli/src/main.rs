use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gst_cli::certify::certify_oracle;
use gst_cli::report::{emit_report, rows_for, write_report, ReportFormat, ReportRow};
use gst_cli::scenario::{
    build_request, run_scenario, EdcgOrderMode, RootPolicy, ScenarioConfig, ScenarioError, ScenarioFile,
    TargetGraphSpec, TargetSelector, TopologySource,
};
use gst_core::flow::{minimize_completion_time, RootCandidates};
use gst_core::gst::{schedule, PathStrategy};
use gst_core::topology_gen::{generate_topology, TopologySpec};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gst", version, about = "Graph-state distribution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated topology as JSON.
    GenTopo {
        /// `line:N`, `tree:H`, `grid:AxB` or `gnp:N:P`.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run GST and the EDCG model on one scenario.
    Run(ScenarioArgs),
    /// Search roots and per-link bounds with max flow.
    Optimize(ScenarioArgs),
    /// Run a batch of seeds and check the EPR bound and EDCG dominance.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Seeds `seed..seed + trials`.
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Check the graphical rules against state vectors.
    VerifyOracle {
        /// Random five-vertex graphs on top of the exhaustive small ones.
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone, Debug, Default)]
struct ScenarioArgs {
    /// Scenario JSON; its fields override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "generate")]
    topology_file: Option<PathBuf>,
    /// Generator spec, e.g. `tree:3`.
    #[arg(long)]
    generate: Option<String>,
    /// `all`, `random:K` or a comma-separated node list.
    #[arg(long)]
    targets: Option<String>,
    /// `empty`, `complete`, `path`, `cycle`, `star` or `gnp:P`.
    #[arg(long)]
    target_graph: Option<String>,
    /// `center`, `fixed:<node>` or `optimize`.
    #[arg(long)]
    root: Option<String>,
    /// `shortest` or `flow`.
    #[arg(long)]
    strategy: Option<String>,
    /// `farthest`, `lexicographic` or `exhaustive`.
    #[arg(long)]
    edcg_order: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_flag<T: std::str::FromStr<Err = String>>(value: &Option<String>) -> Result<Option<T>, ScenarioError> {
    value.as_deref().map(str::parse).transpose().map_err(ScenarioError::Config)
}

impl ScenarioArgs {
    fn config(&self) -> Result<ScenarioConfig, ScenarioError> {
        let mut cfg = ScenarioConfig::default();
        if let Some(p) = &self.topology_file {
            cfg.topology = TopologySource::File(p.clone());
        }
        if let Some(g) = &self.generate {
            cfg.topology = TopologySource::Generate(g.clone());
        }
        if let Some(t) = &self.targets {
            cfg.targets = match t.as_str() {
                "all" => TargetSelector::All,
                _ => match t.strip_prefix("random:") {
                    Some(k) => TargetSelector::Random(
                        k.parse().map_err(|_| ScenarioError::Config(format!("bad target count `{k}`")))?,
                    ),
                    None => TargetSelector::Nodes(t.split(',').map(|s| s.trim().to_string()).collect()),
                },
            };
        }
        if let Some(g) = &self.target_graph {
            cfg.target_graph = TargetGraphSpec::Generate(g.clone());
        }
        if let Some(r) = parse_flag::<RootPolicy>(&self.root)? {
            cfg.root = r;
        }
        if let Some(s) = parse_flag::<PathStrategy>(&self.strategy)? {
            cfg.strategy = s;
        }
        if let Some(o) = parse_flag::<EdcgOrderMode>(&self.edcg_order)? {
            cfg.edcg_order = o;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.outputs.csv.clone_from(&self.csv);
        cfg.outputs.json.clone_from(&self.json);
        if let Some(path) = &self.config {
            cfg = ScenarioFile::load(path)?.apply(cfg, path.parent());
        }
        Ok(cfg)
    }
}

fn io_err(e: io::Error) -> ScenarioError {
    ScenarioError::Io(e.to_string())
}

/// Writes to the configured files, or CSV on stdout when none is set.
fn emit(rows: &[ReportRow], cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    if let Some(p) = &cfg.outputs.csv {
        emit_report(rows, ReportFormat::Csv, p).map_err(io_err)?;
    }
    if let Some(p) = &cfg.outputs.json {
        emit_report(rows, ReportFormat::Json, p).map_err(io_err)?;
    }
    if cfg.outputs.csv.is_none() && cfg.outputs.json.is_none() {
        write_report(rows, ReportFormat::Csv, io::stdout().lock()).map_err(io_err)?;
    }
    Ok(())
}

fn gen_topo(spec: &str, seed: u64, out: Option<PathBuf>) -> Result<(), ScenarioError> {
    let spec: TopologySpec = spec.parse().map_err(|e| ScenarioError::Config(format!("{e}")))?;
    let json = generate_topology(&spec, seed)?.to_json();
    match out {
        Some(p) => std::fs::write(p, json + "\n").map_err(io_err),
        None => writeln!(io::stdout(), "{json}").map_err(io_err),
    }
}

fn run(args: &ScenarioArgs) -> Result<(), ScenarioError> {
    let cfg = args.config()?;
    let out = run_scenario(&cfg)?;
    emit(&rows_for(&out, cfg.seed), &cfg)
}

#[derive(Serialize)]
struct OptimizeSummary {
    root: String,
    k: u64,
    max_flow: u64,
    per_root: Vec<(String, u64)>,
    paths: Vec<Vec<String>>,
    rounds: usize,
    heuristic: bool,
}

fn optimize(args: &ScenarioArgs) -> Result<(), ScenarioError> {
    let cfg = args.config()?;
    let req = build_request(&cfg)?;
    let candidates = match &cfg.root {
        RootPolicy::Fixed(r) => RootCandidates::Fixed(r.clone()),
        RootPolicy::Center | RootPolicy::Optimize => RootCandidates::All,
    };
    let opt = minimize_completion_time(req.topology(), &req.targets(), &candidates)?;
    let summary = OptimizeSummary {
        root: opt.root.to_string(),
        k: opt.k,
        max_flow: opt.flow.value,
        per_root: opt.per_root.iter().map(|(r, k)| (r.to_string(), *k)).collect(),
        paths: opt.plan.paths.values().map(|p| p.iter().map(ToString::to_string).collect()).collect(),
        rounds: schedule(&opt.plan).len(),
        heuristic: opt.heuristic,
    };
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "root {}", summary.root).map_err(io_err)?;
    writeln!(stdout, "k {}", summary.k).map_err(io_err)?;
    writeln!(stdout, "max_flow {}", summary.max_flow).map_err(io_err)?;
    writeln!(stdout, "rounds {}", summary.rounds).map_err(io_err)?;
    for (r, k) in &summary.per_root {
        writeln!(stdout, "per_root {r} {k}").map_err(io_err)?;
    }
    for p in &summary.paths {
        writeln!(stdout, "path {}", p.join("-")).map_err(io_err)?;
    }
    if let Some(p) = &cfg.outputs.json {
        let text = serde_json::to_string_pretty(&summary).map_err(|e| ScenarioError::Io(e.to_string()))?;
        std::fs::write(p, text + "\n").map_err(io_err)?;
    }
    Ok(())
}

fn compare(args: &ScenarioArgs, trials: u64) -> Result<(), ScenarioError> {
    let base = args.config()?;
    let results: Vec<_> = (base.seed..base.seed + trials)
        .into_par_iter()
        .map(|seed| {
            let cfg = ScenarioConfig { seed, ..base.clone() };
            run_scenario(&cfg).map(|out| (seed, out))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (seed, out) in &results {
        if out.plan.strategy == PathStrategy::Shortest {
            if out.gst.epr_pairs > out.epr_bound {
                violations.push(format!("seed {seed}: {} EPR pairs above the bound {}", out.gst.epr_pairs, out.epr_bound));
            }
            if out.root_is_last_target() && out.gst.epr_pairs > out.edcg.epr_pairs {
                violations.push(format!("seed {seed}: GST {} above EDCG {}", out.gst.epr_pairs, out.edcg.epr_pairs));
            }
        }
        rows.extend(rows_for(out, *seed));
    }
    emit(&rows, &base)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ScenarioError::Verification(violations.join("; ")))
    }
}

fn verify_oracle(random: usize, seed: u64) -> Result<(), ScenarioError> {
    let report = certify_oracle(random, seed).map_err(|e| ScenarioError::Verification(e.to_string()))?;
    for f in &report.failures {
        eprintln!("failed: {f}");
    }
    println!(
        "{} exhaustive and {} random graphs, {} checks, {} failures",
        report.exhaustive_graphs,
        report.random_graphs,
        report.checks,
        report.failures.len()
    );
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(ScenarioError::Verification(format!("{} oracle checks failed", report.failures.len())))
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GenTopo { spec, seed, out } => gen_topo(&spec, seed, out),
        Command::Run(args) => run(&args),
        Command::Optimize(args) => optimize(&args),
        Command::Compare { scenario, trials } => compare(&scenario, trials),
        Command::VerifyOracle { random, seed } => verify_oracle(random, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                ScenarioError::Verification(_) => 2,
                ScenarioError::Config(_) => 3,
                ScenarioError::Io(_) => 1,
            })
        }
    }
}
