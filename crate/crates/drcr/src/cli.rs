//! The `drcr` command line.
//!
//! Exit status: 0 on success (an infeasible verdict is a result, not a
//! failure), 1 on usage errors, 2 on I/O or input-data errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drcr_core::btcs::BtcsConfig;
use drcr_core::graph::{Network, Task};
use drcr_core::netgen::{
    classify_task, gen_graph, gen_srlg, gen_tasks, DensityClass, GenSpec, SrlgPattern, SrlgSpec, TaskKind,
};
use drcr_core::oracle::{build_histogram, HistogramRequest, ProtectionCheck};
use drcr_core::pulse::BinSpec;
use drcr_core::{build_reverse_trees, Path as CorePath, TreeCache, INFINITY};
use serde::Serialize;
use serde_json::json;

use crate::bench::{
    metadata_lines, render_csv, render_sweep_csv, render_text, run_suite, solve, summarize, sweep_alpha, Deadline,
    SolverKind, SuiteOptions, DEFAULT_ALPHAS,
};
use crate::formats::{
    format_task, load_network, load_tasks, parse_task, write_graph, write_srlg, write_tasks, write_histogram,
    write_text, FormatError, Manifest,
};

#[derive(Debug, Parser)]
#[command(name = "drcr", version, about = "Delay-range constrained and SRLG-disjoint routing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random graph.
    GenGraph(GenGraphArgs),
    /// Assign SRLG groups to a graph.
    GenSrlg(GenSrlgArgs),
    /// Sample routing tasks on a graph.
    GenTasks(GenTasksArgs),
    /// Keep feasible DRCR tasks / SRLG trap tasks.
    FilterTasks(FilterArgs),
    /// Solve single-path tasks.
    SolveDrcr(SolveDrcrArgs),
    /// Solve protected-pair tasks.
    SolveSrlg(SolveSrlgArgs),
    /// Path-cost histogram for one task.
    Histogram(HistogramArgs),
    /// Time solvers over a task set.
    Bench(BenchArgs),
    /// Time the corridor search for several corridor widths.
    SweepAlpha(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TopologyArg {
    Er,
    Sf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DensityArg {
    K1,
    K2,
    K3,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternArg {
    Random,
    Star,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Drcr,
    Srlg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphInput {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    srlg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BtcsArgs {
    /// Corridor width in units of the cheapest edge cost.
    #[arg(long, default_value_t = 10.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    max_corridors: Option<u64>,
}

#[derive(Debug, Args)]
struct GenGraphArgs {
    #[arg(long, value_enum)]
    topology: TopologyArg,
    #[arg(long)]
    nodes: usize,
    /// ER density class.
    #[arg(long, value_enum, default_value = "k1")]
    density: DensityArg,
    /// Scale-free attachment parameter.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct GenSrlgArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    pattern: PatternArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct GenTasksArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    tasks: PathBuf,
    #[command(flatten)]
    btcs: BtcsArgs,
    /// Per-task labeling budget.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Also write one JSON line per kept task with its label.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SolveDrcrArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    tasks: PathBuf,
    #[arg(long, value_enum, default_value = "btbu1")]
    solver: SolverKind,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SolveSrlgArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    tasks: PathBuf,
    #[command(flatten)]
    btcs: BtcsArgs,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    #[command(flatten)]
    input: GraphInput,
    /// `src,dst,d_low,d_up[,d_diff]`; the fifth field adds the protected series.
    #[arg(long)]
    task: String,
    #[arg(long, default_value_t = 10)]
    bin: u64,
    /// Path cap per series.
    #[arg(long, default_value_t = 100_000_000)]
    cap: u64,
    /// Lower edge of the first bin.
    #[arg(long, default_value_t = 0)]
    origin: u64,
    /// Ignore paths costing this much or more.
    #[arg(long)]
    ceiling: Option<u64>,
    /// Decide protection by exhaustive enumeration (up to this many paths).
    #[arg(long)]
    exhaustive: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    tasks: PathBuf,
    /// Repeat to compare several solvers.
    #[arg(long, value_enum, default_values = ["pulse", "btbu1", "btbu2"])]
    solver: Vec<SolverKind>,
    #[arg(long, default_value_t = 1000)]
    time_limit_ms: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[command(flatten)]
    btcs: BtcsArgs,
    /// Raw per-task records as JSON lines.
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    tasks: PathBuf,
    /// Comma-separated corridor width factors.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    time_limit_ms: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    max_corridors: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        Self::Data(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::GenGraph(a) => gen_graph_cmd(a),
        Command::GenSrlg(a) => gen_srlg_cmd(a),
        Command::GenTasks(a) => gen_tasks_cmd(a),
        Command::FilterTasks(a) => filter_cmd(a),
        Command::SolveDrcr(a) => solve_drcr_cmd(a),
        Command::SolveSrlg(a) => solve_srlg_cmd(a),
        Command::Histogram(a) => histogram_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::SweepAlpha(a) => sweep_cmd(a),
    }
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => Ok(write_text(path, text)?),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Data(format!("stdout: {e}")))
        }
    }
}

/// Writes `<out>.manifest.json` next to a generated file.
fn write_manifest(output: &Output, kind: &str, seed: u64, params: serde_json::Value, inputs: &[&Path]) -> Result<()> {
    let Some(out) = &output.out else { return Ok(()) };
    let manifest = Manifest {
        artifact: out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        kind: kind.to_owned(),
        seed,
        params,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let mut path = out.clone().into_os_string();
    path.push(".manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    Ok(write_text(Path::new(&path), &text)?)
}

fn load(input: &GraphInput) -> Result<Network> {
    Ok(load_network(&input.graph, input.srlg.as_deref())?)
}

fn load_checked_tasks(path: &Path, net: &Network) -> Result<Vec<Task>> {
    let tasks = load_tasks(path)?;
    for (i, t) in tasks.iter().enumerate() {
        t.base().check_nodes(net).map_err(|e| CliError::Data(format!("{}: task {i}: {e}", path.display())))?;
    }
    Ok(tasks)
}

fn time_limit(ms: Option<u64>) -> Result<Option<Duration>> {
    match ms {
        Some(0) => Err(CliError::Usage("--time-limit-ms must be positive".into())),
        other => Ok(other.map(Duration::from_millis)),
    }
}

fn btcs_config(a: &BtcsArgs) -> Result<BtcsConfig> {
    let mut cfg = BtcsConfig::new(a.alpha, a.workers)
        .map_err(|e| CliError::Usage(format!("invalid corridor settings: {e}")))?;
    cfg.max_corridors = a.max_corridors;
    Ok(cfg)
}

fn gen_graph_cmd(a: GenGraphArgs) -> Result<()> {
    let (spec, params) = match a.topology {
        TopologyArg::Er => {
            let class = match a.density {
                DensityArg::K1 => DensityClass::K1,
                DensityArg::K2 => DensityClass::K2,
                DensityArg::K3 => DensityClass::K3,
            };
            let spec = GenSpec::erdos_renyi(a.nodes, class, a.seed);
            (spec, json!({"topology": "er", "nodes": a.nodes, "density": format!("{:?}", a.density).to_lowercase()}))
        }
        TopologyArg::Sf => (GenSpec::scale_free(a.nodes, a.m, a.seed), json!({"topology": "sf", "nodes": a.nodes, "m": a.m})),
    };
    let net = gen_graph(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&a.output, &write_graph(&net))?;
    write_manifest(&a.output, "graph", a.seed, params, &[])
}

fn gen_srlg_cmd(a: GenSrlgArgs) -> Result<()> {
    let net = load_network(&a.graph, None)?;
    let pattern = match a.pattern {
        PatternArg::Random => SrlgPattern::Random,
        PatternArg::Star => SrlgPattern::Star,
    };
    let groups = gen_srlg(&net, &SrlgSpec::new(pattern, a.seed)).map_err(|e| CliError::Data(e.to_string()))?;
    emit(&a.output, &write_srlg(&groups))?;
    let params = json!({"pattern": format!("{:?}", a.pattern).to_lowercase()});
    write_manifest(&a.output, "srlg", a.seed, params, &[&a.graph])
}

fn gen_tasks_cmd(a: GenTasksArgs) -> Result<()> {
    let net = load(&a.input)?;
    let kind = match a.kind {
        KindArg::Drcr => TaskKind::Drcr,
        KindArg::Srlg => TaskKind::Srlg,
    };
    let tasks = gen_tasks(&net, a.count, kind, a.seed).map_err(|e| CliError::Data(e.to_string()))?;
    emit(&a.output, &write_tasks(&tasks))?;
    let params = json!({"count": a.count, "kind": format!("{:?}", a.kind).to_lowercase()});
    write_manifest(&a.output, "tasks", a.seed, params, &[&a.input.graph])
}

fn filter_cmd(a: FilterArgs) -> Result<()> {
    let net = load(&a.input)?;
    let tasks = load_checked_tasks(&a.tasks, &net)?;
    let cfg = btcs_config(&a.btcs)?;
    let limit = time_limit(a.time_limit_ms)?;
    let mut cache = TreeCache::new();
    let mut kept = Vec::new();
    let mut labels = String::new();
    for (i, task) in tasks.iter().enumerate() {
        let trees = cache.get(&net, task.base().target);
        let label = classify_task(&net, &trees, task, &cfg, &Deadline::after(limit));
        if label.kept() {
            kept.push(*task);
            let line = json!({"task": i, "spec": format_task(task), "label": label.as_str()});
            labels.push_str(&(line.to_string() + "\n"));
        }
    }
    eprintln!("kept {} of {} tasks", kept.len(), tasks.len());
    if let Some(path) = &a.labels {
        write_text(path, &labels)?;
    }
    emit(&a.output, &write_tasks(&kept))
}

#[derive(Serialize)]
struct PathOut {
    cost: u64,
    delay: u64,
    edges: Vec<u32>,
}

impl From<&CorePath> for PathOut {
    fn from(p: &CorePath) -> Self {
        Self { cost: p.cost(), delay: p.delay(), edges: p.edges().to_vec() }
    }
}

fn solve_drcr_cmd(a: SolveDrcrArgs) -> Result<()> {
    if a.solver == SolverKind::Btcs {
        return Err(CliError::Usage("solve-drcr takes pulse, btbu1 or btbu2".into()));
    }
    let net = load_network(&a.graph, None)?;
    let tasks = load_checked_tasks(&a.tasks, &net)?;
    let limit = time_limit(a.time_limit_ms)?;
    let cfg = BtcsConfig::default();
    let mut out = String::new();
    for (i, task) in tasks.iter().enumerate() {
        let solved = solve(&net, task, a.solver, &cfg, &Deadline::after(limit));
        let line = json!({
            "task": i,
            "solver": a.solver.as_str(),
            "outcome": solved.report.outcome.as_str(),
            "path": solved.ap.as_ref().map(PathOut::from),
            "iterations": solved.report.iterations,
            "pulses": solved.report.pulses,
        });
        out.push_str(&(line.to_string() + "\n"));
    }
    emit(&a.output, &out)
}

fn solve_srlg_cmd(a: SolveSrlgArgs) -> Result<()> {
    let net = load(&a.input)?;
    let tasks = load_checked_tasks(&a.tasks, &net)?;
    if let Some(i) = tasks.iter().position(|t| !SolverKind::Btcs.handles(t)) {
        return Err(CliError::Usage(format!("task {i} has no d_diff column; solve-srlg needs SRLG tasks")));
    }
    let cfg = btcs_config(&a.btcs)?;
    let limit = time_limit(a.time_limit_ms)?;
    let mut out = String::new();
    for (i, task) in tasks.iter().enumerate() {
        let solved = solve(&net, task, SolverKind::Btcs, &cfg, &Deadline::after(limit));
        let r = &solved.report;
        let line = json!({
            "task": i,
            "outcome": r.outcome.as_str(),
            "ap": solved.ap.as_ref().map(PathOut::from),
            "pp": solved.pp.as_ref().map(PathOut::from),
            "corridors_explored": r.corridors_explored,
            "ap_candidates_checked": r.ap_candidates_checked,
        });
        out.push_str(&(line.to_string() + "\n"));
    }
    emit(&a.output, &out)
}

fn histogram_cmd(a: HistogramArgs) -> Result<()> {
    if a.bin == 0 {
        return Err(CliError::Usage("--bin must be positive".into()));
    }
    let task = parse_task(1, &a.task).map_err(|e| CliError::Usage(format!("--task: {e}")))?;
    let net = load(&a.input)?;
    task.base().check_nodes(&net).map_err(|e| CliError::Data(e.to_string()))?;
    let ceiling = a.ceiling.unwrap_or(INFINITY);
    if ceiling <= a.origin {
        return Err(CliError::Usage("--ceiling must exceed --origin".into()));
    }
    let bins = BinSpec { width: a.bin, origin: a.origin, ceiling };
    let protection = match a.exhaustive {
        Some(limit) => ProtectionCheck::Exhaustive { limit },
        None => ProtectionCheck::Solver,
    };
    let req = HistogramRequest { bins, cap: a.cap, d_diff: task.d_diff(), protection };
    let trees = build_reverse_trees(&net, task.base().target);
    let hist = build_histogram(&net, &trees, task.base(), &req).map_err(|e| CliError::Data(e.to_string()))?;
    emit(&a.output, &write_histogram(&hist))
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let net = load(&a.input)?;
    let tasks = load_checked_tasks(&a.tasks, &net)?;
    for solver in &a.solver {
        if let Some(i) = tasks.iter().position(|t| !solver.handles(t)) {
            return Err(CliError::Usage(format!("solver {} cannot run task {i}", solver.as_str())));
        }
    }
    let opts = SuiteOptions {
        time_limit: time_limit(Some(a.time_limit_ms))?,
        repetitions: a.repetitions.max(1),
        btcs: btcs_config(&a.btcs)?,
    };
    let mut records = Vec::new();
    for &solver in &a.solver {
        records.extend(run_suite(&net, &tasks, solver, &opts));
    }
    if let Some(path) = &a.records {
        let text: String = records.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect();
        write_text(path, &text)?;
    }
    let meta = metadata_lines(&[
        ("graph".into(), a.input.graph.display().to_string()),
        ("tasks".into(), a.tasks.display().to_string()),
        ("time_limit_ms".into(), a.time_limit_ms.to_string()),
        ("repetitions".into(), opts.repetitions.to_string()),
        ("alpha".into(), opts.btcs.alpha.to_string()),
        ("workers".into(), opts.btcs.workers.to_string()),
    ]);
    let rows = summarize(&records);
    let text = match a.format {
        FormatArg::Csv => render_csv(&rows, &meta),
        FormatArg::Text => render_text(&rows, &meta),
    };
    emit(&a.output, &text)
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    if a.alphas.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(CliError::Usage("alphas must be positive".into()));
    }
    let net = load(&a.input)?;
    let tasks = load_checked_tasks(&a.tasks, &net)?;
    if let Some(i) = tasks.iter().position(|t| !SolverKind::Btcs.handles(t)) {
        return Err(CliError::Usage(format!("task {i} has no d_diff column")));
    }
    let btcs = btcs_config(&BtcsArgs { alpha: 10.0, workers: a.workers, max_corridors: a.max_corridors })?;
    let opts = SuiteOptions { time_limit: time_limit(Some(a.time_limit_ms))?, repetitions: a.repetitions.max(1), btcs };
    let rows = sweep_alpha(&net, &tasks, &a.alphas, &opts);
    let meta = metadata_lines(&[
        ("graph".into(), a.input.graph.display().to_string()),
        ("tasks".into(), a.tasks.display().to_string()),
        ("time_limit_ms".into(), a.time_limit_ms.to_string()),
        ("workers".into(), a.workers.to_string()),
    ]);
    emit(&a.output, &render_sweep_csv(&rows, &meta))
}
