//! Timed solver runs and their summary tables.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use drcr_core::btbu::{solve_btbu, BtbuConfig};
use drcr_core::btcs::BtcsConfig;
use drcr_core::graph::{Network, NetworkView, Task};
use drcr_core::pulse::PulseSearch;
use drcr_core::{build_reverse_trees, Interrupt, Outcome, SolveReport, INFINITY};
use serde::{Deserialize, Serialize};

use crate::parallel::solve_btcs_parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum SolverKind {
    /// Single pulse search with an unbounded cost bound.
    Pulse,
    /// Bound doubling.
    Btbu1,
    /// Step doubling.
    Btbu2,
    /// Corridor search for protected pairs (SRLG tasks only).
    Btcs,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pulse => "pulse",
            Self::Btbu1 => "btbu1",
            Self::Btbu2 => "btbu2",
            Self::Btcs => "btcs",
        }
    }

    pub fn handles(self, task: &Task) -> bool {
        self != Self::Btcs || matches!(task, Task::Srlg(_))
    }
}

/// Fires once a wall-clock instant has passed.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(pub Option<Instant>);

impl Deadline {
    pub fn after(limit: Option<Duration>) -> Self {
        Self(limit.map(|l| Instant::now() + l))
    }
}

impl Interrupt for Deadline {
    fn interrupted(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// Result of one solve, without timing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub report: SolveReport,
    pub ap: Option<drcr_core::Path>,
    pub pp: Option<drcr_core::Path>,
}

/// Builds the trees and runs `solver` on `task`.
///
/// # Panics
/// If `solver` is [`SolverKind::Btcs`] and `task` is a DRCR task.
pub fn solve(net: &Network, task: &Task, solver: SolverKind, btcs: &BtcsConfig, interrupt: &(dyn Interrupt + Sync)) -> Solved {
    let base = task.base();
    let trees = build_reverse_trees(net, base.target);
    let single = |report: SolveReport, path: Option<drcr_core::Path>| Solved { report, ap: path, pp: None };
    match solver {
        SolverKind::Pulse => {
            let run = PulseSearch::new(NetworkView::full(net), &trees, base).with_interrupt(interrupt).optimal(INFINITY);
            let outcome = match (&run.found, run.interrupted) {
                (Some(_), _) => Outcome::Optimal,
                (None, true) => Outcome::Timeout,
                (None, false) => Outcome::Infeasible,
            };
            let mut report = SolveReport::new(outcome);
            report.pulses = run.stats.pulses;
            report.iterations = 1;
            single(report, run.found)
        }
        SolverKind::Btbu1 | SolverKind::Btbu2 => {
            let cfg = if solver == SolverKind::Btbu1 { BtbuConfig::OPTION_1 } else { BtbuConfig::OPTION_2 };
            let sol = solve_btbu(net, &trees, base, &cfg, interrupt);
            single(sol.report, sol.path)
        }
        SolverKind::Btcs => {
            let Task::Srlg(t) = task else { panic!("btcs needs an SRLG task") };
            let sol = solve_btcs_parallel(net, &trees, t, btcs, interrupt);
            let (ap, pp) = sol.pair.map(|p| (p.ap, p.pp)).unzip();
            Solved { report: sol.report, ap, pp }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub task: usize,
    pub solver: String,
    /// A [`Outcome`] name, or `failed` when the solver panicked.
    pub outcome: String,
    pub wall_time_us: u64,
    pub corridors_explored: u64,
    pub ap_candidates_checked: u64,
    pub pulses: u64,
    pub iterations: u64,
    pub ap_cost: Option<u64>,
}

impl BenchRecord {
    pub fn is_resolved(&self) -> bool {
        matches!(self.outcome.as_str(), "optimal" | "pair" | "infeasible")
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome.as_str(), "optimal" | "pair")
    }

    pub fn wall_ms(&self) -> f64 {
        self.wall_time_us as f64 / 1000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub time_limit: Option<Duration>,
    /// Runs per task; the fastest is kept.
    pub repetitions: usize,
    pub btcs: BtcsConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { time_limit: None, repetitions: 1, btcs: BtcsConfig::default() }
    }
}

/// One timed run, trees included in the timed region.
pub fn run_task(net: &Network, index: usize, task: &Task, solver: SolverKind, opts: &SuiteOptions) -> BenchRecord {
    let start = Instant::now();
    let deadline = Deadline::after(opts.time_limit);
    let result = catch_unwind(AssertUnwindSafe(|| solve(net, task, solver, &opts.btcs, &deadline)));
    let wall = start.elapsed();
    let mut record = BenchRecord {
        task: index,
        solver: solver.as_str().to_owned(),
        outcome: "failed".to_owned(),
        wall_time_us: wall.as_micros() as u64,
        corridors_explored: 0,
        ap_candidates_checked: 0,
        pulses: 0,
        iterations: 0,
        ap_cost: None,
    };
    if let Ok(solved) = result {
        let r = solved.report;
        record.outcome = r.outcome.as_str().to_owned();
        record.corridors_explored = r.corridors_explored;
        record.ap_candidates_checked = r.ap_candidates_checked;
        record.pulses = r.pulses;
        record.iterations = r.iterations;
        record.ap_cost = solved.ap.map(|p| p.cost());
    }
    record
}

/// Runs every task `opts.repetitions` times and keeps the fastest run.
pub fn run_suite(net: &Network, tasks: &[Task], solver: SolverKind, opts: &SuiteOptions) -> Vec<BenchRecord> {
    tasks
        .iter()
        .enumerate()
        .map(|(i, task)| {
            (0..opts.repetitions.max(1))
                .map(|_| run_task(net, i, task, solver, opts))
                .min_by_key(|r| r.wall_time_us)
                .expect("at least one repetition")
        })
        .collect()
}

/// Thresholds for the "solved in" columns, compared strictly.
pub const THRESHOLDS_MS: [u64; 2] = [20, 50];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub solver: String,
    pub tasks: usize,
    pub max_ms: f64,
    pub mean_ms: f64,
    pub median_ms: f64,
    /// Resolved (solution or infeasibility proof) strictly under each threshold.
    pub resolved_under: [usize; 2],
    /// Solution found strictly under each threshold.
    pub feasible_under: [usize; 2],
    pub resolved: usize,
    pub feasible: usize,
    pub timeouts: usize,
    pub failed: usize,
}

pub fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    }
}

/// One row per solver, in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut solvers: Vec<&str> = Vec::new();
    for r in records {
        if !solvers.contains(&r.solver.as_str()) {
            solvers.push(&r.solver);
        }
    }
    solvers
        .into_iter()
        .map(|solver| {
            let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.solver == solver).collect();
            let mut times: Vec<f64> = rs.iter().map(|r| r.wall_ms()).collect();
            times.sort_by(f64::total_cmp);
            let under = |pred: &dyn Fn(&BenchRecord) -> bool| {
                THRESHOLDS_MS.map(|t| rs.iter().filter(|r| pred(r) && r.wall_time_us < t * 1000).count())
            };
            SummaryRow {
                solver: solver.to_owned(),
                tasks: rs.len(),
                max_ms: times.last().copied().unwrap_or(0.0),
                mean_ms: if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 },
                median_ms: median(&times),
                resolved_under: under(&|r| r.is_resolved()),
                feasible_under: under(&|r| r.is_feasible()),
                resolved: rs.iter().filter(|r| r.is_resolved()).count(),
                feasible: rs.iter().filter(|r| r.is_feasible()).count(),
                timeouts: rs.iter().filter(|r| r.outcome == "timeout").count(),
                failed: rs.iter().filter(|r| r.outcome == "failed").count(),
            }
        })
        .collect()
}

const COLUMNS: [&str; 13] = [
    "solver",
    "tasks",
    "max_ms",
    "mean_ms",
    "median_ms",
    "resolved_20ms",
    "resolved_50ms",
    "feasible_20ms",
    "feasible_50ms",
    "resolved",
    "feasible",
    "timeouts",
    "failed",
];

fn cells(row: &SummaryRow) -> [String; 13] {
    [
        row.solver.clone(),
        row.tasks.to_string(),
        format!("{:.3}", row.max_ms),
        format!("{:.3}", row.mean_ms),
        format!("{:.3}", row.median_ms),
        row.resolved_under[0].to_string(),
        row.resolved_under[1].to_string(),
        row.feasible_under[0].to_string(),
        row.feasible_under[1].to_string(),
        row.resolved.to_string(),
        row.feasible.to_string(),
        row.timeouts.to_string(),
        row.failed.to_string(),
    ]
}

/// Standard protocol notes plus caller-supplied key/value pairs.
pub fn metadata_lines(extra: &[(String, String)]) -> Vec<String> {
    let mut lines = vec![
        "timing: per task, reverse-tree preprocessing included, file IO excluded".to_owned(),
        "thresholds: wall time strictly below the limit".to_owned(),
        "repetitions: fastest run kept".to_owned(),
    ];
    lines.extend(extra.iter().map(|(k, v)| format!("{k}: {v}")));
    lines
}

pub fn render_csv(rows: &[SummaryRow], metadata: &[String]) -> String {
    let mut out = String::new();
    for m in metadata {
        writeln!(out, "# {m}").unwrap();
    }
    writeln!(out, "{}", COLUMNS.join(",")).unwrap();
    for row in rows {
        writeln!(out, "{}", cells(row).join(",")).unwrap();
    }
    out
}

pub fn render_text(rows: &[SummaryRow], metadata: &[String]) -> String {
    let table: Vec<[String; 13]> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|c| table.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap())
        .collect();
    let mut out = String::new();
    for m in metadata {
        writeln!(out, "# {m}").unwrap();
    }
    let line = |cols: Vec<&str>| {
        cols.iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(COLUMNS.to_vec())).unwrap();
    for r in &table {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
    }
    out
}

/// Values swept by default.
pub const DEFAULT_ALPHAS: [f64; 7] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub summary: SummaryRow,
}

/// Corridor search over the same tasks for each `alpha`.
pub fn sweep_alpha(net: &Network, tasks: &[Task], alphas: &[f64], opts: &SuiteOptions) -> Vec<SweepRow> {
    alphas
        .iter()
        .map(|&alpha| {
            let opts = SuiteOptions { btcs: BtcsConfig { alpha, ..opts.btcs }, ..*opts };
            let records = run_suite(net, tasks, SolverKind::Btcs, &opts);
            let summary = summarize(&records).pop().unwrap_or_else(|| summarize_empty(SolverKind::Btcs));
            SweepRow { alpha, summary }
        })
        .collect()
}

fn summarize_empty(solver: SolverKind) -> SummaryRow {
    SummaryRow {
        solver: solver.as_str().to_owned(),
        tasks: 0,
        max_ms: 0.0,
        mean_ms: 0.0,
        median_ms: 0.0,
        resolved_under: [0; 2],
        feasible_under: [0; 2],
        resolved: 0,
        feasible: 0,
        timeouts: 0,
        failed: 0,
    }
}

pub fn render_sweep_csv(rows: &[SweepRow], metadata: &[String]) -> String {
    let mut out = String::new();
    for m in metadata {
        writeln!(out, "# {m}").unwrap();
    }
    writeln!(out, "alpha,{}", COLUMNS[1..].join(",")).unwrap();
    for row in rows {
        writeln!(out, "{},{}", row.alpha, cells(&row.summary)[1..].join(",")).unwrap();
    }
    out
}
