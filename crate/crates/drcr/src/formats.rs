//! Text formats for graphs, SRLG groups, tasks and histograms, plus the
//! JSON manifest written next to generated artifacts.
//!
//! Graph file: `nodes,<N>` then one `from,to,cost,delay` line per edge; the
//! edge id is the line order. SRLG file: `id:e0,e1,...` with ids dense from
//! zero. Task file: `src,dst,d_low,d_up[,d_diff]`, the fifth column marking
//! an SRLG task. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use drcr_core::graph::{DrcrTask, Edge, EdgeId, Network, SrlgTask, Task};
use drcr_core::oracle::Histogram;
use drcr_core::{GraphError, TaskError};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid network: {0}")]
    Graph(#[from] GraphError),
    #[error("line {line}: {source}")]
    Task { line: usize, source: TaskError },
}

impl FormatError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }

    /// Attaches a file name to parse errors.
    fn in_file(self, path: &Path) -> Self {
        match self {
            Self::Parse { line, message } => Self::Parse { line, message: format!("{}: {message}", path.display()) },
            other => other,
        }
    }
}

/// Non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn integers<const N: usize>(line: usize, text: &str, min: usize) -> Result<([u64; N], usize), FormatError> {
    let mut out = [0u64; N];
    let mut count = 0;
    for field in text.split(',') {
        if count == N {
            return Err(FormatError::parse(line, format!("expected at most {N} fields")));
        }
        out[count] = field
            .trim()
            .parse()
            .map_err(|_| FormatError::parse(line, format!("`{}` is not a non-negative integer", field.trim())))?;
        count += 1;
    }
    if count < min {
        return Err(FormatError::parse(line, format!("expected at least {min} fields, found {count}")));
    }
    Ok((out, count))
}

fn node_id(line: usize, v: u64) -> Result<u32, FormatError> {
    u32::try_from(v).map_err(|_| FormatError::parse(line, format!("node id {v} out of range")))
}

pub fn parse_graph(text: &str) -> Result<Network, FormatError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| FormatError::parse(1, "missing `nodes,<N>` header"))?;
    let count = header
        .strip_prefix("nodes,")
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| FormatError::parse(first, "expected `nodes,<N>` header"))?;
    let mut edges = Vec::new();
    for (line, text) in lines {
        let ([from, to, cost, delay], _) = integers::<4>(line, text, 4)?;
        edges.push(Edge { from: node_id(line, from)?, to: node_id(line, to)?, cost, delay });
    }
    Ok(Network::new(count, edges)?)
}

pub fn write_graph(net: &Network) -> String {
    let mut out = format!("nodes,{}\n", net.node_count());
    for e in net.edges() {
        writeln!(out, "{},{},{},{}", e.from, e.to, e.cost, e.delay).unwrap();
    }
    out
}

pub fn parse_srlg(text: &str) -> Result<Vec<Vec<EdgeId>>, FormatError> {
    let mut groups = Vec::new();
    for (line, text) in content_lines(text) {
        let (id, members) = text.split_once(':').ok_or_else(|| FormatError::parse(line, "expected `id:e0,e1,...`"))?;
        let id: usize = id.trim().parse().map_err(|_| FormatError::parse(line, "bad srlg id"))?;
        if id != groups.len() {
            return Err(FormatError::parse(line, format!("srlg ids must be dense: expected {}, found {id}", groups.len())));
        }
        let group = members
            .split(',')
            .map(|e| e.trim().parse::<EdgeId>().map_err(|_| FormatError::parse(line, format!("bad edge id `{}`", e.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(group);
    }
    Ok(groups)
}

pub fn write_srlg(groups: &[Vec<EdgeId>]) -> String {
    let mut out = String::new();
    for (id, g) in groups.iter().enumerate() {
        let members: Vec<String> = g.iter().map(u32::to_string).collect();
        writeln!(out, "{id}:{}", members.join(",")).unwrap();
    }
    out
}

/// One task line (also used for `--task` on the command line).
pub fn parse_task(line: usize, text: &str) -> Result<Task, FormatError> {
    let (f, n) = integers::<5>(line, text, 4)?;
    let base = DrcrTask::new(node_id(line, f[0])?, node_id(line, f[1])?, f[2], f[3])
        .map_err(|source| FormatError::Task { line, source })?;
    Ok(if n == 5 { Task::Srlg(SrlgTask::new(base, f[4])) } else { Task::Drcr(base) })
}

pub fn parse_tasks(text: &str) -> Result<Vec<Task>, FormatError> {
    content_lines(text).map(|(line, text)| parse_task(line, text)).collect()
}

pub fn format_task(task: &Task) -> String {
    let b = task.base();
    match task.d_diff() {
        Some(d) => format!("{},{},{},{},{d}", b.source, b.target, b.d_low, b.d_up),
        None => format!("{},{},{},{}", b.source, b.target, b.d_low, b.d_up),
    }
}

pub fn write_tasks(tasks: &[Task]) -> String {
    tasks.iter().map(|t| format_task(t) + "\n").collect()
}

/// CSV with one row per bin and a `# truncated=` trailer.
pub fn write_histogram(h: &Histogram) -> String {
    let names: Vec<&str> = h.series().map(|(n, _)| n).collect();
    let mut out = format!("bin_low,{}\n", names.join(","));
    for bin in 0..h.bin_count() {
        let counts: Vec<String> = h.series().map(|(_, s)| s[bin].to_string()).collect();
        writeln!(out, "{},{}", h.bin_low(bin), counts.join(",")).unwrap();
    }
    writeln!(out, "# truncated={}", h.truncated).unwrap();
    out
}

/// Provenance of a generated file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub kind: String,
    pub seed: u64,
    /// Generator parameters as given on the command line.
    pub params: serde_json::Value,
    pub inputs: Vec<String>,
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

pub fn load_network(graph: &Path, srlg: Option<&Path>) -> Result<Network, FormatError> {
    let net = parse_graph(&read_text(graph)?).map_err(|e| e.in_file(graph))?;
    match srlg {
        Some(path) => {
            let groups = parse_srlg(&read_text(path)?).map_err(|e| e.in_file(path))?;
            Ok(net.with_srlgs(groups)?)
        }
        None => Ok(net),
    }
}

pub fn save_network(net: &Network, graph: &Path, srlg: Option<&Path>) -> Result<(), FormatError> {
    write_text(graph, &write_graph(net))?;
    if let Some(path) = srlg {
        write_text(path, &write_srlg(net.srlg_groups()))?;
    }
    Ok(())
}

pub fn load_tasks(path: &Path) -> Result<Vec<Task>, FormatError> {
    parse_tasks(&read_text(path)?).map_err(|e| e.in_file(path))
}
