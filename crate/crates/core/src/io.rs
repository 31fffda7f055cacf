//! Plain-text file formats.
//!
//! Two interchangeable graph formats:
//!
//! - **Dense matrix**: `n` header-less rows of `n` comma-separated reals;
//!   row `i`, column `j` is the weight of edge `i -> j`.
//! - **Edge list**: a `source,target,weight` header, then one row per edge
//!   with 0-based concept indices.
//!
//! Plus single-row state vectors and multi-row trajectories for the
//! dynamics module. Floats are written with the shortest decimal form that
//! parses back to the identical bit pattern, so write-then-read round-trips
//! are exact. Parse errors always name the offending 1-based line.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Edge, FcmGraph, GraphError};

pub const EDGE_LIST_HEADER: &str = "source,target,weight";

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl ReadError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ReadError::Syntax {
            line,
            message: message.into(),
        }
    }

    /// The 1-based line a syntax error points at, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReadError::Syntax { line, .. } => Some(*line),
            ReadError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Error)]
#[error("{path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFileFormat {
    DenseMatrix,
    EdgeList,
}

/// Content lines with their 1-based numbers, trailing blank lines dropped,
/// interior blank lines rejected.
fn content_lines(text: &str) -> Result<Vec<(usize, &str)>, ReadError> {
    let mut lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .collect();
    while lines.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        lines.pop();
    }
    if let Some(&(line, _)) = lines.iter().find(|(_, l)| l.trim().is_empty()) {
        return Err(ReadError::at(line, "blank line inside the data"));
    }
    Ok(lines)
}

fn parse_field<T: FromStr>(field: &str, line: usize, what: &str) -> Result<T, ReadError> {
    field
        .trim()
        .parse()
        .map_err(|_| ReadError::at(line, format!("cannot parse {what} from {field:?}")))
}

fn read_to_string(path: &Path) -> Result<String, ReadError> {
    fs::read_to_string(path).map_err(|source| ReadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_string(path: &Path, content: &str) -> Result<(), WriteError> {
    fs::write(path, content).map_err(|source| WriteError {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses the dense n-by-n matrix format.
pub fn parse_dense_matrix(text: &str) -> Result<FcmGraph, ReadError> {
    let lines = content_lines(text)?;
    if lines.is_empty() {
        return Err(ReadError::at(1, "empty matrix file"));
    }
    let n = lines.len();
    let mut matrix = Vec::with_capacity(n);
    for &(line, raw) in &lines {
        let row = raw
            .split(',')
            .map(|field| parse_field::<f64>(field, line, "a weight"))
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != n {
            return Err(ReadError::at(
                line,
                format!(
                    "row has {} entries but the file has {n} rows; the matrix must be square",
                    row.len()
                ),
            ));
        }
        matrix.push(row);
    }
    FcmGraph::from_dense_matrix(&matrix).map_err(|e| {
        // Row lengths were checked above, so any remaining failure names a
        // cell whose row is the line to report.
        let line = match &e {
            GraphError::NonzeroDiagonal { index } => index + 1,
            GraphError::WeightOutOfRange { from, .. } => from + 1,
            _ => 1,
        };
        ReadError::at(line, e.to_string())
    })
}

pub fn read_dense_matrix(path: &Path) -> Result<FcmGraph, ReadError> {
    parse_dense_matrix(&read_to_string(path)?)
}

pub fn format_dense_matrix(graph: &FcmGraph) -> String {
    let mut out = String::new();
    for row in graph.to_dense_matrix() {
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&value.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_dense_matrix(path: &Path, graph: &FcmGraph) -> Result<(), WriteError> {
    write_string(path, &format_dense_matrix(graph))
}

/// Parses the edge-list format. With `concept_count` the indices are
/// validated against it; without, the count is inferred as the largest
/// index plus one (which requires at least one edge row).
pub fn parse_edge_list(text: &str, concept_count: Option<usize>) -> Result<FcmGraph, ReadError> {
    let lines = content_lines(text)?;
    let Some(&(header_line, header)) = lines.first() else {
        return Err(ReadError::at(1, "empty edge-list file"));
    };
    if header.trim() != EDGE_LIST_HEADER {
        return Err(ReadError::at(
            header_line,
            format!("expected header {EDGE_LIST_HEADER:?}, found {header:?}"),
        ));
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for &(line, raw) in &lines[1..] {
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 3 {
            return Err(ReadError::at(
                line,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let source: usize = parse_field(fields[0], line, "a source index")?;
        let target: usize = parse_field(fields[1], line, "a target index")?;
        let weight: f64 = parse_field(fields[2], line, "a weight")?;
        if let Some(n) = concept_count {
            for index in [source, target] {
                if index >= n {
                    return Err(ReadError::at(
                        line,
                        format!("concept index {index} out of range for {n} concepts"),
                    ));
                }
            }
        }
        if source == target {
            return Err(ReadError::at(line, format!("self-loop at concept {source}")));
        }
        if weight == 0.0 {
            return Err(ReadError::at(
                line,
                "zero weight means no edge; omit the row instead",
            ));
        }
        if !(-1.0..=1.0).contains(&weight) {
            return Err(ReadError::at(
                line,
                format!("weight {weight} is outside [-1, 1]"),
            ));
        }
        if !seen.insert((source, target)) {
            return Err(ReadError::at(
                line,
                format!("duplicate edge ({source}, {target})"),
            ));
        }
        edges.push(Edge::new(source, target, weight));
    }
    let n = match concept_count {
        Some(n) => n,
        None => edges
            .iter()
            .map(|e| e.source.index().max(e.target.index()) + 1)
            .max()
            .ok_or_else(|| {
                ReadError::at(
                    header_line + 1,
                    "no edge rows to infer the concept count from; pass the count explicitly",
                )
            })?,
    };
    Ok(FcmGraph::from_edges(n, edges).expect("every row was validated while parsing"))
}

pub fn read_edge_list(path: &Path, concept_count: Option<usize>) -> Result<FcmGraph, ReadError> {
    parse_edge_list(&read_to_string(path)?, concept_count)
}

pub fn format_edge_list(graph: &FcmGraph) -> String {
    let mut out = String::from(EDGE_LIST_HEADER);
    out.push('\n');
    for edge in graph.edges() {
        out.push_str(&format!(
            "{},{},{}\n",
            edge.source.index(),
            edge.target.index(),
            edge.weight
        ));
    }
    out
}

pub fn write_edge_list(path: &Path, graph: &FcmGraph) -> Result<(), WriteError> {
    write_string(path, &format_edge_list(graph))
}

/// Guesses the format from the first line: the edge-list header means edge
/// list, anything else is treated as a matrix row.
pub fn sniff_format(text: &str) -> GraphFileFormat {
    match text.lines().next() {
        Some(first) if first.trim_end_matches('\r').trim() == EDGE_LIST_HEADER => {
            GraphFileFormat::EdgeList
        }
        _ => GraphFileFormat::DenseMatrix,
    }
}

/// Reads a graph file in an explicit or sniffed format.
pub fn read_graph_file(
    path: &Path,
    format: Option<GraphFileFormat>,
    concept_count: Option<usize>,
) -> Result<FcmGraph, ReadError> {
    let text = read_to_string(path)?;
    match format.unwrap_or_else(|| sniff_format(&text)) {
        GraphFileFormat::DenseMatrix => parse_dense_matrix(&text),
        GraphFileFormat::EdgeList => parse_edge_list(&text, concept_count),
    }
}

/// Parses a single CSV row of activation values.
pub fn parse_state_row(text: &str) -> Result<Vec<f64>, ReadError> {
    let lines = content_lines(text)?;
    match lines.as_slice() {
        [] => Err(ReadError::at(1, "empty state file")),
        [(line, raw)] => raw
            .split(',')
            .map(|field| parse_field::<f64>(field, *line, "an activation value"))
            .collect(),
        [_, (line, _), ..] => Err(ReadError::at(
            *line,
            "expected a single row of activation values",
        )),
    }
}

pub fn read_state_row(path: &Path) -> Result<Vec<f64>, ReadError> {
    parse_state_row(&read_to_string(path)?)
}

pub fn format_state_row(state: &[f64]) -> String {
    let mut out = state
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out
}

/// One row per state, in visit order; no header.
pub fn format_trajectory(trajectory: &[Vec<f64>]) -> String {
    trajectory.iter().map(|s| format_state_row(s)).collect()
}

pub fn write_trajectory(path: &Path, trajectory: &[Vec<f64>]) -> Result<(), WriteError> {
    write_string(path, &format_trajectory(trajectory))
}

/// Parses a trajectory file: rows of equal length.
pub fn parse_trajectory(text: &str) -> Result<Vec<Vec<f64>>, ReadError> {
    let lines = content_lines(text)?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(lines.len());
    for &(line, raw) in &lines {
        let row = raw
            .split(',')
            .map(|field| parse_field::<f64>(field, line, "an activation value"))
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ReadError::at(
                    line,
                    format!(
                        "row has {} entries, previous rows have {}",
                        row.len(),
                        first.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
