//! Readers for the graph and matrix file formats.

use std::collections::HashSet;

use spinmix_core::density::{Graph, Provenance};
use spinmix_core::depmat::ScanOrder;
use spinmix_core::Matrix;

use crate::error::{CliError, CliResult};

/// Parses an edge list: lines `u v` with 1-indexed vertices, `#` comments
/// and an optional `n N` header declaring the vertex count.
pub fn parse_graph(text: &str, multigraph: bool) -> CliResult<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields[0] == "n" {
            if declared.is_some() || !edges.is_empty() {
                return Err(parse_err(line, "the n header must come first and only once"));
            }
            if fields.len() != 2 {
                return Err(parse_err(line, "expected `n <count>`"));
            }
            declared = Some(vertex(fields[1], line)?);
            continue;
        }
        if fields.len() != 2 {
            return Err(parse_err(line, format!("expected two vertices, found `{body}`")));
        }
        let (u, v) = (vertex(fields[0], line)?, vertex(fields[1], line)?);
        if u == 0 || v == 0 {
            return Err(parse_err(line, "vertices are numbered from 1"));
        }
        if u == v {
            return Err(CliError::SelfLoop { line, vertex: u });
        }
        if !multigraph && !seen.insert((u.min(v), u.max(v))) {
            return Err(CliError::DuplicateEdge { line, u, v });
        }
        edges.push((u - 1, v - 1));
    }
    let largest = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(n) if n < largest => {
            return Err(parse_err(0, format!("header declares {n} vertices but vertex {largest} appears")))
        }
        Some(n) => n,
        None => largest,
    };
    if n == 0 {
        return Err(parse_err(0, "the graph has no vertices"));
    }
    Ok(Graph::new(n, edges)?)
}

fn vertex(s: &str, line: usize) -> CliResult<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("`{s}` is not a vertex number")))
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a matrix given either as CSV rows or as `{"n": .., "entries": [[..]]}`.
pub fn parse_matrix(text: &str) -> CliResult<Matrix> {
    let rows = if text.trim_start().starts_with('{') {
        json_rows(text)?
    } else {
        csv_rows(text)?
    };
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(0, "the matrix is empty"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::NotSquare {
                row: i + 1,
                expected: n,
                found: row.len(),
            });
        }
        for (j, &value) in row.iter().enumerate() {
            if value < 0.0 {
                return Err(CliError::NegativeEntry {
                    row: i + 1,
                    col: j + 1,
                    value,
                });
            }
        }
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn json_rows(text: &str) -> CliResult<Vec<Vec<f64>>> {
    #[derive(serde::Deserialize)]
    struct Wire {
        n: usize,
        entries: Vec<Vec<f64>>,
    }
    let wire: Wire = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    if wire.entries.len() != wire.n {
        return Err(parse_err(
            0,
            format!("n is {} but {} rows are given", wire.n, wire.entries.len()),
        ));
    }
    Ok(wire.entries)
}

fn csv_rows(text: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(line, format!("`{f}` is not a finite number")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Graph class named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassArg {
    Nonregular,
    Forest,
    TreeWidth(usize),
    Planar,
    Genus(usize),
}

impl ClassArg {
    /// The class provenance; the nonregular class takes the degree bound
    /// from the graph at hand.
    pub fn provenance(self, max_degree: usize) -> Provenance {
        match self {
            ClassArg::Nonregular => Provenance::NonregularConnected { max_degree },
            ClassArg::Forest => Provenance::Forest,
            ClassArg::TreeWidth(t) => Provenance::TreeWidth { t },
            ClassArg::Planar => Provenance::Planar,
            ClassArg::Genus(g) => Provenance::Genus { g },
        }
    }
}

pub fn parse_class(s: &str) -> Result<ClassArg, String> {
    let number = |v: &str| v.parse::<usize>().map_err(|_| format!("`{v}` is not a nonnegative integer"));
    match s.split_once(':') {
        None => match s {
            "nonregular" => Ok(ClassArg::Nonregular),
            "forest" => Ok(ClassArg::Forest),
            "planar" => Ok(ClassArg::Planar),
            _ => Err(format!("unknown class `{s}`")),
        },
        Some(("treewidth", t)) => Ok(ClassArg::TreeWidth(number(t)?)),
        Some(("genus", g)) => Ok(ClassArg::Genus(number(g)?)),
        Some(_) => Err(format!("unknown class `{s}`")),
    }
}

/// `identity` or a comma-separated permutation of `1..=n`.
pub fn parse_order(s: &str, n: usize) -> CliResult<ScanOrder> {
    if s == "identity" {
        return Ok(ScanOrder::identity(n));
    }
    let order = s
        .split(',')
        .map(|f| match f.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(CliError::Usage(format!("bad site `{f}` in --order"))),
        })
        .collect::<CliResult<Vec<usize>>>()?;
    if order.len() != n {
        return Err(CliError::Usage(format!(
            "--order lists {} sites but the system has {n}",
            order.len()
        )));
    }
    ScanOrder::new(order).map_err(|_| CliError::Usage(format!("--order `{s}` is not a permutation")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_examples() {
        let p3 = parse_graph("1 2\n2 3", false).unwrap();
        assert_eq!((p3.n(), p3.edges().to_vec()), (3, vec![(0, 1), (1, 2)]));
        let g = parse_graph("# header\nn 5\n1 2  # trailing\n", false).unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 1));
        assert!(matches!(parse_graph("1 1", false), Err(CliError::SelfLoop { line: 1, vertex: 1 })));
        assert!(matches!(parse_graph("1 2\n2 1", false), Err(CliError::DuplicateEdge { line: 2, .. })));
        assert_eq!(parse_graph("1 2\n2 1", true).unwrap().edge_count(), 2);
        assert!(matches!(parse_graph("1 2\n2 x", false), Err(CliError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("0 1", false), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("n 2\n1 3", false), Err(CliError::Parse { .. })));
    }

    #[test]
    fn matrix_examples() {
        let m = parse_matrix("0,0.5\n0.5,0").unwrap();
        assert_eq!(m, Matrix::from_rows(&[[0.0, 0.5], [0.5, 0.0]]).unwrap());
        assert_eq!(parse_matrix(r#"{"n":2,"entries":[[0,0.5],[0.5,0]]}"#).unwrap(), m);
        assert!(matches!(parse_matrix("0,1\n1"), Err(CliError::NotSquare { row: 2, .. })));
        assert!(matches!(parse_matrix("-1"), Err(CliError::NegativeEntry { row: 1, col: 1, .. })));
        assert!(matches!(parse_matrix("0,a\n0,0"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix(r#"{"n":3,"entries":[[1]]}"#), Err(CliError::Parse { .. })));
    }

    #[test]
    fn classes_and_orders() {
        assert_eq!(parse_class("treewidth:3"), Ok(ClassArg::TreeWidth(3)));
        assert_eq!(parse_class("genus:1"), Ok(ClassArg::Genus(1)));
        assert!(parse_class("genus:x").is_err() && parse_class("torus").is_err());
        assert_eq!(parse_order("3,1,2", 3).unwrap().as_slice(), &[2, 0, 1]);
        assert!(parse_order("1,1,2", 3).is_err());
        assert!(parse_order("1,2", 3).is_err());
        assert!(parse_order("identity", 4).unwrap().is_identity());
    }
}
