//! Text formats for chain inputs.
//!
//! Edge list: one `src<TAB>dst<TAB>multiplicity` per line (multiplicity may
//! be omitted and defaults to 1), `#` starts a comment, blank lines are
//! skipped. The vertex count is the largest id plus one.
//!
//! Matrix: the first non-comment line is `n`, followed by `n` rows of `n`
//! whitespace-separated entries. Entries are decimals or `p/q` fractions; if
//! every entry is an integer or fraction the kernel also carries exact
//! rational transitions.

use evoset_core::chain::{DirectedMultigraph, Edge, Rational, StochasticKernel};

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_edge_list(text: &str) -> Result<DirectedMultigraph, ParseError> {
    let mut edges = Vec::new();
    let mut last = 0;
    for (no, line) in content_lines(text) {
        last = no;
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(
                no,
                format!("expected `src<TAB>dst<TAB>multiplicity`, got `{line}`"),
            ));
        }
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(no, format!("bad vertex id `{s}`")))
        };
        let (src, dst) = (vertex(fields[0])?, vertex(fields[1])?);
        let mult = match fields.get(2) {
            Some(s) => s
                .parse::<u32>()
                .map_err(|_| err(no, format!("bad multiplicity `{s}`")))?,
            None => 1,
        };
        if mult == 0 {
            return Err(err(no, "multiplicity must be positive"));
        }
        edges.push(Edge::new(src, dst, mult));
    }
    let n = edges
        .iter()
        .map(|e| e.source.max(e.target) + 1)
        .max()
        .ok_or_else(|| err(last.max(1), "no edges"))?;
    DirectedMultigraph::new(n, edges).map_err(|e| err(last, e.to_string()))
}

enum Entry {
    Exact(Rational),
    Float(f64),
}

fn parse_entry(s: &str) -> Option<Entry> {
    if let Ok(r) = s.parse::<Rational>() {
        return Some(Entry::Exact(r));
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Entry::Float)
}

pub fn parse_matrix(text: &str) -> Result<StochasticKernel<f64>, ParseError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| err(1, "empty matrix file"))?;
    let n: usize = header.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        err(
            first,
            format!("expected a positive state count, got `{header}`"),
        )
    })?;
    let mut rows = Vec::with_capacity(n);
    let mut last = first;
    for (no, line) in lines {
        last = no;
        if rows.len() == n {
            return Err(err(no, format!("more than {n} rows")));
        }
        let row = line
            .split_whitespace()
            .map(|s| parse_entry(s).ok_or_else(|| err(no, format!("bad entry `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(err(no, format!("expected {n} entries, got {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(err(last, format!("expected {n} rows, got {}", rows.len())));
    }
    let exact: Option<Vec<Vec<Rational>>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| match e {
                    Entry::Exact(q) => Some(*q),
                    Entry::Float(_) => None,
                })
                .collect()
        })
        .collect();
    let built = match exact {
        Some(q) => StochasticKernel::from_exact_rows(&q),
        None => {
            let f: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|e| match e {
                            Entry::Exact(q) => *q.numer() as f64 / *q.denom() as f64,
                            Entry::Float(v) => *v,
                        })
                        .collect()
                })
                .collect();
            StochasticKernel::from_rows(&f)
        }
    };
    built.map_err(|e| err(last, e.to_string()))
}
