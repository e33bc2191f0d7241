use serde::{Deserialize, Serialize};

use super::ChainError;

/// A directed edge with multiplicity; self-loops are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub multiplicity: u32,
}

impl Edge {
    pub fn new(source: usize, target: usize, multiplicity: u32) -> Self {
        Self {
            source,
            target,
            multiplicity,
        }
    }
}

/// Directed multigraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedMultigraph {
    n: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<String>>,
}

impl DirectedMultigraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, ChainError> {
        if n == 0 {
            return Err(ChainError::EmptyStateSpace);
        }
        for e in &edges {
            for v in [e.source, e.target] {
                if v >= n {
                    return Err(ChainError::InvalidVertex { vertex: v, n });
                }
            }
            if e.multiplicity == 0 {
                return Err(ChainError::ZeroMultiplicity {
                    from: e.source,
                    to: e.target,
                });
            }
        }
        Ok(Self {
            n,
            edges,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ChainError> {
        if labels.len() != self.n {
            return Err(ChainError::InvalidParameters(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Undirected cycle: each edge `{i, i+1}` becomes two opposite arcs.
    pub fn undirected_cycle(n: usize) -> Result<Self, ChainError> {
        if n < 3 {
            return Err(ChainError::InvalidParameters(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        let edges = (0..n)
            .flat_map(|i| {
                let j = (i + 1) % n;
                [Edge::new(i, j, 1), Edge::new(j, i, 1)]
            })
            .collect();
        Self::new(n, edges)
    }

    /// Cycle with `d - 1` clockwise arcs and one counterclockwise arc at
    /// every vertex.
    pub fn drifted_cycle(n: usize, d: u32) -> Result<Self, ChainError> {
        if n < 3 || d < 2 {
            return Err(ChainError::InvalidParameters(format!(
                "drifted cycle needs n >= 3 and d >= 2, got n={n}, d={d}"
            )));
        }
        let edges = (0..n)
            .flat_map(|i| {
                [
                    Edge::new(i, (i + 1) % n, d - 1),
                    Edge::new(i, (i + n - 1) % n, 1),
                ]
            })
            .collect();
        Self::new(n, edges)
    }

    /// Complete graph with both orientations of every edge.
    pub fn complete(n: usize) -> Result<Self, ChainError> {
        if n < 2 {
            return Err(ChainError::InvalidParameters(format!(
                "complete graph needs at least 2 vertices, got {n}"
            )));
        }
        let edges = (0..n)
            .flat_map(|i| {
                (0..n)
                    .filter(move |&j| j != i)
                    .map(move |j| Edge::new(i, j, 1))
            })
            .collect();
        Self::new(n, edges)
    }

    /// Undirected star: center 0 joined to `leaves` leaves in both directions.
    pub fn star(leaves: usize) -> Result<Self, ChainError> {
        let edges = (1..=leaves)
            .flat_map(|j| [Edge::new(0, j, 1), Edge::new(j, 0, 1)])
            .collect();
        Self::new(leaves + 1, edges)
    }

    /// Returns a copy with `count` extra self-loops at every vertex.
    pub fn with_self_loops(&self, count: u32) -> Self {
        let mut g = self.clone();
        if count > 0 {
            g.edges.extend((0..self.n).map(|v| Edge::new(v, v, count)));
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Total number of arcs counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.multiplicity)).sum()
    }

    pub fn out_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for e in &self.edges {
            deg[e.source] += u64::from(e.multiplicity);
        }
        deg
    }

    pub fn in_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for e in &self.edges {
            deg[e.target] += u64::from(e.multiplicity);
        }
        deg
    }

    pub fn max_out_degree(&self) -> u64 {
        self.out_degrees().into_iter().max().unwrap_or(0)
    }

    /// Aggregated multiplicities, `counts[x][y]` summed over parallel arcs.
    pub fn multiplicity_matrix(&self) -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; self.n]; self.n];
        for e in &self.edges {
            counts[e.source][e.target] += u64::from(e.multiplicity);
        }
        counts
    }

    pub fn is_balanced(&self) -> bool {
        self.in_degrees() == self.out_degrees()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let mut succ = vec![Vec::new(); self.n];
        for e in &self.edges {
            succ[e.source].push(e.target);
        }
        strongly_connected(&succ)
    }

    /// Strongly connected with in-degree equal to out-degree everywhere.
    pub fn is_eulerian(&self) -> bool {
        self.is_balanced() && self.is_strongly_connected()
    }
}

/// Two-pass depth-first test: every vertex reachable from 0 in the graph and
/// in its reverse.
pub(crate) fn strongly_connected(successors: &[Vec<usize>]) -> bool {
    let n = successors.len();
    if n == 0 {
        return false;
    }
    let mut predecessors = vec![Vec::new(); n];
    for (x, succ) in successors.iter().enumerate() {
        for &y in succ {
            predecessors[y].push(x);
        }
    }
    reaches_all(successors) && reaches_all(&predecessors)
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == adj.len()
}
