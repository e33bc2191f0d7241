//! Directed multigraphs, the walks built on them, and the transforms
//! (laziness, reversal, symmetrization) that preserve the stationary
//! distribution.

mod graph;
mod kernel;
mod stationary;
mod walks;

pub use graph::{DirectedMultigraph, Edge};
pub use kernel::{Rational, StochasticKernel, MAX_EXACT_DENOMINATOR};
pub use stationary::{stationary, Distribution, DIRECT_SOLVE_LIMIT};
pub use walks::{
    build_complete_graph_walk, build_drifted_cycle, build_max_degree_walk, build_self_looped_cycle,
    build_simple_walk, reverse, transform, TransformKind,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("state space is empty")]
    EmptyStateSpace,
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("edge {from} -> {to} has multiplicity 0")]
    ZeroMultiplicity { from: usize, to: usize },
    #[error("vertex {0} has no out-edge")]
    VertexWithNoOutEdge(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("graph is not Eulerian")]
    NotEulerian,
    #[error("degree bound {d} is below the maximum out-degree {max_degree}")]
    DegreeBoundTooSmall { d: u64, max_degree: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("kernel is not irreducible")]
    NotIrreducible,
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("linear system is singular")]
    SingularSystem,
}
