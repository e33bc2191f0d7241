use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{
    build_max_degree_walk, build_simple_walk, transform, ChainError, DirectedMultigraph, Edge,
    StochasticKernel, TransformKind,
};
use crate::iso::{ExpansionKind, IsoError, Isoperimetry};

/// How a chain was built, which decides the closed-form corollaries that
/// apply to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkFamily {
    /// Simple walk on an Eulerian multigraph with `edges` edges.
    Simple {
        edges: u64,
    },
    /// Max-degree walk on an Eulerian multigraph.
    MaxDegree {
        n: u64,
        d: u64,
    },
    General,
}

#[derive(Debug, Clone)]
pub struct SuiteChain {
    pub name: String,
    pub kernel: StochasticKernel<f64>,
    pub family: WalkFamily,
    /// The kernel is `(I + P) / 2` of the family's walk.
    pub lazy: bool,
    /// The family's expansion condition holds (strong connectivity for lazy
    /// walks); always `false` for general chains.
    pub expanding: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

impl SuiteChain {
    pub fn general(name: impl Into<String>, kernel: StochasticKernel<f64>) -> Self {
        Self {
            name: name.into(),
            kernel,
            family: WalkFamily::General,
            lazy: false,
            expanding: false,
        }
    }

    pub fn simple(
        name: impl Into<String>,
        g: &DirectedMultigraph,
        lazy: bool,
    ) -> Result<Self, SuiteError> {
        let base = build_simple_walk::<f64>(g)?;
        Self::walk(
            name,
            base,
            WalkFamily::Simple {
                edges: g.edge_count(),
            },
            ExpansionKind::Measure,
            lazy,
        )
    }

    pub fn max_degree(
        name: impl Into<String>,
        g: &DirectedMultigraph,
        d: u64,
        lazy: bool,
    ) -> Result<Self, SuiteError> {
        let base = build_max_degree_walk::<f64>(g, d)?;
        let family = WalkFamily::MaxDegree {
            n: g.vertex_count() as u64,
            d,
        };
        Self::walk(name, base, family, ExpansionKind::Counting, lazy)
    }

    fn walk(
        name: impl Into<String>,
        base: StochasticKernel<f64>,
        family: WalkFamily,
        expansion: ExpansionKind,
        lazy: bool,
    ) -> Result<Self, SuiteError> {
        let expanding = lazy
            || Isoperimetry::new(&base)?
                .expansion_check(expansion)
                .passed();
        let kernel = if lazy {
            transform(&base, TransformKind::Lazy)?
        } else {
            base
        };
        Ok(Self {
            name: name.into(),
            kernel,
            family,
            lazy,
            expanding,
        })
    }
}

/// Strongly connected Eulerian multigraph on `n` vertices: a Hamiltonian
/// cycle plus `extra` random directed cycles.
pub fn random_eulerian(
    n: usize,
    extra: usize,
    seed: u64,
) -> Result<DirectedMultigraph, ChainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = (0..n).map(|x| Edge::new(x, (x + 1) % n, 1)).collect();
    for _ in 0..extra {
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut rng);
        vs.truncate(rng.random_range(2..=n));
        for (i, &x) in vs.iter().enumerate() {
            edges.push(Edge::new(x, vs[(i + 1) % vs.len()], 1));
        }
    }
    DirectedMultigraph::new(n, edges)
}

/// Irreducible, non-reversible chain with random rational-looking weights.
pub fn random_chain(n: usize, seed: u64) -> Result<StochasticKernel<f64>, ChainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut w: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        f64::from(rng.random_range(1..6u32))
                    } else {
                        0.0
                    }
                })
                .collect();
            w[(x + 1) % n] += 1.0;
            let total: f64 = w.iter().sum();
            w.iter().map(|v| v / total).collect()
        })
        .collect();
    StochasticKernel::from_rows(&rows)
}

/// The chains the dominance harness and the acceptance run cover.
pub fn default_suite() -> Result<Vec<SuiteChain>, SuiteError> {
    let mut suite = Vec::new();
    for n in [3usize, 5, 7, 9] {
        for d in [2u32, 3, 5] {
            let g = DirectedMultigraph::drifted_cycle(n, d)?;
            suite.push(SuiteChain::max_degree(
                format!("drifted-cycle-n{n}-d{d}"),
                &g,
                u64::from(d),
                false,
            )?);
        }
    }
    let g = DirectedMultigraph::drifted_cycle(5, 3)?;
    suite.push(SuiteChain::max_degree(
        "lazy-drifted-cycle-n5-d3",
        &g,
        3,
        true,
    )?);
    let ring = DirectedMultigraph::undirected_cycle(5)?;
    suite.push(SuiteChain::max_degree(
        "looped-cycle-n5-d3",
        &ring,
        3,
        false,
    )?);
    for n in [5usize, 7] {
        let g = DirectedMultigraph::undirected_cycle(n)?;
        suite.push(SuiteChain::simple(format!("cycle-n{n}"), &g, false)?);
    }
    suite.push(SuiteChain::simple(
        "lazy-cycle-n6",
        &DirectedMultigraph::undirected_cycle(6)?,
        true,
    )?);
    suite.push(SuiteChain::simple(
        "complete-n5",
        &DirectedMultigraph::complete(5)?,
        false,
    )?);
    suite.push(SuiteChain::simple(
        "star-3",
        &DirectedMultigraph::star(3)?,
        false,
    )?);
    let g = random_eulerian(6, 3, 17)?;
    suite.push(SuiteChain::simple("random-eulerian-n6", &g, false)?);
    suite.push(SuiteChain::simple("lazy-random-eulerian-n6", &g, true)?);
    let k = random_chain(6, 23)?;
    suite.push(SuiteChain::general("random-chain-n6", k.clone()));
    suite.push(SuiteChain::general(
        "lazy-random-chain-n6",
        transform(&k, TransformKind::Lazy)?,
    ));
    Ok(suite)
}
