use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use evoset_core::chain::{reverse, transform, DirectedMultigraph, TransformKind};
use evoset_core::verify::SuiteChain;

use crate::input::{parse_edge_list, parse_matrix};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Cycle with `d-1` clockwise and one counter-clockwise arc per vertex.
    DriftedCycle,
    /// Undirected cycle (both arcs).
    Cycle,
    /// Undirected cycle under the max-degree walk with bound `d`.
    SelfLoopedCycle,
    Complete,
    /// Star with `n` leaves.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Walk {
    Simple,
    MaxDegree,
    /// Max-degree walk with `d` on the drifted cycle.
    DriftedCycle,
    /// The matrix as given.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    Lazy,
    Reverse,
    AdditiveSymmetrize,
    HalfLazySymmetrize,
}

impl Transform {
    fn name(self) -> &'static str {
        match self {
            Self::Lazy => "lazy",
            Self::Reverse => "reverse",
            Self::AdditiveSymmetrize => "additive_symmetrize",
            Self::HalfLazySymmetrize => "half_lazy_symmetrize",
        }
    }
}

/// Where the chain comes from and how it is turned into a kernel.
#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Edge-list file (`src<TAB>dst<TAB>multiplicity`).
    #[arg(long, group = "source", value_name = "FILE")]
    pub edges: Option<PathBuf>,
    /// Matrix file (`n`, then n rows).
    #[arg(long, group = "source", value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    #[arg(long, group = "source", value_enum)]
    pub generator: Option<Generator>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Defaults to `raw` for matrices, `drifted-cycle` / `max-degree` for
    /// those generators and `simple` otherwise.
    #[arg(long, value_enum)]
    pub walk: Option<Walk>,
    /// Degree bound of the max-degree walk (default: `--d`, else the largest
    /// out-degree).
    #[arg(long)]
    pub degree: Option<u64>,
    /// Applied left to right; repeat or separate with commas.
    #[arg(long = "transform", value_enum, value_delimiter = ',')]
    pub transforms: Vec<Transform>,
    #[arg(long)]
    pub name: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "chain".into(), |s| s.to_string_lossy().into_owned())
}

impl ChainArgs {
    fn need(v: Option<usize>, flag: &str, what: &str) -> Result<usize, CliError> {
        v.ok_or_else(|| CliError::Input(format!("--{flag} is required for {what}")))
    }

    fn graph(&self) -> Result<(DirectedMultigraph, String, Walk), CliError> {
        if let Some(path) = &self.edges {
            let g = parse_edge_list(&read(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            return Ok((g, stem(path), Walk::Simple));
        }
        let gen = self.generator.ok_or_else(|| {
            CliError::Input("one of --edges, --matrix, --generator is required".into())
        })?;
        let n = Self::need(self.n, "n", "generated chains")?;
        let d = || {
            self.d
                .ok_or_else(|| CliError::Input("--d is required for this generator".into()))
        };
        let built = match gen {
            Generator::DriftedCycle => {
                let d = d()?;
                (
                    DirectedMultigraph::drifted_cycle(n, d),
                    format!("drifted-cycle-n{n}-d{d}"),
                    Walk::DriftedCycle,
                )
            }
            Generator::Cycle => (
                DirectedMultigraph::undirected_cycle(n),
                format!("cycle-n{n}"),
                Walk::Simple,
            ),
            Generator::SelfLoopedCycle => {
                let d = d()?;
                (
                    DirectedMultigraph::undirected_cycle(n),
                    format!("looped-cycle-n{n}-d{d}"),
                    Walk::MaxDegree,
                )
            }
            Generator::Complete => (
                DirectedMultigraph::complete(n),
                format!("complete-n{n}"),
                Walk::Simple,
            ),
            Generator::Star => (
                DirectedMultigraph::star(n),
                format!("star-{n}"),
                Walk::Simple,
            ),
        };
        let (g, name, walk) = built;
        Ok((g.map_err(|e| CliError::Input(e.to_string()))?, name, walk))
    }

    /// Builds the chain. A single `lazy` transform on a graph walk keeps the
    /// walk's family so its closed-form bounds still apply; any other
    /// transform list yields a general chain.
    pub fn build(&self) -> Result<SuiteChain, CliError> {
        let input = |e: &dyn std::fmt::Display| CliError::Input(e.to_string());
        let (mut chain, base_name) = if let Some(path) = &self.matrix {
            if !matches!(self.walk, None | Some(Walk::Raw)) {
                return Err(CliError::Input(
                    "matrix input only supports --walk raw".into(),
                ));
            }
            let k = parse_matrix(&read(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if !k.is_irreducible() {
                return Err(CliError::Input("kernel is not irreducible".into()));
            }
            (SuiteChain::general(stem(path), k), stem(path))
        } else {
            let (g, name, default_walk) = self.graph()?;
            let lazy = self.transforms == [Transform::Lazy];
            let chain = match self.walk.unwrap_or(default_walk) {
                Walk::Simple => SuiteChain::simple(&name, &g, lazy),
                Walk::MaxDegree | Walk::DriftedCycle => {
                    if self.walk == Some(Walk::DriftedCycle)
                        && self.generator != Some(Generator::DriftedCycle)
                    {
                        return Err(CliError::Input(
                            "--walk drifted-cycle needs --generator drifted-cycle".into(),
                        ));
                    }
                    let d = self
                        .degree
                        .or(self.d.map(u64::from))
                        .unwrap_or_else(|| g.max_out_degree());
                    SuiteChain::max_degree(&name, &g, d, lazy)
                }
                Walk::Raw => return Err(CliError::Input("--walk raw needs --matrix".into())),
            };
            let mut chain = chain.map_err(|e| input(&e))?;
            if lazy {
                chain.name = format!("{name}+lazy");
                return Ok(self.renamed(chain));
            }
            (chain, name)
        };
        for t in &self.transforms {
            let k = match t {
                Transform::Reverse => reverse(&chain.kernel),
                Transform::Lazy => transform(&chain.kernel, TransformKind::Lazy),
                Transform::AdditiveSymmetrize => {
                    transform(&chain.kernel, TransformKind::AdditiveSymmetrize)
                }
                Transform::HalfLazySymmetrize => {
                    transform(&chain.kernel, TransformKind::HalfLazySymmetrize)
                }
            }
            .map_err(|e| input(&e))?;
            chain = SuiteChain::general(&chain.name, k);
        }
        if !self.transforms.is_empty() {
            let names: Vec<&str> = self.transforms.iter().map(|t| t.name()).collect();
            chain.name = format!("{base_name}+{}", names.join("+"));
        }
        Ok(self.renamed(chain))
    }

    fn renamed(&self, mut chain: SuiteChain) -> SuiteChain {
        if let Some(name) = &self.name {
            chain.name = name.clone();
        }
        chain
    }

    pub fn transform_names(&self) -> Vec<&'static str> {
        self.transforms.iter().map(|t| t.name()).collect()
    }
}
