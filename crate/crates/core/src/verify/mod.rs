//! Grid checks of the auxiliary inequalities, random rearrangement trials
//! and the dominance harness tying exact analysis to the bounds.

mod analysis;
mod grid;
mod harness;
mod rearrangement;
mod suite;

pub use analysis::{ChainAnalysis, ChainAnalysisError};
pub use grid::{
    check_lemma_ineq, check_lemma_sinc, h, sinc_gap, GridReport, LemmaReport, GRID_TOL,
    IDENTITY_TOL,
};
pub use harness::{
    dominance_harness, HarnessError, HarnessOptions, HarnessRow, HarnessTable, Verdict, GAP_TOL,
    SHARPNESS_RATIO, T_MAX_CAP,
};
pub use rearrangement::{
    check_worst_case_lemma, dominates, step_integral, RearrangementReport, RearrangementWitness,
    REARRANGEMENT_TOL,
};
pub use suite::{default_suite, random_chain, random_eulerian, SuiteChain, SuiteError, WalkFamily};
