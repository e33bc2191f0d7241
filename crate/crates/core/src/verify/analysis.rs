use serde::Serialize;

use super::suite::{SuiteChain, WalkFamily};
use crate::bounds::{
    congestion_contraction, congestion_distance_bounds, eulerian_max_degree, eulerian_simple,
    evoset_integral_bound, isoperimetric_general, linf_composition_bound, psi_delta_bounds,
    BoundEntry, BoundReport, BoundSource, CongestionCurve, DistanceIntegral, IsoInputs, Quantity,
};
use crate::chain::reverse;
use crate::exact::{spectral_gap, spectrum, AnalysisError};
use crate::iso::{ConcaveFn, CongestionProfile, IsoError, IsoperimetricSummary, Isoperimetry};

#[derive(Debug, thiserror::Error)]
pub enum ChainAnalysisError {
    #[error(transparent)]
    Exact(#[from] AnalysisError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

/// Exact spectral quantities and every isoperimetric input the bounds need,
/// computed once per chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainAnalysis {
    pub name: String,
    pub n: usize,
    pub pi: Vec<f64>,
    pub second_modulus: f64,
    pub eigen_gap: f64,
    pub spectral_gap: f64,
    pub spectrum_residual: f64,
    pub summary: IsoperimetricSummary<f64>,
    /// `min Psi(A)` over every proper `A`, for the chain and its reversal.
    pub psi_min_all: f64,
    pub psi_min_all_reversed: f64,
    /// `max C_sin(A)` over `pi(A) <= 1/2`.
    pub c_sin: f64,
    pub measures: Vec<f64>,
    /// Profiles over every proper set for `a(1-a)`, `a log(1/a)` and
    /// `sqrt(a(1-a))`.
    pub profiles: Vec<CongestionProfile<f64>>,
    pub family: String,
    pub lazy: bool,
    pub expanding: bool,
    #[serde(skip)]
    walk: WalkFamily,
}

const INTEGRAL_FNS: [(ConcaveFn, DistanceIntegral); 3] = [
    (ConcaveFn::AOneMinusA, DistanceIntegral::Tv),
    (ConcaveFn::ALogInvA, DistanceIntegral::Entropy),
    (ConcaveFn::SqrtAOneMinusA, DistanceIntegral::L2),
];

impl ChainAnalysis {
    pub fn new(chain: &SuiteChain) -> Result<Self, ChainAnalysisError> {
        let k = &chain.kernel;
        let spec = spectrum(k)?;
        let iso = Isoperimetry::new(k)?;
        let summary = iso.summarize()?;
        let rev = Isoperimetry::new(&reverse(k)?)?;
        let profiles = INTEGRAL_FNS
            .iter()
            .map(|(f, _)| iso.c_f_profile(*f))
            .collect();
        Ok(Self {
            name: chain.name.clone(),
            n: k.n(),
            pi: iso.stationary().to_vec(),
            second_modulus: spec.second_modulus(),
            eigen_gap: spec.eigen_gap(),
            spectral_gap: spectral_gap(k)?,
            spectrum_residual: spec.residual(),
            summary,
            psi_min_all: iso.psi_min_all(),
            psi_min_all_reversed: rev.psi_min_all(),
            c_sin: iso.c_f(ConcaveFn::SinPi, true),
            measures: iso.subset_measures(),
            profiles,
            family: match chain.family {
                WalkFamily::Simple { .. } => "simple".into(),
                WalkFamily::MaxDegree { .. } => "max_degree".into(),
                WalkFamily::General => "general".into(),
            },
            lazy: chain.lazy,
            expanding: chain.expanding,
            walk: chain.family,
        })
    }

    pub fn iso_inputs(&self) -> IsoInputs {
        IsoInputs::from_summary(&self.summary)
    }

    /// `max(Psi_min over all sets, Delta_min / 2)`.
    pub fn a_max_all(&self, reversed: bool) -> f64 {
        let psi = if reversed {
            self.psi_min_all_reversed
        } else {
            self.psi_min_all
        };
        psi.max(0.5 * self.summary.delta_min)
    }

    /// Every bound the chain's inputs support at `eps`.
    pub fn bound_report(&self, eps: f64) -> BoundReport {
        let s = self.iso_inputs();
        let mut report = BoundReport::new(self.name.clone(), eps);

        match congestion_contraction(self.c_sin, ConcaveFn::SinPi, &self.pi, &self.measures) {
            Ok(b) => report.extend(b.entries(ConcaveFn::SinPi, eps)),
            Err(e) => report.extend([BoundEntry::new(
                BoundSource::CongestionContraction,
                Quantity::TauTv,
                f64::INFINITY,
            )
            .input("c_f", self.c_sin)
            .note(e.to_string())]),
        }
        report.extend(congestion_distance_bounds(self.c_sin, s.pi_star, eps));
        report.extend(isoperimetric_general(&s, eps));

        let corollary = match self.walk {
            WalkFamily::Simple { edges } => eulerian_simple(edges, eps, self.lazy),
            WalkFamily::MaxDegree { n, d } => eulerian_max_degree(n, d, eps, self.lazy),
            WalkFamily::General => Vec::new(),
        };
        report.extend(corollary.into_iter().map(|e| {
            if self.expanding || e.quantity == Quantity::SpectralGap {
                e
            } else {
                e.conditional("expansion condition fails")
            }
        }));

        report.extend(psi_delta_bounds(
            self.psi_min_all,
            self.a_max_all(false),
            s.pi_star,
            eps,
        ));
        let root = eps.sqrt();
        let tau2 = |reversed: bool| {
            let psi = if reversed {
                self.psi_min_all_reversed
            } else {
                self.psi_min_all
            };
            psi_delta_bounds(psi, self.a_max_all(reversed), s.pi_star, root)
                .into_iter()
                .find(|e| e.quantity == Quantity::TauL2)
                .map_or(f64::INFINITY, |e| e.value)
        };
        let (fwd, bwd) = (tau2(false), tau2(true));
        report.extend([BoundEntry::new(
            BoundSource::ReversalComposition,
            Quantity::TauLinf,
            linf_composition_bound(fwd, bwd),
        )
        .input("tau2_forward", fwd)
        .input("tau2_reversed", bwd)]);

        for ((_, kind), profile) in INTEGRAL_FNS.iter().zip(&self.profiles) {
            let entry = match evoset_integral_bound(
                CongestionCurve::Step(profile),
                s.pi_star,
                eps,
                *kind,
            ) {
                Ok(b) => b.entry(s.pi_star, eps),
                Err(e) => BoundEntry::new(
                    BoundSource::EvolvingSetIntegral,
                    kind.quantity(),
                    f64::INFINITY,
                )
                .input("pi_star", s.pi_star)
                .note(e.to_string()),
            };
            report.extend([entry.note_if_missing(profile.f.name())]);
        }
        report
    }
}

impl BoundEntry {
    fn note_if_missing(mut self, note: &str) -> Self {
        if self.note.is_none() {
            self.note = Some(note.to_string());
        }
        self
    }
}
