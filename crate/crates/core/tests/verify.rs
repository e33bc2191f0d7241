use std::f64::consts::PI;

use evoset_core::bounds::{worst_case_profile, ProfileCase};
use evoset_core::chain::build_drifted_cycle;
use evoset_core::iso::{full_mask, ConcaveFn, Isoperimetry};
use evoset_core::verify::*;
use proptest::prelude::*;

#[test]
fn ineq_grid_passes_at_moderate_resolution() {
    let r = check_lemma_ineq(80);
    assert!(r.passed(), "{r:?}");
    assert!(r.grids[0].max_violation <= GRID_TOL);
    assert!(r.boundary_max_error <= IDENTITY_TOL);
}

#[test]
fn sinc_grid_passes_at_moderate_resolution() {
    let r = check_lemma_sinc(120);
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.grids.len(), 2);
}

#[test]
fn grid_reports_are_reproducible() {
    assert_eq!(check_lemma_ineq(30), check_lemma_ineq(30));
    let r = check_lemma_sinc(30);
    let json = serde_json::to_string(&r).unwrap();
    let back: LemmaReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn low_resolution_is_clamped() {
    assert_eq!(check_lemma_ineq(3).grids[0].resolution, 10);
}

#[test]
fn rearrangement_trials_pass() {
    let r = check_worst_case_lemma(10_000, 7);
    assert!(r.passed(), "{:?}", r.witness);
    assert!(r.max_excess <= REARRANGEMENT_TOL);
}

#[test]
fn true_profiles_integrate_below_the_worst_case_profile() {
    // Sets with pi(A) <= 1/2 and Psi(A) < Delta/2: the extremal profile is the three-plateau
    // one and the rearrangement lemma bounds every concave f.
    for (n, d) in [(5, 3), (7, 5), (9, 3)] {
        let k = build_drifted_cycle::<f64>(n, d).unwrap();
        let iso = Isoperimetry::new(&k).unwrap();
        let delta = iso.delta_min();
        let mut checked = 0;
        for bits in 1..full_mask(n) {
            let a = iso.set_from_bits(bits);
            let v = iso.view(&a).unwrap();
            if a.measure() > 0.5 || v.psi() >= delta / 2.0 {
                continue;
            }
            let m = worst_case_profile(a.measure(), v.psi(), v.psi_hat(), delta, None).unwrap();
            assert_eq!(m.case, ProfileCase::BelowGap);
            for f in ConcaveFn::ALL {
                assert!(
                    v.integrate(f) <= m.integrate(f) + 1e-12,
                    "n={n} d={d} set {bits:b} {f:?}"
                );
            }
            checked += 1;
        }
        assert!(checked > 0);
    }
}

#[test]
fn default_suite_dominance_holds() {
    let table = dominance_harness(&default_suite().unwrap(), &HarnessOptions::default()).unwrap();
    assert!(table.passed(), "{}", table.witness().unwrap_or_default());
    assert!(table
        .rows
        .iter()
        .any(|r| r.check == "factor_two_sharpness:eigen_gap"));
    assert!(table
        .rows
        .iter()
        .any(|r| r.check == "evolving_set:tv_domination"));
    assert!(table
        .rows
        .iter()
        .any(|r| r.check == "worst_case_profile:c_sin"));
}

#[test]
fn corrupted_bound_fails_with_a_witness() {
    let suite: Vec<_> = default_suite().unwrap().into_iter().take(2).collect();
    let opts = HarnessOptions {
        inject_corruption: true,
        evoset_trials: 0,
        ..Default::default()
    };
    let table = dominance_harness(&suite, &opts).unwrap();
    assert!(!table.passed());
    let witness: HarnessRow = serde_json::from_str(&table.witness().unwrap()).unwrap();
    assert_eq!(witness.verdict, Verdict::Fail);
    assert!(witness.exact > witness.bound);
}

#[test]
fn harness_is_deterministic_and_round_trips() {
    let suite: Vec<_> = default_suite()
        .unwrap()
        .into_iter()
        .filter(|c| c.lazy)
        .collect();
    let opts = HarnessOptions {
        evoset_trials: 300,
        evoset_horizon: 40,
        ..Default::default()
    };
    let a = dominance_harness(&suite, &opts).unwrap();
    let b = dominance_harness(&suite, &opts).unwrap();
    assert_eq!(a, b);
    let back: HarnessTable = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(back.to_json(), a.to_json());
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("chain,check,eps,exact,bound,margin,verdict,note\n"));
    assert_eq!(text.lines().count(), a.rows.len() + 1);
}

#[test]
fn periodic_star_is_never_a_hard_failure() {
    let suite: Vec<_> = default_suite()
        .unwrap()
        .into_iter()
        .filter(|c| c.name == "star-3")
        .collect();
    let table = dominance_harness(&suite, &HarnessOptions::default()).unwrap();
    assert!(table.passed());
    assert!(table
        .rows
        .iter()
        .any(|r| r.verdict == Verdict::HypothesisUnmet));
}

#[test]
fn analysis_of_drifted_pentagon() {
    let suite = default_suite().unwrap();
    let chain = suite
        .iter()
        .find(|c| c.name == "drifted-cycle-n5-d3")
        .unwrap();
    let a = ChainAnalysis::new(chain).unwrap();
    assert!((a.psi_min_all - 1.0 / 15.0).abs() < 1e-12);
    assert!((a.psi_min_all_reversed - a.psi_min_all).abs() < 1e-12);
    assert!((a.spectral_gap - (1.0 - (2.0 * PI / 5.0).cos())).abs() < 1e-10);
    let report = a.bound_report(0.25);
    assert!(report.best(evoset_core::bounds::Quantity::TauTv).is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn h_is_below_its_bound_off_grid(a in 0.0f64..=0.5, bf in 0.0f64..1.0, cf in 0.0f64..1.0) {
        let b = (0.5 * bf).max(1e-6);
        let c = cf * b * (1.0 - b) * (1.0 - a).min(1.0);
        prop_assume!(c / (1.0 - a) <= b);
        prop_assert!(h(a, b, c) <= (PI * a).sin() * (2.0 * PI * c).cos() + 1e-9);
    }

    #[test]
    fn sinc_gap_is_nonnegative_off_grid(s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let x = PI / 2.0 + PI / 2.0 * s.max(t);
        let y = PI / 2.0 + PI / 2.0 * s.min(t);
        prop_assert!(sinc_gap(x, y) >= -1e-12);
    }
}
