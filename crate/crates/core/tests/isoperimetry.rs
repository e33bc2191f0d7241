mod common;

use std::f64::consts::PI;

use common::*;
use evoset_core::chain::{
    build_complete_graph_walk, build_drifted_cycle, build_max_degree_walk, build_self_looped_cycle,
    build_simple_walk, reverse, stationary, transform, DirectedMultigraph, Edge, StochasticKernel,
    TransformKind,
};
use evoset_core::iso::{
    summarize, ConcaveFn, ExpansionKind, ExpansionOutcome, IsoError, Isoperimetry,
};
use proptest::prelude::*;

fn lazy_pair() -> StochasticKernel<f64> {
    StochasticKernel::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
}

fn two_cycle() -> StochasticKernel<f64> {
    StochasticKernel::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

fn drifted(n: usize, d: u32) -> StochasticKernel<f64> {
    build_drifted_cycle(n, d).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn ergodic_flow_examples() {
    let k = drifted(3, 3);
    let iso = Isoperimetry::new(&k).unwrap();
    let a = iso.set(&[0]).unwrap();
    let all = iso.set(&[0, 1, 2]).unwrap();
    let empty = iso.set(&[]).unwrap();
    assert!(close(iso.ergodic_flow(&a, &all), a.measure(), 1e-15));
    assert!(close(
        iso.ergodic_flow(&a, &iso.set(&[1]).unwrap()),
        2.0 / 9.0,
        1e-15
    ));
    assert!(close(
        iso.ergodic_flow(&a, &iso.set(&[2]).unwrap()),
        1.0 / 9.0,
        1e-15
    ));
    assert_eq!(iso.ergodic_flow(&empty, &all), 0.0);
}

#[test]
fn level_set_profiles() {
    let iso = Isoperimetry::new(&lazy_pair()).unwrap();
    let p = iso.level_set_profile(&iso.set(&[0]).unwrap()).unwrap();
    assert_eq!(p.breakpoints(), &[(0.0, 1.0), (0.5, 0.0)]);
    assert_eq!(p.measure_at(0.5), 1.0);
    assert_eq!(p.measure_at(0.5000001), 0.0);

    let iso = Isoperimetry::new(&two_cycle()).unwrap();
    let p = iso.level_set_profile(&iso.set(&[0]).unwrap()).unwrap();
    assert_eq!(p.breakpoints(), &[(0.0, 0.5)]);
    assert_eq!(p.integral(), 0.5);
}

#[test]
fn empty_and_full_sets_rejected() {
    let iso = Isoperimetry::new(&drifted(3, 2)).unwrap();
    for set in [iso.set(&[]).unwrap(), iso.set(&[0, 1, 2]).unwrap()] {
        assert_eq!(iso.psi_area(&set), Err(IsoError::EmptyOrFullSet));
        assert_eq!(iso.level_set_profile(&set), Err(IsoError::EmptyOrFullSet));
    }
    assert!(matches!(iso.set(&[3]), Err(IsoError::InvalidSet(_))));
}

#[test]
fn too_many_states_rejected() {
    let k: StochasticKernel<f64> = build_self_looped_cycle(21, 2).unwrap();
    assert_eq!(
        Isoperimetry::new(&k).unwrap_err(),
        IsoError::StateSpaceTooLarge { n: 21, limit: 20 }
    );
}

#[test]
fn lazy_level_sets_contain_the_set_below_one_half() {
    let g = DirectedMultigraph::new(
        4,
        vec![
            Edge::new(0, 1, 1),
            Edge::new(1, 2, 2),
            Edge::new(2, 3, 1),
            Edge::new(3, 0, 1),
            Edge::new(2, 0, 1),
        ],
    )
    .unwrap();
    let k: StochasticKernel<f64> =
        transform(&build_simple_walk(&g).unwrap(), TransformKind::Lazy).unwrap();
    let iso = Isoperimetry::new(&k).unwrap();
    for bits in 1u32..15 {
        let a = iso.set_from_bits(bits);
        let p = iso.level_set_profile(&a).unwrap();
        for (lo, _, m) in p.segments() {
            if lo < 0.5 {
                assert!(m >= a.measure() - 1e-15);
            }
        }
        let v = iso.view(&a).unwrap();
        for x in 0..4 {
            if v.ratio(x) > 0.5 {
                assert!(a.contains(x));
            }
        }
    }
}

#[test]
fn psi_examples() {
    let iso = Isoperimetry::new(&two_cycle()).unwrap();
    let a = iso.set(&[0]).unwrap();
    assert_eq!(iso.psi_area(&a).unwrap(), 0.0);
    assert_eq!(iso.psi_flow(&a).unwrap(), 0.0);
    // B = {0} already has measure pi(A^c) and carries no flow from A
    assert_eq!(iso.psi_hat(&a).unwrap(), 0.0);

    let iso = Isoperimetry::new(&drifted(3, 3)).unwrap();
    let a = iso.set(&[1]).unwrap();
    assert!(close(iso.psi_flow(&a).unwrap(), 1.0 / 9.0, 1e-15));
    assert!(close(iso.psi_hat(&a).unwrap(), 1.0 / 9.0, 1e-15));
    assert!(close(iso.psi_area(&a).unwrap(), 1.0 / 9.0, 1e-15));
}

#[test]
fn drifted_cycle_psi_min_is_one_over_nd() {
    for n in [3usize, 5, 7, 9] {
        for d in [2u32, 3, 5] {
            let s = summarize(&drifted(n, d)).unwrap();
            let want = 1.0 / (n as f64 * f64::from(d));
            assert!(close(s.psi_min, want, 1e-12), "n={n} d={d}: {}", s.psi_min);
            assert!(close(s.psi_hat_min, want, 1e-12));
            assert!(close(s.delta_min, 1.0 / n as f64, 1e-12));
            assert!(close(s.q_min, 1.0 / n as f64, 1e-12));
            assert!(close(s.pi_star, 1.0 / n as f64, 1e-15));
        }
    }
}

#[test]
fn singleton_psi_at_most_pi_times_complement() {
    for k in [
        drifted(5, 3),
        build_complete_graph_walk(5).unwrap(),
        build_self_looped_cycle(6, 3).unwrap(),
    ] {
        let iso = Isoperimetry::new(&k).unwrap();
        for v in 0..k.n() {
            let a = iso.set(&[v]).unwrap();
            let p = a.measure();
            assert!(iso.psi_flow(&a).unwrap() <= p * (1.0 - p) + 1e-15);
        }
    }
}

#[test]
fn uniform_psi_is_min_flow_into_complement_sized_sets() {
    let k = drifted(5, 3);
    let pi = stationary(&k).unwrap().as_slice().to_vec();
    let iso = Isoperimetry::new(&k).unwrap();
    for a in 1u32..31 {
        let size = a.count_ones();
        let best = (0u32..32)
            .filter(|b| b.count_ones() == 5 - size)
            .map(|b| flow(&k, &pi, a, b))
            .fold(f64::INFINITY, f64::min);
        assert!(close(
            iso.psi_flow(&iso.set_from_bits(a)).unwrap(),
            best,
            1e-14
        ));
    }
}

#[test]
fn delta_min_examples() {
    let s = summarize(&build_complete_graph_walk::<f64>(5).unwrap()).unwrap();
    assert!(close(s.delta_min, 0.2, 1e-15));
    let k = StochasticKernel::<f64>::from_rows(&[
        vec![0.0, 0.5, 0.5],
        vec![1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
    ])
    .unwrap();
    let iso = Isoperimetry::new(&k).unwrap();
    assert!(close(iso.delta_min(), 0.25, 1e-15));
    // star with three leaves: m = 6 arcs, pi = (3, 1, 1, 1)/6
    let star: StochasticKernel<f64> =
        build_simple_walk(&DirectedMultigraph::star(3).unwrap()).unwrap();
    let iso = Isoperimetry::new(&star).unwrap();
    assert!(iso.delta_min() >= 1.0 / 6.0 - 1e-15);
}

#[test]
fn delta_min_exact_and_float_paths_agree() {
    let exact: StochasticKernel<f64> =
        build_simple_walk(&DirectedMultigraph::star(4).unwrap()).unwrap();
    let float = StochasticKernel::from_matrix(exact.matrix().clone()).unwrap();
    assert!(exact.exact_stationary().is_some() && float.exact_stationary().is_none());
    let a = Isoperimetry::new(&exact).unwrap().delta_min();
    let b = Isoperimetry::new(&float).unwrap().delta_min();
    assert!(close(a, 0.125, 1e-15) && close(a, b, 1e-12));
}

#[test]
fn q_min_examples() {
    let k: StochasticKernel<f64> = build_complete_graph_walk(4).unwrap();
    let iso = Isoperimetry::new(&k).unwrap();
    assert!(close(iso.q_min(), 0.25, 1e-15));
    assert!(close(iso.pi_star(), 0.25, 1e-15));
}

#[test]
fn expansion_checks() {
    let even: StochasticKernel<f64> =
        build_simple_walk(&DirectedMultigraph::undirected_cycle(6).unwrap()).unwrap();
    let iso = Isoperimetry::new(&even).unwrap();
    match iso.expansion_check(ExpansionKind::Counting) {
        ExpansionOutcome::Violation { set, vertex } => {
            assert_eq!(set, vec![0, 2, 4]);
            assert_eq!(vertex, None);
        }
        ExpansionOutcome::Pass => panic!("bipartite cycle should fail"),
    }

    let g = DirectedMultigraph::undirected_cycle(6)
        .unwrap()
        .with_self_loops(1);
    let looped: StochasticKernel<f64> = build_max_degree_walk(&g, 4).unwrap();
    assert!(Isoperimetry::new(&looped)
        .unwrap()
        .expansion_check(ExpansionKind::Counting)
        .passed());

    assert!(Isoperimetry::new(&drifted(5, 3))
        .unwrap()
        .expansion_check(ExpansionKind::Counting)
        .passed());

    let k: StochasticKernel<f64> = build_complete_graph_walk(6).unwrap();
    assert!(Isoperimetry::new(&k)
        .unwrap()
        .expansion_check(ExpansionKind::Measure)
        .passed());
    let star: StochasticKernel<f64> =
        build_simple_walk(&DirectedMultigraph::star(3).unwrap()).unwrap();
    let out = Isoperimetry::new(&star)
        .unwrap()
        .expansion_check(ExpansionKind::Measure);
    // the hub has measure 1/2 but its neighbourhood minus one leaf only 1/3
    assert_eq!(
        out,
        ExpansionOutcome::Violation {
            set: vec![0],
            vertex: Some(1)
        }
    );
}

#[test]
fn f_congestion_examples() {
    let iso = Isoperimetry::new(&lazy_pair()).unwrap();
    let a = iso.set(&[0]).unwrap();
    assert!(iso.f_congestion(&a, ConcaveFn::SinPi).unwrap().abs() < 1e-15);

    let iso = Isoperimetry::new(&two_cycle()).unwrap();
    let a = iso.set(&[0]).unwrap();
    for f in ConcaveFn::ALL {
        assert!(close(iso.f_congestion(&a, f).unwrap(), 1.0, 1e-15));
        assert_eq!(iso.c_f(f, true), 1.0);
        assert_eq!(iso.c_f(f, false), 1.0);
    }
}

#[test]
fn drifted_c_sin_matches_oracle_and_frozen_value() {
    let k = drifted(5, 3);
    let pi = stationary(&k).unwrap().as_slice().to_vec();
    let iso = Isoperimetry::new(&k).unwrap();
    let (c, witness) = iso.c_f_with_witness(ConcaveFn::SinPi, true);
    // every set has capped psi at least 1/(nd), and C_sin(A) <= cos(2 pi psi_hat(A))
    assert!(c <= (2.0 * PI / 15.0).cos() && c > 0.0);
    assert!(iso.set_from_bits(witness).measure() <= 0.5);

    let sin = |a: f64, _: f64| (PI * a).sin();
    let oracle = (1u32..31)
        .filter(|a| measure(&pi, *a) <= 0.5)
        .map(|a| level_integral(&k, &pi, a, sin) / sin(measure(&pi, a), 0.0))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(close(c, oracle, 1e-13));
    // singleton {0}: ratios 0, 1/3, 2/3 give (sin(2 pi/5) + sin(pi/5)) / (3 sin(pi/5))
    let hand = ((2.0 * PI / 5.0).sin() + (PI / 5.0).sin()) / (3.0 * (PI / 5.0).sin());
    assert!(close(c, hand, 1e-14));
    assert!(close(c, C_SIN_DRIFTED_5_3, 1e-12), "{c:.17}");
}

/// `C_sin` of the drifted cycle `n = 5, d = 3`, from the level-set oracle.
const C_SIN_DRIFTED_5_3: f64 = 0.8726779962499649;

#[test]
fn congestion_profile_is_nondecreasing() {
    let iso = Isoperimetry::new(&drifted(7, 3)).unwrap();
    for f in ConcaveFn::ALL {
        let p = iso.c_f_profile(f);
        assert!(p
            .points
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!(close(p.at(0.5).unwrap(), iso.c_f(f, true), 1e-15));
        assert!(close(p.points.last().unwrap().1, iso.c_f(f, false), 1e-15));
    }
}

#[test]
fn summary_of_drifted_triangle() {
    let s = summarize(&drifted(3, 3)).unwrap();
    assert!(close(s.psi_min, 1.0 / 9.0, 1e-15));
    assert!(close(s.delta_min, 1.0 / 3.0, 1e-15));
    assert!(close(s.pi_star, 1.0 / 3.0, 1e-15));
    assert!(close(s.q_min, 1.0 / 3.0, 1e-15));
    assert!(close(s.a_hat_min, 1.0 / 9.0, 1e-15));
    assert!(close(s.a_hat_max, 1.0 / 6.0, 1e-15));
    assert!(close(s.a_max, 1.0 / 6.0, 1e-15));
    assert_eq!(s.set_count_examined, 3);
}

#[test]
fn expanding_eulerian_walks_have_large_capped_psi() {
    // simple walks: psi_hat_min >= 1/m whenever the measure expansion holds
    let graphs = [
        DirectedMultigraph::complete(5).unwrap(),
        DirectedMultigraph::undirected_cycle(5).unwrap(),
        DirectedMultigraph::drifted_cycle(7, 3).unwrap(),
        DirectedMultigraph::undirected_cycle(7)
            .unwrap()
            .with_self_loops(1),
    ];
    let mut checked = 0;
    for g in &graphs {
        let k: StochasticKernel<f64> = build_simple_walk(g).unwrap();
        let iso = Isoperimetry::new(&k).unwrap();
        if !iso.expansion_check(ExpansionKind::Measure).passed() {
            continue;
        }
        checked += 1;
        let s = iso.summarize().unwrap();
        let m = g.edge_count() as f64;
        assert!(s.psi_hat_min >= 1.0 / m - 1e-15);
        assert!(s.delta_min >= 1.0 / m - 1e-15);
    }
    assert!(checked >= 2);

    // max-degree walks: psi_hat_min >= 1/(nd), delta_min = 1/n
    for (n, d) in [(5usize, 3u32), (7, 4), (9, 5)] {
        let g = DirectedMultigraph::undirected_cycle(n)
            .unwrap()
            .with_self_loops(1);
        let k: StochasticKernel<f64> = build_max_degree_walk(&g, u64::from(d)).unwrap();
        let iso = Isoperimetry::new(&k).unwrap();
        assert!(iso.expansion_check(ExpansionKind::Counting).passed());
        let s = iso.summarize().unwrap();
        assert!(s.psi_hat_min >= 1.0 / (n as f64 * f64::from(d)) - 1e-15);
        assert!(close(s.delta_min, 1.0 / n as f64, 1e-15));
    }
}

#[test]
fn f32_summary_tracks_f64() {
    let a = summarize(&build_drifted_cycle::<f32>(7, 3).unwrap()).unwrap();
    let b = summarize(&drifted(7, 3)).unwrap();
    assert!((f64::from(a.psi_min) - b.psi_min).abs() < 1e-6);
    assert!((f64::from(a.delta_min) - b.delta_min).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn area_and_flow_forms_agree(k in arb_kernel(8)) {
        let iso = Isoperimetry::new(&k).unwrap();
        let pi = iso.stationary().to_vec();
        let n = k.n();
        for bits in 1u32..(1 << n) - 1 {
            let a = iso.set_from_bits(bits);
            let v = iso.view(&a).unwrap();
            prop_assert!((v.profile_integral() - a.measure()).abs() <= 1e-12);
            prop_assert!((v.psi_area() - v.psi()).abs() <= 1e-12);
            let p = v.profile();
            prop_assert!((p.integral() - a.measure()).abs() <= 1e-12);
            prop_assert!(p.breakpoints().windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
            prop_assert!((v.psi() - psi_by_enumeration(&k, &pi, bits, 1.0)).abs() <= 1e-12);
            prop_assert!((v.psi_hat() - psi_by_enumeration(&k, &pi, bits, 0.5)).abs() <= 1e-12);
            prop_assert!(v.psi_hat() <= v.psi() + 1e-15);
            for f in ConcaveFn::ALL {
                let c = v.congestion(f).unwrap();
                prop_assert!(c <= 1.0 + 1e-12);
                let rest = measure(&pi, ((1 << n) - 1) & !bits);
                let want = level_integral(&k, &pi, bits, |m, r| f.eval_split(m, r)) / f.eval_split(a.measure(), rest);
                prop_assert!((c - want).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn lazy_chains_have_psi_equal_to_cut(k in arb_kernel(7)) {
        let lazy = transform(&k, TransformKind::Lazy).unwrap();
        let iso = Isoperimetry::new(&lazy).unwrap();
        for bits in 1u32..(1 << k.n()) - 1 {
            let v = iso.view(&iso.set_from_bits(bits)).unwrap();
            prop_assert!((v.psi() - v.cut()).abs() <= 1e-14);
            prop_assert!((v.psi_hat() - v.cut()).abs() <= 1e-14);
        }
    }

    #[test]
    fn flow_reversal_identities(k in arb_kernel(6)) {
        let rev = reverse(&k).unwrap();
        let pi = stationary(&k).unwrap().as_slice().to_vec();
        let n = k.n();
        let full = (1u32 << n) - 1;
        for a in 0..=full {
            for b in 0..=full {
                prop_assert!((flow(&k, &pi, a, b) - flow(&rev, &pi, b, a)).abs() <= 1e-14);
                if (measure(&pi, b) - measure(&pi, full & !a)).abs() <= 1e-14 {
                    let lhs = flow(&k, &pi, a, b);
                    let rhs = measure(&pi, b) - measure(&pi, full & !a) + flow(&k, &pi, full & !a, full & !b);
                    prop_assert!((lhs - rhs).abs() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn psi_is_symmetric_under_complement(k in arb_kernel(8)) {
        let iso = Isoperimetry::new(&k).unwrap();
        let full = (1u32 << k.n()) - 1;
        for bits in 1..full {
            let a = iso.psi_flow(&iso.set_from_bits(bits)).unwrap();
            let b = iso.psi_flow(&iso.set_from_bits(full & !bits)).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn expansion_check_agrees_with_definition(k in arb_kernel(7)) {
        let iso = Isoperimetry::new(&k).unwrap();
        let pi = iso.stationary().to_vec();
        let n = k.n();
        let nb = |a: u32| (0..n).filter(|y| members(a, n).iter().any(|x| k.p(*x, *y) > 0.0)).fold(0u32, |m, y| m | 1 << y);
        let counting_ok = (1u32..1 << n)
            .filter(|a| 2 * a.count_ones() as usize <= n)
            .all(|a| nb(a).count_ones() > a.count_ones());
        prop_assert_eq!(iso.expansion_check(ExpansionKind::Counting).passed(), counting_ok);
        let measure_ok = (1u32..1 << n)
            .filter(|a| measure(&pi, *a) <= 0.5 + 1e-12)
            .all(|a| (0..n).all(|v| measure(&pi, nb(a) & !(1 << v)) >= measure(&pi, a) - 1e-12));
        prop_assert_eq!(iso.expansion_check(ExpansionKind::Measure).passed(), measure_ok);
    }
}

#[test]
fn psi_min_is_reversal_invariant_for_uniform_stationary() {
    for (n, d) in [(5usize, 3u32), (7, 2), (9, 5)] {
        let k = drifted(n, d);
        let a = summarize(&k).unwrap();
        let b = summarize(&reverse(&k).unwrap()).unwrap();
        assert!(close(a.psi_min, b.psi_min, 1e-14));
    }
}
