mod common;

use common::*;
use evoset_core::chain::*;
use evoset_core::iso::full_mask;
use evoset_core::verify::random_eulerian;
use num_rational::Ratio;
use proptest::prelude::*;

fn check_kernel(k: &StochasticKernel<f64>) -> Result<(), TestCaseError> {
    for x in 0..k.n() {
        let row = k.row(x);
        prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    let pi = stationary(k).unwrap();
    prop_assert!(pi.invariance_residual(k) <= 1e-12);
    Ok(())
}

fn reversed_flows_agree(k: &StochasticKernel<f64>) -> f64 {
    let n = k.n();
    let pi = stationary(k).unwrap();
    let rev = reverse(k).unwrap();
    let mut worst: f64 = 0.0;
    for a in 0..=full_mask(n) {
        for b in 0..=full_mask(n) {
            let d = flow(k, pi.as_slice(), a, b) - flow(&rev, pi.as_slice(), b, a);
            worst = worst.max(d.abs());
        }
    }
    worst
}

#[test]
fn reversal_swaps_flows_on_eight_states() {
    for seed in [3, 4] {
        let k = evoset_core::verify::random_chain(8, seed).unwrap();
        assert!(reversed_flows_agree(&k) <= 1e-12);
    }
}

#[test]
fn four_regular_eulerian_graph_has_uniform_weights() {
    // Two Hamiltonian cycles on four vertices: every degree is 2, m = 8.
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
        (0, 2),
        (2, 1),
        (1, 3),
        (3, 0),
    ];
    let g = DirectedMultigraph::new(4, edges.iter().map(|&(s, t)| Edge::new(s, t, 1)).collect())
        .unwrap();
    assert!(g.is_eulerian());
    let k = build_simple_walk::<f64>(&g).unwrap();
    let pi = stationary(&k).unwrap();
    assert!(pi.as_slice().iter().all(|p| (p - 0.25).abs() < 1e-15));
    assert!(k
        .exact_stationary()
        .unwrap()
        .iter()
        .all(|p| *p == Ratio::new(2, 8)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_kernels_are_stochastic(k in arb_kernel(9)) {
        check_kernel(&k)?;
        for t in [TransformKind::Lazy, TransformKind::AdditiveSymmetrize, TransformKind::HalfLazySymmetrize] {
            check_kernel(&transform(&k, t).unwrap())?;
        }
        check_kernel(&reverse(&k).unwrap())?;
    }

    #[test]
    fn transforms_keep_the_stationary_distribution(k in arb_kernel(8)) {
        let pi = stationary(&k).unwrap();
        let mut others = vec![reverse(&k).unwrap()];
        for t in [TransformKind::Lazy, TransformKind::AdditiveSymmetrize, TransformKind::HalfLazySymmetrize] {
            others.push(transform(&k, t).unwrap());
        }
        for other in &others {
            let p = stationary(other).unwrap();
            for (a, b) in pi.as_slice().iter().zip(p.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        prop_assert!(transform(&k, TransformKind::Lazy).unwrap().is_lazy());
    }

    #[test]
    fn reversal_is_an_involution_and_symmetrization_is_reversible(k in arb_kernel(7)) {
        let back = reverse(&reverse(&k).unwrap()).unwrap();
        let s = transform(&k, TransformKind::AdditiveSymmetrize).unwrap();
        let pi = stationary(&k).unwrap();
        for x in 0..k.n() {
            for y in 0..k.n() {
                prop_assert!((back.p(x, y) - k.p(x, y)).abs() <= 1e-12);
                prop_assert!((pi.get(x) * s.p(x, y) - pi.get(y) * s.p(y, x)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn reversal_swaps_flows(k in arb_kernel(6)) {
        prop_assert!(reversed_flows_agree(&k) <= 1e-12);
    }

    #[test]
    fn eulerian_simple_walk_weights_are_degrees_over_edges(n in 2usize..9, extra in 0usize..5, seed in 0u64..10_000) {
        let g = random_eulerian(n, extra, seed).unwrap();
        let degrees = g.out_degrees();
        let m = g.edge_count();
        prop_assert_eq!(degrees.iter().sum::<u64>(), m);
        prop_assert_eq!(g.in_degrees().iter().sum::<u64>(), m);
        let k = build_simple_walk::<f64>(&g).unwrap();
        let exact = k.exact_stationary().unwrap();
        for (v, d) in degrees.iter().enumerate() {
            prop_assert_eq!(exact[v], Ratio::new(*d as i64, m as i64));
        }
        check_kernel(&k)?;
    }

    #[test]
    fn max_degree_walk_is_uniform_on_eulerian_graphs(n in 2usize..9, extra in 0usize..5, seed in 0u64..10_000, slack in 0u64..3) {
        let g = random_eulerian(n, extra, seed).unwrap();
        let k = build_max_degree_walk::<f64>(&g, g.max_out_degree() + slack).unwrap();
        let pi = stationary(&k).unwrap();
        prop_assert!(pi.as_slice().iter().all(|p| (p - 1.0 / n as f64).abs() <= 1e-12));
    }
}
