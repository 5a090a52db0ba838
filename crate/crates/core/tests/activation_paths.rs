use std::collections::HashMap;

use edgeflip::*;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exact_total(paths: &[ActivationOrderResult]) -> Ratio<u128> {
    paths.iter().map(|p| Ratio::new(1, p.probability_denominator)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn admissible_paths_are_consistent(m in 1usize..7, n in 1usize..9, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = BipartiteGraph::random(m, n, p, seed).unwrap();
        let paths = enumerate_paths(&g).unwrap();
        prop_assert!(!paths.is_empty());
        let d_star = paths[0].d_star;
        for path in &paths {
            prop_assert_eq!(path.d_star, d_star);
            prop_assert_eq!(path.steps.len(), n);
            let mut seen = vec![false; n];
            for (i, step) in path.steps.iter().enumerate() {
                prop_assert_eq!(step.k, i + 1);
                prop_assert!(step.candidates.contains(&step.chosen));
                prop_assert_eq!(step.n_k, step.candidates.len());
                prop_assert!(!seen[step.chosen]);
                seen[step.chosen] = true;
            }
            prop_assert_eq!(path.d_star, path.d_bars().into_iter().max().unwrap());
        }
        prop_assert_eq!(exact_total(&paths), Ratio::from_integer(1));
    }

    #[test]
    fn sampled_path_is_admissible(m in 1usize..6, n in 1usize..7, seed in any::<u64>()) {
        let g = BipartiteGraph::random(m, n, 0.5, seed).unwrap();
        let paths = enumerate_paths(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampled = run_algorithm(&g, &mut rng);
        prop_assert!(paths.contains(&sampled));
    }
}

#[test]
fn complete_graph_paths() {
    for (m, n) in [(1, 1), (2, 2), (3, 4), (5, 2)] {
        let paths = enumerate_paths(&BipartiteGraph::complete(m, n)).unwrap();
        let fact: usize = (1..=n).product();
        assert_eq!(paths.len(), fact);
        for p in &paths {
            assert_eq!(p.steps[0].d_bar, m);
            assert_eq!(p.steps[0].n_k, n);
            assert!(p.steps[1..].iter().all(|s| s.d_bar == 0));
            assert_eq!(p.d_star, m);
        }
    }
}

/// A path graph u0-v0-u1-v1-u2-v2: only the end node v2 has residual
/// degree 1 at the start.
#[test]
fn chain_graph_frozen_path() {
    let g = BipartiteGraph::from_edges(3, 3, &[(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]).unwrap();
    let paths = enumerate_paths(&g).unwrap();
    assert_eq!(paths.len(), 1);
    assert_eq!(paths[0].order(), vec![2, 1, 0]);
    assert_eq!(paths[0].d_bars(), vec![1, 1, 1]);
    assert_eq!(paths[0].probability_denominator, 1);
}

#[test]
fn sampling_frequencies_match_path_probabilities() {
    let graphs = [
        BipartiteGraph::complete(2, 3),
        BipartiteGraph::from_edges(3, 3, &[(0, 0), (0, 1), (1, 1), (2, 2)]).unwrap(),
        BipartiteGraph::from_edges(2, 3, &[(0, 0), (1, 1)]).unwrap(),
    ];
    for g in &graphs {
        let paths = enumerate_paths(g).unwrap();
        assert!(paths.len() <= 6);
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let runs = 100_000;
        for _ in 0..runs {
            *counts.entry(run_algorithm(g, &mut rng).order()).or_default() += 1;
        }
        assert_eq!(counts.len(), paths.len());
        let chi2: f64 = paths
            .iter()
            .map(|p| {
                let expected = p.probability * runs as f64;
                let observed = counts[&p.order()] as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        // 0.999 quantile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 20.52, "chi2 = {chi2} over {} paths", paths.len());
    }
}

#[test]
fn complete_graph_predictions_from_both_routes() {
    let qp = QueueParams { r: 1e4, ..QueueParams::default() };
    let paths = enumerate_paths(&BipartiteGraph::complete(2, 2)).unwrap();
    let by_paths = predict_fixed_arbitrary(&paths, 0.5, &qp).unwrap().weighted;
    let by_size = predict_fixed_complete(2, 0.5, &qp).unwrap();
    assert_eq!(by_paths.exponent, by_size.exponent);
    assert!((by_size.mean_prediction - 50.0).abs() < 1e-9);
    assert!((by_paths.mean_prediction - 25.0).abs() < 1e-9);
}
