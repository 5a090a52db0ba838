//! Brute-force checks on small instances, independent of the greedy
//! implementation.

use edgeflip::disconnection::{disconnection_coefficient, hitting_time_system, mean_disconnection_time};
use edgeflip::{enumerate_paths, BipartiteGraph};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

/// Residual degree of each V-node at its turn when V activates in `order`:
/// its U-neighbours not adjacent to any earlier node of the order.
pub fn residual_degrees(graph: &BipartiteGraph, order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; graph.m()];
    order
        .iter()
        .map(|&v| {
            let d = (0..graph.m()).filter(|&u| graph.has_edge(u, v) && !blocked[u]).count();
            for u in 0..graph.m() {
                if graph.has_edge(u, v) {
                    blocked[u] = true;
                }
            }
            d
        })
        .collect()
}

/// `min over all orderings of V of max residual degree`, by trying all
/// `N!` orderings (Heap's algorithm).
pub fn brute_force_d_star(graph: &BipartiteGraph) -> Result<usize> {
    let n = graph.n();
    if n > 8 {
        return Err(ExpError::Data(format!("brute force over {n}! orderings is too slow")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let score = |o: &[usize]| residual_degrees(graph, o).into_iter().max().unwrap_or(0);
    let mut best = score(&order);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            best = best.min(score(&order));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub graphs: usize,
    /// Graphs whose admissible paths disagree on `d*`.
    pub inconsistent_d_star: usize,
    /// Graphs whose path probabilities do not sum to exactly 1.
    pub bad_probability_sum: usize,
    /// Graphs where greedy `d*` differs from the brute-force minimum.
    pub d_star_mismatch: usize,
    /// `(M, d)` pairs where the three mean routes disagree beyond 1e-12.
    pub mean_route_mismatch: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks greedy consistency, exact path probabilities and `d*` against
/// brute force on `graphs` random graphs with `M, N <= max_size`, and the
/// three disconnection-mean routes for `M <= 12`.
pub fn run_oracle_suite(graphs: usize, max_size: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport { graphs, ..OracleReport::default() };
    for i in 0..graphs {
        let m = rng.random_range(1..=max_size);
        let n = rng.random_range(1..=max_size);
        let p = rng.random_range(0.1..0.9);
        let g = BipartiteGraph::random(m, n, p, rng.random())?;
        let paths = enumerate_paths(&g)?;
        let d_star = paths[0].d_star;
        if paths.iter().any(|x| x.d_star != d_star) {
            rep.inconsistent_d_star += 1;
            rep.failures.push(format!("graph {i}: admissible paths disagree on d*"));
        }
        let total: Ratio<u128> = paths.iter().map(|x| Ratio::new(1, x.probability_denominator)).sum();
        if total != Ratio::from_integer(1) {
            rep.bad_probability_sum += 1;
            rep.failures.push(format!("graph {i}: path probabilities sum to {total}"));
        }
        let brute = brute_force_d_star(&g)?;
        if brute != d_star {
            rep.d_star_mismatch += 1;
            rep.failures.push(format!("graph {i} ({m}x{n}): greedy d* = {d_star}, brute force {brute}"));
        }
    }
    for m in 1..=12 {
        let system = hitting_time_system(m, 1.0)?;
        for d in 1..=m {
            let closed = disconnection_coefficient(m, d)?;
            let recursion = mean_disconnection_time(m, d, 1.0)?;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            if rel(closed, recursion) > 1e-12 || rel(closed, system[d - 1]) > 1e-12 {
                rep.mean_route_mismatch += 1;
                rep.failures.push(format!("M={m} d={d}: {closed} / {recursion} / {}", system[d - 1]));
            }
        }
    }
    Ok(rep)
}
