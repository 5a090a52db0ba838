//! Leading-order predictions attached to a sweep.

use edgeflip::activation::{common_d_star, MAX_ENUMERATION_N};
use edgeflip::{
    classify_regime, enumerate_paths, predict_dynamic, predict_fixed_arbitrary, predict_fixed_complete,
    run_algorithm, ActivationOrderResult, BipartiteGraph, Dynamics, Error as ModelError, Regime, RegimePrediction,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Paths sampled when the graph is too large to enumerate.
pub const SAMPLED_PATHS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedCause {
    Disconnection,
    Nucleation,
    /// Both timescales are of the same order; no limit prediction.
    Mixed,
    /// Static graph: only initially isolated V-nodes can disconnect.
    NoDynamics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub r: f64,
    /// Complete-graph formula on complete graphs, path average otherwise,
    /// passed through the dynamics classification.
    pub primary: RegimePrediction,
    /// Path-probability-weighted static prediction.
    pub path_weighted: RegimePrediction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub d_star: usize,
    pub regime: Regime,
    /// Number of admissible paths, if they were enumerated.
    pub admissible_paths: Option<usize>,
    pub expected_cause: ExpectedCause,
    pub points: Vec<TheoryPoint>,
}

fn is_complete(g: &BipartiteGraph) -> bool {
    g.m() > 0 && g.edge_count() == g.m() * g.n()
}

/// Admissible paths, exhaustively when possible, else a seeded sample with
/// equal weights.
fn admissible_paths(graph: &BipartiteGraph, seed: u64) -> Result<(Vec<ActivationOrderResult>, bool)> {
    if graph.n() <= MAX_ENUMERATION_N {
        match enumerate_paths(graph) {
            Ok(paths) => return Ok((paths, true)),
            Err(ModelError::Capacity(msg)) => log::info!("{msg}; sampling {SAMPLED_PATHS} paths"),
            Err(e) => return Err(e.into()),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = 1.0 / SAMPLED_PATHS as f64;
    let paths = (0..SAMPLED_PATHS)
        .map(|_| ActivationOrderResult { probability: weight, ..run_algorithm(graph, &mut rng) })
        .collect();
    Ok((paths, false))
}

/// Cause the dynamics classification expects for the first V-activation:
/// the faster of the edge timescale `1 / lambda(r)` and the nucleation
/// timescale `r^{beta (d* - 1)}`.
pub fn expected_cause(dynamics: &Dynamics, d_star: usize, beta: f64) -> ExpectedCause {
    let nucleation = if d_star == 0 { 0.0 } else { beta * (d_star as f64 - 1.0) };
    let edge = match *dynamics {
        Dynamics::Static => return ExpectedCause::NoDynamics,
        Dynamics::Fast { exponent } => -exponent,
        Dynamics::Regular { .. } => 0.0,
        Dynamics::Slow { alpha } => alpha,
    };
    if (edge - nucleation).abs() <= 1e-12 {
        ExpectedCause::Mixed
    } else if edge < nucleation {
        ExpectedCause::Disconnection
    } else {
        ExpectedCause::Nucleation
    }
}

pub fn predict(config: &ExperimentConfig, graph: &BipartiteGraph) -> Result<Theory> {
    let beta = config.rates.beta;
    let (paths, enumerated) = admissible_paths(graph, config.seed)?;
    let d_star = common_d_star(&paths)?;
    let mut points = Vec::with_capacity(config.r_grid.len());
    for &r in &config.r_grid {
        let qp = config.queues.at(r);
        // Sampled paths carry equal weights, so this is their sample mean.
        let path_weighted = predict_fixed_arbitrary(&paths, beta, &qp)?.weighted;
        let static_prediction =
            if is_complete(graph) { predict_fixed_complete(graph.m(), beta, &qp)? } else { path_weighted };
        let primary = predict_dynamic(d_star, beta, &config.dynamics, &qp, &static_prediction)?;
        points.push(TheoryPoint { r, primary, path_weighted });
    }
    Ok(Theory {
        d_star,
        regime: classify_regime(d_star, beta),
        admissible_paths: enumerated.then_some(paths.len()),
        expected_cause: expected_cause(&config.dynamics, d_star, beta),
        points,
    })
}
