//! Replicated runs over the `r` grid.

use edgeflip::engine::{ActivationCause, EngineOptions};
use edgeflip::queue::expected_hitting_time_tu;
use edgeflip::{run_transition_with, BipartiteGraph, Error as ModelError, TransitionRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::stats::{fit_exponent, mean, std_err, ExponentFit, DEFAULT_RESAMPLES};
use crate::theory::{self, Theory};

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one replication, a function of its indices only.
pub fn replication_seed(master: u64, r_index: usize, replication: usize) -> u64 {
    mix(mix(mix(master) ^ r_index as u64) ^ replication as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Timeout,
}

/// One CSV row per replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub r: f64,
    pub r_index: usize,
    pub replication: usize,
    pub seed: u64,
    pub status: RunStatus,
    /// Time of completion, or of the last simulated event on timeout.
    pub transition_time: f64,
    pub first_v: Option<usize>,
    pub first_cause: Option<ActivationCause>,
    pub first_degree: Option<usize>,
    /// Initial degree of the first activated V-node.
    pub first_initial_degree: Option<usize>,
    pub disconnection_activations: usize,
    pub nucleation_activations: usize,
    /// V-nodes in order of first activation, space separated.
    pub path: String,
    pub activations: u64,
    pub failed_attempts: u64,
    pub deactivations: u64,
    pub edge_flips: u64,
    pub forced_deactivations: u64,
    pub arrivals: u64,
    pub queue_empty: u64,
    pub v_deactivations: usize,
    pub residual_active_u: usize,
}

impl ReplicationRow {
    fn new(r: f64, r_index: usize, replication: usize, rec: &TransitionRecord, status: RunStatus) -> Self {
        let first = rec.first_activation();
        let first_v = rec.path.first().copied();
        let by_cause = |c| rec.v_activation.iter().flatten().filter(|a| a.cause == c).count();
        let ec = &rec.event_counts;
        Self {
            r,
            r_index,
            replication,
            seed: rec.seed,
            status,
            transition_time: rec.transition_time,
            first_v,
            first_cause: first.map(|a| a.cause),
            first_degree: first.map(|a| a.degree),
            first_initial_degree: first_v.map(|v| rec.initial_degree_v[v]),
            disconnection_activations: by_cause(ActivationCause::Disconnection),
            nucleation_activations: by_cause(ActivationCause::Nucleation),
            path: rec.path.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            activations: ec.activations,
            failed_attempts: ec.failed_attempts,
            deactivations: ec.deactivations,
            edge_flips: ec.edge_flips,
            forced_deactivations: ec.forced_deactivations,
            arrivals: ec.arrivals,
            queue_empty: ec.queue_empty,
            v_deactivations: rec.v_deactivations(),
            residual_active_u: rec.residual_active_u.len(),
        }
    }

    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

/// Per-`r` aggregates over completed replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub r: f64,
    pub replications: usize,
    pub completed: usize,
    pub timeouts: usize,
    pub mean: f64,
    pub std_err: f64,
    /// First V-activations with cause disconnection (degree 0).
    pub disconnection_fraction: Option<f64>,
    /// First V-activations at a degree below the node's initial degree.
    pub reduced_degree_fraction: Option<f64>,
    /// Fraction of replications finishing before the U drain time `T_U(r)`.
    pub before_drain_fraction: Option<f64>,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ReplicationRow>,
    pub points: Vec<PointSummary>,
    /// Needs at least three grid points.
    pub fit: Option<ExponentFit>,
    pub theory: Theory,
}

impl SweepResult {
    /// Completed transition times at grid index `i`.
    pub fn times(&self, i: usize) -> Vec<f64> {
        self.rows.iter().filter(|x| x.r_index == i && x.completed()).map(|x| x.transition_time).collect()
    }
}

fn run_one(
    graph: &BipartiteGraph,
    config: &ExperimentConfig,
    r_index: usize,
    replication: usize,
) -> Result<ReplicationRow> {
    let r = config.r_grid[r_index];
    let seed = replication_seed(config.seed, r_index, replication);
    let mut options = EngineOptions::default();
    if let Some(cap) = config.max_events {
        options.max_events = cap;
    }
    match run_transition_with(graph, &config.model_params(r), seed, options) {
        Ok(rec) => Ok(ReplicationRow::new(r, r_index, replication, &rec, RunStatus::Completed)),
        Err(ModelError::Timeout { partial, .. }) => {
            log::warn!("replication {replication} at r = {r} (seed {seed}) hit the event cap");
            Ok(ReplicationRow::new(r, r_index, replication, &partial, RunStatus::Timeout))
        }
        Err(e) => Err(e.into()),
    }
}

fn fraction(rows: &[&ReplicationRow], pred: impl Fn(&ReplicationRow) -> bool) -> Option<f64> {
    (!rows.is_empty()).then(|| rows.iter().filter(|x| pred(x)).count() as f64 / rows.len() as f64)
}

/// Runs every replication on a pool of `workers` threads. Results are
/// collected in index order, so they do not depend on `workers`.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    config.validate()?;
    let graph = config.graph.build()?;
    let theory = theory::predict(config, &graph)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExpError::Data(format!("cannot start worker pool: {e}")))?;

    let mut rows = Vec::with_capacity(config.r_grid.len() * config.replications);
    let mut points = Vec::with_capacity(config.r_grid.len());
    for (i, &r) in config.r_grid.iter().enumerate() {
        log::info!("r = {r}: {} replications", config.replications);
        let batch: Vec<ReplicationRow> = pool.install(|| {
            (0..config.replications)
                .into_par_iter()
                .map(|k| run_one(&graph, config, i, k))
                .collect::<Result<_>>()
        })?;
        let done: Vec<&ReplicationRow> = batch.iter().filter(|x| x.completed()).collect();
        if done.is_empty() {
            return Err(ExpError::Data(format!("every replication at r = {r} hit the event cap")));
        }
        let times: Vec<f64> = done.iter().map(|x| x.transition_time).collect();
        let tu = expected_hitting_time_tu(&config.queues.at(r)).ok();
        let predicted = theory.points[i].primary.mean_prediction;
        let m = mean(&times);
        points.push(PointSummary {
            r,
            replications: batch.len(),
            completed: done.len(),
            timeouts: batch.len() - done.len(),
            mean: m,
            std_err: std_err(&times),
            disconnection_fraction: fraction(&done, |x| x.first_cause == Some(ActivationCause::Disconnection)),
            reduced_degree_fraction: fraction(&done, |x| {
                matches!((x.first_degree, x.first_initial_degree), (Some(d), Some(d0)) if d < d0)
            }),
            before_drain_fraction: tu.and_then(|tu| fraction(&done, |x| x.transition_time < tu)),
            predicted,
            ratio: m / predicted,
        });
        rows.extend(batch);
    }

    let mut result = SweepResult { config: config.clone(), rows, points, fit: None, theory };
    if config.r_grid.len() >= 3 {
        let groups: Vec<(f64, Vec<f64>)> =
            config.r_grid.iter().enumerate().map(|(i, &r)| (r, result.times(i))).collect();
        match fit_exponent(&groups, DEFAULT_RESAMPLES, config.seed) {
            Ok(fit) => result.fit = Some(fit),
            Err(e) => log::warn!("no exponent fit: {e}"),
        }
    }
    Ok(result)
}
