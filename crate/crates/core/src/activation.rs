//! Greedy randomized activation order of the V-nodes, the maximum least
//! degree `d*`, and leading-order predictions of the mean transition time.
//!
//! At step `k` the algorithm looks at the residual graph in which the first
//! `k - 1` activated V-nodes and their U-neighbours have been removed, and
//! activates one of the `n_k` V-nodes of minimum residual degree `d_k`
//! uniformly at random.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::engine::Dynamics;
use crate::graph::BipartiteGraph;
use crate::queue::{expected_hitting_time_tu, QueueParams};

pub const MAX_ENUMERATION_N: usize = 12;
pub const MAX_ENUMERATED_PATHS: usize = 1_000_000;

const REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmStep {
    /// 1-based step index.
    pub k: usize,
    /// Minimum-degree V-nodes of the residual graph, ascending.
    pub candidates: Vec<usize>,
    pub d_bar: usize,
    pub n_k: usize,
    pub chosen: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationOrderResult {
    pub steps: Vec<AlgorithmStep>,
    pub d_star: usize,
    /// `prod 1 / n_k`.
    pub probability: f64,
    /// `prod n_k`, so the probability is exactly `1 / probability_denominator`.
    pub probability_denominator: u128,
}

impl ActivationOrderResult {
    fn from_steps(steps: Vec<AlgorithmStep>) -> Self {
        let d_star = steps.iter().map(|s| s.d_bar).max().unwrap_or(0);
        let probability_denominator = steps.iter().map(|s| s.n_k as u128).product();
        let probability = steps.iter().map(|s| 1.0 / s.n_k as f64).product();
        Self { steps, d_star, probability, probability_denominator }
    }

    /// V-nodes in activation order.
    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.chosen).collect()
    }

    pub fn d_bars(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.d_bar).collect()
    }
}

/// Residual graph bookkeeping shared by sampling and enumeration.
#[derive(Clone)]
struct Residual<'g> {
    graph: &'g BipartiteGraph,
    u_left: Vec<bool>,
    v_left: Vec<bool>,
}

impl<'g> Residual<'g> {
    fn new(graph: &'g BipartiteGraph) -> Self {
        Self { graph, u_left: vec![true; graph.m()], v_left: vec![true; graph.n()] }
    }

    fn degree(&self, v: usize) -> usize {
        (0..self.graph.m()).filter(|&u| self.u_left[u] && self.graph.has_edge(u, v)).count()
    }

    /// `(d_bar, candidates)` of the current residual graph.
    fn minimizers(&self) -> (usize, Vec<usize>) {
        let mut best = usize::MAX;
        let mut cands = Vec::new();
        for v in (0..self.graph.n()).filter(|&v| self.v_left[v]) {
            let d = self.degree(v);
            if d < best {
                best = d;
                cands.clear();
            }
            if d == best {
                cands.push(v);
            }
        }
        (best, cands)
    }

    fn remove(&mut self, v: usize) {
        self.v_left[v] = false;
        for u in 0..self.graph.m() {
            if self.graph.has_edge(u, v) {
                self.u_left[u] = false;
            }
        }
    }
}

/// Samples one admissible path.
pub fn run_algorithm<R: Rng + ?Sized>(graph: &BipartiteGraph, rng: &mut R) -> ActivationOrderResult {
    let mut residual = Residual::new(graph);
    let mut steps = Vec::with_capacity(graph.n());
    for k in 1..=graph.n() {
        let (d_bar, candidates) = residual.minimizers();
        let chosen = candidates[rng.random_range(0..candidates.len())];
        residual.remove(chosen);
        steps.push(AlgorithmStep { k, n_k: candidates.len(), candidates, d_bar, chosen });
    }
    ActivationOrderResult::from_steps(steps)
}

/// Every admissible path, by depth-first search over minimizer choices in
/// ascending node order.
pub fn enumerate_paths(graph: &BipartiteGraph) -> Result<Vec<ActivationOrderResult>> {
    if graph.n() > MAX_ENUMERATION_N {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration is limited to N <= {MAX_ENUMERATION_N} (got N = {}); sample paths with run_algorithm instead",
            graph.n()
        )));
    }
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(graph.n());
    dfs(Residual::new(graph), &mut steps, &mut out)?;
    Ok(out)
}

fn dfs(residual: Residual<'_>, steps: &mut Vec<AlgorithmStep>, out: &mut Vec<ActivationOrderResult>) -> Result<()> {
    if steps.len() == residual.graph.n() {
        if out.len() >= MAX_ENUMERATED_PATHS {
            return Err(Error::Capacity(format!(
                "more than {MAX_ENUMERATED_PATHS} admissible paths; sample paths with run_algorithm instead"
            )));
        }
        out.push(ActivationOrderResult::from_steps(steps.clone()));
        return Ok(());
    }
    let (d_bar, candidates) = residual.minimizers();
    for &chosen in &candidates {
        let mut next = residual.clone();
        next.remove(chosen);
        steps.push(AlgorithmStep {
            k: steps.len() + 1,
            candidates: candidates.clone(),
            d_bar,
            n_k: candidates.len(),
            chosen,
        });
        dfs(next, steps, out)?;
        steps.pop();
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Compares `beta` with `1 / (d* - 1)`; `d* <= 1` is subcritical for every
/// `beta`.
pub fn classify_regime(d_star: usize, beta: f64) -> Regime {
    if d_star <= 1 {
        return Regime::Subcritical;
    }
    let x = beta * (d_star - 1) as f64;
    if (x - 1.0).abs() <= REL_TOL {
        Regime::Critical
    } else if x < 1.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// Which case of the classification produced a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionCase {
    Static,
    FastDynamics,
    RegularDynamics,
    SlowCompetitive,
    SlowNonCompetitive,
}

/// Leading-order mean transition time `prefactor * r^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimePrediction {
    pub regime: Regime,
    pub case: PredictionCase,
    pub prefactor: f64,
    pub exponent: f64,
    /// The prediction is the U-queue drain time `T_U(r)`.
    pub uses_tu: bool,
    /// Only the order in `r` is predicted; `prefactor` is nominal.
    pub order_only: bool,
    /// The prediction evaluated at the `r` of the parameters it was built from.
    pub mean_prediction: f64,
}

impl RegimePrediction {
    fn new(regime: Regime, case: PredictionCase, prefactor: f64, exponent: f64, r: f64) -> Self {
        Self {
            regime,
            case,
            prefactor,
            exponent,
            uses_tu: false,
            order_only: false,
            mean_prediction: prefactor * r.powf(exponent),
        }
    }

    fn drain_time(regime: Regime, case: PredictionCase, params: &QueueParams) -> Result<Self> {
        let prefactor = expected_hitting_time_tu(&params.with_r(1.0))?;
        Ok(Self { uses_tu: true, ..Self::new(regime, case, prefactor, 1.0, params.r) })
    }

    pub fn at(&self, r: f64) -> f64 {
        self.prefactor * r.powf(self.exponent)
    }

    fn with_case(self, case: PredictionCase) -> Self {
        Self { case, ..self }
    }
}

/// Complete bipartite graph with `m` U-nodes and fixed rates.
pub fn predict_fixed_complete(m: usize, beta: f64, params: &QueueParams) -> Result<RegimePrediction> {
    if m == 0 {
        return Err(Error::Domain("complete-graph prediction needs m >= 1".into()));
    }
    let regime = classify_regime(m, beta);
    let inv_m = 1.0 / m as f64;
    let r = params.r;
    Ok(match regime {
        Regime::Subcritical => {
            RegimePrediction::new(regime, PredictionCase::Static, inv_m, beta * (m - 1) as f64, r)
        }
        Regime::Critical => RegimePrediction::new(regime, PredictionCase::Static, inv_m, 1.0, r),
        Regime::Supercritical => RegimePrediction::drain_time(regime, PredictionCase::Static, params)?,
    })
}

/// Per-path conditional predictions and their probability-weighted average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArbitraryPrediction {
    pub per_path: Vec<RegimePrediction>,
    pub weighted: RegimePrediction,
}

/// `sum_{k : d_k = d*} 1 / (n_k d*)` along one path; zero when `d* = 0`.
pub fn path_prefactor(path: &ActivationOrderResult) -> f64 {
    if path.d_star == 0 {
        return 0.0;
    }
    let d = path.d_star as f64;
    path.steps
        .iter()
        .filter(|s| s.d_bar == path.d_star)
        .map(|s| 1.0 / (s.n_k as f64 * d))
        .sum()
}

pub fn common_d_star(paths: &[ActivationOrderResult]) -> Result<usize> {
    let first = paths.first().ok_or_else(|| Error::Inconsistent("no admissible paths".into()))?;
    if let Some(p) = paths.iter().find(|p| p.d_star != first.d_star) {
        return Err(Error::Inconsistent(format!(
            "admissible paths disagree on d*: {} vs {}",
            first.d_star, p.d_star
        )));
    }
    Ok(first.d_star)
}

/// Arbitrary bipartite graph with fixed rates, from its admissible paths.
pub fn predict_fixed_arbitrary(
    paths: &[ActivationOrderResult],
    beta: f64,
    params: &QueueParams,
) -> Result<ArbitraryPrediction> {
    let d_star = common_d_star(paths)?;
    let regime = classify_regime(d_star, beta);
    let r = params.r;
    let exponent = if d_star == 0 { 0.0 } else { beta * (d_star as f64 - 1.0) };
    let tu = RegimePrediction::drain_time(regime, PredictionCase::Static, params);

    let per_path: Vec<RegimePrediction> = paths
        .iter()
        .map(|p| {
            let f = path_prefactor(p);
            match regime {
                Regime::Subcritical => Ok(RegimePrediction::new(regime, PredictionCase::Static, f, exponent, r)),
                Regime::Critical => {
                    let tu = tu.as_ref().map_err(|e| Error::Domain(e.to_string()))?;
                    if f >= tu.prefactor {
                        Ok(*tu)
                    } else {
                        Ok(RegimePrediction::new(regime, PredictionCase::Static, f, 1.0, r))
                    }
                }
                Regime::Supercritical => tu.as_ref().copied().map_err(|e| Error::Domain(e.to_string())),
            }
        })
        .collect::<Result<_>>()?;

    let weighted_prefactor: f64 = paths.iter().zip(&per_path).map(|(p, pr)| p.probability * pr.prefactor).sum();
    let first = per_path[0];
    let weighted = RegimePrediction {
        prefactor: weighted_prefactor,
        uses_tu: per_path.iter().all(|p| p.uses_tu),
        mean_prediction: weighted_prefactor * r.powf(first.exponent),
        ..first
    };
    Ok(ArbitraryPrediction { per_path, weighted })
}

/// Order of the mean transition time under edge dynamics. `static_prediction`
/// is what the frozen graph predicts (complete or arbitrary formula); it is
/// returned for static and slow non-competitive dynamics.
pub fn predict_dynamic(
    d_star: usize,
    beta: f64,
    dynamics: &Dynamics,
    params: &QueueParams,
    static_prediction: &RegimePrediction,
) -> Result<RegimePrediction> {
    let regime = classify_regime(d_star, beta);
    if static_prediction.regime != regime {
        return Err(Error::Classification(format!(
            "static prediction is {:?} but d* = {d_star}, beta = {beta} is {regime:?}",
            static_prediction.regime
        )));
    }
    let r = params.r;
    let order_only = |case, prefactor, exponent| RegimePrediction {
        order_only: true,
        ..RegimePrediction::new(regime, case, prefactor, exponent, r)
    };
    match *dynamics {
        Dynamics::Static => Ok(static_prediction.with_case(PredictionCase::Static)),
        Dynamics::Fast { exponent } => {
            if !(exponent > 0.0) {
                return Err(Error::Classification(format!("fast dynamics needs lambda(r) = r^a with a > 0, got a = {exponent}")));
            }
            Ok(order_only(PredictionCase::FastDynamics, 1.0, -exponent))
        }
        Dynamics::Regular { rate } => {
            if !(rate > 0.0) {
                return Err(Error::Classification(format!("regular dynamics needs lambda = C > 0, got C = {rate}")));
            }
            Ok(order_only(PredictionCase::RegularDynamics, 1.0 / rate, 0.0))
        }
        Dynamics::Slow { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::Classification(format!("slow dynamics needs lambda(r) = r^-alpha with alpha > 0, got {alpha}")));
            }
            let nucleation_scale = if d_star == 0 { 0.0 } else { beta * (d_star as f64 - 1.0) };
            let threshold = nucleation_scale.min(1.0);
            if regime == Regime::Supercritical && alpha > 1.0 {
                RegimePrediction::drain_time(regime, PredictionCase::SlowCompetitive, params)
            } else if alpha <= threshold * (1.0 + REL_TOL) {
                Ok(order_only(PredictionCase::SlowCompetitive, 1.0, alpha))
            } else {
                Ok(static_prediction.with_case(PredictionCase::SlowNonCompetitive))
            }
        }
    }
}

/// Largest `d >= 1` with `beta (d - 1) < alpha`.
pub fn d_hat(beta: f64, alpha: f64) -> Result<usize> {
    if !(beta > 0.0 && alpha > 0.0) || !beta.is_finite() || !alpha.is_finite() {
        return Err(Error::Domain(format!("d_hat needs beta > 0 and alpha > 0, got {beta}, {alpha}")));
    }
    let mut d = 1usize;
    while beta * (d as f64) < alpha {
        d += 1;
    }
    Ok(d)
}
