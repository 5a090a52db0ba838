//! Simulation against theory.

use edgeflip::{PredictionCase, Regime, RNG_ALGORITHM};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::stats::ExponentFit;
use crate::sweep::SweepResult;
use crate::theory::ExpectedCause;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub r: f64,
    pub mean: f64,
    pub std_err: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub path_weighted_predicted: f64,
    pub path_weighted_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauseRow {
    pub r: f64,
    pub disconnection_fraction: Option<f64>,
    pub reduced_degree_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauseReport {
    pub expected: ExpectedCause,
    pub rows: Vec<CauseRow>,
    /// The fraction moves towards the expected limit between the smallest
    /// and largest `r`; `None` when no limit is predicted.
    pub trend_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub rng: String,
    pub seeding: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng: RNG_ALGORITHM.into(),
            seeding: "splitmix64(master seed, r index, replication index)".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub d_star: usize,
    pub regime: Regime,
    pub case: PredictionCase,
    pub order_only: bool,
    pub uses_tu: bool,
    pub admissible_paths: Option<usize>,
    pub rows: Vec<RatioRow>,
    pub fit: Option<ExponentFit>,
    pub predicted_exponent: f64,
    pub exponent_delta: Option<f64>,
    /// max / min of `ratio` over the grid.
    pub ratio_drift: f64,
    pub causes: CauseReport,
    /// Disagreements beyond the configured tolerances.
    pub flags: Vec<String>,
}

pub fn cause_fractions(sweep: &SweepResult) -> CauseReport {
    let rows: Vec<CauseRow> = sweep
        .points
        .iter()
        .map(|p| CauseRow {
            r: p.r,
            disconnection_fraction: p.disconnection_fraction,
            reduced_degree_fraction: p.reduced_degree_fraction,
        })
        .collect();
    let expected = sweep.theory.expected_cause;
    let ends = rows.first().and_then(|a| Some((a.disconnection_fraction?, rows.last()?.disconnection_fraction?)));
    let trend_ok = match (expected, ends) {
        (ExpectedCause::Disconnection, Some((first, last))) => Some(last >= first),
        (ExpectedCause::Nucleation, Some((first, last))) => Some(last <= first),
        _ => None,
    };
    CauseReport { expected, rows, trend_ok }
}

pub fn compare_theory(sweep: &SweepResult) -> TheoryReport {
    let tol = sweep.config.tolerances;
    let rows: Vec<RatioRow> = sweep
        .points
        .iter()
        .zip(&sweep.theory.points)
        .map(|(p, t)| RatioRow {
            r: p.r,
            mean: p.mean,
            std_err: p.std_err,
            predicted: p.predicted,
            ratio: p.ratio,
            path_weighted_predicted: t.path_weighted.mean_prediction,
            path_weighted_ratio: p.mean / t.path_weighted.mean_prediction,
        })
        .collect();
    let last = sweep.theory.points.last().expect("grid is nonempty").primary;
    let exponent_delta = sweep.fit.map(|f| f.slope - last.exponent);
    let (lo, hi) = rows
        .iter()
        .map(|x| x.ratio)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let ratio_drift = hi / lo;

    let mut flags = Vec::new();
    if let Some(delta) = exponent_delta {
        if delta.abs() > tol.exponent {
            flags.push(format!(
                "fitted exponent differs from the predicted {} by {delta:.3} (tolerance {})",
                last.exponent, tol.exponent
            ));
        }
    }
    if !(ratio_drift <= tol.ratio_drift) {
        flags.push(format!("mean / prediction drifts by a factor {ratio_drift:.3} (tolerance {})", tol.ratio_drift));
    }
    let causes = cause_fractions(sweep);
    if causes.trend_ok == Some(false) {
        flags.push(format!("cause fractions move away from the expected {:?} limit", causes.expected));
    }

    TheoryReport {
        metadata: Metadata::default(),
        config: sweep.config.clone(),
        d_star: sweep.theory.d_star,
        regime: sweep.theory.regime,
        case: last.case,
        order_only: last.order_only,
        uses_tu: last.uses_tu,
        admissible_paths: sweep.theory.admissible_paths,
        rows,
        fit: sweep.fit,
        predicted_exponent: last.exponent,
        exponent_delta,
        ratio_drift,
        causes,
        flags,
    }
}
