//! Queue-based random access on dynamic bipartite interference graphs.
//!
//! U-nodes start active with long queues; V-nodes start inactive and far more
//! aggressive. The crate simulates the transition until every V-node is
//! active, and provides the matching analytics: edge-disconnection times,
//! the greedy activation order and leading-order predictions of the mean
//! transition time.

pub mod activation;
pub mod disconnection;
pub mod engine;
pub mod error;
pub mod graph;
pub mod queue;

pub use activation::{
    classify_regime, d_hat, enumerate_paths, predict_dynamic, predict_fixed_arbitrary, predict_fixed_complete,
    run_algorithm, ActivationOrderResult, AlgorithmStep, ArbitraryPrediction, PredictionCase, Regime,
    RegimePrediction,
};
pub use disconnection::{
    disconnection_coefficient, hitting_time_system, mean_disconnection_time, BirthDeathChain, PhaseTypeDist,
};
pub use engine::{
    run_transition, run_transition_with, Dynamics, Engine, EngineOptions, ModelParams, TransitionRecord,
    RNG_ALGORITHM,
};
pub use error::{Error, Result};
pub use graph::{ActivityState, BipartiteGraph, DynamicGraphState, FlipScenario, NodeId, Side};
pub use queue::{QueueParams, QueueState, RateFunctions, RateMode};
