use thiserror::Error;

use crate::engine::TransitionRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid node {0}")]
    InvalidNode(String),

    #[error("invalid edge ({u}, {v}) for a {m}x{n} bipartite graph")]
    InvalidEdge { u: usize, v: usize, m: usize, n: usize },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible activity state: edge ({u}, {v}) joins two active nodes")]
    Infeasible { u: usize, v: usize },

    #[error("deadlock at t = {time}: no clock can tick and no deterministic event is pending")]
    Deadlock { time: f64 },

    #[error("event cap of {cap} exceeded at t = {}", partial.transition_time)]
    Timeout {
        cap: u64,
        partial: Box<TransitionRecord>,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("classification error: {0}")]
    Classification(String),
}
