//! Bipartite interference graphs, activity states and the mutation
//! primitives the engine is built on.
//!
//! The edge set is a dense `m x n` presence bitmap. Degrees and active
//! degrees are maintained incrementally; [`DynamicGraphState::check_invariants`]
//! recomputes everything from scratch and is run after every mutation in
//! debug builds.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::queue::QueueState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// A node of the bipartite graph, written `u3` / `v1` in external formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub side: Side,
    pub index: usize,
}

impl NodeId {
    pub const fn u(index: usize) -> Self {
        Self { side: Side::U, index }
    }

    pub const fn v(index: usize) -> Self {
        Self { side: Side::V, index }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::U => write!(f, "u{}", self.index),
            Side::V => write!(f, "v{}", self.index),
        }
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidNode(s.to_string());
        let (side, rest) = match s.as_bytes().first() {
            Some(b'u') => (Side::U, &s[1..]),
            Some(b'v') => (Side::V, &s[1..]),
            _ => return Err(bad()),
        };
        let index = rest.parse().map_err(|_| bad())?;
        Ok(Self { side, index })
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bipartite graph on `U = {0..m}` and `V = {0..n}` with edges drawn from
/// the complete set `U x V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    m: usize,
    n: usize,
    present: Vec<bool>,
    deg_u: Vec<usize>,
    deg_v: Vec<usize>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn empty(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            present: vec![false; m * n],
            deg_u: vec![0; m],
            deg_v: vec![0; n],
            edge_count: 0,
        }
    }

    pub fn complete(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            present: vec![true; m * n],
            deg_u: vec![n; m],
            deg_v: vec![m; n],
            edge_count: m * n,
        }
    }

    /// Builds a graph from an explicit edge list. Duplicates are rejected.
    pub fn from_edges(m: usize, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(m, n);
        for &(u, v) in edges {
            g.check_edge(u, v)?;
            if g.has_edge(u, v) {
                return Err(Error::DuplicateEdge { u, v });
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    /// Each of the `m * n` edges is present independently with probability `p`.
    pub fn random(m: usize, n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!("edge probability {p} not in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::empty(m, n);
        for u in 0..m {
            for v in 0..n {
                if rng.random::<f64>() < p {
                    g.set_edge(u, v, true);
                }
            }
        }
        Ok(g)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.present[u * self.n + v]
    }

    pub fn check_edge(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.m || v >= self.n {
            return Err(Error::InvalidEdge { u, v, m: self.m, n: self.n });
        }
        Ok(())
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        let bound = match node.side {
            Side::U => self.m,
            Side::V => self.n,
        };
        if node.index >= bound {
            return Err(Error::InvalidNode(node.to_string()));
        }
        Ok(())
    }

    /// Present edges in row-major `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| (i / n, i % n))
    }

    pub fn neighbors(&self, node: NodeId) -> Vec<usize> {
        match node.side {
            Side::U => (0..self.n).filter(|&v| self.has_edge(node.index, v)).collect(),
            Side::V => (0..self.m).filter(|&u| self.has_edge(u, node.index)).collect(),
        }
    }

    pub fn degree(&self, node: NodeId) -> Result<usize> {
        self.check_node(node)?;
        Ok(match node.side {
            Side::U => self.deg_u[node.index],
            Side::V => self.deg_v[node.index],
        })
    }

    pub fn deg_u(&self, u: usize) -> usize {
        self.deg_u[u]
    }

    pub fn deg_v(&self, v: usize) -> usize {
        self.deg_v[v]
    }

    fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        let slot = &mut self.present[u * self.n + v];
        if *slot == on {
            return;
        }
        *slot = on;
        if on {
            self.deg_u[u] += 1;
            self.deg_v[v] += 1;
            self.edge_count += 1;
        } else {
            self.deg_u[u] -= 1;
            self.deg_v[v] -= 1;
            self.edge_count -= 1;
        }
    }
}

/// Activity bits for both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityState {
    pub active_u: Vec<bool>,
    pub active_v: Vec<bool>,
}

impl ActivityState {
    /// `1_U`: every U-node active, every V-node inactive.
    pub fn all_u(m: usize, n: usize) -> Self {
        Self { active_u: vec![true; m], active_v: vec![false; n] }
    }

    /// `1_V`: every V-node active, every U-node inactive.
    pub fn all_v(m: usize, n: usize) -> Self {
        Self { active_u: vec![false; m], active_v: vec![true; n] }
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        match node.side {
            Side::U => self.active_u[node.index],
            Side::V => self.active_v[node.index],
        }
    }

    /// First present edge joining two active nodes, if any.
    pub fn conflict(&self, graph: &BipartiteGraph) -> Option<(usize, usize)> {
        graph.edges().find(|&(u, v)| self.active_u[u] && self.active_v[v])
    }
}

/// The two endpoint states of a flipped edge, U first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlipScenario {
    AppearInactiveInactive,
    AppearInactiveActive,
    AppearActiveInactive,
    AppearActiveActive,
    DisappearInactiveInactive,
    DisappearInactiveActive,
    DisappearActiveInactive,
}

impl FlipScenario {
    pub fn appeared(self) -> bool {
        matches!(
            self,
            Self::AppearInactiveInactive
                | Self::AppearInactiveActive
                | Self::AppearActiveInactive
                | Self::AppearActiveActive
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipEffect {
    pub edge: (usize, usize),
    pub scenario: FlipScenario,
    /// The U-endpoint was switched off because the edge appeared between two
    /// active nodes.
    pub forced_deactivation: bool,
}

/// Full state of the joint process: edges, activities, queues and clock.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicGraphState {
    graph: BipartiteGraph,
    activity: ActivityState,
    adeg_u: Vec<usize>,
    adeg_v: Vec<usize>,
    active_u_count: usize,
    active_v_count: usize,
    /// U-nodes first, then V-nodes.
    queues: Vec<QueueState>,
    pub clock: f64,
}

impl DynamicGraphState {
    pub fn new(graph: BipartiteGraph, activity: ActivityState, queues: Vec<QueueState>) -> Result<Self> {
        let (m, n) = (graph.m(), graph.n());
        if activity.active_u.len() != m || activity.active_v.len() != n {
            return Err(Error::InvalidParams("activity vector sizes do not match graph".into()));
        }
        if queues.len() != m + n {
            return Err(Error::InvalidParams(format!("expected {} queues, got {}", m + n, queues.len())));
        }
        if let Some(q) = queues.iter().find(|q| !(q.length >= 0.0)) {
            return Err(Error::InvalidParams(format!("negative queue length {}", q.length)));
        }
        if let Some((u, v)) = activity.conflict(&graph) {
            return Err(Error::Infeasible { u, v });
        }
        let mut state = Self {
            adeg_u: vec![0; m],
            adeg_v: vec![0; n],
            active_u_count: activity.active_u.iter().filter(|&&a| a).count(),
            active_v_count: activity.active_v.iter().filter(|&&a| a).count(),
            graph,
            activity,
            queues,
            clock: 0.0,
        };
        state.recount_active_degrees();
        Ok(state)
    }

    /// Graph with zero queues, handy for tests and pure graph work.
    pub fn with_empty_queues(graph: BipartiteGraph, activity: ActivityState) -> Result<Self> {
        let k = graph.m() + graph.n();
        Self::new(graph, activity, vec![QueueState::default(); k])
    }

    fn recount_active_degrees(&mut self) {
        let (adeg_u, adeg_v) = active_degrees_from_scratch(&self.graph, &self.activity);
        self.adeg_u = adeg_u;
        self.adeg_v = adeg_v;
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn activity(&self) -> &ActivityState {
        &self.activity
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn degree(&self, node: NodeId) -> Result<usize> {
        self.graph.degree(node)
    }

    pub fn active_degree(&self, node: NodeId) -> Result<usize> {
        self.graph.check_node(node)?;
        Ok(self.active_degree_unchecked(node))
    }

    pub(crate) fn active_degree_unchecked(&self, node: NodeId) -> usize {
        match node.side {
            Side::U => self.adeg_u[node.index],
            Side::V => self.adeg_v[node.index],
        }
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        self.activity.is_active(node)
    }

    /// `(h, k, l)`: active U-nodes, active V-nodes, present edges.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.active_u_count, self.active_v_count, self.graph.edge_count())
    }

    pub fn node_slot(&self, node: NodeId) -> usize {
        match node.side {
            Side::U => node.index,
            Side::V => self.graph.m() + node.index,
        }
    }

    pub fn node_at_slot(&self, slot: usize) -> NodeId {
        if slot < self.graph.m() {
            NodeId::u(slot)
        } else {
            NodeId::v(slot - self.graph.m())
        }
    }

    pub fn queue(&self, node: NodeId) -> &QueueState {
        &self.queues[self.node_slot(node)]
    }

    pub fn queue_mut(&mut self, node: NodeId) -> &mut QueueState {
        let slot = self.node_slot(node);
        &mut self.queues[slot]
    }

    pub fn queues(&self) -> &[QueueState] {
        &self.queues
    }

    pub(crate) fn queues_mut(&mut self) -> &mut [QueueState] {
        &mut self.queues
    }

    /// Activates `node` if it is inactive and none of its neighbours across
    /// present edges is active. Returns whether the activation happened.
    pub fn try_activate(&mut self, node: NodeId) -> Result<bool> {
        self.graph.check_node(node)?;
        if self.is_active(node) || self.active_degree_unchecked(node) > 0 {
            return Ok(false);
        }
        self.set_activity(node, true);
        Ok(true)
    }

    /// Deactivates `node`. Returns whether it was active.
    pub fn deactivate(&mut self, node: NodeId) -> Result<bool> {
        self.graph.check_node(node)?;
        if !self.is_active(node) {
            return Ok(false);
        }
        self.set_activity(node, false);
        Ok(true)
    }

    fn set_activity(&mut self, node: NodeId, on: bool) {
        let (m, n) = (self.graph.m(), self.graph.n());
        match node.side {
            Side::U => {
                let u = node.index;
                self.activity.active_u[u] = on;
                for v in 0..n {
                    if self.graph.has_edge(u, v) {
                        bump(&mut self.adeg_v[v], on);
                    }
                }
                bump(&mut self.active_u_count, on);
            }
            Side::V => {
                let v = node.index;
                self.activity.active_v[v] = on;
                for u in 0..m {
                    if self.graph.has_edge(u, v) {
                        bump(&mut self.adeg_u[u], on);
                    }
                }
                bump(&mut self.active_v_count, on);
            }
        }
        self.debug_check();
    }

    /// Toggles the presence of edge `(u, v)` and applies the endpoint rules:
    /// an edge appearing between two active nodes switches the U-endpoint
    /// off; every other flip only changes degree bookkeeping.
    pub fn apply_edge_flip(&mut self, u: usize, v: usize) -> Result<FlipEffect> {
        self.graph.check_edge(u, v)?;
        let au = self.activity.active_u[u];
        let av = self.activity.active_v[v];
        let appearing = !self.graph.has_edge(u, v);
        let scenario = match (appearing, au, av) {
            (true, false, false) => FlipScenario::AppearInactiveInactive,
            (true, false, true) => FlipScenario::AppearInactiveActive,
            (true, true, false) => FlipScenario::AppearActiveInactive,
            (true, true, true) => FlipScenario::AppearActiveActive,
            (false, false, false) => FlipScenario::DisappearInactiveInactive,
            (false, false, true) => FlipScenario::DisappearInactiveActive,
            (false, true, false) => FlipScenario::DisappearActiveInactive,
            (false, true, true) => return Err(Error::Infeasible { u, v }),
        };
        let forced = scenario == FlipScenario::AppearActiveActive;
        if forced {
            self.set_activity(NodeId::u(u), false);
        }
        // Endpoint activities are final here; only the counters of the two
        // endpoints see the new edge.
        let au = self.activity.active_u[u];
        self.graph.set_edge(u, v, appearing);
        if av {
            bump(&mut self.adeg_u[u], appearing);
        }
        if au {
            bump(&mut self.adeg_v[v], appearing);
        }
        self.debug_check();
        Ok(FlipEffect { edge: (u, v), scenario, forced_deactivation: forced })
    }

    /// True iff every V-node is active.
    pub fn is_transition_complete(&self) -> bool {
        self.active_v_count == self.graph.n()
    }

    /// Recomputes every derived counter from scratch and checks feasibility.
    pub fn check_invariants(&self) -> Result<()> {
        if let Some((u, v)) = self.activity.conflict(&self.graph) {
            return Err(Error::Infeasible { u, v });
        }
        let (adeg_u, adeg_v) = active_degrees_from_scratch(&self.graph, &self.activity);
        if adeg_u != self.adeg_u || adeg_v != self.adeg_v {
            return Err(Error::Inconsistent("active-degree counters drifted".into()));
        }
        let g = &self.graph;
        let deg_ok = (0..g.m()).all(|u| g.deg_u[u] == (0..g.n()).filter(|&v| g.has_edge(u, v)).count())
            && (0..g.n()).all(|v| g.deg_v[v] == (0..g.m()).filter(|&u| g.has_edge(u, v)).count())
            && g.edge_count == g.present.iter().filter(|&&p| p).count();
        if !deg_ok {
            return Err(Error::Inconsistent("degree counters drifted".into()));
        }
        let h = self.activity.active_u.iter().filter(|&&a| a).count();
        let k = self.activity.active_v.iter().filter(|&&a| a).count();
        if h != self.active_u_count || k != self.active_v_count {
            return Err(Error::Inconsistent("activity counters drifted".into()));
        }
        if self.queues.iter().any(|q| !(q.length >= 0.0)) {
            return Err(Error::Inconsistent("negative queue length".into()));
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if let Err(e) = self.check_invariants() {
            panic!("state invariant violated: {e}");
        }
    }
}

fn bump(counter: &mut usize, up: bool) {
    if up {
        *counter += 1;
    } else {
        *counter -= 1;
    }
}

fn active_degrees_from_scratch(graph: &BipartiteGraph, activity: &ActivityState) -> (Vec<usize>, Vec<usize>) {
    let mut adeg_u = vec![0; graph.m()];
    let mut adeg_v = vec![0; graph.n()];
    for (u, v) in graph.edges() {
        if activity.active_v[v] {
            adeg_u[u] += 1;
        }
        if activity.active_u[u] {
            adeg_v[v] += 1;
        }
    }
    (adeg_u, adeg_v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(graph: BipartiteGraph, activity: ActivityState) -> DynamicGraphState {
        DynamicGraphState::with_empty_queues(graph, activity).unwrap()
    }

    #[test]
    fn degrees() {
        let k22 = state(BipartiteGraph::complete(2, 2), ActivityState::all_u(2, 2));
        assert_eq!(k22.degree(NodeId::v(0)).unwrap(), 2);
        assert_eq!(k22.degree(NodeId::v(1)).unwrap(), 2);

        let empty = state(BipartiteGraph::empty(3, 2), ActivityState::all_u(3, 2));
        assert_eq!(empty.degree(NodeId::u(2)).unwrap(), 0);
        assert_eq!(empty.degree(NodeId::v(1)).unwrap(), 0);

        let g = BipartiteGraph::from_edges(2, 2, &[(0, 0), (0, 1)]).unwrap();
        let s = state(g, ActivityState::all_u(2, 2));
        assert_eq!(s.degree(NodeId::u(0)).unwrap(), 2);
        assert_eq!(s.degree(NodeId::u(1)).unwrap(), 0);
    }

    #[test]
    fn invalid_node_is_rejected() {
        let s = state(BipartiteGraph::complete(2, 2), ActivityState::all_u(2, 2));
        assert!(matches!(s.degree(NodeId::v(2)), Err(Error::InvalidNode(_))));
        assert!(matches!(s.active_degree(NodeId::u(7)), Err(Error::InvalidNode(_))));
    }

    #[test]
    fn active_degrees() {
        let s = state(BipartiteGraph::complete(2, 2), ActivityState::all_u(2, 2));
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 2);
        assert_eq!(s.active_degree(NodeId::v(1)).unwrap(), 2);

        let s = state(BipartiteGraph::complete(2, 2), ActivityState::all_v(2, 2));
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 0);

        let g = BipartiteGraph::from_edges(1, 1, &[(0, 0)]).unwrap();
        let s = state(g, ActivityState::all_u(1, 1));
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 1);
        assert_eq!(s.active_degree(NodeId::u(0)).unwrap(), 0);
    }

    #[test]
    fn appear_between_two_active_nodes_deactivates_u() {
        let act = ActivityState { active_u: vec![true], active_v: vec![true] };
        let mut s = state(BipartiteGraph::empty(1, 1), act);
        let fx = s.apply_edge_flip(0, 0).unwrap();
        assert_eq!(fx.scenario, FlipScenario::AppearActiveActive);
        assert!(fx.forced_deactivation);
        assert!(!s.is_active(NodeId::u(0)));
        assert!(s.is_active(NodeId::v(0)));
        assert_eq!(s.active_degree(NodeId::u(0)).unwrap(), 1);
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 0);
    }

    #[test]
    fn disappear_keeps_activities() {
        let g = BipartiteGraph::from_edges(1, 1, &[(0, 0)]).unwrap();
        let mut s = state(g, ActivityState::all_u(1, 1));
        let fx = s.apply_edge_flip(0, 0).unwrap();
        assert_eq!(fx.scenario, FlipScenario::DisappearActiveInactive);
        assert!(!fx.forced_deactivation);
        assert!(s.is_active(NodeId::u(0)));
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 0);
        assert_eq!(s.degree(NodeId::v(0)).unwrap(), 0);
    }

    #[test]
    fn appear_between_inactive_nodes() {
        let act = ActivityState { active_u: vec![false], active_v: vec![false] };
        let mut s = state(BipartiteGraph::empty(1, 1), act);
        let fx = s.apply_edge_flip(0, 0).unwrap();
        assert_eq!(fx.scenario, FlipScenario::AppearInactiveInactive);
        assert!(s.graph().has_edge(0, 0));
        assert_eq!(s.counts(), (0, 0, 1));
    }

    #[test]
    fn all_seven_scenarios_are_reachable() {
        use FlipScenario::*;
        let cases = [
            (false, false, false, AppearInactiveInactive),
            (false, false, true, AppearInactiveActive),
            (false, true, false, AppearActiveInactive),
            (false, true, true, AppearActiveActive),
            (true, false, false, DisappearInactiveInactive),
            (true, false, true, DisappearInactiveActive),
            (true, true, false, DisappearActiveInactive),
        ];
        for (present, au, av, expected) in cases {
            let g = if present { BipartiteGraph::complete(1, 1) } else { BipartiteGraph::empty(1, 1) };
            let act = ActivityState { active_u: vec![au], active_v: vec![av] };
            let mut s = state(g, act);
            assert_eq!(s.apply_edge_flip(0, 0).unwrap().scenario, expected);
            assert_eq!(expected.appeared(), !present);
            s.check_invariants().unwrap();
        }
    }

    #[test]
    fn transition_completion() {
        let s = state(BipartiteGraph::complete(2, 2), ActivityState::all_v(2, 2));
        assert!(s.is_transition_complete());
        let s = state(BipartiteGraph::complete(2, 2), ActivityState::all_u(2, 2));
        assert!(!s.is_transition_complete());
        // u1 has no present edge, so it may stay active next to 1_V.
        let g = BipartiteGraph::from_edges(2, 2, &[(0, 0), (0, 1)]).unwrap();
        let act = ActivityState { active_u: vec![false, true], active_v: vec![true, true] };
        assert!(state(g, act).is_transition_complete());
    }

    #[test]
    fn infeasible_initial_state_is_rejected() {
        let act = ActivityState { active_u: vec![true], active_v: vec![true] };
        let err = DynamicGraphState::with_empty_queues(BipartiteGraph::complete(1, 1), act).unwrap_err();
        assert!(matches!(err, Error::Infeasible { u: 0, v: 0 }));
    }

    #[test]
    fn activation_respects_hard_core_constraint() {
        let mut s = state(BipartiteGraph::complete(2, 2), ActivityState::all_u(2, 2));
        assert!(!s.try_activate(NodeId::v(0)).unwrap());
        s.deactivate(NodeId::u(0)).unwrap();
        assert_eq!(s.active_degree(NodeId::v(0)).unwrap(), 1);
        assert_eq!(s.active_degree(NodeId::v(1)).unwrap(), 1);
        assert!(!s.try_activate(NodeId::v(0)).unwrap());
        s.deactivate(NodeId::u(1)).unwrap();
        assert!(s.try_activate(NodeId::v(0)).unwrap());
        assert_eq!(s.active_degree(NodeId::u(0)).unwrap(), 1);
    }

    #[test]
    fn node_labels_round_trip() {
        for label in ["u0", "u13", "v1"] {
            assert_eq!(label.parse::<NodeId>().unwrap().to_string(), label);
        }
        assert!("w1".parse::<NodeId>().is_err());
        assert!("u".parse::<NodeId>().is_err());
    }

    #[test]
    fn duplicate_and_out_of_range_edges() {
        assert!(matches!(
            BipartiteGraph::from_edges(2, 2, &[(0, 0), (0, 0)]),
            Err(Error::DuplicateEdge { u: 0, v: 0 })
        ));
        assert!(matches!(BipartiteGraph::from_edges(2, 2, &[(2, 0)]), Err(Error::InvalidEdge { .. })));
    }

    #[test]
    fn random_topology_is_seeded() {
        let a = BipartiteGraph::random(6, 5, 0.4, 11).unwrap();
        let b = BipartiteGraph::random(6, 5, 0.4, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(BipartiteGraph::random(3, 3, 1.0, 0).unwrap(), BipartiteGraph::complete(3, 3));
        assert_eq!(BipartiteGraph::random(3, 3, 0.0, 0).unwrap().edge_count(), 0);
    }
}
