//! Exact event-driven simulation of the joint activity / queue / edge
//! process.
//!
//! Every stochastic clock is exponential and its rate is constant between
//! consecutive events: inactive nodes change queue length only at arrivals,
//! active nodes always carry deactivation rate 1, and every edge slot flips
//! at `lambda(r)`. The only deterministic events are queue-empty times of
//! active nodes, which are raced against the exponential delay.
//!
//! [`next_event`] races the full clock set, including activation clocks of
//! blocked nodes whose ticks are failed attempts. [`Engine`] can instead
//! leave those null clocks out of the race (`skip_null_attempts`). A failed
//! attempt is a self-loop of the Markov process, so removing it changes
//! neither the law of the trajectory nor the transition time; the number of
//! failed attempts is then drawn once, at the end, from a Poisson law with
//! mean equal to the integrated null rate. This is what makes V-rates of
//! order `r^2` tractable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ActivityState, BipartiteGraph, DynamicGraphState, FlipEffect, NodeId, Side};
use crate::queue::{activation_rate, arrive, initial_queue, QueueParams, RateFunctions};

/// Name of the generator behind every seeded stream, for output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;

/// Law of the edge flip rate `lambda(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Dynamics {
    Static,
    /// `lambda(r) = r^exponent`, exponent > 0.
    Fast { exponent: f64 },
    /// `lambda(r) = rate`.
    Regular { rate: f64 },
    /// `lambda(r) = r^-alpha`, alpha > 0.
    Slow { alpha: f64 },
}

impl Dynamics {
    pub fn edge_rate(&self, r: f64) -> f64 {
        match *self {
            Dynamics::Static => 0.0,
            Dynamics::Fast { exponent } => r.powf(exponent),
            Dynamics::Regular { rate } => rate,
            Dynamics::Slow { alpha } => r.powf(-alpha),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Dynamics::Static => true,
            Dynamics::Fast { exponent } => exponent.is_finite() && exponent > 0.0,
            Dynamics::Regular { rate } => rate.is_finite() && rate > 0.0,
            Dynamics::Slow { alpha } => alpha.is_finite() && alpha > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid dynamics {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub queues: QueueParams,
    pub rates: RateFunctions,
    pub dynamics: Dynamics,
    /// Active nodes switch off the moment their queue runs dry.
    pub deactivate_on_empty: bool,
}

impl ModelParams {
    pub fn r(&self) -> f64 {
        self.queues.r
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { queues: self.queues.with_r(r), ..self }
    }

    pub fn edge_rate(&self) -> f64 {
        self.dynamics.edge_rate(self.queues.r)
    }

    pub fn validate(&self) -> Result<()> {
        self.queues.validate()?;
        self.rates.validate()?;
        self.dynamics.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub max_events: u64,
    pub skip_null_attempts: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { max_events: DEFAULT_MAX_EVENTS, skip_null_attempts: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    ActivationAttempt(NodeId),
    Deactivation(NodeId),
    EdgeFlip(usize, usize),
    Arrival(NodeId),
    QueueEmpty(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub delay: f64,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Activated(NodeId),
    AttemptFailed(NodeId),
    Deactivated(NodeId),
    Flipped(FlipEffect),
    Arrived(NodeId),
    Emptied(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationCause {
    /// The node had no present edge when its clock ticked.
    Disconnection,
    /// The node had present edges, all to inactive neighbours.
    Nucleation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VActivation {
    pub time: f64,
    pub cause: ActivationCause,
    /// Degree at the activation instant.
    pub degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VActivityChange {
    pub time: f64,
    pub v: usize,
    pub active: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub activations: u64,
    pub failed_attempts: u64,
    pub deactivations: u64,
    pub edge_flips: u64,
    pub forced_deactivations: u64,
    pub arrivals: u64,
    pub queue_empty: u64,
}

impl EventCounts {
    /// Events simulated one by one (excludes Poisson-drawn failed attempts
    /// when those were skipped).
    pub fn total(&self) -> u64 {
        self.activations
            + self.failed_attempts
            + self.deactivations
            + self.edge_flips
            + self.arrivals
            + self.queue_empty
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub seed: u64,
    pub transition_time: f64,
    pub completed: bool,
    /// First activation of each V-node.
    pub v_activation: Vec<Option<VActivation>>,
    /// V-nodes in order of first activation.
    pub path: Vec<usize>,
    /// Every activity change of a V-node.
    pub history: Vec<VActivityChange>,
    pub event_counts: EventCounts,
    /// U-nodes still active when every V-node is active; only U-nodes the
    /// dynamics has isolated can be here.
    pub residual_active_u: Vec<usize>,
    pub initial_degree_v: Vec<usize>,
}

impl TransitionRecord {
    fn start(seed: u64, graph: &BipartiteGraph) -> Self {
        let n = graph.n();
        Self {
            seed,
            transition_time: 0.0,
            completed: false,
            v_activation: vec![None; n],
            path: Vec::with_capacity(n),
            history: Vec::new(),
            event_counts: EventCounts::default(),
            residual_active_u: Vec::new(),
            initial_degree_v: (0..n).map(|v| graph.deg_v(v)).collect(),
        }
    }

    /// The earliest V-activation.
    pub fn first_activation(&self) -> Option<&VActivation> {
        self.path.first().and_then(|&v| self.v_activation[v].as_ref())
    }

    pub fn max_first_activation_time(&self) -> Option<f64> {
        self.v_activation.iter().flatten().map(|a| a.time).reduce(f64::max)
    }

    pub fn v_deactivations(&self) -> usize {
        self.history.iter().filter(|c| !c.active).count()
    }
}

/// The `1_U` start: every U-node active with queue `gamma_u r`, every V-node
/// inactive with queue `gamma_v r`.
pub fn initial_state(graph: BipartiteGraph, params: &ModelParams) -> Result<DynamicGraphState> {
    let (m, n) = (graph.m(), graph.n());
    let mut queues = Vec::with_capacity(m + n);
    queues.extend((0..m).map(|_| initial_queue(Side::U, &params.queues)));
    queues.extend((0..n).map(|_| initial_queue(Side::V, &params.queues)));
    DynamicGraphState::new(graph, ActivityState::all_u(m, n), queues)
}

fn is_null_attempt(state: &DynamicGraphState, node: NodeId, params: &ModelParams) -> bool {
    state.active_degree_unchecked(node) > 0 || (params.deactivate_on_empty && state.queue(node).is_empty())
}

/// Sum of all clock rates: activation of inactive nodes, unit deactivation of
/// active nodes, `lambda(r)` per edge slot, and one arrival clock per node.
pub fn total_rate(state: &DynamicGraphState, params: &ModelParams) -> f64 {
    clock_rates(state, params, &|node| fresh_rate(state, node, params), true).0
}

fn fresh_rate(state: &DynamicGraphState, node: NodeId, params: &ModelParams) -> f64 {
    activation_rate(state.queue(node), node.side, &params.rates, params.r())
}

/// Returns `(race total, null activation total)`. With `include_null` the
/// null activation clocks are part of the race total as well.
fn clock_rates(
    state: &DynamicGraphState,
    params: &ModelParams,
    act_rate: &dyn Fn(NodeId) -> f64,
    include_null: bool,
) -> (f64, f64) {
    let (m, n) = (state.m(), state.n());
    let mut total = 0.0;
    let mut null = 0.0;
    for slot in 0..m + n {
        let node = state.node_at_slot(slot);
        if state.is_active(node) {
            total += 1.0;
        } else {
            let rate = act_rate(node);
            if is_null_attempt(state, node, params) {
                null += rate;
                if include_null {
                    total += rate;
                }
            } else {
                total += rate;
            }
        }
    }
    total += (m * n) as f64 * params.edge_rate();
    total += (m + n) as f64 * params.queues.arrival_rate;
    (total, null)
}

/// Chooses the clock at cumulative rate position `target` in the fixed
/// order: nodes (U then V), edge slots, arrivals.
fn select(
    state: &DynamicGraphState,
    params: &ModelParams,
    act_rate: &dyn Fn(NodeId) -> f64,
    include_null: bool,
    mut target: f64,
) -> EventKind {
    let (m, n) = (state.m(), state.n());
    let mut last_node = None;
    for slot in 0..m + n {
        let node = state.node_at_slot(slot);
        let (rate, kind) = if state.is_active(node) {
            (1.0, EventKind::Deactivation(node))
        } else if include_null || !is_null_attempt(state, node, params) {
            (act_rate(node), EventKind::ActivationAttempt(node))
        } else {
            continue;
        };
        if rate > 0.0 {
            if target < rate {
                return kind;
            }
            target -= rate;
            last_node = Some(kind);
        }
    }
    let slots = m * n;
    let lambda = params.edge_rate();
    let edge_total = slots as f64 * lambda;
    if edge_total > 0.0 {
        if target < edge_total {
            let i = ((target / lambda) as usize).min(slots - 1);
            return EventKind::EdgeFlip(i / n, i % n);
        }
        target -= edge_total;
    }
    let arrivals = (m + n) as f64 * params.queues.arrival_rate;
    if arrivals > 0.0 {
        let i = ((target / params.queues.arrival_rate) as usize).min(m + n - 1);
        return EventKind::Arrival(state.node_at_slot(i));
    }
    // Rounding pushed the target past the end: take the last positive clock.
    if edge_total > 0.0 {
        return EventKind::EdgeFlip(m - 1, n - 1);
    }
    last_node.expect("select called with zero total rate")
}

/// Earliest pending queue-empty time among active nodes.
fn next_queue_empty(state: &DynamicGraphState, params: &ModelParams) -> Option<(f64, NodeId)> {
    if !params.deactivate_on_empty {
        return None;
    }
    let c = params.queues.drain_speed;
    let mut best: Option<(f64, NodeId)> = None;
    for slot in 0..state.m() + state.n() {
        let node = state.node_at_slot(slot);
        if state.is_active(node) {
            let delay = state.queue(node).length / c;
            if best.is_none_or(|(d, _)| delay < d) {
                best = Some((delay, node));
            }
        }
    }
    best
}

fn unit_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1].
    -(1.0 - rng.random::<f64>()).ln()
}

fn race<R: Rng + ?Sized>(
    state: &DynamicGraphState,
    params: &ModelParams,
    act_rate: &dyn Fn(NodeId) -> f64,
    include_null: bool,
    rng: &mut R,
) -> Result<(Event, f64)> {
    let (total, null) = clock_rates(state, params, act_rate, include_null);
    let pending = next_queue_empty(state, params);
    if !(total > 0.0) && pending.is_none() {
        return Err(Error::Deadlock { time: state.clock });
    }
    let delay = if total > 0.0 { unit_exp(rng) / total } else { f64::INFINITY };
    if let Some((d, node)) = pending {
        if d <= delay {
            return Ok((Event { delay: d, kind: EventKind::QueueEmpty(node) }, null));
        }
    }
    let target = rng.random::<f64>() * total;
    let kind = select(state, params, act_rate, include_null, target);
    Ok((Event { delay, kind }, null))
}

/// Samples the next event from the full clock set, failed attempts included.
pub fn next_event<R: Rng + ?Sized>(state: &DynamicGraphState, params: &ModelParams, rng: &mut R) -> Result<Event> {
    race(state, params, &|node| fresh_rate(state, node, params), true, rng).map(|(e, _)| e)
}

/// Advances the clock by `event.delay`, drains active queues to the new time
/// and applies the event's effect.
pub fn apply_event<R: Rng + ?Sized>(
    state: &mut DynamicGraphState,
    event: &Event,
    params: &ModelParams,
    rng: &mut R,
) -> Result<Outcome> {
    if !(event.delay >= 0.0) || !event.delay.is_finite() {
        return Err(Error::Inconsistent(format!("invalid event delay {}", event.delay)));
    }
    let now = state.clock + event.delay;
    let c = params.queues.drain_speed;
    let active: Vec<bool> = (0..state.m() + state.n())
        .map(|slot| state.is_active(state.node_at_slot(slot)))
        .collect();
    for (q, on) in state.queues_mut().iter_mut().zip(active) {
        if on {
            q.length = (q.length - c * event.delay).max(0.0);
        }
        q.last_update = now;
    }
    state.clock = now;

    let mismatch = |what: &str| Err(Error::Inconsistent(format!("{what}: {:?}", event.kind)));
    match event.kind {
        EventKind::ActivationAttempt(node) => {
            state.graph().check_node(node)?;
            if state.is_active(node) {
                return mismatch("activation clock of an active node");
            }
            // Activating on an empty queue would be undone at the same
            // instant by the queue-empty rule.
            if params.deactivate_on_empty && state.queue(node).is_empty() {
                return Ok(Outcome::AttemptFailed(node));
            }
            if state.try_activate(node)? {
                Ok(Outcome::Activated(node))
            } else {
                Ok(Outcome::AttemptFailed(node))
            }
        }
        EventKind::Deactivation(node) => {
            if !state.deactivate(node)? {
                return mismatch("deactivation clock of an inactive node");
            }
            Ok(Outcome::Deactivated(node))
        }
        EventKind::EdgeFlip(u, v) => Ok(Outcome::Flipped(state.apply_edge_flip(u, v)?)),
        EventKind::Arrival(node) => {
            state.graph().check_node(node)?;
            let q = *state.queue(node);
            *state.queue_mut(node) = arrive(q, node.side, &params.queues, rng);
            Ok(Outcome::Arrived(node))
        }
        EventKind::QueueEmpty(node) => {
            state.graph().check_node(node)?;
            if !params.deactivate_on_empty || !state.is_active(node) {
                return mismatch("queue-empty event without an active draining node");
            }
            let q = state.queue_mut(node);
            if q.length > 1e-7 {
                return mismatch("queue-empty event on a nonempty queue");
            }
            q.length = 0.0;
            state.deactivate(node)?;
            Ok(Outcome::Emptied(node))
        }
    }
}

/// One replication of the transition from `1_U` to `1_V`.
pub struct Engine {
    state: DynamicGraphState,
    params: ModelParams,
    options: EngineOptions,
    rng: ChaCha8Rng,
    /// Activation rates by node slot; current for inactive nodes.
    act_rate: Vec<f64>,
    null_integral: f64,
    record: TransitionRecord,
}

impl Engine {
    pub fn new(graph: BipartiteGraph, params: ModelParams, seed: u64, options: EngineOptions) -> Result<Self> {
        params.validate()?;
        let record = TransitionRecord::start(seed, &graph);
        let state = initial_state(graph, &params)?;
        let act_rate = (0..state.m() + state.n())
            .map(|slot| fresh_rate(&state, state.node_at_slot(slot), &params))
            .collect();
        Ok(Self {
            state,
            params,
            options,
            rng: ChaCha8Rng::seed_from_u64(seed),
            act_rate,
            null_integral: 0.0,
            record,
        })
    }

    pub fn state(&self) -> &DynamicGraphState {
        &self.state
    }

    fn refresh_rate(&mut self, node: NodeId) {
        let slot = self.state.node_slot(node);
        self.act_rate[slot] = fresh_rate(&self.state, node, &self.params);
    }

    /// Simulates one event.
    pub fn step(&mut self) -> Result<Outcome> {
        let include_null = !self.options.skip_null_attempts;
        let (event, null_rate) = {
            let state = &self.state;
            let rates = &self.act_rate;
            let lookup = |node: NodeId| rates[state.node_slot(node)];
            race(state, &self.params, &lookup, include_null, &mut self.rng)?
        };
        if !include_null {
            self.null_integral += null_rate * event.delay;
        }
        let outcome = apply_event(&mut self.state, &event, &self.params, &mut self.rng)?;
        self.observe(outcome);
        Ok(outcome)
    }

    fn observe(&mut self, outcome: Outcome) {
        let now = self.state.clock;
        let counts = &mut self.record.event_counts;
        match outcome {
            Outcome::Activated(node) => {
                counts.activations += 1;
                if node.side == Side::V {
                    let degree = self.state.graph().deg_v(node.index);
                    debug_assert_eq!(self.state.active_degree_unchecked(node), 0);
                    let cause = if degree == 0 { ActivationCause::Disconnection } else { ActivationCause::Nucleation };
                    let v = node.index;
                    if self.record.v_activation[v].is_none() {
                        self.record.v_activation[v] = Some(VActivation { time: now, cause, degree });
                        self.record.path.push(v);
                    }
                    self.record.history.push(VActivityChange { time: now, v, active: true });
                }
            }
            Outcome::AttemptFailed(_) => counts.failed_attempts += 1,
            Outcome::Deactivated(node) | Outcome::Emptied(node) => {
                if matches!(outcome, Outcome::Emptied(_)) {
                    counts.queue_empty += 1;
                } else {
                    counts.deactivations += 1;
                }
                self.refresh_rate(node);
                if node.side == Side::V {
                    self.record.history.push(VActivityChange { time: now, v: node.index, active: false });
                }
            }
            Outcome::Flipped(fx) => {
                counts.edge_flips += 1;
                if fx.forced_deactivation {
                    counts.forced_deactivations += 1;
                    self.refresh_rate(NodeId::u(fx.edge.0));
                }
            }
            Outcome::Arrived(node) => {
                counts.arrivals += 1;
                self.refresh_rate(node);
            }
        }
    }

    fn finish(&mut self, completed: bool) {
        self.record.transition_time = self.state.clock;
        self.record.completed = completed;
        self.record.residual_active_u =
            (0..self.state.m()).filter(|&u| self.state.activity().active_u[u]).collect();
        if self.null_integral > 0.0 {
            // Poisson is only defined up to a finite mean; beyond it the
            // count is the rounded mean to well below one part in 1e9.
            let drawn = Poisson::new(self.null_integral)
                .map(|p| p.sample(&mut self.rng))
                .unwrap_or(self.null_integral.round());
            self.record.event_counts.failed_attempts += drawn as u64;
            self.null_integral = 0.0;
        }
    }

    /// Runs until every V-node is active.
    pub fn run(mut self) -> Result<TransitionRecord> {
        let mut events = 0u64;
        while !self.state.is_transition_complete() {
            if events >= self.options.max_events {
                self.finish(false);
                return Err(Error::Timeout { cap: self.options.max_events, partial: Box::new(self.record) });
            }
            self.step()?;
            events += 1;
        }
        self.finish(true);
        Ok(self.record)
    }
}

pub fn run_transition(graph: &BipartiteGraph, params: &ModelParams, seed: u64) -> Result<TransitionRecord> {
    run_transition_with(graph, params, seed, EngineOptions::default())
}

pub fn run_transition_with(
    graph: &BipartiteGraph,
    params: &ModelParams,
    seed: u64,
    options: EngineOptions,
) -> Result<TransitionRecord> {
    Engine::new(graph.clone(), *params, seed, options)?.run()
}

/// First time all `present.len()` potential edges of one V-node are
/// simultaneously absent, simulating each edge clock individually.
pub fn sample_disconnection<R: Rng + ?Sized>(present: &[bool], lambda: f64, rng: &mut R) -> f64 {
    let m = present.len();
    let mut edges = present.to_vec();
    let mut degree = edges.iter().filter(|&&p| p).count();
    if degree == 0 {
        return 0.0;
    }
    if !(lambda > 0.0) {
        return f64::INFINITY;
    }
    let rate = m as f64 * lambda;
    let mut t = 0.0;
    while degree > 0 {
        t += unit_exp(rng) / rate;
        let e = rng.random_range(0..m);
        edges[e] = !edges[e];
        if edges[e] {
            degree += 1;
        } else {
            degree -= 1;
        }
    }
    t
}

/// Disconnection time of V-node `v` under the edge dynamics alone, started
/// from `graph`'s edge set.
pub fn measure_disconnection(graph: &BipartiteGraph, v: usize, params: &ModelParams, seed: u64) -> Result<f64> {
    graph.check_node(NodeId::v(v))?;
    let present: Vec<bool> = (0..graph.m()).map(|u| graph.has_edge(u, v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_disconnection(&present, params.edge_rate(), &mut rng))
}
