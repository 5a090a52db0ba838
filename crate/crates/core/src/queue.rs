//! Queue lengths and activation-rate functions.
//!
//! Work arrives as a compound Poisson process (rate `arrival_rate`,
//! exponential job sizes) and is drained at speed `drain_speed` while the
//! node is active. The length is kept by the reflected recursion
//! `q <- max(q - c * dt, 0)` between arrivals, which is pathwise equal to the
//! running-supremum formula over the full workload history.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Side;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueParams {
    /// Packet arrival rate per node.
    pub arrival_rate: f64,
    /// Mean work per packet at U-nodes.
    pub mean_service_u: f64,
    /// Mean work per packet at V-nodes.
    pub mean_service_v: f64,
    /// Work drained per unit time while active.
    pub drain_speed: f64,
    pub gamma_u: f64,
    pub gamma_v: f64,
    /// Scale parameter; initial queues are `gamma * r`.
    pub r: f64,
}

impl Default for QueueParams {
    fn default() -> Self {
        Self {
            arrival_rate: 0.5,
            mean_service_u: 1.0,
            mean_service_v: 1.0,
            drain_speed: 1.0,
            gamma_u: 1.0,
            gamma_v: 1.0,
            r: 100.0,
        }
    }
}

impl QueueParams {
    pub fn mean_service(&self, side: Side) -> f64 {
        match side {
            Side::U => self.mean_service_u,
            Side::V => self.mean_service_v,
        }
    }

    /// Offered load `arrival_rate * mean_service` of one node.
    pub fn load(&self, side: Side) -> f64 {
        self.arrival_rate * self.mean_service(side)
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.arrival_rate,
            self.mean_service_u,
            self.mean_service_v,
            self.drain_speed,
            self.gamma_u,
            self.gamma_v,
            self.r,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("queue parameters must be finite".into()));
        }
        if self.arrival_rate < 0.0 || self.r < 0.0 {
            return Err(Error::InvalidParams("arrival rate and r must be nonnegative".into()));
        }
        if self.mean_service_u <= 0.0 || self.mean_service_v <= 0.0 || self.drain_speed <= 0.0 {
            return Err(Error::InvalidParams("mean service times and drain speed must be positive".into()));
        }
        if !(self.gamma_u >= self.gamma_v && self.gamma_v > 0.0) {
            return Err(Error::InvalidParams(format!(
                "need gamma_u >= gamma_v > 0, got gamma_u = {}, gamma_v = {}",
                self.gamma_u, self.gamma_v
            )));
        }
        for side in [Side::U, Side::V] {
            if self.load(side) >= self.drain_speed {
                return Err(Error::InvalidParams(format!(
                    "unstable {side:?} queues: load {} >= drain speed {}",
                    self.load(side),
                    self.drain_speed
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// `r^beta` for U, `r^beta'` for V, whatever the queue holds.
    Fixed,
    /// `B q^beta` for U, `B' q^beta'` for V.
    QueueBased,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateFunctions {
    pub mode: RateMode,
    #[serde(default = "one")]
    pub b: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub b_prime: f64,
    pub beta_prime: f64,
}

fn one() -> f64 {
    1.0
}

impl RateFunctions {
    pub fn fixed(beta: f64, beta_prime: f64) -> Self {
        Self { mode: RateMode::Fixed, b: 1.0, beta, b_prime: 1.0, beta_prime }
    }

    pub fn queue_based(b: f64, beta: f64, b_prime: f64, beta_prime: f64) -> Self {
        Self { mode: RateMode::QueueBased, b, beta, b_prime, beta_prime }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.b, self.beta, self.b_prime, self.beta_prime].iter().all(|x| x.is_finite() && *x > 0.0);
        if !ok {
            return Err(Error::InvalidParams("B, beta, B', beta' must all be positive".into()));
        }
        if !(self.beta_prime > self.beta + 1.0) {
            return Err(Error::InvalidParams(format!(
                "V-nodes must be much more aggressive: need beta' > beta + 1, got beta = {}, beta' = {}",
                self.beta, self.beta_prime
            )));
        }
        Ok(())
    }

    /// Activation rate for a queue of `length` at scale `r`.
    pub fn rate(&self, side: Side, length: f64, r: f64) -> f64 {
        match (self.mode, side) {
            (RateMode::Fixed, Side::U) => r.powf(self.beta),
            (RateMode::Fixed, Side::V) => r.powf(self.beta_prime),
            (RateMode::QueueBased, Side::U) => self.b * length.powf(self.beta),
            (RateMode::QueueBased, Side::V) => self.b_prime * length.powf(self.beta_prime),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueueState {
    pub length: f64,
    /// Time up to which `length` is current.
    pub last_update: f64,
}

impl QueueState {
    pub fn new(length: f64) -> Self {
        Self { length, last_update: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.length <= 0.0
    }
}

pub fn initial_queue(side: Side, params: &QueueParams) -> QueueState {
    let gamma = match side {
        Side::U => params.gamma_u,
        Side::V => params.gamma_v,
    };
    QueueState::new(gamma * params.r)
}

/// Drains an active queue for `active_duration`, reflecting at zero.
pub fn drain(q: QueueState, active_duration: f64, params: &QueueParams) -> QueueState {
    debug_assert!(active_duration >= 0.0);
    QueueState {
        length: (q.length - params.drain_speed * active_duration).max(0.0),
        last_update: q.last_update + active_duration,
    }
}

/// Adds one exponentially sized job.
pub fn arrive<R: Rng + ?Sized>(q: QueueState, side: Side, params: &QueueParams, rng: &mut R) -> QueueState {
    let jump = Exp::new(1.0 / params.mean_service(side))
        .expect("mean service time is positive")
        .sample(rng);
    QueueState { length: q.length + jump, ..q }
}

pub fn activation_rate(q: &QueueState, side: Side, rates: &RateFunctions, r: f64) -> f64 {
    rates.rate(side, q.length, r)
}

/// Mean time for a U-queue started at `gamma_u * r` to drain to zero while
/// continuously active: `gamma_u * r / (c - rho_u)`.
pub fn expected_hitting_time_tu(params: &QueueParams) -> Result<f64> {
    let slack = params.drain_speed - params.load(Side::U);
    if !(slack > 0.0) {
        return Err(Error::Domain(format!(
            "U-queues are unstable: load {} >= drain speed {}",
            params.load(Side::U),
            params.drain_speed
        )));
    }
    Ok(params.gamma_u * params.r / slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> QueueParams {
        QueueParams { gamma_u: 2.0, gamma_v: 1.0, r: 100.0, ..QueueParams::default() }
    }

    #[test]
    fn initial_queues() {
        let p = params();
        assert_eq!(initial_queue(Side::U, &p).length, 200.0);
        assert_eq!(initial_queue(Side::V, &p).length, 100.0);
        let p0 = p.with_r(0.0);
        assert_eq!(initial_queue(Side::U, &p0).length, 0.0);
        assert_eq!(initial_queue(Side::V, &p0).length, 0.0);
    }

    #[test]
    fn drain_is_linear_then_reflects() {
        let p = QueueParams::default();
        assert_eq!(drain(QueueState::new(10.0), 3.0, &p).length, 7.0);
        assert_eq!(drain(QueueState::new(2.0), 5.0, &p).length, 0.0);
        assert_eq!(drain(QueueState::new(4.5), 0.0, &p).length, 4.5);
    }

    #[test]
    fn arrivals_are_positive_and_seeded() {
        let p = QueueParams::default();
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let mut qa = QueueState::default();
        let mut qb = QueueState::default();
        for _ in 0..50 {
            let before = qa.length;
            qa = arrive(qa, Side::U, &p, &mut a);
            qb = arrive(qb, Side::U, &p, &mut b);
            assert!(qa.length > before);
        }
        assert_eq!(qa, qb);
    }

    #[test]
    fn arrival_jump_mean() {
        let p = QueueParams { mean_service_u: 2.0, arrival_rate: 0.1, ..QueueParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let total: f64 = (0..n).map(|_| arrive(QueueState::default(), Side::U, &p, &mut rng).length).sum();
        let mean = total / n as f64;
        assert!((mean - 2.0).abs() < 0.05, "sample mean {mean}");
    }

    #[test]
    fn activation_rates() {
        let qb = RateFunctions::queue_based(1.0, 0.5, 1.0, 2.0);
        assert!((activation_rate(&QueueState::new(100.0), Side::U, &qb, 1.0) - 10.0).abs() < 1e-12);
        assert_eq!(activation_rate(&QueueState::new(0.0), Side::U, &qb, 1.0), 0.0);
        assert_eq!(activation_rate(&QueueState::new(0.0), Side::V, &qb, 1.0), 0.0);
        let fixed = RateFunctions::fixed(0.5, 2.0);
        assert!((activation_rate(&QueueState::new(3.0), Side::U, &fixed, 100.0) - 10.0).abs() < 1e-12);
        assert!((activation_rate(&QueueState::new(0.0), Side::V, &fixed, 100.0) - 1e4).abs() < 1e-6);
    }

    #[test]
    fn hitting_time_of_zero() {
        let p = QueueParams { gamma_u: 1.0, r: 100.0, drain_speed: 1.0, arrival_rate: 0.5, ..QueueParams::default() };
        assert!((expected_hitting_time_tu(&p).unwrap() - 200.0).abs() < 1e-12);
        let idle = QueueParams { arrival_rate: 0.0, drain_speed: 2.0, ..p };
        assert!((expected_hitting_time_tu(&idle).unwrap() - 50.0).abs() < 1e-12);
        assert_eq!(expected_hitting_time_tu(&p.with_r(0.0)).unwrap(), 0.0);
        let unstable = QueueParams { arrival_rate: 1.0, ..p };
        assert!(matches!(expected_hitting_time_tu(&unstable), Err(Error::Domain(_))));
    }

    #[test]
    fn validation() {
        assert!(QueueParams::default().validate().is_ok());
        assert!(QueueParams { gamma_u: 0.5, gamma_v: 1.0, ..QueueParams::default() }.validate().is_err());
        assert!(QueueParams { arrival_rate: 2.0, ..QueueParams::default() }.validate().is_err());
        assert!(RateFunctions::fixed(0.5, 2.0).validate().is_ok());
        assert!(RateFunctions::fixed(0.5, 1.5).validate().is_err());
        assert!(RateFunctions::queue_based(0.0, 0.5, 1.0, 2.0).validate().is_err());
    }
}
