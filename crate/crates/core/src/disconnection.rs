//! Disconnection time of a V-node: the absorbing birth-death chain on the
//! number of present edges among its `M` potential edges, its mean hitting
//! times and its phase-type law.
//!
//! From state `k` the chain moves up at rate `(M - k) lambda` and down at
//! rate `k lambda`; state 0 is absorbing. Every transient state has total
//! exit rate `M lambda`, so uniformizing at that rate gives a stochastic
//! matrix `P = I + S / (M lambda)` with zero diagonal, and
//! `exp(S x) = sum_k Poisson(M lambda x; k) P^k`.

use log::warn;

use crate::error::{Error, Result};

/// Poisson tail mass left out of the uniformization sum.
const TAIL_MASS: f64 = 1e-12;
/// `M lambda x` beyond which the truncated sum needs many terms.
const CONDITION_WARNING: f64 = 1e5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirthDeathChain {
    m: usize,
    lambda: f64,
}

impl BirthDeathChain {
    pub fn new(m: usize, lambda: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("the chain needs M >= 1".into()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("flip rate must be positive, got {lambda}")));
        }
        Ok(Self { m, lambda })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn up_rate(&self, k: usize) -> f64 {
        (self.m - k) as f64 * self.lambda
    }

    pub fn down_rate(&self, k: usize) -> f64 {
        k as f64 * self.lambda
    }

    /// Dense subgenerator over transient states `1..=M` (row-major,
    /// index `k - 1`).
    pub fn subgenerator(&self) -> Vec<Vec<f64>> {
        let m = self.m;
        let mut s = vec![vec![0.0; m]; m];
        for k in 1..=m {
            s[k - 1][k - 1] = -(m as f64) * self.lambda;
            if k > 1 {
                s[k - 1][k - 2] = self.down_rate(k);
            }
            if k < m {
                s[k - 1][k] = self.up_rate(k);
            }
        }
        s
    }

    /// Exit column `-S 1`: only state 1 leaks into the absorbing state.
    pub fn exit_vector(&self) -> Vec<f64> {
        let mut s0 = vec![0.0; self.m];
        s0[0] = self.lambda;
        s0
    }
}

/// `PH(a, S)` with `a` a unit mass on initial degree `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseTypeDist {
    chain: BirthDeathChain,
    d: usize,
}

impl PhaseTypeDist {
    pub fn new(chain: BirthDeathChain, d: usize) -> Result<Self> {
        check_degree(chain.m, d)?;
        Ok(Self { chain, d })
    }

    pub fn disconnection(m: usize, d: usize, lambda: f64) -> Result<Self> {
        Self::new(BirthDeathChain::new(m, lambda)?, d)
    }

    pub fn chain(&self) -> &BirthDeathChain {
        &self.chain
    }

    pub fn initial_degree(&self) -> usize {
        self.d
    }

    /// Initial row vector over transient states.
    pub fn initial_vector(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.chain.m];
        a[self.d - 1] = 1.0;
        a
    }

    pub fn mean(&self) -> f64 {
        mean_disconnection_time(self.chain.m, self.d, self.chain.mu()).expect("degree validated")
    }

    /// `P(D > x) = a exp(S x) 1`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.0)
    }

    /// `a exp(S x) S0`.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.1)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.survival(x)?)
    }

    /// `(survival, density)` at `x` from one uniformization pass.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {x}")));
        }
        let m = self.chain.m;
        let q = m as f64 * self.chain.lambda;
        let qx = q * x;
        if qx > CONDITION_WARNING {
            warn!("uniformization with M lambda x = {qx:.3e}: the Poisson sum needs that many terms");
        }
        if qx == 0.0 {
            let density = if self.d == 1 { self.chain.lambda } else { 0.0 };
            return Ok((1.0, density));
        }

        // Row vector pi_k = a P^k over states 1..=M.
        let mut pi = self.initial_vector();
        let mut next = vec![0.0; m];
        let mut survival = 0.0;
        let mut in_state_one = 0.0;
        let mut mass = 0.0;
        let max_terms = (qx + 12.0 * qx.sqrt() + 50.0) as usize;
        let ln_qx = qx.ln();
        let mut ln_w = -qx;
        for k in 0..=max_terms {
            if k > 0 {
                ln_w += ln_qx - (k as f64).ln();
            }
            let w = ln_w.exp();
            mass += w;
            survival += w * pi.iter().sum::<f64>();
            in_state_one += w * pi[0];
            if k as f64 > qx && 1.0 - mass < TAIL_MASS {
                break;
            }
            // pi P: up with probability (M - j) / M, down with j / M; the
            // down-move out of state 1 is absorbed.
            next.iter_mut().for_each(|e| *e = 0.0);
            for (i, &p) in pi.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let j = i + 1;
                if j < m {
                    next[i + 1] += p * (m - j) as f64 / m as f64;
                }
                if j > 1 {
                    next[i - 1] += p * j as f64 / m as f64;
                }
            }
            std::mem::swap(&mut pi, &mut next);
        }
        Ok((survival.clamp(0.0, 1.0), (self.chain.lambda * in_state_one).max(0.0)))
    }
}

fn check_degree(m: usize, d: usize) -> Result<()> {
    if m == 0 || d == 0 || d > m {
        return Err(Error::Domain(format!("initial degree must satisfy 1 <= d <= M, got d = {d}, M = {m}")));
    }
    Ok(())
}

/// `E[D] = C_d(M) mu`, from the backward recursion on increments
/// `X_M = mu / M`, `X_k = ((M - k) / k) X_{k+1} + mu / k`, `x_d = sum_{k <= d} X_k`.
pub fn mean_disconnection_time(m: usize, d: usize, mu: f64) -> Result<f64> {
    check_degree(m, d)?;
    let increments = increments(m, mu);
    Ok(increments[..d].iter().sum())
}

/// `X_1..=X_M` of the backward recursion.
fn increments(m: usize, mu: f64) -> Vec<f64> {
    let mut x = vec![0.0; m];
    x[m - 1] = mu / m as f64;
    for k in (1..m).rev() {
        x[k - 1] = (m - k) as f64 / k as f64 * x[k] + mu / k as f64;
    }
    x
}

/// `C_d(M)` from the closed double sum
/// `sum_{k=1}^{d} sum_{n=0}^{M-k} (M-k)! (k-1)! / (n! (M-n)!)`.
pub fn disconnection_coefficient(m: usize, d: usize) -> Result<f64> {
    check_degree(m, d)?;
    let fact: Vec<f64> = std::iter::once(1.0)
        .chain((1..=m).scan(1.0, |acc, i| {
            *acc *= i as f64;
            Some(*acc)
        }))
        .collect();
    let mut c = 0.0;
    for k in 1..=d {
        for n in 0..=m - k {
            c += fact[m - k] * fact[k - 1] / (fact[n] * fact[m - n]);
        }
    }
    Ok(c)
}

/// Mean hitting times `x_1..=x_M` of state 0, from Gaussian elimination with
/// partial pivoting on the full first-step system
/// `x_k = mu / M + (k / M) x_{k-1} + ((M - k) / M) x_{k+1}`, `x_0 = 0`.
pub fn hitting_time_system(m: usize, mu: f64) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Domain("the chain needs M >= 1".into()));
    }
    let mf = m as f64;
    let mut a = vec![vec![0.0; m + 1]; m];
    for k in 1..=m {
        let row = &mut a[k - 1];
        row[k - 1] = 1.0;
        if k > 1 {
            row[k - 2] = -(k as f64) / mf;
        }
        if k < m {
            row[k] = -((m - k) as f64) / mf;
        }
        row[m] = mu / mf;
    }
    solve_dense(a)
}

/// Solves an augmented `n x (n + 1)` system in place.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col] == 0.0 {
            return Err(Error::Inconsistent("singular hitting-time system".into()));
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - s) / a[row][row];
    }
    Ok(x)
}

/// Tail pair `(P(D <= mu s), P(D >= mu s))` at `x = mu * scale_ratio`.
pub fn concentration_check(m: usize, d: usize, mu: f64, scale_ratio: f64) -> Result<(f64, f64)> {
    if !(scale_ratio > 0.0) {
        return Err(Error::Domain(format!("scale ratio must be positive, got {scale_ratio}")));
    }
    let ph = PhaseTypeDist::disconnection(m, d, 1.0 / mu)?;
    let survival = ph.survival(mu * scale_ratio)?;
    Ok((1.0 - survival, survival))
}
