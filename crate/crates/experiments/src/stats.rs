use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

pub const DEFAULT_RESAMPLES: usize = 1000;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean; zero for fewer than two samples.
pub fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// `q`-quantile by linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Bootstrap 95% interval of the slope.
    pub ci: (f64, f64),
}

/// Least squares line through `(ln r, ln mean)`.
pub fn ols_loglog(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(ExpError::Data(format!("need at least 2 points for a fit, got {}", points.len())));
    }
    if let Some(&(r, m)) = points.iter().find(|&&(r, m)| !(r > 0.0 && m > 0.0)) {
        return Err(ExpError::Data(format!("log-log fit needs positive values, got ({r}, {m})")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ExpError::Data("all r values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `ln E[T]` against `ln r` from per-`r` replication samples, with
/// a percentile bootstrap that resamples replications within each `r`.
pub fn fit_exponent(groups: &[(f64, Vec<f64>)], resamples: usize, seed: u64) -> Result<ExponentFit> {
    if groups.len() < 3 {
        return Err(ExpError::Data(format!("exponent fit needs at least 3 r values, got {}", groups.len())));
    }
    if let Some((r, _)) = groups.iter().find(|(_, xs)| xs.is_empty()) {
        return Err(ExpError::Data(format!("no samples at r = {r}")));
    }
    let points: Vec<(f64, f64)> = groups.iter().map(|(r, xs)| (*r, mean(xs))).collect();
    let (slope, intercept) = ols_loglog(&points)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes = Vec::with_capacity(resamples);
    let mut boot = points.clone();
    for _ in 0..resamples {
        for ((_, xs), point) in groups.iter().zip(boot.iter_mut()) {
            let s: f64 = (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).sum();
            point.1 = s / xs.len() as f64;
        }
        if let Ok((b, _)) = ols_loglog(&boot) {
            slopes.push(b);
        }
    }
    let ci = if slopes.is_empty() {
        (slope, slope)
    } else {
        slopes.sort_by(f64::total_cmp);
        (quantile(&slopes, 0.025), quantile(&slopes, 0.975))
    };
    Ok(ExponentFit { slope, intercept, ci })
}

/// Fit of bare `(r, mean)` points; the interval is degenerate.
pub fn fit_points(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let groups: Vec<(f64, Vec<f64>)> = points.iter().map(|&(r, m)| (r, vec![m])).collect();
    fit_exponent(&groups, 0, 0)
}
