//! Finite-data readings of `lim sup` / `lim inf`.
//!
//! A [`TailEstimate`] keeps the running values of a quotient together with
//! the supremum and infimum over a trailing window. Many of the quotients in
//! this crate converge like `L + c / ln n`, so the estimate also carries a
//! least-squares extrapolation in `u = 1 / ln n` over the same window.

use serde::Serialize;

use crate::serde_util;

/// Relative growth across the window above which an increasing estimate is
/// flagged as divergent.
pub const DIVERGENCE_GROWTH: f64 = 0.08;

/// Window selection and burn-in shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimatorConfig {
    /// Number of trailing samples; `None` means the last half.
    pub window: Option<usize>,
    /// Indices `n <= burn_in` are skipped.
    pub burn_in: usize,
}

impl EstimatorConfig {
    pub fn with_window(window: usize) -> Self {
        EstimatorConfig { window: Some(window), burn_in: 0 }
    }

    pub fn burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    /// `(index, running value)` pairs.
    #[serde(skip)]
    pub values: Vec<(usize, f64)>,
    /// Number of trailing samples the tail statistics range over.
    pub window: usize,
    /// First index inside the window.
    pub window_start: usize,
    #[serde(serialize_with = "serde_util::real")]
    pub tail_sup: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub tail_inf: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub last: f64,
    /// Intercept of the least-squares line of value against `1 / ln n`.
    #[serde(serialize_with = "serde_util::real")]
    pub extrapolated: f64,
    pub diverged: bool,
}

impl TailEstimate {
    /// No usable samples: reported as the divergent regime.
    pub fn empty() -> Self {
        TailEstimate {
            values: Vec::new(),
            window: 0,
            window_start: 0,
            tail_sup: f64::INFINITY,
            tail_inf: f64::INFINITY,
            last: f64::INFINITY,
            extrapolated: f64::INFINITY,
            diverged: true,
        }
    }

    pub fn from_values(values: Vec<(usize, f64)>, window: Option<usize>) -> Self {
        if values.is_empty() {
            return Self::empty();
        }
        let len = values.len();
        let w = window.unwrap_or(len.div_ceil(2)).clamp(1, len);
        let tail = &values[len - w..];
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        for &(_, v) in tail {
            sup = sup.max(v);
            inf = inf.min(v);
        }
        let last = tail[w - 1].1;
        let first = tail[0].1;
        let any_infinite = tail.iter().any(|&(_, v)| v.is_infinite());
        let growth = (last - first) / last.abs().max(f64::MIN_POSITIVE);
        let diverged = any_infinite || (last > first && growth > DIVERGENCE_GROWTH);
        let extrapolated = if any_infinite { last } else { extrapolate(tail).unwrap_or(last) };
        TailEstimate {
            window: w,
            window_start: tail[0].0,
            tail_sup: sup,
            tail_inf: inf,
            last,
            extrapolated,
            diverged,
            values,
        }
    }

    pub fn width(&self) -> f64 {
        self.tail_sup - self.tail_inf
    }

    /// Maps every value through `f`, recomputing the tail statistics with the
    /// same window. `f` should be monotone for the result to be meaningful.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values.iter().map(|&(n, v)| (n, f(v))).collect();
        let mut out = Self::from_values(values, Some(self.window.max(1)));
        out.diverged = self.diverged;
        out
    }

    /// Evenly thinned `(index, value)` pairs, always keeping the last one.
    pub fn thinned(&self, max_points: usize) -> Vec<(usize, f64)> {
        if max_points == 0 || self.values.is_empty() {
            return Vec::new();
        }
        let len = self.values.len();
        if len <= max_points {
            return self.values.clone();
        }
        let step = len.div_ceil(max_points);
        let mut out: Vec<_> = self.values.iter().step_by(step).copied().collect();
        if out.last() != self.values.last() {
            out.push(self.values[len - 1]);
        }
        out
    }
}

/// Intercept of `v ~ a + b / ln n` over samples with `n >= 2`.
fn extrapolate(tail: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&(n, _)| n >= 2)
        .map(|&(n, v)| (1.0 / (n as f64).ln(), v))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let k = pts.len() as f64;
    let mu = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut suu, mut suv) = (0.0, 0.0);
    for &(u, v) in &pts {
        suu += (u - mu) * (u - mu);
        suv += (u - mu) * (v - mv);
    }
    if suu <= 1e-300 {
        return None;
    }
    let intercept = mv - (suv / suu) * mu;
    intercept.is_finite().then_some(intercept)
}
