//! Convergence-exponent estimators and the sequence constructions that
//! realize a prescribed exponent.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::arith::LogSumExp;
use crate::error::{domain, Error, Result};
use crate::estimate::{EstimatorConfig, TailEstimate};
use crate::seq::{Bits, PQSeq, Term};

/// A value in `[0, inf]`, with infinity kept distinct from the reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(x) => x,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, decimals and `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let x = match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| domain(format!("bad number {s:?}")))?;
                let q: f64 = q.trim().parse().map_err(|_| domain(format!("bad number {s:?}")))?;
                p / q
            }
            None => s.parse().map_err(|_| domain(format!("bad number {s:?}")))?,
        };
        if x.is_nan() {
            return Err(domain("exponent is NaN"));
        }
        Ok(if x == f64::INFINITY { Exponent::Infinite } else { Exponent::Finite(x) })
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(x) => s.serialize_f64(*x),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

fn depth(seq: &PQSeq, n: usize) -> usize {
    seq.len().map_or(n, |len| n.min(len))
}

/// `ln sum_{n <= N} a_n^{-s}`. Finite sequences are summed over their terms.
pub fn tau_series_sum(seq: &PQSeq, s: f64, n_max: usize) -> Result<f64> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    if !(s >= 0.0) {
        return Err(domain(format!("s must be >= 0, got {s}")));
    }
    let mut lse = LogSumExp::new();
    for n in 1..=depth(seq, n_max) {
        lse.push(-s * seq.log_a(n)?);
    }
    Ok(lse.value())
}

/// Partial sums `ln sum_{n <= k} a_n^{-s}` at each `k` in `checkpoints`
/// (ascending).
pub fn tau_series_partial_sums(seq: &PQSeq, s: f64, checkpoints: &[usize]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut lse = LogSumExp::new();
    let mut n = 0;
    for &k in checkpoints {
        let k = depth(seq, k);
        while n < k {
            n += 1;
            lse.push(-s * seq.log_a(n)?);
        }
        out.push(lse.value());
    }
    Ok(out)
}

fn term_cmp(seq: &PQSeq, prev: (usize, Term), cur: (usize, Term)) -> Result<Ordering> {
    match (prev.1, cur.1) {
        (Term::Small(a), Term::Small(b)) => Ok(a.cmp(&b)),
        (Term::Small(_), Term::Large { .. }) => Ok(Ordering::Less),
        (Term::Large { .. }, Term::Small(_)) => Ok(Ordering::Greater),
        _ => seq.cmp_terms(prev.0, cur.0),
    }
}

/// Largest `m <= N` with `a_1 <= ... <= a_m`, plus the indices where the
/// sequence strictly increases within that prefix.
fn monotone_scan(seq: &PQSeq, n_max: usize) -> Result<(usize, Vec<usize>)> {
    let n_max = depth(seq, n_max);
    if n_max == 0 {
        return Ok((0, Vec::new()));
    }
    let mut witnesses = Vec::new();
    let mut prev = (1, seq.term(1)?);
    for n in 2..=n_max {
        let cur = (n, seq.term(n)?);
        match term_cmp(seq, prev, cur)? {
            Ordering::Greater => return Ok((n - 1, witnesses)),
            Ordering::Less => witnesses.push(n),
            Ordering::Equal => {}
        }
        prev = cur;
    }
    Ok((n_max, witnesses))
}

/// Running `ln n / ln a_n`; the reported exponent is the tail supremum.
/// Indices with `a_n = 1` are skipped; if nothing remains the estimate is
/// empty and flagged divergent (the `tau = inf` regime).
pub fn tau_monotone_estimate(seq: &PQSeq, n_max: usize, cfg: EstimatorConfig) -> Result<TailEstimate> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    let (mono, _) = monotone_scan(seq, n_max)?;
    let n_max = depth(seq, n_max);
    if mono < n_max {
        return Err(Error::Contract {
            index: mono + 1,
            reason: "sequence is not nondecreasing".into(),
        });
    }
    let mut values = Vec::new();
    for n in (cfg.burn_in + 1).max(1)..=n_max {
        let la = seq.log_a(n)?;
        if la > 0.0 {
            values.push((n, (n as f64).ln() / la));
        }
    }
    Ok(TailEstimate::from_values(values, cfg.window))
}

/// Running `ln a_n / ln n` for `n >= 2`; the reported value is the tail
/// infimum.
pub fn liminf_ratio_estimate(seq: &PQSeq, n_max: usize, cfg: EstimatorConfig) -> Result<TailEstimate> {
    if n_max < 2 {
        return Err(domain("N must be >= 2"));
    }
    let mut values = Vec::new();
    for n in (cfg.burn_in + 1).max(2)..=depth(seq, n_max) {
        values.push((n, seq.log_a(n)? / (n as f64).ln()));
    }
    Ok(TailEstimate::from_values(values, cfg.window))
}

/// The exponent read off a monotone estimate: `0` for finite sequences by
/// convention, `inf` when the estimate diverges, the tail supremum otherwise.
pub fn tau(seq: &PQSeq, n_max: usize, cfg: EstimatorConfig) -> Result<Exponent> {
    if seq.is_finite() {
        return Ok(Exponent::Finite(0.0));
    }
    let est = tau_monotone_estimate(seq, n_max, cfg)?;
    Ok(if est.diverged { Exponent::Infinite } else { Exponent::Finite(est.tail_sup) })
}

/// A nondecreasing sequence with convergence exponent `alpha`.
pub fn construct_tau(alpha: Exponent) -> Result<PQSeq> {
    match alpha {
        Exponent::Infinite => Ok(PQSeq::ConstantOne),
        Exponent::Finite(a) if a == 0.0 => Ok(PQSeq::ExpFloor),
        Exponent::Finite(a) if a > 0.0 && a.is_finite() => PQSeq::power_floor(a),
        Exponent::Finite(a) => Err(domain(format!("exponent must be >= 0, got {a}"))),
    }
}

pub fn perturb(base: PQSeq, bits: Bits) -> PQSeq {
    PQSeq::Perturbed { base: Box::new(base), bits }
}

/// First `cut` terms from `prefix_src`, the rest from `tail_src`.
pub fn splice(prefix_src: PQSeq, cut: usize, tail_src: PQSeq) -> PQSeq {
    PQSeq::Spliced {
        prefix: Box::new(prefix_src),
        tail: Box::new(tail_src),
        cut,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaReport {
    pub checked_up_to: usize,
    pub monotone_up_to: usize,
    pub growth_witnesses: Vec<usize>,
}

/// How far the sequence is consistent with being nondecreasing and unbounded.
pub fn lambda_membership_report(seq: &PQSeq, n_max: usize) -> Result<LambdaReport> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    let (monotone_up_to, growth_witnesses) = monotone_scan(seq, n_max)?;
    Ok(LambdaReport {
        checked_up_to: depth(seq, n_max),
        monotone_up_to,
        growth_witnesses,
    })
}
