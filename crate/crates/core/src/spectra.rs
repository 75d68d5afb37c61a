//! Closed-form dimension formulas and the limit quantities `xi`, `B` and
//! `T_j` that parametrize them.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{log_factorials, CompensatedSum, PowerExponent};
use crate::error::{domain, Error, Result};
use crate::estimate::{EstimatorConfig, TailEstimate};
use crate::exponent::Exponent;
use crate::serde_util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SubCritical,
    Critical,
    SuperCritical,
}

impl Regime {
    /// Position of `alpha` relative to the breakpoint of a piecewise formula.
    fn of(alpha: Exponent, breakpoint: Exponent) -> Self {
        let (a, b) = (alpha.as_f64(), breakpoint.as_f64());
        if a < b {
            Regime::SubCritical
        } else if a == b {
            Regime::Critical
        } else {
            Regime::SuperCritical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub alpha: Exponent,
    pub dim: f64,
    pub regime: Regime,
}

fn check_alpha(alpha: Exponent) -> Result<f64> {
    let a = alpha.as_f64();
    if a.is_nan() || a < 0.0 {
        return Err(domain(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(a)
}

/// Dimension of `{tau = alpha}`: `1/2` for finite `alpha`, `1` at infinity.
pub fn dim_level_full(alpha: Exponent) -> Result<SpectrumPoint> {
    check_alpha(alpha)?;
    let dim = if alpha == Exponent::Infinite { 1.0 } else { 0.5 };
    Ok(SpectrumPoint { alpha, dim, regime: Regime::of(alpha, Exponent::Infinite) })
}

/// Dimension of `{tau = alpha}` inside the nondecreasing, unbounded set:
/// `(1 - alpha) / 2` on `[0, 1]`, `0` beyond.
pub fn dim_level_lambda(alpha: Exponent) -> Result<SpectrumPoint> {
    let a = check_alpha(alpha)?;
    let dim = if a <= 1.0 { (1.0 - a) / 2.0 } else { 0.0 };
    Ok(SpectrumPoint { alpha, dim, regime: Regime::of(alpha, Exponent::Finite(1.0)) })
}

/// Dimension of the nondecreasing level set of `liminf ln a_n / ln n`:
/// `0` below `1`, `(alpha - 1) / (2 alpha)` from `1` on.
pub fn dim_e(alpha: Exponent) -> Result<SpectrumPoint> {
    let a = check_alpha(alpha)?;
    let dim = match alpha {
        Exponent::Infinite => 0.5,
        _ if a < 1.0 => 0.0,
        _ => (a - 1.0) / (2.0 * a),
    };
    Ok(SpectrumPoint { alpha, dim, regime: Regime::of(alpha, Exponent::Finite(1.0)) })
}

/// Dimension of the unrestricted level set: `1` at `0`, `1/2` otherwise.
pub fn dim_f(alpha: Exponent) -> Result<SpectrumPoint> {
    let a = check_alpha(alpha)?;
    let dim = if a == 0.0 { 1.0 } else { 0.5 };
    Ok(SpectrumPoint { alpha, dim, regime: Regime::of(alpha, Exponent::Finite(0.0)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = ">")]
    Greater,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "<",
            Relation::Equal => "=",
            Relation::Greater => ">",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trichotomy {
    pub alpha: f64,
    pub dim_intersection: f64,
    /// `dim Lambda + dim F(alpha) - 1` with `dim Lambda = 1/2`.
    pub dim_sum_minus_one: f64,
    pub relation: Relation,
    /// `dim E(alpha) < min(1/2, dim F(alpha))`.
    pub strictly_below: bool,
}

/// Compares the intersection dimension with the sum rule for finite `alpha`.
pub fn intersection_trichotomy(alpha: f64) -> Result<Trichotomy> {
    if !alpha.is_finite() {
        return Err(domain("trichotomy is defined for finite alpha"));
    }
    let a = Exponent::Finite(alpha);
    let e = dim_e(a)?.dim;
    let f = dim_f(a)?.dim;
    let rhs = 0.5 + f - 1.0;
    let relation = match e.partial_cmp(&rhs).expect("finite") {
        std::cmp::Ordering::Less => Relation::Less,
        std::cmp::Ordering::Equal => Relation::Equal,
        std::cmp::Ordering::Greater => Relation::Greater,
    };
    Ok(Trichotomy {
        alpha,
        dim_intersection: e,
        dim_sum_minus_one: rhs,
        relation,
        strictly_below: e < 0.5f64.min(f),
    })
}

/// A positive scale sequence `s_n` used by the `xi` limit and the covers.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSeq {
    /// `s_n = m * floor(n^exponent)`.
    Power { m: u64, exponent: PowerExponent },
    /// `s_n = e^(rate * n)`; not integer valued.
    Exponential { rate: f64 },
    Constant(u64),
    Explicit(Vec<u64>),
}

impl ScaleSeq {
    /// `s_n = M floor(n^(alpha - 1))`, with `M` defaulting to the smallest
    /// integer giving `s_n >= 3`.
    pub fn for_alpha(alpha: f64, m: Option<u64>) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(domain(format!("alpha must be finite and >= 1, got {alpha}")));
        }
        let m = m.unwrap_or(3);
        if m == 0 {
            return Err(domain("M must be >= 1"));
        }
        Ok(ScaleSeq::Power { m, exponent: PowerExponent::new(alpha - 1.0)? })
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            ScaleSeq::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(domain("scale sequences are indexed from 1"));
        }
        match self.len() {
            Some(len) if n > len => Err(Error::OutOfRange { index: n, len }),
            _ => Ok(()),
        }
    }

    /// Exact `s_n` for the integer-valued kinds, when it fits in a `u64`.
    pub fn s_u64(&self, n: usize) -> Result<Option<u64>> {
        self.check(n)?;
        Ok(match self {
            ScaleSeq::Power { m, exponent } => exponent.floor_u64(n as u64).and_then(|f| f.checked_mul(*m)),
            ScaleSeq::Exponential { .. } => None,
            ScaleSeq::Constant(c) => Some(*c),
            ScaleSeq::Explicit(v) => Some(v[n - 1]),
        })
    }

    pub fn log_s(&self, n: usize) -> Result<f64> {
        if let Some(v) = self.s_u64(n)? {
            return Ok((v as f64).ln());
        }
        Ok(match self {
            ScaleSeq::Power { m, exponent } => (*m as f64).ln() + exponent.ln_pow(n as u64),
            ScaleSeq::Exponential { rate } => rate * n as f64,
            _ => unreachable!("integer kinds are handled above"),
        })
    }

    pub fn label(&self) -> String {
        match self {
            ScaleSeq::Power { m, exponent } => format!("{m}*floor(n^{})", exponent.value()),
            ScaleSeq::Exponential { rate } => format!("e^({rate}n)"),
            ScaleSeq::Constant(c) => format!("{c}"),
            ScaleSeq::Explicit(v) => format!("explicit[{}]", v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiReport {
    pub estimate: TailEstimate,
    /// `max(0, extrapolated)`, or `inf` when the quotient diverges.
    #[serde(serialize_with = "serde_util::real")]
    pub xi: f64,
    /// `1 / (2 + xi)`.
    pub dim: f64,
    /// `1 / (2 + tail_sup)` from the raw tail supremum.
    pub dim_tail_sup: f64,
}

/// Running `(2 ln (n+1)! + ln s_{n+1}) / ln (s_1 ... s_n)` for `n = 1..N`.
pub fn xi_limit(s: &ScaleSeq, n_max: usize, window: Option<usize>) -> Result<XiReport> {
    if n_max < 2 {
        return Err(domain("N must be >= 2"));
    }
    let logs: Vec<f64> = (1..=n_max + 1).map(|n| s.log_s(n)).collect::<Result<_>>()?;
    if let Some(i) = logs.iter().position(|&l| !(l > 0.0)) {
        return Err(Error::Contract { index: i + 1, reason: "scale sequence must exceed 1".into() });
    }
    let lf = log_factorials(n_max + 1);
    let mut denom = CompensatedSum::new();
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        denom.add(logs[n - 1]);
        values.push((n, (2.0 * lf[n + 1] + logs[n]) / denom.value()));
    }
    let estimate = TailEstimate::from_values(values, window);
    let xi = if estimate.diverged { f64::INFINITY } else { estimate.extrapolated.max(0.0) };
    Ok(XiReport {
        dim: 1.0 / (2.0 + xi),
        dim_tail_sup: 1.0 / (2.0 + estimate.tail_sup),
        xi,
        estimate,
    })
}

/// Running `ln(s_1...s_n) / (2 ln(s_1...s_n) + ln s_{n+1})`; the tail
/// infimum estimates the dimension of `{s_n <= a_n < K s_n}`.
pub fn growth_band_dimension(s: &ScaleSeq, n_max: usize, window: Option<usize>) -> Result<TailEstimate> {
    if n_max < 1 {
        return Err(domain("N must be >= 1"));
    }
    let mut acc = CompensatedSum::new();
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        acc.add(s.log_s(n)?);
        let p = acc.value();
        values.push((n, p / (2.0 * p + s.log_s(n + 1)?)));
    }
    Ok(TailEstimate::from_values(values, window))
}

/// A growth function `phi`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    /// `c * n^gamma`
    Power { c: f64, gamma: f64 },
    /// `scale * base^n`
    Exponential { scale: f64, base: f64 },
    /// `a^(b^n)`
    DoubleExponential { a: f64, b: f64 },
    /// `e^(c * n^gamma)`
    ExpPower { c: f64, gamma: f64 },
    /// `n^n`
    SelfPower,
    /// `ln phi(n)` listed for `n = 1..`.
    Explicit { label: String, log_phi: Vec<f64> },
}

impl PhiSpec {
    /// `power:c,gamma`, `exp:scale,base`, `dexp:a,b`, `exppow:c,gamma`,
    /// `selfpow`, `stair:base` (`base^floor(n/2)` up to a length of 10^5) or
    /// `loglist:l1,l2,...` (values of `ln phi`).
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<f64>().map_err(|_| domain(format!("bad number {t:?} in {s:?}"))))
                .collect()
        };
        let two = || -> Result<(f64, f64)> {
            match nums()?.as_slice() {
                [x, y] => Ok((*x, *y)),
                _ => Err(domain(format!("{kind} needs two parameters"))),
            }
        };
        let spec = match kind {
            "power" => {
                let (c, gamma) = two()?;
                PhiSpec::Power { c, gamma }
            }
            "exp" => {
                let (scale, base) = two()?;
                PhiSpec::Exponential { scale, base }
            }
            "dexp" => {
                let (a, b) = two()?;
                PhiSpec::DoubleExponential { a, b }
            }
            "exppow" => {
                let (c, gamma) = two()?;
                PhiSpec::ExpPower { c, gamma }
            }
            "selfpow" => PhiSpec::SelfPower,
            "stair" => match nums()?.as_slice() {
                [b] => PhiSpec::stair(*b, 100_000),
                _ => return Err(domain("stair needs one parameter")),
            },
            "loglist" => PhiSpec::Explicit { label: s.to_string(), log_phi: nums()? },
            _ => return Err(domain(format!("unknown phi kind {kind:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `base^floor(n/2)` for `n = 1..=len`.
    pub fn stair(base: f64, len: usize) -> Self {
        PhiSpec::Explicit {
            label: format!("{base}^floor(n/2)"),
            log_phi: (1..=len).map(|n| (n / 2) as f64 * base.ln()).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            PhiSpec::Power { c, gamma } => *c > 0.0 && gamma.is_finite(),
            PhiSpec::Exponential { scale, base } => *scale > 0.0 && *base > 0.0,
            PhiSpec::DoubleExponential { a, b } => *a > 1.0 && *b > 0.0,
            PhiSpec::ExpPower { c, gamma } => c.is_finite() && gamma.is_finite(),
            PhiSpec::SelfPower => true,
            PhiSpec::Explicit { log_phi, .. } => !log_phi.is_empty(),
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid parameters for {}", self.label())))
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            PhiSpec::Explicit { log_phi, .. } => Some(log_phi.len()),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PhiSpec::Power { c, gamma } if *c == 1.0 => format!("n^{gamma}"),
            PhiSpec::Power { c, gamma } => format!("{c}*n^{gamma}"),
            PhiSpec::Exponential { scale, base } if *scale == 1.0 => format!("{base}^n"),
            PhiSpec::Exponential { scale, base } => format!("{scale}*{base}^n"),
            PhiSpec::DoubleExponential { a, b } => format!("{a}^({b}^n)"),
            PhiSpec::ExpPower { c, gamma } if *c == 1.0 => format!("e^(n^{gamma})"),
            PhiSpec::ExpPower { c, gamma } => format!("e^({c}*n^{gamma})"),
            PhiSpec::SelfPower => "n^n".into(),
            PhiSpec::Explicit { label, .. } => label.clone(),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(domain("phi is indexed from 1"));
        }
        match self.len() {
            Some(len) if n > len => Err(Error::OutOfRange { index: n, len }),
            _ => Ok(()),
        }
    }

    /// `ln phi(n)`; may be `+inf` for double-exponential growth.
    pub fn log_phi(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        let x = n as f64;
        Ok(match self {
            PhiSpec::Power { c, gamma } => c.ln() + gamma * x.ln(),
            PhiSpec::Exponential { scale, base } => scale.ln() + x * base.ln(),
            PhiSpec::DoubleExponential { a, b } => a.ln() * b.powf(x),
            PhiSpec::ExpPower { c, gamma } => c * x.powf(*gamma),
            PhiSpec::SelfPower => x * x.ln(),
            PhiSpec::Explicit { log_phi, .. } => log_phi[n - 1],
        })
    }

    /// `ln ln phi(n)`, `NaN` when `phi(n) <= 1`.
    pub fn log_log_phi(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(match self {
            PhiSpec::DoubleExponential { a, b } => a.ln().ln() + n as f64 * b.ln(),
            _ => {
                let l = self.log_phi(n)?;
                if l > 0.0 {
                    l.ln()
                } else {
                    f64::NAN
                }
            }
        })
    }

    /// Default family, from power growth to super-exponential.
    pub fn default_family() -> Vec<PhiSpec> {
        vec![
            PhiSpec::Power { c: 1.0, gamma: 0.5 },
            PhiSpec::Power { c: 1.0, gamma: 2.0 },
            PhiSpec::Power { c: 1.0, gamma: 3.0 },
            PhiSpec::Exponential { scale: 1.0, base: 2.0 },
            PhiSpec::Exponential { scale: 1.0, base: std::f64::consts::E },
            PhiSpec::Exponential { scale: 1.0, base: 3.0 },
            PhiSpec::Exponential { scale: 2.0, base: 3.0 },
            PhiSpec::Exponential { scale: 1.0, base: 10.0 },
            PhiSpec::SelfPower,
            PhiSpec::ExpPower { c: 1.0, gamma: 2.0 },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BReport {
    pub phi: String,
    pub estimate: TailEstimate,
    /// `ln B`, the tail supremum; `inf` when divergent.
    #[serde(serialize_with = "serde_util::real")]
    pub log_b: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub b: f64,
    /// `1 / (B + 1)`.
    pub dim: f64,
    /// `B < 1`, outside the range the dimension formula is stated for.
    pub out_of_hypothesis: bool,
    /// `phi(n) / ln n` increased across the window.
    pub growth_hypothesis: bool,
}

fn b_report(phi: &PhiSpec, estimate: TailEstimate, growth_hypothesis: bool) -> BReport {
    let log_b = if estimate.diverged { f64::INFINITY } else { estimate.tail_sup };
    let b = log_b.exp();
    BReport {
        phi: phi.label(),
        log_b,
        b,
        dim: if b.is_finite() { 1.0 / (b + 1.0) } else { 0.0 },
        out_of_hypothesis: log_b < 0.0,
        growth_hypothesis,
        estimate,
    }
}

fn growth_hypothesis(phi: &PhiSpec, values: &[(usize, f64)], window_start: usize) -> Result<bool> {
    let (Some(&(first, _)), Some(&(last, _))) = (values.iter().find(|v| v.0 >= window_start.max(2)), values.last())
    else {
        return Ok(false);
    };
    if last <= first {
        return Ok(false);
    }
    let r = |n: usize| -> Result<f64> { Ok(phi.log_phi(n)? - (n as f64).ln().ln()) };
    Ok(r(last)? > r(first)?)
}

/// `ln B = limsup ln phi(n) / n`.
pub fn b_growth(phi: &PhiSpec, n_max: usize, cfg: EstimatorConfig) -> Result<BReport> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    let mut values = Vec::with_capacity(n_max);
    for n in (cfg.burn_in + 1)..=n_max {
        values.push((n, phi.log_phi(n)? / n as f64));
    }
    let est = TailEstimate::from_values(values, cfg.window);
    let hyp = growth_hypothesis(phi, &est.values, est.window_start)?;
    Ok(b_report(phi, est, hyp))
}

/// `ln B = limsup ln ln phi(n) / n`; requires `phi(n) > 1`.
pub fn b_hirst(phi: &PhiSpec, n_max: usize, cfg: EstimatorConfig) -> Result<BReport> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    let mut values = Vec::with_capacity(n_max);
    for n in (cfg.burn_in + 1)..=n_max {
        let ll = phi.log_log_phi(n)?;
        if ll.is_nan() {
            return Err(Error::Contract { index: n, reason: "phi(n) must exceed 1".into() });
        }
        values.push((n, ll / n as f64));
    }
    let est = TailEstimate::from_values(values, cfg.window);
    let hyp = growth_hypothesis(phi, &est.values, est.window_start)?;
    Ok(b_report(phi, est, hyp))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSeq {
    pub phi: String,
    pub eps: f64,
    /// `B` used in the construction (from [`b_growth`]).
    pub b: f64,
    /// Past this index `phi(n) <= (B + eps/2)^n` on the probed range, so the
    /// terms of each supremum decay geometrically.
    pub horizon: usize,
    /// `(j, ln ln T_j)`.
    #[serde(skip)]
    pub entries: Vec<(usize, f64)>,
    /// `log T_j / phi(j)`; its tail infimum estimates the liminf.
    pub ratio: TailEstimate,
}

/// Relative slack used when checking the monotonicity and growth invariants
/// of `T_j` in floating point.
pub const TSEQ_SLACK: f64 = 1e-12;

impl TSeq {
    /// First index where `T_j <= T_{j+1} <= T_j^(B+eps)` fails.
    pub fn first_violation(&self) -> Option<usize> {
        let l = (self.b + self.eps).ln();
        self.entries.windows(2).find_map(|w| {
            let ((j, a), (_, b)) = (w[0], w[1]);
            let tol = TSEQ_SLACK * a.abs().max(1.0);
            (b < a - tol || b > a + l + tol).then_some(j)
        })
    }
}

/// `T_j = sup_{n >= j} exp(phi(n) (B + eps)^(j - n))`, computed as
/// `ln ln T_j`, for `j = 1..=N`.
pub fn t_sequence(phi: &PhiSpec, eps: f64, n_max: usize, window: Option<usize>) -> Result<TSeq> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    let b = b_growth(phi, n_max, EstimatorConfig { window, burn_in: 0 })?;
    if !b.b.is_finite() {
        return Err(Error::Unsupported(format!("B is infinite for {}", phi.label())));
    }
    let base = b.b + eps;
    if base <= 1.0 {
        return Err(Error::Unsupported(format!("B + eps = {base} must exceed 1")));
    }
    let l = base.ln();
    let l_half = (b.b + eps / 2.0).ln();
    let probe_end = (4 * n_max).max(n_max + 10_000);
    let probe_end = phi.len().map_or(probe_end, |len| probe_end.min(len));
    let mut log_phi = Vec::with_capacity(probe_end);
    for n in 1..=probe_end {
        let v = phi.log_phi(n)?;
        if let Some(&prev) = log_phi.last() {
            if v < prev {
                return Err(Error::Contract { index: n, reason: "phi must be nondecreasing".into() });
            }
        }
        log_phi.push(v);
    }
    let mut horizon = 1;
    for (i, &lp) in log_phi.iter().enumerate() {
        if lp > (i + 1) as f64 * l_half {
            horizon = i + 2;
        }
    }
    let decay = l_half - l;
    let mut entries = Vec::with_capacity(n_max);
    for j in 1..=n_max {
        let mut best = f64::NEG_INFINITY;
        let mut n = j;
        loop {
            if n > log_phi.len() {
                return Err(Error::Unsupported(format!(
                    "phi is only known up to {}, not enough to locate the supremum for j = {j}",
                    log_phi.len()
                )));
            }
            best = best.max(log_phi[n - 1] + (j as f64 - n as f64) * l);
            // past the horizon every later term is below j*l + n*decay, decay < 0
            if n >= horizon && j as f64 * l + n as f64 * decay <= best {
                break;
            }
            n += 1;
        }
        entries.push((j, best));
    }
    let ratio_values = entries
        .iter()
        .map(|&(j, llt)| (j, (llt - log_phi[j - 1]).exp()))
        .collect();
    Ok(TSeq {
        phi: phi.label(),
        eps,
        b: b.b,
        horizon,
        entries,
        ratio: TailEstimate::from_values(ratio_values, window),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EphiRow {
    pub phi: String,
    #[serde(serialize_with = "serde_util::real")]
    pub b: f64,
    pub dim: f64,
    /// `ln phi(n) / n` diverges, so `B = inf` and the dimension tends to 0.
    pub diverged: bool,
    pub out_of_hypothesis: bool,
}

/// One row per `phi`: the growth constant `B` and the dimension `1 / (B + 1)`.
pub fn ephi_figure_table(family: &[PhiSpec], n_max: usize) -> Result<Vec<EphiRow>> {
    family
        .par_iter()
        .map(|phi| {
            let r = b_growth(phi, n_max, EstimatorConfig::default())?;
            Ok(EphiRow {
                phi: r.phi,
                b: r.b,
                dim: r.dim,
                diverged: r.estimate.diverged,
                out_of_hypothesis: r.out_of_hypothesis,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(x: f64) -> Exponent {
        Exponent::Finite(x)
    }

    #[test]
    fn formula_values() {
        assert_eq!(dim_level_full(fin(0.0)).unwrap().dim, 0.5);
        assert_eq!(dim_level_full(fin(7.0)).unwrap().dim, 0.5);
        assert_eq!(dim_level_full(Exponent::Infinite).unwrap().dim, 1.0);
        assert_eq!(dim_level_lambda(fin(0.0)).unwrap().dim, 0.5);
        assert_eq!(dim_level_lambda(fin(1.0)).unwrap().dim, 0.0);
        assert_eq!(dim_level_lambda(fin(0.5)).unwrap().dim, 0.25);
        assert!(dim_level_lambda(fin(-0.1)).is_err());
        assert_eq!(dim_e(fin(1.0)).unwrap().dim, 0.0);
        assert_eq!(dim_e(fin(3.0)).unwrap().dim, 1.0 / 3.0);
        assert!((dim_e(fin(1e12)).unwrap().dim - 0.5).abs() < 1e-11);
        assert_eq!(dim_f(fin(0.0)).unwrap().dim, 1.0);
        assert_eq!(dim_f(fin(0.01)).unwrap().dim, 0.5);
        assert_eq!(dim_f(fin(5.0)).unwrap().dim, 0.5);
        assert_eq!(dim_level_lambda(fin(1.0)).unwrap().regime, Regime::Critical);
    }

    #[test]
    fn trichotomy_examples() {
        assert_eq!(intersection_trichotomy(0.0).unwrap().relation, Relation::Less);
        assert_eq!(intersection_trichotomy(0.5).unwrap().relation, Relation::Equal);
        assert_eq!(intersection_trichotomy(2.0).unwrap().relation, Relation::Greater);
    }

    #[test]
    fn lambda_and_e_agree_under_reciprocal() {
        for i in 0..20 {
            let a = 1.0 + 0.37 * i as f64 + 0.01 * (i * i) as f64;
            let e = dim_e(fin(a)).unwrap().dim;
            let l = dim_level_lambda(fin(1.0 / a)).unwrap().dim;
            assert!((e - l).abs() <= 4.0 * f64::EPSILON, "alpha={a}: {e} vs {l}");
        }
    }

    proptest! {
        #[test]
        fn spectrum_sanity(a in 0.0f64..50.0, b in 0.0f64..50.0) {
            for f in [dim_level_full, dim_level_lambda, dim_e, dim_f] {
                let d = f(fin(a)).unwrap().dim;
                prop_assert!((0.0..=1.0).contains(&d));
            }
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if lo >= 1.0 {
                prop_assert!(dim_e(fin(lo)).unwrap().dim <= dim_e(fin(hi)).unwrap().dim);
                prop_assert!(dim_e(fin(hi)).unwrap().dim < 0.5);
            }
            if hi <= 1.0 {
                prop_assert!(dim_level_lambda(fin(lo)).unwrap().dim >= dim_level_lambda(fin(hi)).unwrap().dim);
            }
            prop_assert!(intersection_trichotomy(a).unwrap().strictly_below);
        }
    }

    #[test]
    fn xi_examples() {
        for (alpha, target) in [(2.0, 2.0), (3.0, 1.0), (5.0, 0.5)] {
            let s = ScaleSeq::for_alpha(alpha, None).unwrap();
            let r = xi_limit(&s, 10_000, None).unwrap();
            assert!((r.xi - target).abs() < 0.05, "alpha={alpha}: xi={}", r.xi);
            assert!((r.dim - (alpha - 1.0) / (2.0 * alpha)).abs() < 0.01);
        }
        let r = xi_limit(&ScaleSeq::Exponential { rate: 1.0 }, 1000, None).unwrap();
        assert!(r.xi <= 0.01 && !r.estimate.diverged);
        assert!((r.dim - 0.5).abs() <= 0.01 / 4.0);
        let r = xi_limit(&ScaleSeq::Constant(3), 1000, None).unwrap();
        assert!(r.estimate.diverged && r.xi.is_infinite() && r.dim == 0.0);
        assert!(matches!(xi_limit(&ScaleSeq::Explicit(vec![3, 1, 3, 3]), 3, None), Err(Error::Contract { index: 2, .. })));
    }

    #[test]
    fn xi_matches_direct_quotient() {
        // s_n = 3n, computed with exact factorials for small n
        let s = ScaleSeq::for_alpha(2.0, None).unwrap();
        let r = xi_limit(&s, 15, Some(15)).unwrap();
        let mut fact = 1f64;
        let mut prod = 1f64;
        for n in 1..=15u32 {
            fact *= (n + 1) as f64;
            prod *= 3.0 * n as f64;
            let q = (2.0 * fact.ln() + (3.0 * (n + 1) as f64).ln()) / prod.ln();
            assert!((r.estimate.values[n as usize - 1].1 - q).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_band_for_fixed_polynomial_scale() {
        // ln(prod s_k) ~ n ln n dominates ln s_{n+1}, so the limit is 1/2
        let s = ScaleSeq::for_alpha(3.0, None).unwrap();
        let r = growth_band_dimension(&s, 10_000, None).unwrap();
        assert!((r.tail_inf - 0.5).abs() < 0.01);
    }

    #[test]
    fn b_growth_examples() {
        let cfg = EstimatorConfig::default();
        let r = b_growth(&PhiSpec::Exponential { scale: 2.0, base: 3.0 }, 1000, cfg).unwrap();
        assert!((r.dim - 0.25).abs() < 1e-3);
        let r = b_growth(&PhiSpec::Power { c: 1.0, gamma: 2.0 }, 1000, cfg).unwrap();
        assert!((r.dim - 0.5).abs() < 1e-2);
        assert!(r.growth_hypothesis && !r.out_of_hypothesis);
        let r = b_growth(&PhiSpec::SelfPower, 1000, cfg).unwrap();
        assert!(r.estimate.diverged && r.b.is_infinite() && r.dim == 0.0);
        let r = b_growth(&PhiSpec::Power { c: 5.0, gamma: 0.0 }, 1000, cfg).unwrap();
        assert!(!r.growth_hypothesis);
    }

    #[test]
    fn b_hirst_examples() {
        let cfg = EstimatorConfig::default();
        let r = b_hirst(&PhiSpec::DoubleExponential { a: 2.0, b: 3.0 }, 1000, cfg).unwrap();
        assert!((r.dim - 0.25).abs() < 1e-3);
        let r = b_hirst(&PhiSpec::DoubleExponential { a: std::f64::consts::E, b: 1.5 }, 1000, cfg).unwrap();
        assert!((r.b - 1.5).abs() < 1e-9 && (r.dim - 0.4).abs() < 1e-9);
        let sq = PhiSpec::Power { c: 1.0, gamma: 2.0 };
        assert!(matches!(b_hirst(&sq, 1000, cfg), Err(Error::Contract { index: 1, .. })));
        let r = b_hirst(&sq, 1000, cfg.burn_in(1)).unwrap();
        assert!((r.dim - 0.5).abs() < 1e-2);
    }

    #[test]
    fn t_sequence_pure_exponential_attains_at_j() {
        let phi = PhiSpec::Exponential { scale: 1.0, base: 3.0 };
        let t = t_sequence(&phi, 0.1, 300, None).unwrap();
        for &(j, llt) in &t.entries {
            assert!((llt - j as f64 * 3f64.ln()).abs() < 1e-9 * llt.max(1.0));
        }
        assert_eq!(t.first_violation(), None);
    }

    #[test]
    fn t_sequence_specimens() {
        let specimens = [
            PhiSpec::Exponential { scale: 2.0, base: 3.0 },
            PhiSpec::Power { c: 1.0, gamma: 2.0 },
            PhiSpec::stair(4.0, 20_000),
        ];
        for phi in &specimens {
            let t = t_sequence(phi, 0.1, 1000, None).unwrap();
            assert_eq!(t.first_violation(), None, "{}", phi.label());
            assert!((1.0..=1.01).contains(&t.ratio.tail_inf), "{}: {}", phi.label(), t.ratio.tail_inf);
        }
        assert!(matches!(t_sequence(&PhiSpec::SelfPower, 0.1, 100, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn ephi_rows() {
        let rows = ephi_figure_table(&PhiSpec::default_family(), 1000).unwrap();
        let find = |l: &str| rows.iter().find(|r| r.phi == l).unwrap();
        assert!((find("n^2").dim - 0.5).abs() < 1e-2);
        assert!((find("2^n").dim - 1.0 / 3.0).abs() < 1e-3);
        assert!(find("e^(n^2)").diverged);
    }

    #[test]
    fn phi_parsing() {
        assert_eq!(PhiSpec::parse("exp:2,3").unwrap(), PhiSpec::Exponential { scale: 2.0, base: 3.0 });
        assert_eq!(PhiSpec::parse("selfpow").unwrap(), PhiSpec::SelfPower);
        assert!(PhiSpec::parse("dexp:1,3").is_err());
        assert!(PhiSpec::parse("nope").is_err());
    }
}
