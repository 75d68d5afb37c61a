//! Cover families of cylinders, monotone-tuple counting, Stirling and
//! count bounds, gap sizes, and the critical-exponent and Falconer
//! dimension estimators.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{ln_biguint, log_factorials, CompensatedSum, LogSumExp, PowerExponent};
use crate::error::{domain, Error, Result};
use crate::estimate::TailEstimate;
use crate::serde_util;
use crate::spectra::ScaleSeq;

/// Default cap on the product of range widths for enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 100_000_000;

/// Largest value span the monotone counting recursion will allocate.
const MAX_DP_SPAN: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `k s_k <= sigma_k < (k+1) s_k`.
    D { s: ScaleSeq },
    /// `ceil(j^(alpha-eps)) <= sigma_j <= floor(n^(alpha+eps))` at generation `n`.
    C { alpha: f64, eps: f64 },
    /// `1 <= sigma_j <= floor(n^(alpha+eps))` at generation `n`.
    CTilde { alpha: f64, eps: f64 },
    /// `lo <= sigma_j < hi` at every index.
    Uniform { lo: u64, hi: u64 },
    /// Per-index half-open ranges.
    Explicit(Vec<(u64, u64)>),
}

/// Per-index admissible ranges plus an optional monotonicity constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintFamily {
    pub name: String,
    pub kind: FamilyKind,
    pub monotone: bool,
}

fn check_alpha_eps(alpha: f64, eps: f64) -> Result<()> {
    if !(alpha.is_finite() && eps > 0.0 && eps < alpha) {
        return Err(domain(format!("need 0 < eps < alpha, got alpha={alpha}, eps={eps}")));
    }
    Ok(())
}

impl ConstraintFamily {
    pub fn d(s: ScaleSeq) -> Self {
        ConstraintFamily { name: format!("D[{}]", s.label()), kind: FamilyKind::D { s }, monotone: false }
    }

    pub fn c(alpha: f64, eps: f64) -> Result<Self> {
        check_alpha_eps(alpha, eps)?;
        Ok(ConstraintFamily {
            name: format!("C[alpha={alpha},eps={eps}]"),
            kind: FamilyKind::C { alpha, eps },
            monotone: true,
        })
    }

    pub fn c_tilde(alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0 && eps > 0.0) {
            return Err(domain(format!("need alpha >= 0 and eps > 0, got alpha={alpha}, eps={eps}")));
        }
        Ok(ConstraintFamily {
            name: format!("C~[alpha={alpha},eps={eps}]"),
            kind: FamilyKind::CTilde { alpha, eps },
            monotone: true,
        })
    }

    /// `sigma_j` in the inclusive range `[lo, hi]`.
    pub fn uniform(lo: u64, hi: u64, monotone: bool) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(domain(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(ConstraintFamily {
            name: format!("uniform[{lo},{hi}]"),
            kind: FamilyKind::Uniform { lo, hi: hi + 1 },
            monotone,
        })
    }

    pub fn explicit(ranges: Vec<(u64, u64)>, monotone: bool) -> Result<Self> {
        if let Some(i) = ranges.iter().position(|r| r.0 == 0) {
            return Err(Error::Contract { index: i + 1, reason: "ranges must start at >= 1".into() });
        }
        Ok(ConstraintFamily {
            name: format!("explicit[{}]", ranges.len()),
            kind: FamilyKind::Explicit(ranges),
            monotone,
        })
    }

    /// Half-open range `[lo, hi)` of `sigma_k` at generation `n`. Empty
    /// ranges are returned as `lo >= hi`.
    pub fn range(&self, k: usize, n: usize) -> Result<(u64, u64)> {
        if k == 0 || k > n {
            return Err(domain(format!("index {k} outside generation {n}")));
        }
        let too_big = || Error::Unsupported(format!("range bound at index {k} exceeds 64 bits"));
        Ok(match &self.kind {
            FamilyKind::D { s } => {
                let sk = s.s_u64(k)?.ok_or_else(|| domain("D family needs integer-valued s_k"))?;
                if sk < 3 {
                    return Err(Error::Contract { index: k, reason: "s_k must be >= 3".into() });
                }
                let lo = (k as u64).checked_mul(sk).ok_or_else(too_big)?;
                (lo, lo.checked_add(sk).ok_or_else(too_big)?)
            }
            FamilyKind::C { alpha, eps } => {
                let lo = PowerExponent::new(alpha - eps)?.ceil_u64(k as u64).ok_or_else(too_big)?;
                let hi = PowerExponent::new(alpha + eps)?.floor_u64(n as u64).ok_or_else(too_big)?;
                (lo.max(1), hi.checked_add(1).ok_or_else(too_big)?)
            }
            FamilyKind::CTilde { alpha, eps } => {
                let hi = PowerExponent::new(alpha + eps)?.floor_u64(n as u64).ok_or_else(too_big)?;
                (1, hi.checked_add(1).ok_or_else(too_big)?)
            }
            FamilyKind::Uniform { lo, hi } => (*lo, *hi),
            FamilyKind::Explicit(r) => *r.get(k - 1).ok_or(Error::OutOfRange { index: k, len: r.len() })?,
        })
    }

    pub fn ranges(&self, n: usize) -> Result<Vec<(u64, u64)>> {
        (1..=n).map(|k| self.range(k, n)).collect()
    }
}

fn width_product(ranges: &[(u64, u64)]) -> f64 {
    ranges.iter().map(|&(lo, hi)| hi.saturating_sub(lo) as f64).product()
}

/// Lexicographic enumeration of the admissible tuples.
#[derive(Debug, Clone)]
pub struct FamilyIter {
    ranges: Vec<(u64, u64)>,
    monotone: bool,
    cur: Vec<u64>,
    started: bool,
    done: bool,
}

impl FamilyIter {
    fn lower(&self, k: usize) -> u64 {
        if self.monotone && k > 0 {
            self.ranges[k].0.max(self.cur[k - 1])
        } else {
            self.ranges[k].0
        }
    }

    fn fill(&mut self, from: usize) -> bool {
        for k in from..self.ranges.len() {
            let lo = self.lower(k);
            if lo >= self.ranges[k].1 {
                return false;
            }
            self.cur[k] = lo;
        }
        true
    }

    fn advance(&mut self) -> bool {
        for i in (0..self.ranges.len()).rev() {
            if self.cur[i] + 1 < self.ranges[i].1 {
                self.cur[i] += 1;
                // a larger entry only raises later lower bounds, so if the
                // suffix cannot be filled now it never can at this position
                if self.fill(i + 1) {
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for FamilyIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let ok = if self.started { self.advance() } else { self.fill(0) };
        self.started = true;
        if ok {
            Some(self.cur.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Tuples `(sigma_1, ..., sigma_n)` of the family at generation `n`.
pub fn enumerate_family(f: &ConstraintFamily, n: usize, cap: u64) -> Result<FamilyIter> {
    if n == 0 {
        return Err(domain("generation must be >= 1"));
    }
    let ranges = f.ranges(n)?;
    let size = width_product(&ranges);
    if size > cap as f64 {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    Ok(FamilyIter { cur: vec![0; n], ranges, monotone: f.monotone, started: false, done: false })
}

/// Exact number of admissible tuples, without enumerating them.
pub fn count_family(f: &ConstraintFamily, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(domain("generation must be >= 1"));
    }
    let ranges = f.ranges(n)?;
    if ranges.iter().any(|r| r.0 >= r.1) {
        return Ok(BigUint::zero());
    }
    if !f.monotone {
        return Ok(ranges.iter().map(|&(lo, hi)| BigUint::from(hi - lo)).product());
    }
    let base = ranges.iter().map(|r| r.0).min().unwrap_or(1);
    let top = ranges.iter().map(|r| r.1).max().unwrap_or(1);
    if top - base > MAX_DP_SPAN {
        return Err(Error::EnumerationTooLarge { size: (top - base) as f64, cap: MAX_DP_SPAN });
    }
    // ways[v - base] = number of valid prefixes ending with value v
    let span = (top - base) as usize;
    let mut ways = vec![BigUint::zero(); span];
    for v in ranges[0].0..ranges[0].1 {
        ways[(v - base) as usize] = BigUint::one();
    }
    for &(lo, hi) in &ranges[1..] {
        let mut next = vec![BigUint::zero(); span];
        let mut acc = BigUint::zero();
        for v in base..hi {
            acc += &ways[(v - base) as usize];
            if v >= lo {
                next[(v - base) as usize] = acc.clone();
            }
        }
        ways = next;
    }
    Ok(ways.into_iter().sum())
}

/// `N_n(L) = C(n + L - 1, n)`: nondecreasing `n`-tuples with entries in `[1, L]`.
pub fn count_monotone(n: u64, l: u64) -> Result<BigUint> {
    if n == 0 || l == 0 {
        return Err(domain("count_monotone needs n >= 1 and L >= 1"));
    }
    let k = n.min(l - 1);
    let top = n + l - 1;
    let mut c = BigUint::one();
    for i in 1..=k {
        c = c * BigUint::from(top - k + i) / BigUint::from(i);
    }
    Ok(c)
}

/// `(ln sqrt(2 pi) + (n + 1/2) ln n - n, 1 + (n + 1/2) ln n - n)`, which
/// sandwich `ln n!`.
pub fn stirling_bounds(n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let x = n as f64;
    let core = (x + 0.5) * x.ln() - x;
    Ok((0.5 * (2.0 * std::f64::consts::PI).ln() + core, 1.0 + core))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CkBounds {
    /// `ln(2^k k^(k(alpha+eps)) / k!)`.
    pub log_intermediate: f64,
    /// `ln(2^k (k!)^(alpha+eps-1) (e^k / sqrt(2 pi k))^(alpha+eps))`.
    pub log_final: f64,
}

/// Log-domain upper bounds on the size of the `C_k` family.
pub fn ck_count_bound(k: u64, alpha: f64, eps: f64) -> Result<CkBounds> {
    if k == 0 {
        return Err(domain("k must be >= 1"));
    }
    if alpha < 1.0 {
        return Err(domain(format!("alpha must be >= 1, got {alpha}")));
    }
    check_alpha_eps(alpha, eps)?;
    let x = k as f64;
    let r = alpha + eps;
    let lf = log_factorials(k as usize)[k as usize];
    let ln2 = std::f64::consts::LN_2;
    Ok(CkBounds {
        log_intermediate: x * ln2 + x * r * x.ln() - lf,
        log_final: x * ln2 + (r - 1.0) * lf + r * (x - 0.5 * (2.0 * std::f64::consts::PI * x).ln()),
    })
}

fn log_s_at_least_3(s: &ScaleSeq, k: usize) -> Result<f64> {
    let l = s.log_s(k)?;
    let ok = match s.s_u64(k)? {
        Some(v) => v >= 3,
        None => l >= 3f64.ln(),
    };
    if !ok {
        return Err(Error::Contract { index: k, reason: "s_k must be >= 3".into() });
    }
    Ok(l)
}

/// `ln eps_k = -ln 8 - 2 sum_{i <= k} ln((i+1) s_i)` for `k = 1..=n`.
pub fn gap_epsilon_series(s: &ScaleSeq, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        acc.add(((k + 1) as f64).ln() + log_s_at_least_3(s, k)?);
        out.push(-(8f64.ln()) - 2.0 * acc.value());
    }
    Ok(out)
}

/// `ln eps_n`, the log of the gap between neighbouring basic intervals.
pub fn gap_epsilon(s: &ScaleSeq, n: usize) -> Result<f64> {
    Ok(*gap_epsilon_series(s, n)?.last().expect("n >= 1"))
}

/// Running `ln(m_1...m_n) / -(ln m_{n+1} + ln eps_{n+1})` for `n = 1..=N`;
/// the tail infimum is the reported lower bound. `m` and `log_eps` are
/// indexed from 1 and need at least `N + 1` entries.
pub fn falconer_lower_bound(m: &[u64], log_eps: &[f64], n_max: usize, window: Option<usize>) -> Result<TailEstimate> {
    if n_max == 0 {
        return Err(domain("N must be >= 1"));
    }
    if m.len() < n_max + 1 || log_eps.len() < n_max + 1 {
        return Err(domain(format!("need {} branching counts and gaps, got {} and {}", n_max + 1, m.len(), log_eps.len())));
    }
    if let Some(i) = m[..=n_max].iter().position(|&v| v < 2) {
        return Err(Error::Contract { index: i + 1, reason: "m_n must be >= 2".into() });
    }
    if let Some(i) = log_eps[..=n_max].windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::Contract { index: i + 2, reason: "gaps must be strictly decreasing".into() });
    }
    let mut acc = CompensatedSum::new();
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        acc.add((m[n - 1] as f64).ln());
        values.push((n, acc.value() / -((m[n] as f64).ln() + log_eps[n])));
    }
    Ok(TailEstimate::from_values(values, window))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    /// Exact lengths of every enumerated cylinder.
    Enumerated,
    /// Length bounds `1/2 prod (hi_k)^-2 <= |I| <= prod (lo_k)^-2`.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverMode {
    /// Enumerate when the width product is under the cap, else analytic.
    #[default]
    Auto,
    Enumerated,
    Analytic,
}

/// `(s, lower, upper)` bounds on `ln sum |I|^s`; equal for enumerated covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedSum {
    pub s: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub lower: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub family: String,
    pub generation: usize,
    pub method: CoverMethod,
    #[serde(serialize_with = "serde_util::display")]
    pub count: BigUint,
    #[serde(serialize_with = "serde_util::real")]
    pub log_count: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub log_min_len: f64,
    #[serde(serialize_with = "serde_util::real")]
    pub log_max_len: f64,
    pub weighted_sums: Vec<WeightedSum>,
    /// `ln |I|` of every cylinder, for enumerated covers.
    #[serde(skip)]
    pub log_lengths: Option<Vec<f64>>,
}

/// Grid of `s` values reported in every [`CoverReport`].
pub const S_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

impl CoverReport {
    /// Bounds on `ln sum |I|^s`: exact for enumerated covers, otherwise
    /// `ln count + s ln min <= . <= ln count + s ln max`.
    pub fn log_weighted_sum(&self, s: f64) -> (f64, f64) {
        match &self.log_lengths {
            Some(ls) => {
                let mut lse = LogSumExp::new();
                for &l in ls {
                    lse.push(s * l);
                }
                let v = lse.value();
                (v, v)
            }
            None if self.count.is_zero() => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            None => (self.log_count + s * self.log_min_len, self.log_count + s * self.log_max_len),
        }
    }

    fn fill_grid(&mut self) {
        self.weighted_sums = S_GRID
            .iter()
            .map(|&s| {
                let (lower, upper) = self.log_weighted_sum(s);
                WeightedSum { s, lower, upper }
            })
            .collect();
    }
}

/// `-ln(q_n (q_n + q_{n-1}))`, the exact log length of a cylinder.
pub fn log_cylinder_length(prefix: &[u64]) -> f64 {
    let (mut q_prev, mut q) = (0u128, 1u128);
    for (i, &a) in prefix.iter().enumerate() {
        match (a as u128).checked_mul(q).and_then(|x| x.checked_add(q_prev)) {
            Some(next) => {
                q_prev = q;
                q = next;
            }
            None => return log_cylinder_length_big(prefix, i, q_prev, q),
        }
    }
    match q.checked_mul(q + q_prev) {
        Some(d) => -(d as f64).ln(),
        None => -((q as f64).ln() + ((q + q_prev) as f64).ln()),
    }
}

fn log_cylinder_length_big(prefix: &[u64], from: usize, q_prev: u128, q: u128) -> f64 {
    let (mut q_prev, mut q) = (BigUint::from(q_prev), BigUint::from(q));
    for &a in &prefix[from..] {
        let next = &q * a + &q_prev;
        q_prev = std::mem::replace(&mut q, next);
    }
    let s = &q + &q_prev;
    -(ln_biguint(&q) + ln_biguint(&s))
}

/// Count, extreme lengths and weighted sums of the family at generation `n`.
pub fn cover_report(f: &ConstraintFamily, n: usize, mode: CoverMode, cap: u64) -> Result<CoverReport> {
    let ranges = f.ranges(n)?;
    let enumerate = match mode {
        CoverMode::Enumerated => true,
        CoverMode::Analytic => false,
        CoverMode::Auto => width_product(&ranges) <= cap as f64,
    };
    let mut report = if enumerate {
        let mut lengths = Vec::new();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in enumerate_family(f, n, cap)? {
            let l = log_cylinder_length(&t);
            lo = lo.min(l);
            hi = hi.max(l);
            lengths.push(l);
        }
        let count = BigUint::from(lengths.len());
        CoverReport {
            family: f.name.clone(),
            generation: n,
            method: CoverMethod::Enumerated,
            log_count: (lengths.len() as f64).ln(),
            count,
            log_min_len: lo,
            log_max_len: hi,
            weighted_sums: Vec::new(),
            log_lengths: Some(lengths),
        }
    } else {
        let count = count_family(f, n)?;
        let mut lmax = CompensatedSum::new();
        let mut lmin = CompensatedSum::new();
        for &(lo, hi) in &ranges {
            lmax.add(-2.0 * (lo as f64).ln());
            // the largest admissible entry is hi - 1, and q grows by at most a + 1
            lmin.add(-2.0 * (hi as f64).ln());
        }
        let empty = count.is_zero();
        CoverReport {
            family: f.name.clone(),
            generation: n,
            method: CoverMethod::Analytic,
            log_count: if empty { f64::NEG_INFINITY } else { ln_biguint(&count) },
            count,
            log_min_len: if empty { f64::NAN } else { -std::f64::consts::LN_2 + lmin.value() },
            log_max_len: if empty { f64::NAN } else { lmax.value() },
            weighted_sums: Vec::new(),
            log_lengths: None,
        }
    };
    report.fill_grid();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub generation: usize,
    pub method: CoverMethod,
    /// Reported exponent: the bisection root, or the bracket midpoint for
    /// analytic covers.
    pub s_star: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport {
    pub family: String,
    pub points: Vec<CriticalPoint>,
    pub s_star: f64,
    pub lo: f64,
    pub hi: f64,
    /// Generations past this index are not examined.
    pub truncated_at: usize,
}

/// Absolute bisection tolerance on `s`.
pub const BISECTION_TOL: f64 = 1e-4;

fn solve_zero(report: &CoverReport) -> Result<(f64, f64, f64)> {
    if report.log_lengths.is_none() {
        // root of the upper bound is the largest possible s*, of the lower bound the smallest
        let lc = report.log_count;
        if !(lc.is_finite() && report.log_max_len < 0.0) {
            return Err(Error::NonBracketing { lo: 0.0, hi: f64::INFINITY, f_lo: lc, f_hi: lc });
        }
        let lo = lc / -report.log_min_len;
        let hi = lc / -report.log_max_len;
        return Ok((0.5 * (lo + hi), lo, hi));
    }
    let f = |s: f64| report.log_weighted_sum(s).0;
    let f0 = f(0.0);
    if !(f0 >= 0.0) {
        return Err(Error::NonBracketing { lo: 0.0, hi: 0.0, f_lo: f0, f_hi: f0 });
    }
    if f0 == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        if hi >= 64.0 {
            return Err(Error::NonBracketing { lo: 0.0, hi, f_lo: f0, f_hi: f(hi) });
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), lo, hi))
}

/// Solves `ln sum |I|^s = 0` at every generation `1..=n_max`.
pub fn critical_exponent(f: &ConstraintFamily, n_max: usize, mode: CoverMode, cap: u64) -> Result<CriticalReport> {
    if n_max == 0 {
        return Err(domain("n_max must be >= 1"));
    }
    let mut points = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let report = cover_report(f, n, mode, cap)?;
        let (s_star, lo, hi) = solve_zero(&report)?;
        points.push(CriticalPoint { generation: n, method: report.method, s_star, lo, hi });
    }
    let last = *points.last().expect("n_max >= 1");
    Ok(CriticalReport {
        family: f.name.clone(),
        s_star: last.s_star,
        lo: last.lo,
        hi: last.hi,
        truncated_at: n_max,
        points,
    })
}

pub fn count_to_f64(c: &BigUint) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}
