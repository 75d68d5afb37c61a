//! Numeric helpers shared across modules: compensated and log-domain
//! summation, exact floors of real powers, exact `floor(e^n)`, and exact
//! comparisons against powers of the golden ratio.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Streaming `log(sum(exp(x_i)))`, rescaled whenever a new maximum arrives.
/// Merging two accumulators is associative and commutative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled: CompensatedSum,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: CompensatedSum::new(),
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.max {
            if self.max != f64::NEG_INFINITY {
                self.scaled.scale((self.max - log_term).exp());
            }
            self.max = log_term;
            self.scaled.add(1.0);
        } else {
            self.scaled.add((log_term - self.max).exp());
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        let mut rhs = other.scaled;
        if other.max > self.max {
            self.scaled.scale((self.max - other.max).exp());
            self.max = other.max;
        } else {
            rhs.scale((other.max - self.max).exp());
        }
        self.scaled.merge(&rhs);
    }

    /// `-inf` when nothing was pushed.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.value().ln()
        }
    }
}

/// Natural log of a positive big integer, without overflowing `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Table of `ln m!` for `m = 0..=n`, accumulated as compensated sums of logs.
pub fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for m in 1..=n {
        acc.add((m as f64).ln());
        out.push(acc.value());
    }
    out
}

/// Best rational `p/q` with `q <= max_den` lying within `1e-12` (relative) of `x`.
pub fn small_rational(x: f64, max_den: u64) -> Option<(u64, u64)> {
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let tol = 1e-12 * x.max(1.0);
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    (base as u128).checked_pow(exp)
}

/// Compares `a^q` with `n^p` exactly.
fn cmp_powers(a: u64, q: u32, n: u64, p: u32) -> Ordering {
    match (checked_pow_u128(a, q), checked_pow_u128(n, p)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => BigUint::from(a).pow(q).cmp(&BigUint::from(n).pow(p)),
    }
}

/// A positive real exponent `r` for which `floor(n^r)` and `ceil(n^r)` are
/// needed exactly. Exponents that are rationals with denominator at most
/// 1024 are handled in exact integer arithmetic; others fall back to `powf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExponent {
    value: f64,
    ratio: Option<(u32, u32)>,
}

/// Above this, `n^r` no longer fits comfortably in a `u64`.
const LN_U64_LIMIT: f64 = 43.6;

impl PowerExponent {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(domain(format!("exponent must be finite and >= 0, got {value}")));
        }
        let ratio = if value == 0.0 {
            Some((0, 1))
        } else {
            small_rational(value, 1024).and_then(|(p, q)| Some((u32::try_from(p).ok()?, q as u32)))
        };
        Ok(Self { value, ratio })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_exact(&self) -> bool {
        self.ratio.is_some()
    }

    /// `floor(n^r)` when it fits in a `u64`.
    pub fn floor_u64(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return Some(if self.value == 0.0 { 1 } else { 0 });
        }
        if self.value * (n as f64).ln() > LN_U64_LIMIT {
            return None;
        }
        let guess = (n as f64).powf(self.value).floor() as u64;
        let Some((p, q)) = self.ratio else {
            return Some(guess);
        };
        let mut g = guess;
        while g > 0 && cmp_powers(g, q, n, p) == Ordering::Greater {
            g -= 1;
        }
        while cmp_powers(g + 1, q, n, p) != Ordering::Greater {
            g += 1;
        }
        Some(g)
    }

    /// `ceil(n^r)` when it fits in a `u64`.
    pub fn ceil_u64(&self, n: u64) -> Option<u64> {
        let f = self.floor_u64(n)?;
        match self.ratio {
            Some((p, q)) => {
                if cmp_powers(f, q, n, p) == Ordering::Equal {
                    Some(f)
                } else {
                    f.checked_add(1)
                }
            }
            None => {
                let x = (n as f64).powf(self.value);
                Some(x.ceil() as u64)
            }
        }
    }

    /// `floor(n^r)` at any size.
    pub fn floor_big(&self, n: u64) -> BigUint {
        if let Some(v) = self.floor_u64(n) {
            return BigUint::from(v);
        }
        match self.ratio {
            Some((p, q)) => BigUint::from(n).pow(p).nth_root(q),
            None => {
                let log2 = self.value * (n as f64).log2();
                let shift = (log2 - 60.0).max(0.0).floor();
                let mantissa = (2f64).powf(log2 - shift);
                BigUint::from(mantissa as u64) << (shift as u64)
            }
        }
    }

    /// `ln(n^r)`.
    pub fn ln_pow(&self, n: u64) -> f64 {
        self.value * (n as f64).ln()
    }
}

/// Exact `floor(e^n)` via a fixed-point Taylor series with a rigorous error
/// budget; guard bits are increased until the floor is certified.
pub fn floor_exp(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let mut guard = 64u64;
    loop {
        let precision = (n as f64 * std::f64::consts::LOG2_E).ceil() as u64 + guard;
        let scale = BigUint::one() << precision;
        let mut term = scale.clone();
        let mut sum = scale.clone();
        let mut k = 0u64;
        // Each floor in the recursion loses less than one unit; the
        // accumulated loss stays below `k` units once terms are below one.
        loop {
            k += 1;
            term = term * n / k;
            if term.is_zero() {
                break;
            }
            sum += &term;
        }
        // Tail after the first vanishing term is below two units.
        let slack = BigUint::from(k + 2);
        let lo = &sum >> precision;
        let hi = (&sum + &slack) >> precision;
        if lo == hi {
            return lo;
        }
        guard *= 2;
    }
}

/// Fibonacci and Lucas numbers `(F_k, L_k)`.
pub fn fibonacci_lucas(k: u64) -> (BigUint, BigUint) {
    let (mut f0, mut f1) = (BigUint::zero(), BigUint::one());
    for _ in 0..k {
        let f2 = &f0 + &f1;
        f0 = std::mem::replace(&mut f1, f2);
    }
    // L_k = F_{k-1} + F_{k+1} = 2 F_{k+1} - F_k
    let lucas = (&f1 << 1u32) - &f0;
    (f0, lucas)
}

/// Decides `phi^k <= r` exactly, with `phi` the golden ratio, using
/// `phi^k = (L_k + F_k sqrt 5) / 2`.
pub fn golden_power_le(r: &BigRational, k: u64) -> bool {
    let (f, l) = fibonacci_lucas(k);
    let d = r * BigRational::from_integer(2.into()) - BigRational::from_integer(l.into());
    if d.is_negative() {
        return false;
    }
    let lhs = BigRational::from_integer((f.clone() * f * 5u32).into());
    lhs <= &d * &d
}

/// Decides `phi^k >= r` exactly.
pub fn golden_power_ge(r: &BigRational, k: u64) -> bool {
    let (f, l) = fibonacci_lucas(k);
    let d = r * BigRational::from_integer(2.into()) - BigRational::from_integer(l.into());
    if !d.is_positive() {
        return true;
    }
    let lhs = BigRational::from_integer((f.clone() * f * 5u32).into());
    lhs >= &d * &d
}
