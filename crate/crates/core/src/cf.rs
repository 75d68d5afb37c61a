//! Exact continued-fraction arithmetic: expansion of rationals, convergents,
//! cylinder intervals and the Gauss map.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::golden_power_le;
use crate::error::{domain, Error, Result};
use crate::seq::PQSeq;

fn to_rational(p: &BigUint, q: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()))
}

fn check_unit_interval(x: &BigRational) -> Result<()> {
    if x.is_negative() || x >= &BigRational::one() {
        return Err(domain(format!("{x} is outside [0, 1)")));
    }
    Ok(())
}

/// Canonical partial quotients of a rational in `[0, 1)`: the last quotient
/// is at least 2 whenever the expansion is nonempty.
pub fn partial_quotients(x: &BigRational, max_terms: usize) -> Result<Vec<BigUint>> {
    check_unit_interval(x)?;
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    let mut terms = Vec::new();
    while !num.is_zero() {
        if terms.len() == max_terms {
            return Err(Error::ExpansionTooLong { max_terms });
        }
        let (a, r) = den.div_rem(&num);
        terms.push(a);
        den = std::mem::replace(&mut num, r);
    }
    Ok(terms)
}

/// Expands a rational in `[0, 1)` into its finite canonical expansion.
pub fn expand(x: &BigRational, max_terms: usize) -> Result<PQSeq> {
    partial_quotients(x, max_terms).map(PQSeq::Explicit)
}

/// Evaluates `[a_1, ..., a_n]`; the empty expansion is 0.
pub fn evaluate(terms: &[BigUint]) -> BigRational {
    let mut x = BigRational::zero();
    for a in terms.iter().rev() {
        x = (BigRational::from_integer(BigInt::from(a.clone())) + x).recip();
    }
    x
}

/// The n-th convergent `p_n / q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub n: usize,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub p: BigUint,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub q: BigUint,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        to_rational(&self.p, &self.q)
    }

    /// `p_n q_{n-1} - p_{n-1} q_n`, which equals `(-1)^(n-1)`.
    pub fn determinant(&self, prev: &Convergent) -> BigInt {
        BigInt::from(&self.p * &prev.q) - BigInt::from(&prev.p * &self.q)
    }

    pub fn is_reduced(&self) -> bool {
        self.p.gcd(&self.q).is_one()
    }

    /// Exact check of `q_n >= phi^n / (2 sqrt 5)`, i.e. `phi^(2n) <= 20 q_n^2`.
    pub fn satisfies_fibonacci_bound(&self) -> bool {
        let bound = BigRational::from_integer(BigInt::from(&self.q * &self.q * 20u32));
        golden_power_le(&bound, 2 * self.n as u64)
    }
}

/// Runs `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}` from the
/// seeds `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
#[derive(Debug, Clone)]
pub struct ConvergentRecursion {
    n: usize,
    p_prev: BigUint,
    p: BigUint,
    q_prev: BigUint,
    q: BigUint,
}

impl Default for ConvergentRecursion {
    fn default() -> Self {
        Self {
            n: 0,
            p_prev: BigUint::one(),
            p: BigUint::zero(),
            q_prev: BigUint::zero(),
            q: BigUint::one(),
        }
    }
}

impl ConvergentRecursion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, a: &BigUint) {
        let p = a * &self.p + &self.p_prev;
        let q = a * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p);
        self.q_prev = std::mem::replace(&mut self.q, q);
        self.n += 1;
    }

    pub fn current(&self) -> Convergent {
        Convergent {
            n: self.n,
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }

    /// `(p_{n-1}, q_{n-1})`; the seeds when no term has been pushed.
    pub fn previous(&self) -> Convergent {
        Convergent {
            n: self.n.saturating_sub(1),
            p: self.p_prev.clone(),
            q: self.q_prev.clone(),
        }
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn q_prev(&self) -> &BigUint {
        &self.q_prev
    }
}

/// Convergents `k = 1..=terms.len()` of an explicit prefix.
pub fn convergents_of(terms: &[BigUint]) -> Vec<Convergent> {
    let mut rec = ConvergentRecursion::new();
    terms
        .iter()
        .map(|a| {
            rec.push(a);
            rec.current()
        })
        .collect()
}

/// Convergents `k = 1..=n` of a partial-quotient sequence.
pub fn convergents(seq: &PQSeq, n: usize) -> Result<Vec<Convergent>> {
    if n == 0 {
        return Err(domain("convergents need n >= 1"));
    }
    Ok(convergents_of(&seq.prefix(n)?))
}

/// The cylinder `I(a_1, ..., a_n)` with endpoints stored as `lo < hi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderInterval {
    #[serde(serialize_with = "crate::serde_util::display_seq")]
    pub prefix: Vec<BigUint>,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub lo: BigRational,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub hi: BigRational,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub length: BigRational,
}

impl CylinderInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Cylinder of a nonempty prefix of positive integers. The endpoints are
/// `p_n/q_n` and `(p_n + p_{n-1})/(q_n + q_{n-1})`, and the length is
/// `1/(q_n (q_n + q_{n-1}))`.
pub fn cylinder(prefix: &[BigUint]) -> Result<CylinderInterval> {
    if prefix.is_empty() {
        return Err(domain("cylinder of an empty prefix"));
    }
    if let Some(i) = prefix.iter().position(Zero::is_zero) {
        return Err(domain(format!("partial quotient at index {} is 0", i + 1)));
    }
    let mut rec = ConvergentRecursion::new();
    prefix.iter().for_each(|a| rec.push(a));
    let cur = rec.current();
    let prev = rec.previous();
    let a = to_rational(&cur.p, &cur.q);
    let b = to_rational(&(&cur.p + &prev.p), &(&cur.q + &prev.q));
    let length = BigRational::new(
        BigInt::one(),
        BigInt::from(&cur.q * (&cur.q + &prev.q)),
    );
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    debug_assert_eq!(&hi - &lo, length);
    Ok(CylinderInterval {
        prefix: prefix.to_vec(),
        lo,
        hi,
        length,
    })
}

/// `T(x) = 1/x - floor(1/x)` on `(0, 1)`.
pub fn gauss_map(x: &BigRational) -> Result<BigRational> {
    if !x.is_positive() || x >= &BigRational::one() {
        return Err(domain(format!("gauss map needs 0 < x < 1, got {x}")));
    }
    let inv = x.recip();
    Ok(&inv - inv.floor())
}

/// Convenience conversion for small prefixes.
pub fn big(terms: &[u64]) -> Vec<BigUint> {
    terms.iter().map(|&a| BigUint::from(a)).collect()
}

/// Parses `p/q` (or an integer) into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || domain(format!("cannot parse {s:?} as p/q"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(domain("zero denominator"));
    }
    Ok(BigRational::new(p, q))
}
