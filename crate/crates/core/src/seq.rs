//! Partial-quotient sequences: explicit lists, the closed-form generators
//! used by the exponent constructions, and the splice/perturb combinators.
//!
//! Indices are 1-based throughout, matching `a_1, a_2, ...`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{floor_exp, ln_biguint, PowerExponent};
use crate::error::{domain, Error, Result};

/// Default refusal threshold, in bits, for materializing a single `a(n)`.
pub const DEFAULT_BIT_CAP: u64 = 1_000_000;

/// Largest `n` with `floor(e^n) < 2^64`.
const EXP_FLOOR_U64_MAX_N: usize = 44;

fn exp_floor_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=EXP_FLOOR_U64_MAX_N as u64)
            .map(|n| floor_exp(n).to_u64().expect("fits in u64"))
            .collect()
    })
}

/// A 0/1 sequence used to perturb partial quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bits {
    Zeros,
    Ones,
    /// `first, !first, first, ...`
    Alternating { first: bool },
    Periodic(Vec<bool>),
    /// Zero past the end of the list.
    Explicit(Vec<bool>),
}

impl Bits {
    pub fn bit(&self, n: usize) -> bool {
        debug_assert!(n >= 1);
        match self {
            Bits::Zeros => false,
            Bits::Ones => true,
            Bits::Alternating { first } => (n % 2 == 1) == *first,
            Bits::Periodic(p) if p.is_empty() => false,
            Bits::Periodic(p) => p[(n - 1) % p.len()],
            Bits::Explicit(v) => v.get(n - 1).copied().unwrap_or(false),
        }
    }

    /// `0`, `1`, `alt` (1,0,1,...), `alt0` (0,1,0,...), `periodic:0110` or
    /// `list:0101`.
    pub fn parse(s: &str) -> Result<Self> {
        let digits = |body: &str| -> Result<Vec<bool>> {
            body.chars()
                .filter(|c| *c != ',')
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(domain(format!("bit sequences use 0/1 only, got {c:?}"))),
                })
                .collect()
        };
        match s {
            "0" | "zeros" => Ok(Bits::Zeros),
            "1" | "ones" => Ok(Bits::Ones),
            "alt" | "alt1" => Ok(Bits::Alternating { first: true }),
            "alt0" => Ok(Bits::Alternating { first: false }),
            _ => {
                if let Some(body) = s.strip_prefix("periodic:") {
                    Ok(Bits::Periodic(digits(body)?))
                } else if let Some(body) = s.strip_prefix("list:") {
                    Ok(Bits::Explicit(digits(body)?))
                } else {
                    Err(domain(format!("unknown bit pattern {s:?}")))
                }
            }
        }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        match self {
            Bits::Zeros => write!(f, "zeros"),
            Bits::Ones => write!(f, "ones"),
            Bits::Alternating { first: true } => write!(f, "alt"),
            Bits::Alternating { first: false } => write!(f, "alt0"),
            Bits::Periodic(v) => write!(f, "periodic:{}", bits(v)),
            Bits::Explicit(v) => write!(f, "list:{}", bits(v)),
        }
    }
}

/// A partial-quotient sequence `a_1, a_2, ...` with exact and log-domain access.
#[derive(Debug, Clone, PartialEq)]
pub enum PQSeq {
    /// A finite list; every entry must be positive.
    Explicit(Vec<BigUint>),
    /// `a_n = floor(e^n)`.
    ExpFloor,
    /// `a_n = floor(n^(1/alpha))`.
    PowerFloor { alpha: f64, exponent: PowerExponent },
    /// `a_n = 1`.
    ConstantOne,
    /// `prefix` at indices `n <= cut`, `tail` afterwards.
    Spliced { prefix: Box<PQSeq>, tail: Box<PQSeq>, cut: usize },
    /// `a_n(base) + bits_n`.
    Perturbed { base: Box<PQSeq>, bits: Bits },
}

/// A term that is either small enough to hold exactly or known through its log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Small(u64),
    Large { ln: f64 },
}

impl PQSeq {
    pub fn explicit<I: IntoIterator<Item = u64>>(terms: I) -> Result<Self> {
        let terms: Vec<BigUint> = terms.into_iter().map(BigUint::from).collect();
        if let Some(i) = terms.iter().position(Zero::is_zero) {
            return Err(Error::Contract {
                index: i + 1,
                reason: "partial quotients must be >= 1".into(),
            });
        }
        Ok(PQSeq::Explicit(terms))
    }

    pub fn power_floor(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(domain(format!("power_floor needs 0 < alpha < inf, got {alpha}")));
        }
        Ok(PQSeq::PowerFloor {
            alpha,
            exponent: PowerExponent::new(1.0 / alpha)?,
        })
    }

    /// Number of terms, or `None` for an infinite sequence.
    pub fn len(&self) -> Option<usize> {
        match self {
            PQSeq::Explicit(v) => Some(v.len()),
            PQSeq::ExpFloor | PQSeq::PowerFloor { .. } | PQSeq::ConstantOne => None,
            PQSeq::Spliced { tail, .. } => tail.len(),
            PQSeq::Perturbed { base, .. } => base.len(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(domain("partial quotients are indexed from 1"));
        }
        match self.len() {
            Some(len) if n > len => Err(Error::OutOfRange { index: n, len }),
            _ => Ok(()),
        }
    }

    /// `a(n)` when it fits in a `u64`.
    pub fn a_u64(&self, n: usize) -> Result<Option<u64>> {
        self.check_index(n)?;
        Ok(match self {
            PQSeq::Explicit(v) => v[n - 1].to_u64(),
            PQSeq::ExpFloor => exp_floor_table().get(n).copied(),
            PQSeq::PowerFloor { exponent, .. } => exponent.floor_u64(n as u64),
            PQSeq::ConstantOne => Some(1),
            PQSeq::Spliced { prefix, tail, cut } => {
                if n <= *cut {
                    prefix.a_u64(n)?
                } else {
                    tail.a_u64(n)?
                }
            }
            PQSeq::Perturbed { base, bits } => base
                .a_u64(n)?
                .and_then(|a| a.checked_add(u64::from(bits.bit(n)))),
        })
    }

    /// Approximate size of `a(n)` in bits.
    pub fn bits_estimate(&self, n: usize) -> Result<u64> {
        Ok((self.log_a(n)? / std::f64::consts::LN_2).floor() as u64 + 1)
    }

    /// Exact `a(n)`, refusing values above [`DEFAULT_BIT_CAP`] bits.
    pub fn a(&self, n: usize) -> Result<BigUint> {
        self.a_capped(n, DEFAULT_BIT_CAP)
    }

    pub fn a_capped(&self, n: usize, cap_bits: u64) -> Result<BigUint> {
        if let Some(v) = self.a_u64(n)? {
            return Ok(BigUint::from(v));
        }
        let bits = self.bits_estimate(n)?;
        if bits > cap_bits {
            return Err(Error::TooLarge { index: n, bits, cap: cap_bits });
        }
        Ok(match self {
            PQSeq::Explicit(v) => v[n - 1].clone(),
            PQSeq::ExpFloor => floor_exp(n as u64),
            PQSeq::PowerFloor { exponent, .. } => exponent.floor_big(n as u64),
            PQSeq::ConstantOne => BigUint::one(),
            PQSeq::Spliced { prefix, tail, cut } => {
                if n <= *cut {
                    prefix.a_capped(n, cap_bits)?
                } else {
                    tail.a_capped(n, cap_bits)?
                }
            }
            PQSeq::Perturbed { base, bits } => {
                base.a_capped(n, cap_bits)? + BigUint::from(u8::from(bits.bit(n)))
            }
        })
    }

    /// Natural log of `a(n)`. Exact (to rounding) for explicit entries and
    /// whenever the value fits in a `u64`; for larger closed-form terms the
    /// analytic value is returned, within `1/a(n)` of the true log.
    pub fn log_a(&self, n: usize) -> Result<f64> {
        if let Some(v) = self.a_u64(n)? {
            return Ok((v as f64).ln());
        }
        Ok(match self {
            PQSeq::Explicit(v) => ln_biguint(&v[n - 1]),
            PQSeq::ExpFloor => n as f64,
            PQSeq::PowerFloor { exponent, .. } => exponent.ln_pow(n as u64),
            PQSeq::ConstantOne => 0.0,
            PQSeq::Spliced { prefix, tail, cut } => {
                if n <= *cut {
                    prefix.log_a(n)?
                } else {
                    tail.log_a(n)?
                }
            }
            PQSeq::Perturbed { base, bits } => {
                let l = base.log_a(n)?;
                if bits.bit(n) {
                    l + (-l).exp().ln_1p()
                } else {
                    l
                }
            }
        })
    }

    pub fn term(&self, n: usize) -> Result<Term> {
        Ok(match self.a_u64(n)? {
            Some(v) => Term::Small(v),
            None => Term::Large { ln: self.log_a(n)? },
        })
    }

    /// Exact comparison of `a(m)` and `a(n)`.
    pub fn cmp_terms(&self, m: usize, n: usize) -> Result<Ordering> {
        let (x, y) = (self.term(m)?, self.term(n)?);
        Ok(match (x, y) {
            (Term::Small(a), Term::Small(b)) => a.cmp(&b),
            (Term::Small(_), Term::Large { .. }) => Ordering::Less,
            (Term::Large { .. }, Term::Small(_)) => Ordering::Greater,
            (Term::Large { ln: a }, Term::Large { ln: b }) => {
                if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                } else {
                    self.a(m)?.cmp(&self.a(n)?)
                }
            }
        })
    }

    /// The first `n` terms, exactly.
    pub fn prefix(&self, n: usize) -> Result<Vec<BigUint>> {
        (1..=n).map(|k| self.a(k)).collect()
    }

    /// Short human-readable description.
    pub fn label(&self) -> String {
        match self {
            PQSeq::Explicit(v) => format!("explicit[{}]", v.len()),
            PQSeq::ExpFloor => "exp_floor".into(),
            PQSeq::PowerFloor { alpha, .. } => format!("power_floor({alpha})"),
            PQSeq::ConstantOne => "constant_one".into(),
            PQSeq::Spliced { prefix, tail, cut } => {
                format!("spliced({}, {}, cut={cut})", prefix.label(), tail.label())
            }
            PQSeq::Perturbed { base, bits } => format!("perturbed({}, {bits})", base.label()),
        }
    }
}
