//! Gauss-measure Monte Carlo for Birkhoff averages of `a_k^-t`.
//!
//! Each sample is a random dyadic interval of width `2^-P` drawn from the
//! Gauss measure. Partial quotients are extracted by running Euclid on both
//! endpoints in lockstep; a quotient is certified only while the two
//! expansions agree, so every reported quotient is exact for every real in
//! the interval.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::CompensatedSum;
use crate::cf::CylinderInterval;
use crate::error::{domain, Error, Result};

/// Identifier of the generator recorded in every run.
pub const PRNG_ID: &str = "chacha8-seed_from_u64-stream_per_sample";

/// Bits of each sample taken from the inverse CDF; the rest are uniform.
const TOP_BITS: u32 = 32;

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `2^u - 1`, the inverse of the Gauss-measure distribution function.
pub fn gauss_inverse_cdf(u: f64) -> f64 {
    (u * std::f64::consts::LN_2).exp_m1()
}

/// `count` Gauss-distributed samples in `(0, 1)`; sample `i` uses its own
/// stream of the seeded generator.
pub fn sample_gauss(count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(domain("count must be >= 1"));
    }
    Ok((0..count as u64)
        .map(|i| gauss_inverse_cdf(sample_rng(seed, i).sample(Open01)))
        .collect())
}

/// A real known to lie in `[lo, hi]`, both endpoints exact rationals in
/// `[0, 1]` stored as `(numerator, denominator)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEnclosure {
    lo: (BigUint, BigUint),
    hi: (BigUint, BigUint),
}

impl RealEnclosure {
    pub fn exact(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() || num >= den {
            return Err(domain("need 0 <= num < den"));
        }
        Ok(RealEnclosure { lo: (num.clone(), den.clone()), hi: (num, den) })
    }

    /// `[m, m + 1] / 2^bits`.
    pub fn dyadic(m: BigUint, bits: u64) -> Result<Self> {
        let den = BigUint::from(1u8) << bits;
        if m >= den {
            return Err(domain("mantissa exceeds the precision"));
        }
        Ok(RealEnclosure { hi: (&m + 1u8, den.clone()), lo: (m, den) })
    }

    pub fn from_cylinder(c: &CylinderInterval) -> Self {
        let parts = |x: &num_rational::BigRational| {
            (x.numer().to_biguint().expect("nonnegative"), x.denom().to_biguint().expect("positive"))
        };
        RealEnclosure { lo: parts(&c.lo), hi: parts(&c.hi) }
    }

    /// Partial quotients shared by every real in the enclosure, up to `max`.
    pub fn certified_quotients(&self, max: usize) -> Vec<BigUint> {
        let (mut a, mut b) = (self.lo.clone(), self.hi.clone());
        let mut out = Vec::new();
        while out.len() < max && !a.0.is_zero() && !b.0.is_zero() {
            let (qa, ra) = a.1.div_rem(&a.0);
            let (qb, rb) = b.1.div_rem(&b.0);
            if qa != qb {
                break;
            }
            out.push(qa);
            a = (ra, a.0);
            b = (rb, b.0);
        }
        out
    }
}

/// `(1/n) sum_{k <= n} a_k^-t` for every `t`, from already certified quotients.
fn averages_from(quotients: &[BigUint], ts: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = quotients
        .iter()
        .map(|a| a.to_f64().map_or(f64::INFINITY, f64::ln))
        .collect();
    ts.iter()
        .map(|&t| {
            let mut acc = CompensatedSum::new();
            for &l in &logs {
                acc.add((-t * l).exp());
            }
            acc.value() / logs.len() as f64
        })
        .collect()
}

/// Birkhoff average of `a_k^-t` over the first `n` partial quotients of
/// every real in `x`.
pub fn birkhoff_average(x: &RealEnclosure, t: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if !(t > 0.0) {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    let q = x.certified_quotients(n);
    if q.len() < n {
        return Err(Error::PrecisionExhausted { achieved: q.len(), requested: n });
    }
    Ok(averages_from(&q, &[t])[0])
}

/// Working precision for an orbit of length `n`: `max(64, 4n)` bits rounded
/// up to whole 32-bit words.
pub fn working_precision(n: usize) -> u64 {
    (64u64.max(4 * n as u64)).div_ceil(32) * 32
}

/// One Gauss sample as a dyadic enclosure, refined with further random bits
/// from the same stream until `n` quotients are certified.
fn gauss_orbit(seed: u64, index: u64, n: usize) -> (Vec<BigUint>, u64) {
    let mut rng = sample_rng(seed, index);
    let u: f64 = rng.sample(Open01);
    let top = (gauss_inverse_cdf(u) * 2f64.powi(TOP_BITS as i32)).floor() as u64;
    let top = top.min(u32::MAX as u64) as u32;
    let words = (working_precision(n) / 32) as usize;
    // little-endian 32-bit digits; the top digit comes from the inverse CDF
    let mut digits: Vec<u32> = (0..words - 1).map(|_| rng.next_u32()).collect();
    digits.push(top);
    let mut mantissa = BigUint::from_slice(&digits);
    let mut bits = 32 * words as u64;
    loop {
        let enc = RealEnclosure::dyadic(mantissa.clone(), bits).expect("mantissa below 2^bits");
        let q = enc.certified_quotients(n);
        if q.len() >= n {
            return (q, bits);
        }
        let extra = words.max(2);
        let low: Vec<u32> = (0..extra).map(|_| rng.next_u32()).collect();
        mantissa = (mantissa << (32 * extra)) | BigUint::from_slice(&low);
        bits += 32 * extra as u64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PBounds {
    pub t: f64,
    pub k: u64,
    pub p_lower: f64,
    /// `2 p_lower`, before the truncation tail is added.
    pub p_upper_partial: f64,
    pub p_upper: f64,
}

/// Bounds on `P(t) = integral of a_1^-t` against the Gauss measure from the
/// series `S_K = sum_{k <= K} 1 / (k^(t+1) (k+1))`:
/// `S_K / (2 ln 2) <= P(t) <= (S_K + 1 / (t K^t)) / ln 2`.
pub fn p_bounds(t: f64, k: u64) -> Result<PBounds> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("t must be positive, got {t}")));
    }
    if k == 0 {
        return Err(domain("K must be >= 1"));
    }
    let mut s = CompensatedSum::new();
    for i in (1..=k).rev() {
        let x = i as f64;
        s.add(1.0 / (x.powf(t + 1.0) * (x + 1.0)));
    }
    let ln2 = std::f64::consts::LN_2;
    let s = s.value();
    let tail = 1.0 / (t * (k as f64).powf(t));
    Ok(PBounds {
        t,
        k,
        p_lower: s / (2.0 * ln2),
        p_upper_partial: s / ln2,
        p_upper: (s + tail) / ln2,
    })
}

/// Default series truncation for [`p_bounds`].
pub const DEFAULT_SERIES_TERMS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicRun {
    pub seed: u64,
    pub prng: String,
    pub sample_count: usize,
    pub orbit_length: usize,
    pub t: f64,
    #[serde(skip)]
    pub averages: Vec<f64>,
    pub p_lower: f64,
    pub p_upper: f64,
    pub grand_mean: f64,
    /// Empirical standard error of the grand mean.
    pub std_error: f64,
    /// `p_lower - 3 se <= grand_mean <= p_upper + 3 se`.
    pub within_sandwich: bool,
    pub base_precision_bits: u64,
    /// Samples that needed extra random bits to certify the orbit.
    pub refined_samples: usize,
}

/// Birkhoff averages over `sample_count` Gauss samples with orbits of length
/// `orbit_length`, one run per `t`. All runs share the same orbits.
pub fn ergodic_runs(ts: &[f64], sample_count: usize, orbit_length: usize, seed: u64, series_terms: u64) -> Result<Vec<ErgodicRun>> {
    if sample_count < 2 {
        return Err(domain("sample_count must be >= 2"));
    }
    if orbit_length == 0 {
        return Err(domain("orbit_length must be >= 1"));
    }
    let bounds: Vec<PBounds> = ts.iter().map(|&t| p_bounds(t, series_terms)).collect::<Result<_>>()?;
    let base = working_precision(orbit_length);
    let per_sample: Vec<(Vec<f64>, bool)> = (0..sample_count as u64)
        .into_par_iter()
        .map(|i| {
            let (q, bits) = gauss_orbit(seed, i, orbit_length);
            (averages_from(&q[..orbit_length], ts), bits > base)
        })
        .collect();
    let refined = per_sample.iter().filter(|s| s.1).count();
    Ok(ts
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let averages: Vec<f64> = per_sample.iter().map(|s| s.0[j]).collect();
            let n = averages.len() as f64;
            let mut sum = CompensatedSum::new();
            averages.iter().for_each(|&a| sum.add(a));
            let mean = sum.value() / n;
            let mut ss = CompensatedSum::new();
            averages.iter().for_each(|&a| ss.add((a - mean) * (a - mean)));
            let se = (ss.value() / (n - 1.0)).sqrt() / n.sqrt();
            let b = bounds[j];
            ErgodicRun {
                seed,
                prng: PRNG_ID.into(),
                sample_count,
                orbit_length,
                t,
                p_lower: b.p_lower,
                p_upper: b.p_upper,
                grand_mean: mean,
                std_error: se,
                within_sandwich: b.p_lower - 3.0 * se <= mean && mean <= b.p_upper + 3.0 * se,
                base_precision_bits: base,
                refined_samples: refined,
                averages,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{big, cylinder, parse_rational, partial_quotients};
    use proptest::prelude::*;

    #[test]
    fn inverse_cdf_values() {
        assert!((gauss_inverse_cdf(0.5) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(gauss_inverse_cdf(1e-12) < 1e-11);
        assert!((1.0 - gauss_inverse_cdf(1.0 - 1e-12)) < 1e-11);
    }

    #[test]
    fn sample_mean_matches_gauss_measure() {
        let xs = sample_gauss(100_000, 7).unwrap();
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - (1.0 / std::f64::consts::LN_2 - 1.0)).abs() < 0.005);
        assert_eq!(xs, sample_gauss(100_000, 7).unwrap());
    }

    #[test]
    fn constant_expansions() {
        for n in [1usize, 10, 200] {
            let golden = RealEnclosure::from_cylinder(&cylinder(&big(&vec![1; n + 2])).unwrap());
            assert_eq!(birkhoff_average(&golden, 1.0, n).unwrap(), 1.0);
            let root2 = RealEnclosure::from_cylinder(&cylinder(&big(&vec![2; n + 2])).unwrap());
            assert_eq!(birkhoff_average(&root2, 1.0, n).unwrap(), 0.5);
        }
    }

    #[test]
    fn exhausted_precision_is_reported() {
        let golden = RealEnclosure::from_cylinder(&cylinder(&big(&[1; 12])).unwrap());
        assert!(matches!(birkhoff_average(&golden, 1.0, 50), Err(Error::PrecisionExhausted { requested: 50, .. })));
    }

    #[test]
    fn certified_quotients_match_exact_expansion() {
        for s in ["3/7", "355/113", "1/2", "832040/1346269", "987654321/1000000007"] {
            let mut x = parse_rational(s).unwrap();
            if x >= num_rational::BigRational::from_integer(1.into()) {
                x = x.clone() - x.floor();
            }
            let exact = partial_quotients(&x, 1000).unwrap();
            let enc = RealEnclosure::exact(x.numer().to_biguint().unwrap(), x.denom().to_biguint().unwrap()).unwrap();
            assert_eq!(enc.certified_quotients(1000), exact, "{s}");
        }
    }

    #[test]
    fn p_bounds_closed_forms() {
        let b = p_bounds(1.0, DEFAULT_SERIES_TERMS).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let target = (std::f64::consts::PI.powi(2) / 6.0 - 1.0) / (2.0 * ln2);
        assert!((b.p_lower - target).abs() < 1e-6);
        assert_eq!(b.p_upper_partial, 2.0 * b.p_lower);
        assert!(b.p_lower <= b.p_upper);
        let big_t = p_bounds(60.0, 1000).unwrap();
        assert!((big_t.p_lower - 0.5 / (2.0 * ln2)).abs() < 1e-12);
        assert!((big_t.p_upper_partial - 0.5 / ln2).abs() < 1e-12);
    }

    #[test]
    fn exact_integral_lies_in_sandwich() {
        for t in [0.5, 1.0, 2.0] {
            let b = p_bounds(t, 200_000).unwrap();
            // P(t) = sum k^-t log2(1 + 1/(k(k+2))), with a crude tail
            let mut p = CompensatedSum::new();
            for k in (1..=2_000_000u64).rev() {
                let x = k as f64;
                p.add(x.powf(-t) * (1.0 / (x * (x + 2.0))).ln_1p() / std::f64::consts::LN_2);
            }
            assert!(b.p_lower <= p.value() && p.value() <= b.p_upper, "t={t}");
        }
    }

    #[test]
    fn small_run_is_deterministic_and_sandwiched() {
        let a = ergodic_runs(&[0.5, 1.0, 2.0], 300, 200, 42, 100_000).unwrap();
        let b = ergodic_runs(&[0.5, 1.0, 2.0], 300, 200, 42, 100_000).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.within_sandwich, "t={} mean={} [{}, {}]", r.t, r.grand_mean, r.p_lower, r.p_upper);
            assert_eq!(r.prng, PRNG_ID);
        }
        let c = ergodic_runs(&[1.0], 300, 200, 43, 100_000).unwrap();
        assert_ne!(c[0].grand_mean, a[1].grand_mean);
    }

    proptest! {
        #[test]
        fn certified_prefix_is_shared_by_endpoints(m in 1u64..u64::MAX) {
            let enc = RealEnclosure::dyadic(BigUint::from(m), 64).unwrap();
            let q = enc.certified_quotients(100);
            let lo = partial_quotients(&num_rational::BigRational::new(m.into(), num_bigint::BigInt::from(1u8) << 64), 200).unwrap();
            prop_assert!(lo.len() >= q.len());
            prop_assert_eq!(&lo[..q.len()], &q[..]);
        }
    }
}
