//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::time::{Duration, Instant};

use cfexp::arith::{ln_biguint, log_factorials};
use cfexp::cf::{convergents_of, cylinder, evaluate, partial_quotients};
use cfexp::covers::{
    ck_count_bound, count_family, count_monotone, enumerate_family, falconer_lower_bound, gap_epsilon_series,
    stirling_bounds, ConstraintFamily, DEFAULT_ENUM_CAP,
};
use cfexp::ergodic::{ergodic_runs, DEFAULT_SERIES_TERMS};
use cfexp::exponent::{construct_tau, tau_monotone_estimate};
use cfexp::spectra::{
    b_growth, b_hirst, dim_e, dim_f, dim_level_full, dim_level_lambda, intersection_trichotomy, t_sequence,
    xi_limit, PhiSpec, Relation, ScaleSeq, SpectrumPoint,
};
use cfexp::{EstimatorConfig, Exponent};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Outcome {
    check(elapsed < limit, format!("{elapsed:.2?}"), format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn exact_arithmetic_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let len = rng.random_range(1..=30);
        let prefix: Vec<BigUint> = (0..len).map(|_| BigUint::from(rng.random_range(1u32..=10))).collect();
        let convs = convergents_of(&prefix);
        let (mut p_prev, mut q_prev) = (BigUint::ZERO, BigUint::one());
        for c in &convs {
            let det = BigInt::from(&c.p * &q_prev) - BigInt::from(&p_prev * &c.q);
            let sign = if c.n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            if det != sign {
                return Err(format!("determinant at {:?} depth {}", prefix, c.n));
            }
            if !c.p.gcd(&c.q).is_one() {
                return Err(format!("gcd at {:?} depth {}", prefix, c.n));
            }
            if !c.satisfies_fibonacci_bound() {
                return Err(format!("Fibonacci bound at {:?} depth {}", prefix, c.n));
            }
            (p_prev, q_prev) = (c.p.clone(), c.q.clone());
            checked += 1;
        }
        let cyl = cylinder(&prefix).map_err(|e| e.to_string())?;
        if cyl.length != &cyl.hi - &cyl.lo {
            return Err(format!("cylinder length at {prefix:?}"));
        }
    }
    let t = within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("1000 prefixes, {checked} convergents, zero failures in {t}"))
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let q: u64 = rng.random_range(1..=1_000_000);
        let p: u64 = rng.random_range(0..q);
        let x = BigRational::new(p.into(), q.into());
        let terms = partial_quotients(&x, 100).map_err(|e| e.to_string())?;
        if evaluate(&terms) != x {
            return Err(format!("{p}/{q} does not round-trip"));
        }
    }
    let t = within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("10^4 rationals exact in {t}"))
}

fn counting_oracle() -> Outcome {
    fn brute(n: u32, min: u64, l: u64) -> u64 {
        if n == 0 {
            return 1;
        }
        (min..=l).map(|v| brute(n - 1, v, l)).sum()
    }
    for n in 1..=8u32 {
        for l in 1..=8u64 {
            if count_monotone(n as u64, l).unwrap() != BigUint::from(brute(n, 1, l)) {
                return Err(format!("N_{n}({l}) disagrees with enumeration"));
            }
        }
    }
    for n in 2..=20u64 {
        for l in 2..=20u64 {
            let lhs = count_monotone(n, l).unwrap();
            let rhs = count_monotone(n - 1, l).unwrap() + count_monotone(n, l - 1).unwrap();
            if lhs != rhs {
                return Err(format!("Pascal identity fails at n={n}, L={l}"));
            }
        }
    }
    Ok("brute force n,L<=8 and Pascal n,L<=20 exact".into())
}

fn stirling_sandwich() -> Outcome {
    let lf = log_factorials(10_000);
    let mut worst = f64::INFINITY;
    for n in 1..=10_000u64 {
        let (lo, hi) = stirling_bounds(n).unwrap();
        let v = lf[n as usize];
        if !(lo <= v + 1e-12 && v <= hi + 1e-12) {
            return Err(format!("n={n}: {lo} <= {v} <= {hi} fails"));
        }
        worst = worst.min((v - lo).min(hi - v));
    }
    Ok(format!("n=1..10^4, smallest margin {worst:.3e}"))
}

fn tau_convergence() -> Outcome {
    let cfg = EstimatorConfig::default();
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let seq = construct_tau(Exponent::Finite(alpha)).unwrap();
        let est = tau_monotone_estimate(&seq, 1_000_000, cfg).map_err(|e| e.to_string())?;
        let err = (est.tail_sup - alpha).abs();
        if err > 0.1 {
            return Err(format!("alpha={alpha}: estimate {}", est.tail_sup));
        }
        parts.push(format!("{alpha}->{:.4}", est.tail_sup));
    }
    let seq = construct_tau(Exponent::Finite(0.0)).unwrap();
    let est = tau_monotone_estimate(&seq, 10_000, cfg).map_err(|e| e.to_string())?;
    check(
        est.tail_sup <= 0.01,
        format!("{}; 0->{:.4}", parts.join(", "), est.tail_sup),
        format!("alpha=0: estimate {}", est.tail_sup),
    )
}

fn xi_limits() -> Outcome {
    let mut parts = Vec::new();
    for alpha in [2.0, 3.0, 5.0] {
        let s = ScaleSeq::for_alpha(alpha, None).unwrap();
        let r = xi_limit(&s, 10_000, None).map_err(|e| e.to_string())?;
        let target = 2.0 / (alpha - 1.0);
        let dim_target = (alpha - 1.0) / (2.0 * alpha);
        let msg = format!(
            "alpha={alpha}: xi={:.4} (target {target:.4}, raw tail sup {:.4}), dim={:.4} (target {dim_target:.4})",
            r.xi, r.estimate.tail_sup, r.dim
        );
        if (r.xi - target).abs() > 0.05 || (r.dim - dim_target).abs() > 0.01 {
            return Err(msg);
        }
        parts.push(msg);
    }
    Ok(parts.join("; "))
}

fn cross_route() -> Outcome {
    let n = 1000;
    let mut parts = Vec::new();
    for alpha in [2.0, 3.0, 5.0] {
        let s = ScaleSeq::for_alpha(alpha, None).unwrap();
        let m: Vec<u64> = (1..=n + 1).map(|k| s.s_u64(k).unwrap().unwrap() - 1).collect();
        let eps = gap_epsilon_series(&s, n + 1).map_err(|e| e.to_string())?;
        let f = falconer_lower_bound(&m, &eps, n, None).map_err(|e| e.to_string())?;
        let xi = xi_limit(&s, n, None).map_err(|e| e.to_string())?;
        let raw = (f.tail_inf - xi.dim_tail_sup).abs();
        let extrapolated = (f.extrapolated - xi.dim).abs();
        let msg = format!("alpha={alpha}: |diff| raw {raw:.2e}, extrapolated {extrapolated:.2e}");
        if raw > 0.02 || extrapolated > 0.02 {
            return Err(msg);
        }
        parts.push(msg);
    }
    Ok(parts.join("; "))
}

fn b_limits() -> Outcome {
    let cfg = EstimatorConfig::default();
    let g = b_growth(&PhiSpec::Exponential { scale: 2.0, base: 3.0 }, 1000, cfg).map_err(|e| e.to_string())?;
    let p = b_growth(&PhiSpec::Power { c: 1.0, gamma: 2.0 }, 1000, cfg).map_err(|e| e.to_string())?;
    let h = b_hirst(&PhiSpec::DoubleExponential { a: 2.0, b: 3.0 }, 1000, cfg).map_err(|e| e.to_string())?;
    let msg = format!("2*3^n dim {:.5}, n^2 dim {:.4}, 2^(3^n) dim {:.5}", g.dim, p.dim, h.dim);
    check(
        (g.dim - 0.25).abs() <= 1e-3 && (p.dim - 0.5).abs() <= 1e-2 && (h.dim - 0.25).abs() <= 1e-3,
        msg.clone(),
        msg,
    )
}

fn t_suite() -> Outcome {
    let specimens = [
        PhiSpec::Exponential { scale: 2.0, base: 3.0 },
        PhiSpec::Power { c: 1.0, gamma: 2.0 },
        PhiSpec::stair(4.0, 20_000),
    ];
    let mut parts = Vec::new();
    for phi in &specimens {
        let t = t_sequence(phi, 0.1, 1000, None).map_err(|e| e.to_string())?;
        if let Some(j) = t.first_violation() {
            return Err(format!("{}: ordering fails at j={j}", phi.label()));
        }
        let li = t.ratio.tail_inf;
        if !(1.0..=1.01).contains(&li) {
            return Err(format!("{}: liminf estimate {li}", phi.label()));
        }
        parts.push(format!("{} liminf {li:.4} horizon {}", phi.label(), t.horizon));
    }
    Ok(parts.join("; "))
}

fn count_bounds() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut enumerated = 0;
    for alpha in [1.0, 2.0] {
        for k in 1..=6usize {
            let f = ConstraintFamily::c(alpha, 0.5).unwrap();
            let dp = count_family(&f, k).map_err(|e| e.to_string())?;
            if let Ok(it) = enumerate_family(&f, k, DEFAULT_ENUM_CAP) {
                if BigUint::from(it.count()) != dp {
                    return Err(format!("alpha={alpha} k={k}: enumeration and counting disagree"));
                }
                enumerated += 1;
            }
            let b = ck_count_bound(k as u64, alpha, 0.5).unwrap();
            let lc = ln_biguint(&dp);
            if lc > b.log_intermediate || lc > b.log_final {
                return Err(format!("alpha={alpha} k={k}: ln #C_k = {lc} exceeds {b:?}"));
            }
            worst = worst.min((b.log_intermediate - lc).min(b.log_final - lc));
        }
    }
    Ok(format!("12 cases ({enumerated} also enumerated), smallest log margin {worst:.3}"))
}

fn ergodic_sandwich() -> Outcome {
    let ts = [0.5, 1.0, 2.0];
    let start = Instant::now();
    let runs = ergodic_runs(&ts, 10_000, 1000, 20_240_601, DEFAULT_SERIES_TERMS).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let again = ergodic_runs(&ts, 10_000, 1000, 20_240_601, DEFAULT_SERIES_TERMS).map_err(|e| e.to_string())?;
    if runs != again {
        return Err("rerun with the same seed differs".into());
    }
    let mut parts = Vec::new();
    for r in &runs {
        let msg = format!(
            "t={}: mean {:.4} se {:.1e} in [{:.4}, {:.4}]",
            r.t, r.grand_mean, r.std_error, r.p_lower, r.p_upper
        );
        if !r.within_sandwich {
            return Err(msg);
        }
        parts.push(msg);
    }
    let t = within_time(elapsed, Duration::from_secs(60))?;
    Ok(format!("{}; deterministic; {t}", parts.join("; ")))
}

fn spectrum_formulas() -> Outcome {
    type F = fn(Exponent) -> cfexp::Result<SpectrumPoint>;
    let alphas = [
        Exponent::Finite(0.0),
        Exponent::Finite(0.5),
        Exponent::Finite(1.0),
        Exponent::Finite(3.0),
        Exponent::Infinite,
    ];
    let table: [(&str, F, [f64; 5]); 4] = [
        ("full", dim_level_full, [0.5, 0.5, 0.5, 0.5, 1.0]),
        ("lambda", dim_level_lambda, [0.5, 0.25, 0.0, 0.0, 0.0]),
        ("E", dim_e, [0.0, 0.0, 0.0, 1.0 / 3.0, 0.5]),
        ("F", dim_f, [1.0, 0.5, 0.5, 0.5, 0.5]),
    ];
    for (name, f, expected) in table {
        for (a, want) in alphas.iter().zip(expected) {
            let got = f(*a).map_err(|e| e.to_string())?.dim;
            if got != want {
                return Err(format!("{name}({a}) = {got}, expected {want}"));
            }
        }
    }
    for i in 0..50 {
        let a = 4.0 * i as f64 / 49.0;
        let want = if a == 0.0 {
            Relation::Less
        } else if a <= 1.0 {
            Relation::Equal
        } else {
            Relation::Greater
        };
        let t = intersection_trichotomy(a).map_err(|e| e.to_string())?;
        if t.relation != want || !t.strictly_below {
            return Err(format!("alpha={a}: {} (expected {want})", t.relation));
        }
    }
    Ok("boundary values exact; 50-point trichotomy grid matches".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact arithmetic suite", exact_arithmetic_suite),
        ("expand/evaluate round trip", round_trip),
        ("monotone counting oracle", counting_oracle),
        ("Stirling sandwich", stirling_sandwich),
        ("tau estimator convergence", tau_convergence),
        ("xi limit", xi_limits),
        ("Falconer vs 1/(2+xi)", cross_route),
        ("B limits", b_limits),
        ("T_j ordering and liminf", t_suite),
        ("C_k count bounds", count_bounds),
        ("ergodic sandwich", ergodic_sandwich),
        ("spectrum formulas", spectrum_formulas),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
