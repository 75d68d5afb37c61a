use cfexp::cf::{convergents, convergents_of, cylinder, partial_quotients};
use cfexp::covers::{
    count_family, count_monotone, critical_exponent, enumerate_family, falconer_lower_bound, gap_epsilon_series,
    log_cylinder_length, ConstraintFamily, CoverMode,
};
use cfexp::ergodic::ergodic_runs;
use cfexp::exponent::{liminf_ratio_estimate, splice, tau, tau_monotone_estimate, tau_series_sum};
use cfexp::spectra::{
    b_growth, b_hirst, dim_e, dim_f, dim_level_full, dim_level_lambda, ephi_figure_table, intersection_trichotomy,
    t_sequence, xi_limit, PhiSpec, ScaleSeq, SpectrumPoint,
};
use cfexp::{EstimatorConfig, Exponent, PQSeq};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::output::{int, int_u64, mark, merge, object, to_value, Output};

type Res = Result<Output, cfexp::Error>;

fn cfg(window: Option<usize>, burn_in: usize) -> EstimatorConfig {
    EstimatorConfig { window, ..EstimatorConfig::default() }.burn_in(burn_in)
}

pub fn expand(x: &BigRational, max_terms: usize) -> Res {
    let q = partial_quotients(x, max_terms)?;
    let items: Vec<Value> = q.iter().enumerate().map(|(i, a)| json!({"index": i + 1, "quotient": int(a)})).collect();
    Ok(Output::table(Value::Array(q.iter().map(int).collect()), &["index", "quotient"], &items))
}

fn convergent_rows(c: &[cfexp::cf::Convergent]) -> Vec<Value> {
    c.iter().map(|c| json!({"n": c.n, "p": int(&c.p), "q": int(&c.q)})).collect()
}

pub fn convergents_cmd(x: Option<&BigRational>, seq: Option<&PQSeq>, n: usize) -> Res {
    let (source, list) = match (x, seq) {
        (Some(x), _) => (x.to_string(), convergents_of(&partial_quotients(x, n)?)),
        (None, Some(s)) => (s.label(), convergents(s, s.len().map_or(n, |l| l.min(n)))?),
        (None, None) => unreachable!("clap requires one source"),
    };
    let rows = convergent_rows(&list);
    let json = mark(
        object(vec![("source", json!(source)), ("convergents", Value::Array(rows.clone()))]),
        &["convergents[].p", "convergents[].q"],
    );
    Ok(Output::table(json, &["n", "p", "q"], &rows))
}

pub fn cylinder_cmd(prefix: &[u64]) -> Res {
    let c = cylinder(&cfexp::cf::big(prefix))?;
    let json = mark(
        object(vec![
            ("prefix", Value::Array(prefix.iter().map(|&a| int_u64(a)).collect())),
            ("lo", json!(c.lo.to_string())),
            ("hi", json!(c.hi.to_string())),
            ("length", json!(c.length.to_string())),
            ("log_length", json!(log_cylinder_length(prefix))),
        ]),
        &["prefix[]", "lo", "hi", "length"],
    );
    Ok(Output::table(json.clone(), &["prefix", "lo", "hi", "length", "log_length"], &[json]))
}

pub struct TauArgs<'a> {
    pub seq: &'a PQSeq,
    pub n: usize,
    pub window: Option<usize>,
    pub burn_in: usize,
    pub s: &'a [f64],
    pub monotone: bool,
    pub liminf: bool,
}

pub fn tau_cmd(a: TauArgs) -> Res {
    let c = cfg(a.window, a.burn_in);
    let mut fields = vec![("sequence", json!(a.seq.label())), ("n", json!(a.n))];
    let half = (a.n / 2).max(1);
    let series: Vec<Value> = a
        .s
        .iter()
        .map(|&s| {
            let full = tau_series_sum(a.seq, s, a.n)?;
            let head = tau_series_sum(a.seq, s, half)?;
            Ok(json!({"s": s, "log_sum": full, "log_sum_half": head, "log_growth": full - head}))
        })
        .collect::<Result<_, cfexp::Error>>()?;
    fields.push(("series", Value::Array(series)));
    if a.monotone {
        fields.push(("monotone", to_value(&tau_monotone_estimate(a.seq, a.n, c)?)));
        fields.push(("tau", to_value(&tau(a.seq, a.n, c)?)));
    }
    if a.liminf {
        fields.push(("liminf", to_value(&liminf_ratio_estimate(a.seq, a.n, c)?)));
    }
    Ok(Output::report(object(fields)))
}

fn terms(seq: &PQSeq, n: usize) -> Result<Value, cfexp::Error> {
    let n = seq.len().map_or(n, |l| l.min(n));
    Ok(Value::Array(seq.prefix(n)?.iter().map(int).collect()))
}

pub fn construct(seq: PQSeq, alpha: Exponent, n: usize) -> Res {
    let json = mark(
        object(vec![("alpha", to_value(&alpha)), ("sequence", json!(seq.label())), ("terms", terms(&seq, n)?)]),
        &["terms[]"],
    );
    let items: Vec<Value> = json["terms"]
        .as_array()
        .expect("array")
        .iter()
        .enumerate()
        .map(|(i, a)| json!({"index": i + 1, "a": a}))
        .collect();
    Ok(Output::table(json, &["index", "a"], &items))
}

pub fn splice_cmd(prefix: PQSeq, cut: usize, tail: PQSeq, n: usize, depth: usize, window: Option<usize>) -> Res {
    let c = cfg(window, 0);
    let tail_est = liminf_ratio_estimate(&tail, depth, c)?;
    let s = splice(prefix, cut, tail);
    let est = liminf_ratio_estimate(&s, depth, c)?;
    let json = mark(
        object(vec![
            ("sequence", json!(s.label())),
            ("cut", json!(cut)),
            ("terms", terms(&s, n)?),
            ("liminf_spliced", to_value(&est)),
            ("liminf_tail", to_value(&tail_est)),
            ("liminf_difference", json!(est.tail_inf - tail_est.tail_inf)),
        ]),
        &["terms[]"],
    );
    Ok(Output::report(json))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SpectrumSet {
    Full,
    Lambda,
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "F", alias = "f")]
    F,
    All,
}

impl SpectrumSet {
    fn name(self) -> &'static str {
        match self {
            SpectrumSet::Full => "full",
            SpectrumSet::Lambda => "lambda",
            SpectrumSet::E => "E",
            SpectrumSet::F => "F",
            SpectrumSet::All => "all",
        }
    }

    fn point(self, alpha: Exponent) -> Result<SpectrumPoint, cfexp::Error> {
        match self {
            SpectrumSet::Full => dim_level_full(alpha),
            SpectrumSet::Lambda => dim_level_lambda(alpha),
            SpectrumSet::E => dim_e(alpha),
            SpectrumSet::F => dim_f(alpha),
            SpectrumSet::All => unreachable!("expanded by the caller"),
        }
    }
}

const SETS: [SpectrumSet; 4] = [SpectrumSet::Full, SpectrumSet::Lambda, SpectrumSet::E, SpectrumSet::F];

pub fn spectrum(set: SpectrumSet, alphas: &[Exponent]) -> Res {
    let mut docs = Vec::new();
    let mut rows = Vec::new();
    for &alpha in alphas {
        let sets: &[SpectrumSet] = if set == SpectrumSet::All { &SETS } else { std::slice::from_ref(&set) };
        let tri = match alpha {
            Exponent::Finite(a) => Some(intersection_trichotomy(a)?),
            Exponent::Infinite => None,
        };
        let mut doc = vec![("alpha", to_value(&alpha))];
        for &s in sets {
            let p = s.point(alpha)?;
            let relation = match (s, &tri) {
                (SpectrumSet::E, Some(t)) => json!(t.relation.to_string()),
                _ => Value::Null,
            };
            rows.push(json!({"alpha": alpha.to_string(), "set": s.name(), "dim": p.dim, "regime": p.regime, "relation": relation}));
            doc.push((s.name(), json!(p.dim)));
        }
        if set == SpectrumSet::All {
            doc.push(("trichotomy", to_value(&tri)));
        } else {
            doc = vec![doc[0].clone(), ("dim", doc[1].1.clone())];
        }
        docs.push(object(doc));
    }
    let json = if docs.len() == 1 { docs.pop().expect("one") } else { Value::Array(docs) };
    Ok(Output::table(json, &["alpha", "set", "dim", "regime", "relation"], &rows))
}

pub fn xi(s: &ScaleSeq, n: usize, window: Option<usize>) -> Res {
    let r = xi_limit(s, n, window)?;
    Ok(Output::report(merge(vec![("s", json!(s.label())), ("n", json!(n))], to_value(&r))))
}

pub fn b_cmd(phi: &PhiSpec, n: usize, window: Option<usize>, burn_in: usize, hirst: bool) -> Res {
    let c = cfg(window, burn_in);
    let r = if hirst { b_hirst(phi, n, c)? } else { b_growth(phi, n, c)? };
    Ok(Output::report(merge(vec![("n", json!(n))], to_value(&r))))
}

pub fn tseq(phi: &PhiSpec, eps: f64, n: usize, window: Option<usize>) -> Res {
    let t = t_sequence(phi, eps, n, window)?;
    let entries: Vec<Value> = t.entries.iter().map(|&(j, v)| json!({"j": j, "log_log_t": v})).collect();
    let json = merge(
        vec![
            ("n", json!(n)),
            ("first_violation", to_value(&t.first_violation())),
            ("entries", Value::Array(entries.clone())),
        ],
        to_value(&t),
    );
    Ok(Output::table(json, &["j", "log_log_t"], &entries))
}

pub fn count(n: u64, l: u64) -> Res {
    let c = count_monotone(n, l)?;
    Ok(Output::table(int(&c), &["n", "L", "count"], &[json!({"n": n, "L": l, "count": int(&c)})]))
}

pub fn enumerate(f: &ConstraintFamily, n: usize, cap: u64) -> Res {
    let total = count_family(f, n)?;
    let cylinders: Vec<Value> = enumerate_family(f, n, cap)?
        .map(|p| json!({"prefix": p.iter().map(|&a| int_u64(a)).collect::<Vec<_>>(), "log_length": log_cylinder_length(&p)}))
        .collect();
    let json = mark(
        object(vec![
            ("family", json!(f.name)),
            ("generation", json!(n)),
            ("count", int(&total)),
            ("cylinders", Value::Array(cylinders.clone())),
        ]),
        &["count", "cylinders[].prefix[]"],
    );
    Ok(Output::table(json, &["prefix", "log_length"], &cylinders))
}

pub fn falconer(s: &ScaleSeq, n: usize, window: Option<usize>) -> Res {
    let m: Vec<u64> = (1..=n + 1)
        .map(|k| match s.s_u64(k)? {
            Some(v) if v >= 1 => Ok(v - 1),
            _ => Err(cfexp::Error::Contract { index: k, reason: "s_k must be an integer of at most 64 bits".into() }),
        })
        .collect::<Result<_, _>>()?;
    let eps = gap_epsilon_series(s, n + 1)?;
    let est = falconer_lower_bound(&m, &eps, n, window)?;
    let json = object(vec![
        ("s", json!(s.label())),
        ("n", json!(n)),
        ("lower_bound", json!(est.tail_inf)),
        ("estimate", to_value(&est)),
    ]);
    Ok(Output::report(json))
}

pub fn critical(f: &ConstraintFamily, n: usize, mode: CoverMode, cap: u64) -> Res {
    let r = critical_exponent(f, n, mode, cap)?;
    let json = to_value(&r);
    let points = json["points"].as_array().cloned().unwrap_or_default();
    Ok(Output::table(json, &["generation", "method", "s_star", "lo", "hi"], &points))
}

pub fn ergodic(ts: &[f64], samples: usize, orbit: usize, seed: u64, series_terms: u64) -> Res {
    let runs = ergodic_runs(ts, samples, orbit, seed, series_terms)?;
    let items: Vec<Value> = runs.iter().map(to_value).collect();
    Ok(Output::table(
        Value::Array(items.clone()),
        &[
            "t",
            "seed",
            "prng",
            "sample_count",
            "orbit_length",
            "p_lower",
            "p_upper",
            "grand_mean",
            "std_error",
            "within_sandwich",
            "base_precision_bits",
            "refined_samples",
        ],
        &items,
    ))
}

pub fn ephi_table(family: &[PhiSpec], n: usize) -> Res {
    let rows = ephi_figure_table(family, n)?;
    let items: Vec<Value> = rows.iter().map(to_value).collect();
    Ok(Output::table(Value::Array(items.clone()), &["phi", "b", "dim", "diverged", "out_of_hypothesis"], &items))
}
