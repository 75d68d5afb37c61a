//! Parsers for the textual sequence, scale, family and growth-function
//! arguments. Errors surface as usage errors.

use cfexp::arith::PowerExponent;
use cfexp::covers::ConstraintFamily;
use cfexp::exponent::{construct_tau, perturb};
use cfexp::spectra::{PhiSpec, ScaleSeq};
use cfexp::{Bits, Exponent, PQSeq};
use num_rational::BigRational;

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("invalid {what}: {s:?}"))
}

fn u64_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(|t| num::<u64>(t, "integer")).collect()
}

pub fn rational(s: &str) -> Result<BigRational, String> {
    cfexp::cf::parse_rational(s).map_err(|e| e.to_string())
}

pub fn exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

pub fn bits(s: &str) -> Result<Bits, String> {
    Bits::parse(s).map_err(|e| e.to_string())
}

pub fn phi(s: &str) -> Result<PhiSpec, String> {
    PhiSpec::parse(s).map_err(|e| e.to_string())
}

/// `power:A`, `tau:A`, `exp`, `ones` or `list:a1,a2,...`, optionally
/// followed by `+BITS` to add a 0/1 perturbation.
pub fn sequence(s: &str) -> Result<PQSeq, String> {
    if let Some((base, b)) = s.rsplit_once('+') {
        return Ok(perturb(sequence(base)?, bits(b)?));
    }
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let seq = match kind {
        "power" => PQSeq::power_floor(num(arg, "alpha")?),
        "tau" => construct_tau(exponent(arg)?),
        "exp" => Ok(PQSeq::ExpFloor),
        "ones" => Ok(PQSeq::ConstantOne),
        "list" => PQSeq::explicit(u64_list(arg)?),
        _ => return Err(format!("unknown sequence {s:?}; expected power:A, tau:A, exp, ones or list:...")),
    };
    seq.map_err(|e| e.to_string())
}

/// `alpha:A[:M]`, `pow:M:E`, `exp:RATE`, `const:C` or `list:s1,s2,...`.
pub fn scale(s: &str) -> Result<ScaleSeq, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let r = match parts.as_slice() {
        ["alpha", a] => ScaleSeq::for_alpha(num(a, "alpha")?, None),
        ["alpha", a, m] => ScaleSeq::for_alpha(num(a, "alpha")?, Some(num(m, "M")?)),
        ["pow", m, e] => {
            let m: u64 = num(m, "M")?;
            PowerExponent::new(num(e, "exponent")?).map(|exponent| ScaleSeq::Power { m, exponent })
        }
        ["exp", r] => Ok(ScaleSeq::Exponential { rate: num(r, "rate")? }),
        ["const", c] => Ok(ScaleSeq::Constant(num(c, "constant")?)),
        ["list", l] => Ok(ScaleSeq::Explicit(u64_list(l)?)),
        _ => return Err(format!("unknown scale sequence {s:?}; expected alpha:A[:M], pow:M:E, exp:R, const:C or list:...")),
    };
    let r = r.map_err(|e| e.to_string())?;
    if let ScaleSeq::Power { m: 0, .. } = r {
        return Err(format!("M must be a positive integer in {s:?}"));
    }
    Ok(r)
}

/// `d:<scale>`, `c:A:EPS`, `ctilde:A:EPS`, `uniform:LO:HI[:monotone]` or
/// `box:lo-hi,lo-hi,...[:monotone]` (inclusive ranges).
pub fn family(s: &str) -> Result<ConstraintFamily, String> {
    let (kind, arg) = s.split_once(':').ok_or_else(|| format!("unknown family {s:?}"))?;
    let (arg, monotone) = match arg.strip_suffix(":monotone") {
        Some(a) => (a, true),
        None => (arg, false),
    };
    let pair = |what: &str| -> Result<(f64, f64), String> {
        let (a, e) = arg.split_once(':').ok_or_else(|| format!("{what} needs A:EPS"))?;
        Ok((num(a, "alpha")?, num(e, "eps")?))
    };
    let r = match kind {
        "d" => Ok(ConstraintFamily::d(scale(arg)?)),
        "c" => {
            let (a, e) = pair("c")?;
            ConstraintFamily::c(a, e)
        }
        "ctilde" => {
            let (a, e) = pair("ctilde")?;
            ConstraintFamily::c_tilde(a, e)
        }
        "uniform" => {
            let (lo, hi) = arg.split_once(':').ok_or("uniform needs LO:HI")?;
            ConstraintFamily::uniform(num(lo, "lo")?, num(hi, "hi")?, monotone)
        }
        "box" => {
            let ranges = arg
                .split(',')
                .map(|r| {
                    let (lo, hi) = r.split_once('-').ok_or_else(|| format!("bad range {r:?}"))?;
                    let (lo, hi): (u64, u64) = (num(lo, "lo")?, num(hi, "hi")?);
                    if hi < lo {
                        return Err(format!("empty range {r:?}"));
                    }
                    Ok((lo, hi + 1))
                })
                .collect::<Result<Vec<_>, String>>()?;
            ConstraintFamily::explicit(ranges, monotone)
        }
        _ => return Err(format!("unknown family {s:?}; expected d:, c:, ctilde:, uniform: or box:")),
    };
    r.map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sequences() {
        assert_eq!(sequence("ones").unwrap(), PQSeq::ConstantOne);
        assert_eq!(sequence("tau:0").unwrap(), PQSeq::ExpFloor);
        assert_eq!(sequence("tau:inf").unwrap(), PQSeq::ConstantOne);
        assert!(matches!(sequence("power:2+alt").unwrap(), PQSeq::Perturbed { .. }));
        assert!(sequence("list:1,0").is_err());
        assert!(sequence("bogus").is_err());
    }

    #[test]
    fn parses_families() {
        assert!(family("uniform:1:2").is_ok());
        assert!(family("box:1-3,2-2:monotone").unwrap().monotone);
        assert!(family("d:alpha:2").is_ok());
        assert!(family("c:2:0.5").is_ok());
        assert!(family("c:2").is_err());
        assert!(family("box:3-1").is_err());
    }

    #[test]
    fn parses_scales() {
        assert!(matches!(scale("const:4").unwrap(), ScaleSeq::Constant(4)));
        assert!(scale("pow:0:1").is_err());
        assert!(scale("alpha:0.5").is_err());
    }
}
