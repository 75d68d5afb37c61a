mod commands;
mod output;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use cfexp::covers::{CoverMode, DEFAULT_ENUM_CAP};
use cfexp::ergodic::DEFAULT_SERIES_TERMS;
use cfexp::spectra::{PhiSpec, ScaleSeq};
use cfexp::{Exponent, PQSeq};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use commands::{SpectrumSet, TauArgs};
use output::Format;

/// Convergence exponents of continued-fraction partial quotients.
#[derive(Parser)]
#[command(name = "cfexp", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Output file, `-` for stdout. Relative paths resolve under $CFEXP_OUT_DIR when set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Window {
    /// Trailing samples used for tail statistics (default: last quarter).
    #[arg(long, value_parser = positive_usize)]
    window: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Scale {
    /// `s_n = M floor(n^(alpha-1))`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Scale sequence: alpha:A[:M], pow:M:E, exp:R, const:C or list:s1,s2,...
    #[arg(long, value_parser = specs::scale)]
    s: Option<ScaleSeq>,
}

impl Scale {
    fn resolve(&self, m: Option<u64>) -> Result<ScaleSeq, cfexp::Error> {
        match (&self.s, self.alpha) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(a)) => ScaleSeq::for_alpha(a, m),
            (None, None) => unreachable!("clap requires one"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimator {
    All,
    Series,
    Monotone,
    Liminf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Enumerated,
    Analytic,
}

#[derive(Subcommand)]
enum Command {
    /// Partial quotients of a rational in [0, 1).
    Expand {
        #[arg(long, value_parser = specs::rational)]
        x: BigRational,
        #[arg(long, default_value_t = 100_000, value_parser = positive_usize)]
        max_terms: usize,
    },
    /// Convergents p_n/q_n of a rational or a sequence.
    Convergents {
        #[arg(long, value_parser = specs::rational, required_unless_present = "seq", conflicts_with = "seq")]
        x: Option<BigRational>,
        /// power:A, tau:A, exp, ones or list:..., optionally +BITS.
        #[arg(long, value_parser = specs::sequence)]
        seq: Option<PQSeq>,
        #[arg(long, default_value_t = 20, value_parser = positive_usize)]
        n: usize,
    },
    /// Exact endpoints of the cylinder of a prefix.
    Cylinder {
        /// Comma-separated positive integers.
        #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
        prefix: Vec<u64>,
    },
    /// Series, monotone and liminf estimators of the convergence exponent.
    Tau {
        #[arg(long, value_parser = specs::sequence)]
        seq: PQSeq,
        #[arg(long, default_value_t = 100_000, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Exponents at which to sum the series.
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0, 2.0, 4.0], value_parser = nonneg_f64)]
        s: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Estimator::All)]
        estimator: Estimator,
    },
    /// A nondecreasing sequence with a prescribed exponent.
    Construct {
        /// Target exponent: a decimal, p/q or inf.
        #[arg(long, value_parser = specs::exponent)]
        alpha: Exponent,
        /// Terms to print.
        #[arg(long, default_value_t = 20, value_parser = positive_usize)]
        n: usize,
        /// Optional 0/1 perturbation: zeros, ones, alt, alt0, periodic:..., list:...
        #[arg(long, value_parser = specs::bits)]
        bits: Option<cfexp::Bits>,
    },
    /// Prefix of one sequence followed by the tail of another.
    Splice {
        #[arg(long, value_parser = specs::sequence)]
        prefix: PQSeq,
        #[arg(long)]
        cut: usize,
        #[arg(long, value_parser = specs::sequence)]
        tail: PQSeq,
        /// Terms to print.
        #[arg(long, default_value_t = 20, value_parser = positive_usize)]
        n: usize,
        /// Depth of the liminf estimates.
        #[arg(long, default_value_t = 100_000, value_parser = positive_usize)]
        depth: usize,
        #[command(flatten)]
        window: Window,
    },
    /// Dimension formulas and the intersection trichotomy.
    Spectrum {
        #[arg(long, value_enum, default_value_t = SpectrumSet::All)]
        set: SpectrumSet,
        /// One or more exponents (comma separated); `inf` allowed.
        #[arg(long, value_delimiter = ',', required = true, value_parser = specs::exponent)]
        alpha: Vec<Exponent>,
    },
    /// Limit of the gap quotient and the dimension 1/(2+xi).
    Xi {
        #[command(flatten)]
        scale: Scale,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: Option<u64>,
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
    },
    /// B = limsup phi(n)^(1/n).
    Bgrowth {
        #[arg(long, value_parser = specs::phi)]
        phi: PhiSpec,
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// B = limsup (log phi(n))^(1/n).
    Bhirst {
        #[arg(long, value_parser = specs::phi)]
        phi: PhiSpec,
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// The sequence T_j and its ratio to phi(j).
    Tseq {
        #[arg(long, value_parser = specs::phi)]
        phi: PhiSpec,
        #[arg(long, value_parser = positive_f64)]
        eps: f64,
        #[arg(long, default_value_t = 200, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
    },
    /// Number of nondecreasing words of length n over {1..L}.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long = "L", visible_alias = "l", value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
    },
    /// Lists the admissible prefixes of a family at generation n.
    Enumerate {
        /// d:<scale>, c:A:EPS, ctilde:A:EPS, uniform:LO:HI[:monotone], box:lo-hi,...[:monotone]
        #[arg(long, value_parser = specs::family)]
        family: cfexp::covers::ConstraintFamily,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Mass-distribution lower bound for the D family.
    Falconer {
        #[command(flatten)]
        scale: Scale,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: Option<u64>,
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        n: usize,
        #[command(flatten)]
        window: Window,
    },
    /// Critical exponents of the natural covers of a family.
    Critical {
        #[arg(long, value_parser = specs::family)]
        family: cfexp::covers::ConstraintFamily,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Birkhoff averages of a_1^-t against the Gauss measure.
    Ergodic {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0], value_parser = positive_f64)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
        samples: usize,
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        orbit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SERIES_TERMS, value_parser = clap::value_parser!(u64).range(1..))]
        series_terms: u64,
    },
    /// Growth constant B and dimension 1/(B+1) for a family of phi.
    EphiTable {
        #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
        n: usize,
        /// Growth functions (repeatable); defaults to the built-in family.
        #[arg(long, value_parser = specs::phi)]
        phi: Vec<PhiSpec>,
    },
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn nonneg_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative number, got {s:?}")),
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Expand { .. } => "expand",
            Command::Convergents { .. } => "convergents",
            Command::Cylinder { .. } => "cylinder",
            Command::Tau { .. } => "tau",
            Command::Construct { .. } => "construct",
            Command::Splice { .. } => "splice",
            Command::Spectrum { .. } => "spectrum",
            Command::Xi { .. } => "xi",
            Command::Bgrowth { .. } => "bgrowth",
            Command::Bhirst { .. } => "bhirst",
            Command::Tseq { .. } => "tseq",
            Command::Count { .. } => "count",
            Command::Enumerate { .. } => "enumerate",
            Command::Falconer { .. } => "falconer",
            Command::Critical { .. } => "critical",
            Command::Ergodic { .. } => "ergodic",
            Command::EphiTable { .. } => "ephi-table",
        }
    }

    fn run(self) -> Result<output::Output, cfexp::Error> {
        match self {
            Command::Expand { x, max_terms } => commands::expand(&x, max_terms),
            Command::Convergents { x, seq, n } => commands::convergents_cmd(x.as_ref(), seq.as_ref(), n),
            Command::Cylinder { prefix } => commands::cylinder_cmd(&prefix),
            Command::Tau { seq, n, window, burn_in, s, estimator } => commands::tau_cmd(TauArgs {
                seq: &seq,
                n,
                window: window.window,
                burn_in,
                s: if matches!(estimator, Estimator::All | Estimator::Series) { &s } else { &[] },
                monotone: matches!(estimator, Estimator::All | Estimator::Monotone),
                liminf: matches!(estimator, Estimator::All | Estimator::Liminf),
            }),
            Command::Construct { alpha, n, bits } => {
                let seq = cfexp::exponent::construct_tau(alpha)?;
                let seq = match bits {
                    Some(b) => cfexp::exponent::perturb(seq, b),
                    None => seq,
                };
                commands::construct(seq, alpha, n)
            }
            Command::Splice { prefix, cut, tail, n, depth, window } => {
                commands::splice_cmd(prefix, cut, tail, n, depth, window.window)
            }
            Command::Spectrum { set, alpha } => commands::spectrum(set, &alpha),
            Command::Xi { scale, m, n, window } => commands::xi(&scale.resolve(m)?, n, window.window),
            Command::Bgrowth { phi, n, window, burn_in } => commands::b_cmd(&phi, n, window.window, burn_in, false),
            Command::Bhirst { phi, n, window, burn_in } => commands::b_cmd(&phi, n, window.window, burn_in, true),
            Command::Tseq { phi, eps, n, window } => commands::tseq(&phi, eps, n, window.window),
            Command::Count { n, l } => commands::count(n, l),
            Command::Enumerate { family, n, cap } => commands::enumerate(&family, n, cap),
            Command::Falconer { scale, m, n, window } => commands::falconer(&scale.resolve(m)?, n, window.window),
            Command::Critical { family, n, mode, cap } => {
                let mode = match mode {
                    Mode::Auto => CoverMode::Auto,
                    Mode::Enumerated => CoverMode::Enumerated,
                    Mode::Analytic => CoverMode::Analytic,
                };
                commands::critical(&family, n, mode, cap)
            }
            Command::Ergodic { t, samples, orbit, seed, series_terms } => {
                commands::ergodic(&t, samples, orbit, seed, series_terms)
            }
            Command::EphiTable { n, phi } => {
                let family = if phi.is_empty() { PhiSpec::default_family() } else { phi };
                commands::ephi_table(&family, n)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let name = cli.command.name();
    let out = match cli.command.run() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let bytes = match out.render(cli.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let dest = output::destination(cli.output.as_deref(), name, cli.format);
    if let Err(e) = output::write(&bytes, dest.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
