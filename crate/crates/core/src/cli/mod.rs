//! Batch command-line front end.

pub mod params_io;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use crate::error::Error;
use crate::fraccalc::{self, FracOrder};
use crate::integralrep;
use crate::matcore::rel_residual;
use crate::relations::{self, HypothesisMode, IdentityKind};
use crate::series::{self, ParameterSet, SeriesOptions};
use crate::special;
use params_io::{parse_params, ParamsError};
use report::{render, Cell, Format, Report, Row};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const DOMAIN: i32 = 4;
    pub const PRECONDITION: i32 = 5;
    pub const NUMERIC: i32 = 6;
    pub const IO: i32 = 7;
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.parse().map_err(|_| format!("'{t}' is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("'{t}' is not finite"))
        }
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re or re,im, got '{s}'")),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "matfn",
    version,
    about = "Matrix-parameter generalized Wright series with identity checks and transforms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    /// JSON parameter file
    #[arg(short = 'p', long = "params")]
    pub params: PathBuf,
    /// Evaluation point `re[,im]`, repeatable
    #[arg(short = 'z', required = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub z: Vec<C64>,
    /// Relative series tolerance
    #[arg(long, env = "MATFN_DEFAULT_TOL", default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sum the series at each point
    Eval(Common),
    /// Report the convergence region of each point
    Classify(Common),
    /// Check contiguous relations and derivative formulas
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma list of identity names, or `all`
        #[arg(long, default_value = "all")]
        identities: String,
        /// Derivative order for the derivative checks
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Allowed residual
        #[arg(long, default_value_t = 1e-9)]
        check_tol: f64,
        /// Evaluate even when hypotheses fail (such rows are not asserted)
        #[arg(long)]
        probe: bool,
    },
    /// Compare the series with its integral representation
    Integral {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = integralrep::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-8)]
        check_tol: f64,
        #[arg(long)]
        probe: bool,
    },
    /// Compare fractional integral and derivative closed forms with quadrature
    Frac {
        #[command(flatten)]
        common: Common,
        /// Order `re[,im]` with positive real part
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        mu: C64,
        /// 1-based index of the weighting denominator D_j
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, default_value_t = 32)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-6)]
        check_tol: f64,
    },
    /// Evaluate a named classical function built from the parameter file
    Special {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        special: String,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 1)]
        konhauser_k: u32,
    },
}

/// Failure of a whole job.
#[derive(Debug)]
pub enum JobError {
    Usage(String),
    Params(ParamsError),
    Lib(Error),
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        JobError::Lib(e)
    }
}

impl JobError {
    pub fn kind_and_code(&self) -> (&'static str, i32) {
        match self {
            JobError::Usage(_) => ("usage", exit::USAGE),
            JobError::Params(ParamsError::Io(_)) => ("io", exit::IO),
            JobError::Params(ParamsError::Parse(_)) => ("parse", exit::PARSE),
            JobError::Lib(e) => match e {
                Error::Domain(_) => ("domain", exit::DOMAIN),
                Error::Precondition(_) => ("precondition", exit::PRECONDITION),
                Error::Numeric(_) => ("numeric", exit::NUMERIC),
                Error::Accuracy(_) => ("accuracy", exit::NUMERIC),
                Error::Eigen(_) => ("eigen", exit::NUMERIC),
                Error::Dimension(_) => ("dimension", exit::PARSE),
                Error::InvalidArgument(_) => ("usage", exit::USAGE),
            },
        }
    }

    fn message(&self) -> String {
        match self {
            JobError::Usage(m) => m.clone(),
            JobError::Params(p) => p.to_string(),
            JobError::Lib(e) => e.to_string(),
        }
    }

    /// `error: kind=<kind> code=<n> msg="<escaped>"`
    pub fn diagnostic(&self) -> String {
        let (kind, code) = self.kind_and_code();
        diagnostic_line(kind, code, &self.message())
    }
}

fn diagnostic_line(kind: &str, code: i32, msg: &str) -> String {
    let msg = msg
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', " ");
    format!("error: kind={kind} code={code} msg=\"{msg}\"")
}

fn options(c: &Common) -> SeriesOptions {
    SeriesOptions {
        rel_tol: c.tol,
        max_terms: c.max_terms,
        ..SeriesOptions::default()
    }
}

fn load(c: &Common) -> Result<ParameterSet, JobError> {
    parse_params(&c.params).map_err(JobError::Params)
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// Rows of the report plus whether every asserted check passed.
type Outcome = (Report, bool);

fn run_eval(c: &Common) -> Result<Outcome, JobError> {
    let params = load(c)?;
    let opts = options(c);
    let mut rows = Vec::new();
    for (k, &z) in c.z.iter().enumerate() {
        let r = series::eval(&params, z, &opts)?;
        rows.push(vec![
            ("index", Cell::from(k)),
            ("z", z.into()),
            ("terms_used", r.terms_used.into()),
            ("last_term_norm", r.last_term_norm.into()),
            ("verdict", r.verdict.tag.to_string().into()),
            ("terminated", r.terminated_polynomially.into()),
            ("truncated", r.truncated.into()),
            ("value", r.value.into()),
        ]);
    }
    Ok((
        Report {
            command: "eval",
            rows,
        },
        true,
    ))
}

fn run_classify(c: &Common) -> Result<Outcome, JobError> {
    let params = load(c)?;
    let rows =
        c.z.iter()
            .enumerate()
            .map(|(k, &z)| {
                let v = series::classify(&params, z);
                vec![
                    ("index", Cell::from(k)),
                    ("z", z.into()),
                    ("p", params.p().into()),
                    ("q", params.q().into()),
                    ("verdict", v.tag.to_string().into()),
                    ("margin", v.margin.into()),
                ]
            })
            .collect();
    Ok((
        Report {
            command: "classify",
            rows,
        },
        true,
    ))
}

fn parse_identities(s: &str) -> Result<Vec<IdentityKind>, JobError> {
    if s.trim() == "all" {
        return Ok(IdentityKind::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            IdentityKind::parse(t).ok_or_else(|| {
                let known: Vec<&str> = IdentityKind::ALL.iter().map(|k| k.name()).collect();
                JobError::Usage(format!(
                    "unknown identity '{t}' (known: {}, all)",
                    known.join(", ")
                ))
            })
        })
        .collect()
}

fn run_verify(
    c: &Common,
    identities: &str,
    order: usize,
    check_tol: f64,
    probe: bool,
) -> Result<Outcome, JobError> {
    let kinds = parse_identities(identities)?;
    if kinds.is_empty() {
        return Err(JobError::Usage("no identities selected".into()));
    }
    let params = load(c)?;
    let opts = options(c);
    let mode = if probe {
        HypothesisMode::Probe
    } else {
        HypothesisMode::Strict
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for (k, &z) in c.z.iter().enumerate() {
        let positive = z.im == 0.0 && z.re > 0.0;
        for &kind in &kinds {
            if kind.needs_positive_z() && !positive {
                rows.push(vec![
                    ("index", Cell::from(k)),
                    ("z", z.into()),
                    ("identity", kind.name().into()),
                    ("residual", Cell::Empty),
                    ("hypotheses_met", Cell::Empty),
                    ("status", "skipped".into()),
                ]);
                continue;
            }
            for rep in relations::run_suite(&params, z, &[kind], order, &opts, mode)? {
                let pass = rep.residual <= check_tol;
                let st = if !rep.hypotheses_met {
                    "unasserted"
                } else {
                    ok &= pass;
                    status(pass)
                };
                rows.push(vec![
                    ("index", Cell::from(k)),
                    ("z", z.into()),
                    ("identity", rep.id.to_string().into()),
                    ("residual", rep.residual.into()),
                    ("hypotheses_met", rep.hypotheses_met.into()),
                    ("status", st.into()),
                ]);
            }
        }
    }
    Ok((
        Report {
            command: "verify",
            rows,
        },
        ok,
    ))
}

fn run_integral(
    c: &Common,
    nodes: usize,
    check_tol: f64,
    probe: bool,
) -> Result<Outcome, JobError> {
    let params = load(c)?;
    let opts = options(c);
    let mode = if probe {
        HypothesisMode::Probe
    } else {
        HypothesisMode::Strict
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for (k, &z) in c.z.iter().enumerate() {
        let r = integralrep::eval_integral_with(&params, z, nodes, &opts, mode)?;
        let s = series::eval(&params, z, &opts)?;
        let disc = rel_residual(&r.value, &s.value);
        let pass = disc <= check_tol;
        let st = if r.hypotheses_met {
            ok &= pass;
            status(pass)
        } else {
            "unasserted"
        };
        rows.push(vec![
            ("index", Cell::from(k)),
            ("z", z.into()),
            ("discrepancy", disc.into()),
            ("doubling_change", r.doubling_change.into()),
            ("nodes", r.nodes_used.into()),
            ("exact_weights", r.exact_weights.into()),
            ("hypotheses_met", r.hypotheses_met.into()),
            ("status", st.into()),
        ]);
    }
    Ok((
        Report {
            command: "integral",
            rows,
        },
        ok,
    ))
}

fn run_frac(
    c: &Common,
    mu: C64,
    j: usize,
    nodes: usize,
    check_tol: f64,
) -> Result<Outcome, JobError> {
    let params = load(c)?;
    let opts = options(c);
    let order = FracOrder::new(mu)?;
    let mut rows: Vec<Row> = Vec::new();
    let mut ok = true;
    for (k, &z) in c.z.iter().enumerate() {
        if z.im != 0.0 || !(z.re > 0.0) {
            return Err(Error::Domain(format!("fractional transforms need x > 0, got {z}")).into());
        }
        let x = z.re;
        let f = |t: f64| fraccalc::weighted(&params, j, t, &opts);
        let closed = fraccalc::frac_integral(&params, j, order, x, &opts)?;
        let oracle = fraccalc::rl_quad_oracle(f, order, x, nodes)?;
        let d = rel_residual(&closed, &oracle);
        ok &= d <= check_tol;
        rows.push(vec![
            ("index", Cell::from(k)),
            ("x", x.into()),
            ("op", "integral".into()),
            ("mu", mu.into()),
            ("discrepancy", d.into()),
            ("status", status(d <= check_tol).into()),
        ]);
        let (disc, st) = if order.n_ceil <= 2 {
            let closed = fraccalc::frac_derivative(&params, j, order, x, &opts)?;
            let oracle = fraccalc::rl_derivative_oracle(f, order, x, nodes)?;
            let d = rel_residual(&closed, &oracle);
            ok &= d <= check_tol;
            (Cell::Num(d), status(d <= check_tol))
        } else {
            (Cell::Empty, "skipped")
        };
        rows.push(vec![
            ("index", Cell::from(k)),
            ("x", x.into()),
            ("op", "derivative".into()),
            ("mu", mu.into()),
            ("discrepancy", disc),
            ("status", st.into()),
        ]);
    }
    Ok((
        Report {
            command: "frac",
            rows,
        },
        ok,
    ))
}

fn run_special(
    c: &Common,
    name: &str,
    degree: Option<usize>,
    kk: u32,
) -> Result<Outcome, JobError> {
    let params = load(c)?;
    let opts = options(c);
    let form = special::build_named(name, &params, degree, kk)?;
    let mut rows = Vec::new();
    for (k, &x) in c.z.iter().enumerate() {
        let r = form.evaluate(x, &opts)?;
        rows.push(vec![
            ("index", Cell::from(k)),
            ("x", x.into()),
            ("function", form.label.clone().into()),
            ("terms_used", r.terms_used.into()),
            ("value", r.value.into()),
        ]);
    }
    Ok((
        Report {
            command: "special",
            rows,
        },
        true,
    ))
}

fn format_of(cmd: &Command) -> Format {
    match cmd {
        Command::Eval(c) | Command::Classify(c) => c.format,
        Command::Verify { common, .. }
        | Command::Integral { common, .. }
        | Command::Frac { common, .. }
        | Command::Special { common, .. } => common.format,
    }
}

/// Runs a parsed command, returning the report and whether all checks passed.
pub fn execute(cmd: &Command) -> Result<(String, bool), JobError> {
    let (rep, ok) = match cmd {
        Command::Eval(c) => run_eval(c)?,
        Command::Classify(c) => run_classify(c)?,
        Command::Verify {
            common,
            identities,
            order,
            check_tol,
            probe,
        } => run_verify(common, identities, *order, *check_tol, *probe)?,
        Command::Integral {
            common,
            nodes,
            check_tol,
            probe,
        } => run_integral(common, *nodes, *check_tol, *probe)?,
        Command::Frac {
            common,
            mu,
            index,
            nodes,
            check_tol,
        } => run_frac(common, *mu, *index, *nodes, *check_tol)?,
        Command::Special {
            common,
            special,
            degree,
            konhauser_k,
        } => run_special(common, special, *degree, *konhauser_k)?,
    };
    Ok((render(&rep, format_of(cmd)), ok))
}

/// Full command-line entry point; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return exit::OK;
            }
            let text = e.to_string();
            let msg: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let msg = msg.join(" ");
            let msg = msg.trim_start_matches("error: ");
            let _ = writeln!(err, "{}", diagnostic_line("usage", exit::USAGE, msg));
            return exit::USAGE;
        }
    };
    match execute(&cli.command) {
        Ok((text, ok)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return exit::IO;
            }
            if ok {
                exit::OK
            } else {
                exit::CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.kind_and_code().1
        }
    }
}
