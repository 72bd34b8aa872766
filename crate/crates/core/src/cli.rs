//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse or usage error,
//! 3 no flat optimum up to the order cap, 4 solver failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::corpus;
use crate::driver::{minimize, DriverError, MinimizationOutcome, Options, SolverChoice, TraceRow};
use crate::problem::{parse_problem, ProblemFile};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MAX_ORDER: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Internal,
    SdpaFile,
}

/// Global minimization of a polynomial on a semi-algebraic set.
#[derive(Debug, Parser)]
#[command(name = "bbrelax", version)]
pub struct Args {
    /// Problem file, or `corpus:<name>` for a bundled problem.
    #[arg(required_unless_present = "list_corpus")]
    pub problem: Option<String>,
    /// List the bundled problems and exit.
    #[arg(long)]
    pub list_corpus: bool,
    /// Highest relaxation order tried.
    #[arg(long, value_name = "T")]
    pub order_max: Option<u32>,
    /// Add the gradient of the objective as equalities. Defaults to on
    /// for unconstrained problems.
    #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "on")]
    pub gradient_ideal: Option<Switch>,
    /// Add the regular-case constraints.
    #[arg(long)]
    pub regular_case: bool,
    /// Use all products of the inequalities.
    #[arg(long)]
    pub preordering: bool,
    #[arg(long, value_enum, default_value = "internal")]
    pub solver: SolverKind,
    /// Directory for `order{t}.dat-s` and `order{t}.out` with `--solver sdpa-file`.
    #[arg(long, value_name = "DIR")]
    pub sdpa_dir: Option<PathBuf>,
    /// Seed for the random combination of multiplication matrices.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Print one row per relaxation order.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub feas_tol: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

impl Args {
    /// Options from the problem file, overridden by the flags.
    pub fn options(&self, pf: &ProblemFile) -> Result<Options, String> {
        let mut o = pf.driver_options(&Options::default())?;
        if let Some(t) = self.order_max {
            o.max_order = Some(t);
        }
        if let Some(s) = self.gradient_ideal {
            o.gradient_ideal = Some(s == Switch::On);
        }
        o.regular_case |= self.regular_case;
        o.preordering |= self.preordering;
        if let Some(s) = self.seed {
            o.extract.seed = s;
        }
        if let Some(v) = self.gap_tol {
            o.sdp.gap_tol = v;
        }
        if let Some(v) = self.feas_tol {
            o.sdp.feas_tol = v;
        }
        if let Some(v) = self.rank_tol {
            o.decompose.rank_tol = v;
        }
        if self.solver == SolverKind::SdpaFile {
            let dir = self.sdpa_dir.clone().ok_or("--solver sdpa-file needs --sdpa-dir")?;
            o.solver = SolverChoice::SdpaFile(dir);
        }
        Ok(o)
    }
}

#[derive(Debug, Serialize)]
pub struct MinimizersReport {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub f_values: Vec<f64>,
    pub combination: Vec<f64>,
}

/// The JSON report. Polynomials are written in the problem-file syntax.
#[derive(Debug, Serialize)]
pub struct Report {
    /// `optimal`, `max_order_reached`, `solver_failure` or `error`.
    pub status: &'static str,
    pub error: Option<String>,
    pub variables: Vec<String>,
    pub f_star: Option<f64>,
    pub order_reached: Option<u32>,
    pub minimizers: Option<MinimizersReport>,
    /// Orthogonal basis of the quotient by the minimizer ideal.
    pub minimizer_basis: Vec<String>,
    /// Border basis of the minimizer ideal.
    pub minimizer_ideal_generators: Vec<String>,
    /// Monomial basis the generators reduce onto.
    pub minimizer_monomial_basis: Vec<String>,
    /// Kernel relations of the optimal moment matrix.
    pub kernel_relations: Vec<String>,
    pub trace: Vec<TraceRow>,
}

impl Report {
    pub fn success(pf: &ProblemFile, o: &MinimizationOutcome) -> Report {
        let show = |ps: &[crate::poly::Polynomial]| ps.iter().map(|p| p.display_with(&pf.names).to_string()).collect();
        let kbb = &o.minimizer_border_basis;
        Report {
            status: "optimal",
            error: None,
            variables: pf.names.clone(),
            f_star: Some(o.f_star),
            order_reached: Some(o.order_reached),
            minimizers: Some(MinimizersReport {
                points: o.minimizers.points.clone(),
                weights: o.minimizers.weights.clone(),
                f_values: o.minimizers.f_values.clone(),
                combination: o.minimizers.combination.clone(),
            }),
            minimizer_basis: show(&o.minimizer_basis),
            minimizer_ideal_generators: show(o.minimizer_ideal_generators()),
            minimizer_monomial_basis: kbb.basis().iter().map(|m| m.display_with(&pf.names).to_string()).collect(),
            kernel_relations: show(&o.kernel_relations),
            trace: o.trace.clone(),
        }
    }

    pub fn failure(pf: &ProblemFile, e: &DriverError) -> Report {
        let status = match e {
            DriverError::MaxOrderReached { .. } => "max_order_reached",
            DriverError::Solver { .. } => "solver_failure",
            _ => "error",
        };
        Report {
            status,
            error: Some(e.to_string()),
            variables: pf.names.clone(),
            f_star: None,
            order_reached: None,
            minimizers: None,
            minimizer_basis: vec![],
            minimizer_ideal_generators: vec![],
            minimizer_monomial_basis: vec![],
            kernel_relations: vec![],
            trace: e.trace().to_vec(),
        }
    }
}

fn load(spec: &str) -> Result<(String, ProblemFile), (i32, String)> {
    let text = match spec.strip_prefix("corpus:") {
        Some(name) => corpus::source(name)
            .ok_or_else(|| (EXIT_OTHER, format!("no bundled problem `{name}`; try --list-corpus")))?
            .to_string(),
        None => std::fs::read_to_string(spec).map_err(|e| (EXIT_OTHER, format!("{spec}: {e}")))?,
    };
    let pf = parse_problem(&text).map_err(|e| (EXIT_PARSE, format!("{spec}:{e}")))?;
    Ok((text, pf))
}

fn write_trace(out: &mut dyn Write, trace: &[TraceRow]) -> std::io::Result<()> {
    writeln!(out, "{:>3} {:>6} {:>6} {:>22} {:>13} {:>8}  note", "o", "s", "p", "f_mu", "solver", "decomp")?;
    for r in trace {
        let f = r.f_mu.map_or("-".to_string(), |v| format!("{v:.12e}"));
        let s = r.solver.map_or("-".to_string(), |v| format!("{v:?}"));
        let d = r.decomposition.map_or("-".to_string(), |v| format!("{v:?}"));
        writeln!(
            out,
            "{:>3} {:>6} {:>6} {:>22} {:>13} {:>8}  {}",
            r.order,
            r.s,
            r.p,
            f,
            s,
            d,
            r.note.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

fn write_json(path: &PathBuf, report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    if path.as_os_str() == "-" {
        writeln!(out, "{text}")
    } else {
        std::fs::write(path, text + "\n")
    }
}

/// Runs the front end on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { 0 };
        }
    };
    match execute(&args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_OTHER
        }
    }
}

fn execute(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    if args.list_corpus {
        for name in corpus::names() {
            writeln!(out, "{name}")?;
        }
        return Ok(0);
    }
    let spec = args.problem.as_deref().unwrap_or_default();
    let pf = match load(spec) {
        Ok((_, pf)) => pf,
        Err((code, msg)) => {
            writeln!(err, "error: {msg}")?;
            return Ok(code);
        }
    };
    let opts = match args.options(&pf) {
        Ok(o) => o,
        Err(msg) => {
            writeln!(err, "error: {msg}")?;
            return Ok(EXIT_PARSE);
        }
    };
    let result = minimize(&pf.objective, &pf.constraints, &opts);
    let (report, code) = match &result {
        Ok(o) => (Report::success(&pf, o), 0),
        Err(e) => {
            let code = match e {
                DriverError::MaxOrderReached { .. } => EXIT_MAX_ORDER,
                DriverError::Solver { .. } => EXIT_SOLVER,
                _ => EXIT_OTHER,
            };
            (Report::failure(&pf, e), code)
        }
    };
    if args.trace {
        write_trace(out, &report.trace)?;
    }
    match &result {
        Ok(o) => {
            writeln!(out, "f* = {}", o.f_star)?;
            writeln!(out, "order reached: {}", o.order_reached)?;
            writeln!(out, "minimizers ({}):", o.minimizers.points.len())?;
            for (p, w) in o.minimizers.points.iter().zip(&o.minimizers.weights) {
                let coords: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                writeln!(out, "  ({})  weight {w}", coords.join(", "))?;
            }
            writeln!(out, "minimizer ideal generators:")?;
            for g in &report.minimizer_ideal_generators {
                writeln!(out, "  {g}")?;
            }
        }
        Err(e) => writeln!(err, "error: {e}")?,
    }
    if let Some(path) = &args.json {
        write_json(path, &report, out)?;
    }
    Ok(code)
}
