//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::coefficients::{coeffs_234, coeffs_upto, CoefficientTriple};
use crate::driver::StepDriver;
use crate::error::Error;
use crate::fixtures::{counterexample_driver, TYPICALLY_REAL_ODD7};
use crate::functionals::{log_coeffs, Functional};
use crate::io::{read_angle_file, TraceFile};
use crate::milin_bound::{bound_m, solve_lambda0, stationarity_residual};
use crate::optimizer::{refine_schedule_from, validate_schedule, AscentOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Partition sizes of the reference table; the last one only with `--full`.
pub const TABLE1_SIZES: [usize; 4] = [50, 100, 200, 400];

/// Random restarts per stage used by `table1` unless overridden.
pub const TABLE1_RESTARTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "schlicht", version, about = "Coefficient extremal problems over step-driven Loewner chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients, logarithmic coefficients and functional values of a driver.
    Coeff {
        /// Angle file (JSON or single-column CSV).
        file: PathBuf,
    },
    /// Maximize a functional by successive refinement.
    Optimize(OptimizeArgs),
    /// Maximizing sequences of the four built-in functionals, as CSV.
    Table1 {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = TABLE1_RESTARTS)]
        restarts: usize,
        /// Also run m = 400.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the reference 20-step driver beats 1090/1083 for odd7.
    VerifyTable2,
    /// Root of the stationarity equation and the resulting Milin bound.
    MilinBound {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// One of milin2, milin3, odd5, odd7.
    #[arg(long)]
    pub functional: String,
    /// Comma-separated partition sizes, each dividing the next.
    #[arg(long, value_delimiter = ',', required = true)]
    pub schedule: Vec<usize>,
    /// Random restarts per stage (default 64, or 1 with --init).
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Start the first stage from this angle file instead of random drivers.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

/// Validated settings of an `optimize` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub functional: Functional,
    pub schedule: Vec<usize>,
    pub options: AscentOptions,
    pub init: Option<StepDriver>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn from_args(args: &OptimizeArgs) -> Result<Self, Error> {
        let functional: Functional = args.functional.parse()?;
        validate_schedule(&args.schedule)?;
        let init = args.init.as_ref().map(read_angle_file).transpose()?;
        let default_restarts = if init.is_some() { 1 } else { 64 };
        let options = AscentOptions {
            grad_tol: args.grad_tol,
            max_iters: args.max_iters,
            restarts: args.restarts.unwrap_or(default_restarts).max(1),
            seed: args.seed,
        };
        options.validate()?;
        Ok(Self {
            functional,
            schedule: args.schedule.clone(),
            options,
            init,
            out: args.out.clone(),
            format: args.format,
        })
    }
}

/// Formats `x` with `digits` significant digits in positional notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFiniteObjective { .. } => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

pub fn coeff_report(d: &StepDriver) -> Result<Value, Error> {
    let t = coeffs_234(d);
    let oracle = coeffs_upto(d, 6)?;
    let g = log_coeffs(&t);
    let mut functionals = serde_json::Map::new();
    for f in Functional::builtins() {
        functionals.insert(f.name().to_string(), json!(f.eval(&t)));
    }
    Ok(json!({
        "m": d.m(),
        "closed_form": {
            "a2": complex_json(t.a2),
            "a3": complex_json(t.a3),
            "a4": complex_json(t.a4),
        },
        "oracle": oracle.iter().enumerate()
            .map(|(i, z)| (format!("a{}", i + 2), complex_json(*z)))
            .collect::<serde_json::Map<_, _>>(),
        "log_coefficients": {
            "gamma1": complex_json(g.gamma1),
            "gamma2": complex_json(g.gamma2),
            "gamma3": complex_json(g.gamma3),
        },
        "functionals": functionals,
    }))
}

fn cmd_coeff(file: &PathBuf, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = read_angle_file(file).and_then(|d| coeff_report(&d));
    match report {
        Ok(v) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Option<BufWriter<File>>> {
    path.as_ref().map(|p| File::create(p).map(BufWriter::new)).transpose()
}

fn cmd_optimize(args: &OptimizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let trace = match refine_schedule_from(
        &config.functional,
        &config.schedule,
        &config.options,
        config.init.as_ref(),
    ) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let file = TraceFile::new(config.functional.name(), config.options.seed, &trace);
    let written = match open_output(&config.out) {
        Ok(Some(mut w)) => write_trace(&file, config.format, &mut w).and_then(|_| Ok(w.flush()?)),
        Ok(None) => write_trace(&file, config.format, out),
        Err(e) => Err(e.into()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    for s in &trace.stages {
        let _ = writeln!(
            err,
            "m = {:>4}  {} = {}  iterations = {}  converged = {}",
            s.m,
            config.functional,
            fmt_sig(s.result.value, 12),
            s.result.iterations,
            s.result.converged
        );
    }
    EXIT_OK
}

fn write_trace(file: &TraceFile, format: OutputFormat, out: &mut dyn Write) -> Result<(), Error> {
    match format {
        OutputFormat::Json => writeln!(out, "{}", file.to_json())?,
        OutputFormat::Csv => file.write_csv(out)?,
    }
    Ok(())
}

/// Rows of the maximizing-sequence table: `(m, [milin2, milin3, odd5, odd7])`.
pub fn table1(seed: u64, restarts: usize, full: bool) -> Result<Vec<(usize, [f64; 4])>, Error> {
    let sizes: &[usize] = if full {
        &TABLE1_SIZES
    } else {
        &TABLE1_SIZES[..3]
    };
    let opts = AscentOptions {
        restarts,
        seed,
        ..AscentOptions::default()
    };
    let mut rows: Vec<(usize, [f64; 4])> = sizes.iter().map(|&m| (m, [0.0; 4])).collect();
    for (col, f) in Functional::builtins().iter().enumerate() {
        let trace = refine_schedule_from(f, sizes, &opts, None)?;
        for (row, v) in rows.iter_mut().zip(trace.values()) {
            row.1[col] = v;
        }
    }
    Ok(rows)
}

fn cmd_table1(
    seed: u64,
    restarts: usize,
    full: bool,
    path: &Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let rows = match table1(seed, restarts, full) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec!["m".to_string()];
        header.extend(Functional::BUILTIN.iter().map(|s| s.to_string()));
        let _ = w.write_record(&header);
        for (m, vals) in &rows {
            let mut rec = vec![m.to_string()];
            rec.extend(vals.iter().map(|v| fmt_sig(*v, 12)));
            let _ = w.write_record(&rec);
        }
        let _ = w.flush();
    }
    let result = match path {
        Some(p) => std::fs::write(p, &buf),
        None => out.write_all(&buf),
    };
    if let Err(e) = result {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    EXIT_OK
}

/// `(odd7 by closed form, odd7 by the recursion)` at the reference driver.
pub fn counterexample_values() -> (f64, f64) {
    let d = counterexample_driver();
    let closed = Functional::Odd7.eval(&coeffs_234(&d));
    let a = coeffs_upto(&d, 4).expect("order 4 is valid");
    let oracle = Functional::Odd7.eval(&CoefficientTriple::new(a[0], a[1], a[2]));
    (closed, oracle)
}

fn cmd_verify_table2(out: &mut dyn Write) -> i32 {
    let (closed, oracle) = counterexample_values();
    let pass = closed > TYPICALLY_REAL_ODD7 && (closed - oracle).abs() <= 1e-12;
    let _ = writeln!(out, "odd7 (closed form) = {}", fmt_sig(closed, 12));
    let _ = writeln!(out, "odd7 (recursion)   = {}", fmt_sig(oracle, 12));
    let _ = writeln!(out, "1090/1083          = {}", fmt_sig(TYPICALLY_REAL_ODD7, 12));
    let _ = writeln!(out, "{}", if pass { "PASS" } else { "FAIL" });
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cmd_milin_bound(tol: f64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let lambda0 = match solve_lambda0(tol) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let residual = stationarity_residual(lambda0).expect("root is non-negative");
    let _ = writeln!(out, "lambda0  = {}", fmt_sig(lambda0, 10));
    let _ = writeln!(out, "bound    = {}", fmt_sig(bound_m(lambda0), 10));
    let _ = writeln!(out, "residual = {:.3e}", residual.abs());
    EXIT_OK
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Coeff { file } => cmd_coeff(file, out, err),
        Command::Optimize(args) => cmd_optimize(args, out, err),
        Command::Table1 {
            seed,
            restarts,
            full,
            out: path,
        } => cmd_table1(*seed, *restarts, *full, path, out, err),
        Command::VerifyTable2 => cmd_verify_table2(out),
        Command::MilinBound { tol } => cmd_milin_bound(*tol, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.034856110123, 10), "0.03485611012");
        assert_eq!(fmt_sig(1.0064910929, 10), "1.006491093");
        assert_eq!(fmt_sig(0.0, 10), "0");
    }

    #[test]
    fn verify_table2_passes() {
        let mut out = Vec::new();
        assert_eq!(cmd_verify_table2(&mut out), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("PASS"));
        assert!(text.contains("1.00649109"));
    }

    #[test]
    fn milin_bound_report() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(cmd_milin_bound(1e-12, &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.contains("lambda0  = 0.3900456"));
        assert!(text.contains("bound    = 0.03485611"));
        assert_eq!(cmd_milin_bound(0.5, &mut out, &mut err), EXIT_USAGE);
    }
}
