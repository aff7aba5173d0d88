//! The `axidiff` command line: `eval`, `compare`, `convergence` and `selftest`.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure (or a failed
//! check), 3 invalid parameter combination.

pub mod args;
pub mod methods;
pub mod output;

use std::fs;
use std::io::Write;

use axidiff_core::quadrature::solve_quadrature;
use axidiff_core::selftest::{self, Mutation, SelftestOptions};
use axidiff_core::series::{Constants, SeriesParams, Terms};
use axidiff_core::specfun::CompensatedSum;
use axidiff_core::{Error, PhysicalSetup};
use rayon::prelude::*;

use crate::args::{
    Cli, Command, CompareArgs, ConvergenceArgs, EvalArgs, Format, InjectArg, OutputArgs,
    SelftestArgs,
};
use crate::methods::{evaluate_point, Evaluation, Problem};
use crate::output::{Cell, Table, EVAL_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Usage = 1,
    Numerical = 2,
    Invalid = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(e: &Error) -> Exit {
        if e.is_numerical() {
            Exit::Numerical
        } else {
            Exit::Invalid
        }
    }
}

/// Text for standard output plus diagnostics for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failed(exit: Exit, message: String) -> Self {
        Outcome {
            exit,
            stdout: String::new(),
            stderr: message,
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval(a) => eval(&a),
        Command::Compare(a) => compare(&a),
        Command::Convergence(a) => convergence(&a),
        Command::Selftest(a) => selftest(&a),
    }
}

fn render(table: &Table, request: &impl serde::Serialize, out: &OutputArgs) -> String {
    match out.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(request),
    }
}

/// Evaluates every grid point in parallel; results keep grid order.
fn evaluate_grid(
    problem: &Problem,
    methods: &[args::Method],
    points: &[(f64, f64)],
    tol: f64,
    fd: args::FdArgs,
) -> Vec<Vec<Result<Evaluation, Error>>> {
    points
        .par_iter()
        .map(|&(r, t)| {
            methods
                .par_iter()
                .map(|&m| evaluate_point(problem, m, r, t, tol, fd))
                .collect()
        })
        .collect()
}

fn record_errors(
    results: &[Vec<Result<Evaluation, Error>>],
    methods: &[args::Method],
    points: &[(f64, f64)],
    exit: &mut Exit,
    stderr: &mut String,
) {
    for (row, &(r, t)) in results.iter().zip(points) {
        for (res, m) in row.iter().zip(methods) {
            if let Err(e) = res {
                *exit = (*exit).max(Exit::for_error(e));
                stderr.push_str(&format!("r={r} t={t} method={}: {e}\n", m.name()));
            }
        }
    }
}

pub fn eval(a: &EvalArgs) -> Outcome {
    let problem =
        match Problem::from_args(&a.problem).and_then(|p| p.check_method(a.method).map(|_| p)) {
            Ok(p) => p,
            Err(e) => return Outcome::failed(Exit::for_error(&e), format!("error: {e}\n")),
        };
    let points = a.grid.points();
    let methods = [a.method];
    let results = evaluate_grid(&problem, &methods, &points, a.output.tol, a.fd);
    let mut exit = Exit::Ok;
    let mut stderr = String::new();
    record_errors(&results, &methods, &points, &mut exit, &mut stderr);
    let mut table = Table::new(EVAL_HEADER);
    for (row, &(r, t)) in results.iter().zip(&points) {
        if let Ok(e) = &row[0] {
            table.rows.push(vec![
                Cell::Real(r),
                Cell::Real(t),
                Cell::Text(a.method.name().into()),
                Cell::Real(e.value),
                Cell::Real(e.err_est),
                Cell::Int(e.work),
            ]);
        }
    }
    Outcome {
        exit,
        stdout: render(&table, a, &a.output),
        stderr,
    }
}

pub fn compare(a: &CompareArgs) -> Outcome {
    let problem = match Problem::from_args(&a.problem) {
        Ok(p) => p,
        Err(e) => return Outcome::failed(Exit::for_error(&e), format!("error: {e}\n")),
    };
    for &m in &a.methods {
        if let Err(e) = problem.check_method(m) {
            return Outcome::failed(Exit::for_error(&e), format!("error: {e}\n"));
        }
    }
    let points = a.grid.points();
    let results = evaluate_grid(&problem, &a.methods, &points, a.output.tol, a.fd);
    let mut exit = Exit::Ok;
    let mut stderr = String::new();
    record_errors(&results, &a.methods, &points, &mut exit, &mut stderr);

    let mut pairs = Vec::new();
    for i in 0..a.methods.len() {
        for j in i + 1..a.methods.len() {
            pairs.push((i, j));
        }
    }
    let mut header = vec!["r".to_string(), "t".to_string()];
    for m in &a.methods {
        for field in ["value", "err_est", "work"] {
            header.push(format!("{}_{field}", m.name()));
        }
    }
    for &(i, j) in &pairs {
        header.push(format!(
            "diff_{}_{}",
            a.methods[i].name(),
            a.methods[j].name()
        ));
    }
    let mut table = Table::new(header);
    let mut worst = 0.0f64;
    for (row, &(r, t)) in results.iter().zip(&points) {
        let evals: Option<Vec<Evaluation>> =
            row.iter().map(|res| res.as_ref().ok().copied()).collect();
        let Some(evals) = evals else { continue };
        let mut cells = vec![Cell::Real(r), Cell::Real(t)];
        for e in &evals {
            cells.extend([
                Cell::Real(e.value),
                Cell::Real(e.err_est),
                Cell::Int(e.work),
            ]);
        }
        for &(i, j) in &pairs {
            let d = (evals[i].value - evals[j].value).abs();
            worst = worst.max(d);
            cells.push(Cell::Real(d));
        }
        table.rows.push(cells);
    }
    if worst > a.cross_tol {
        exit = exit.max(Exit::Numerical);
        stderr.push_str(&format!(
            "largest pairwise difference {worst:e} exceeds --cross-tol {:e}\n",
            a.cross_tol
        ));
    }
    Outcome {
        exit,
        stdout: render(&table, a, &a.output),
        stderr,
    }
}

pub fn convergence(a: &ConvergenceArgs) -> Outcome {
    let attempt = || -> Result<Table, Error> {
        let problem = Problem::from_args(&a.problem)?;
        problem.check_method(args::Method::Series)?;
        let kind = problem.series_kind().expect("checked above");
        let setup = PhysicalSetup::new(problem.kappa, a.r, a.t)?;
        let p = SeriesParams::new(problem.a, setup)
            .with_v(problem.v)
            .with_tol(a.output.tol);
        let rows = match a.max_n {
            Some(n) => n,
            None => axidiff_core::series::sum_series(kind, &p, &Constants::DERIVED)?.terms_used,
        };
        let oracle = solve_quadrature(&problem.g, &setup, 1e-13)?.value;
        let mut table = Table::new(["n", "partial", "abs_error"]);
        let mut sum = CompensatedSum::new();
        for (n, term) in Terms::new(kind, &p, &Constants::DERIVED)?
            .take(rows)
            .enumerate()
        {
            sum.add(term);
            table.rows.push(vec![
                Cell::Int(n as u64),
                Cell::Real(sum.value()),
                Cell::Real((sum.value() - oracle).abs()),
            ]);
        }
        Ok(table)
    };
    match attempt() {
        Ok(table) => Outcome {
            exit: Exit::Ok,
            stdout: render(&table, a, &a.output),
            stderr: String::new(),
        },
        Err(e) => Outcome::failed(Exit::for_error(&e), format!("error: {e}\n")),
    }
}

pub fn selftest(a: &SelftestArgs) -> Outcome {
    let opts = SelftestOptions {
        filter: a.filter.clone(),
        mutation: a.inject.map(|InjectArg::HalfJ0sq| Mutation::HalfJ0Squared),
    };
    let outcomes = match selftest::run(&opts) {
        Ok(o) => o,
        Err(e) => return Outcome::failed(Exit::Usage, format!("error: {e}\n")),
    };
    let mut stdout = String::new();
    for o in &outcomes {
        stdout.push_str(&o.line());
        stdout.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    stdout.push_str(&format!("{passed}/{} properties passed\n", outcomes.len()));
    Outcome {
        exit: if passed == outcomes.len() {
            Exit::Ok
        } else {
            Exit::Numerical
        },
        stdout,
        stderr: String::new(),
    }
}

/// Writes the outcome to `out` (or standard output) and standard error.
pub fn emit(outcome: &Outcome, out: Option<&std::path::Path>) -> Exit {
    if !outcome.stderr.is_empty() {
        eprint!("{}", outcome.stderr);
    }
    let written = match out {
        Some(path) => fs::write(path, &outcome.stdout),
        None => std::io::stdout().write_all(outcome.stdout.as_bytes()),
    };
    match written {
        Ok(()) => outcome.exit,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            Exit::Usage
        }
    }
}
