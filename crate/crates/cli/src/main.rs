//! `cabcalc --config run.toml --out results/`
//!
//! Exit status: 0 on success, 1 when a selftest check fails, 2 for a bad
//! configuration, 3 when a mathematical precondition fails (incomplete
//! weight, non-elliptic sector, ...) and 4 when a numerical method does not
//! converge.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cabcalc::flows::{flow_csv, FlowRegistry, NumericWeight};
use cabcalc::schrodinger::{
    assemble_and_solve, membership_in_diff_s, parametrix_csv, parametrix_residual, resolvent_csv, resolvent_probe,
    rewrite, spectrum_csv, EigenRegistry, GeometricGrid, ProbeOperator, SchrodingerProblem, SpectralResult,
};
use cabcalc::weights::Weight;
use cabcalc::{selftest, Error};
use clap::Parser;
use num_complex::Complex64;
use rayon::prelude::*;

use config::{Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cabcalc", version, about = "Degenerate-operator calculus and radial Schrödinger spectra")]
struct Cli {
    /// Run file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files; created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for independent sectors (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Calc(Error),
    Io(String),
    Selftest(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Selftest(_) => 1,
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Calc(e) if e.is_precondition() => 3,
            Failure::Calc(e) if e.is_convergence() => 4,
            Failure::Calc(Error::PropertyViolation(_)) => 4,
            Failure::Calc(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Calc(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Selftest(n) => write!(f, "{n} selftest check(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Calc(e)
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Config(m)
    }
}

impl From<&str> for Failure {
    fn from(m: &str) -> Self {
        Failure::Config(m.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cabcalc: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let cfg = config::parse(&text)?;
    if cli.jobs == Some(0) {
        return Err("`--jobs` must be at least 1".into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let start = Instant::now();
    let report = pool.install(|| execute(&cfg))?;
    if cli.verbose {
        eprintln!("{:?} finished in {:.2?}", cfg.command, start.elapsed());
    }
    print!("{}", report.stdout);
    write_output(&cli.out, cfg.output_name(), &report.file)?;
    if cli.verbose {
        eprintln!("wrote {}", cli.out.join(cfg.output_name()).display());
    }
    match report.failed {
        0 => Ok(()),
        n => Err(Failure::Selftest(n)),
    }
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

struct Report {
    stdout: String,
    file: String,
    failed: usize,
}

impl Report {
    /// The same text on the terminal and in the output file.
    fn text(s: String) -> Self {
        Report { stdout: s.clone(), file: s, failed: 0 }
    }
}

fn execute(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.command {
        Command::Classify => classify(cfg),
        Command::Membership => membership(cfg),
        Command::Flow => flow(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Parametrix => parametrix(cfg),
        Command::Resolvent => resolvent(cfg),
        Command::Selftest => Ok(run_selftest()),
    }
}

fn problems(cfg: &RunConfig) -> Result<Vec<SchrodingerProblem>, Failure> {
    Ok(cfg.problems()??)
}

fn single_problem(cfg: &RunConfig) -> Result<SchrodingerProblem, Failure> {
    let mut probs = problems(cfg)?;
    if probs.len() != 1 {
        return Err(format!("{:?} takes a single `problem.l`", cfg.command).into());
    }
    Ok(probs.remove(0))
}

fn geometric_grid(cfg: &RunConfig) -> Result<GeometricGrid, Failure> {
    let (s_min, s_max, points) = cfg.grid()?;
    Ok(GeometricGrid::new(s_min, s_max, points)?)
}

fn classify(cfg: &RunConfig) -> Result<Report, Failure> {
    let prob = problems(cfg)?.remove(0);
    let mut out = String::new();
    let _ = writeln!(out, "n = {}, γ = {}, γ' = {}", prob.n, prob.gamma, prob.gamma_prime);
    for rw in rewrite(&prob)? {
        let _ = write!(out, "{rw}");
    }
    Ok(Report::text(out))
}

fn membership(cfg: &RunConfig) -> Result<Report, Failure> {
    let prob = problems(cfg)?.remove(0);
    let report = membership_in_diff_s(&prob, cfg.convention()?)?;
    Ok(Report::text(report.to_string()))
}

fn flow(cfg: &RunConfig) -> Result<Report, Failure> {
    let b = &cfg.flow;
    let weight = match &b.weight {
        Some(terms) => Weight::new(config::terms("flow.weight", terms)?)?,
        None => problems(cfg).map_err(|_| Failure::Config("flow needs `flow.weight` or a [problem] table".into()))?[0].global_phi(),
    };
    let numeric = NumericWeight::from_ring(&weight)?;
    let strategy = b.strategy.as_deref().unwrap_or("auto");
    let map = FlowRegistry::default().build(strategy, &numeric).map_err(|e| match e {
        Error::UnknownStrategy { .. } => Failure::Config(format!("`flow.strategy`: {e}")),
        other => Failure::Calc(other),
    })?;
    let s = b.s.map_or(Ok(1.0), |s| s.get_checked("flow.s"))?;
    let xs: Vec<f64> = match &b.x {
        Some(xs) => xs.iter().map(|x| x.get_checked("flow.x")).collect::<Result<_, _>>()?,
        None => {
            let lo = b.x_min.map_or(Ok(1e-3), |x| x.get_checked("flow.x_min"))?;
            let hi = b.x_max.map_or(Ok(1e3), |x| x.get_checked("flow.x_max"))?;
            let n = b.count.unwrap_or(13);
            if !(lo > 0.0 && hi > lo) || !(2..=100_000).contains(&n) {
                return Err("`flow.x_min`, `flow.x_max`, `flow.count` must satisfy 0 < x_min < x_max, 2 ≤ count ≤ 100000".into());
            }
            (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
        }
    };
    let csv = flow_csv(map.as_ref(), s, &xs)?;
    Ok(Report {
        stdout: format!("flow `{}` of {}: {} points at s = {s}\n", map.name(), weight.profile().to_string().trim().replace('\n', " + "), xs.len()),
        file: csv,
        failed: 0,
    })
}

fn spectrum(cfg: &RunConfig) -> Result<Report, Failure> {
    let probs = problems(cfg)?;
    let grid = geometric_grid(cfg)?;
    let k = cfg.num_eigs(grid.points)?;
    let tol = cfg.tolerance()?;
    let registry = EigenRegistry::default();
    let name = cfg.solve.solver.as_deref().unwrap_or(EigenRegistry::DEFAULT);
    let solver = registry.build(name).map_err(|e| Failure::Config(format!("`solve.solver`: {e}")))?;
    let results: Vec<SpectralResult> = probs
        .par_iter()
        .map(|p| assemble_and_solve(p, &grid, k, solver.as_ref()))
        .collect::<Result<_, _>>()?;
    for r in &results {
        for (e, res) in r.eigenvalues.iter().zip(&r.residuals) {
            if *res > tol * e.abs().max(1.0) {
                return Err(Error::NoConvergence {
                    what: format!("eigenpair {e} for l = {} has residual {res:e} above the tolerance {tol:e}", r.l),
                    iterations: 0,
                }
                .into());
            }
        }
    }
    let mut out = String::new();
    for r in &results {
        let _ = writeln!(out, "l = {}: {:?}", r.l, r.eigenvalues);
    }
    Ok(Report { stdout: out, file: spectrum_csv(&results), failed: 0 })
}

fn parametrix(cfg: &RunConfig) -> Result<Report, Failure> {
    let prob = single_problem(cfg)?;
    let rows = parametrix_residual(&prob, &cfg.parametrix_config()?)?;
    let mut out = String::new();
    for r in &rows {
        let _ = writeln!(out, "N = {}, K = {}: residual {:.3e}, conjugated {:.3e}", r.order, r.cutoff, r.residual_ratio, r.conjugated_ratio);
    }
    Ok(Report { stdout: out, file: parametrix_csv(&rows), failed: 0 })
}

fn resolvent(cfg: &RunConfig) -> Result<Report, Failure> {
    let prob = single_problem(cfg)?;
    let grid = geometric_grid(cfg)?;
    let (re, im) = match cfg.resolvent.z {
        Some((a, b)) => (a.get_checked("resolvent.z")?, b.get_checked("resolvent.z")?),
        None => (-1.0, 0.0),
    };
    let operator = match cfg.resolvent.operator.as_deref().unwrap_or("hamiltonian") {
        "hamiltonian" => ProbeOperator::Hamiltonian,
        "prefactored" => ProbeOperator::Prefactored(cfg.convention()?),
        other => return Err(format!("`resolvent.operator`: unknown operator `{other}` (hamiltonian, prefactored)").into()),
    };
    let report = resolvent_probe(&prob, &grid, Complex64::new(re, im), operator)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "z = {}, distance to the discrete spectrum {:.3e} ({}), grids {} and {} points",
        report.z,
        report.distance,
        if report.separated() { "separated" } else { "not separated" },
        report.points.0,
        report.points.1
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "  ‖A^{} (H - z)^-1 A^{}‖: {:.4e} → {:.4e} (ratio {:.3}, {})",
            r.i,
            r.j,
            r.coarse,
            r.fine,
            r.ratio(),
            if r.stable() { "stable" } else { "grows" }
        );
    }
    Ok(Report { stdout: out, file: resolvent_csv(&report), failed: 0 })
}

fn run_selftest() -> Report {
    let checks = selftest::run_everything();
    let mut out = String::new();
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{}/{} checks passed", checks.len() - failed, checks.len());
    Report::text(out).with_failed(failed)
}

impl Report {
    fn with_failed(mut self, failed: usize) -> Self {
        self.failed = failed;
        self
    }
}

trait Checked {
    fn get_checked(self, key: &str) -> Result<f64, String>;
}

impl Checked for config::Num {
    fn get_checked(self, key: &str) -> Result<f64, String> {
        let x = match self {
            config::Num::Int(n) => n as f64,
            config::Num::Float(x) => x,
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("`{key}` = {x} is not finite"))
        }
    }
}
