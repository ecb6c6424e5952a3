//! Command-line front end: `classify`, `solve`, `verify` and `phase`.
//!
//! Data goes to stdout and diagnostics to stderr. Exit codes: 0 success,
//! 1 lemma violations, 2 usage or input errors, 3 triangle outside the
//! closed-form classification.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classifier::{classify, vertex_objective_table, Coverage, SolutionSet};
use crate::error::Error;
use crate::io::{read_points, read_weights};
use crate::lemma_lab::{verify_lemma_suite, Section, SuiteReport};
use crate::objective::{evaluate, Metric, WeightedPointSet};
use crate::oracle::{certified_min, sampled_min, CertifiedBound, DEFAULT_GRID, DEFAULT_REFINE};
use crate::projective::{
    centroid, is_big, triangle_from_angles, AngleTriple, ProjectiveTriangle, DEFAULT_ANGLE_TOL, PHYSICAL_ANGLE_TOL,
};
use crate::solver::{solve, solve_triangle, SolverConfig, SolverResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_COVERED: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PROJMED_THREADS";

/// Samples used by the uncertified oracle for dimensions above 3.
const SAMPLED_ORACLE_POINTS: usize = 200_000;

#[derive(Debug, Parser)]
#[command(name = "projmed", version, about = "Fermat-Torricelli points of lines under the sine distance")]
pub struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Report wall-clock time on stderr.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form solution set of a triangle.
    Classify(ClassifyArgs),
    /// Numerical minimizer of a weighted point set.
    Solve(SolveArgs),
    /// Run the lemma and identity suites.
    Verify(VerifyArgs),
    /// Sweep angles and emit CSV.
    Phase(PhaseArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Pairwise angles in degrees, e.g. `65,70,80`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "points",
        required_unless_present = "points"
    )]
    pub angles: Option<Vec<f64>>,
    /// File with three points.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Angle-equality tolerance in radians.
    #[arg(long, default_value_t = DEFAULT_ANGLE_TOL, conflicts_with = "physical")]
    pub tol: f64,
    /// Use the looser tolerance for measured data.
    #[arg(long)]
    pub physical: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, default_value = "sine")]
    pub metric: Metric,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    /// Bound the global minimum with the grid oracle.
    #[arg(long)]
    pub certify: bool,
    /// Oracle grid size.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SuiteChoice {
    S2,
    S3,
    S4,
    S5,
    S6,
    All,
}

impl SuiteChoice {
    fn sections(self) -> Vec<Section> {
        match self {
            SuiteChoice::S2 => vec![Section::S2],
            SuiteChoice::S3 => vec![Section::S3],
            SuiteChoice::S4 => vec![Section::S4],
            SuiteChoice::S5 => vec![Section::S5],
            SuiteChoice::S6 => vec![Section::S6],
            SuiteChoice::All => Section::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteChoice,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum PhaseMode {
    Equilateral,
    General,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(long, value_enum, default_value = "equilateral")]
    pub mode: PhaseMode,
    /// First angle in degrees (default 40 for equilateral, `step` for general).
    #[arg(long)]
    pub from: Option<f64>,
    /// Last angle in degrees (default 80 for equilateral, 90 for general).
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Add oracle bounds to every row.
    #[arg(long)]
    pub certify: bool,
    /// Oracle grid size.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

/// Structured record of one command run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    /// Wall-clock milliseconds; only filled with `--timing`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Result of a command: the report, its human-readable form and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub text: String,
    pub exit: i32,
    /// Message for stderr.
    pub note: Option<String>,
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Classify(a) => cmd_classify(a)?,
        Command::Solve(a) => cmd_solve(a)?,
        Command::Verify(a) => cmd_verify(a)?,
        Command::Phase(a) => cmd_phase(a)?,
    };
    if cli.timing {
        out.report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(out)
}

/// Parses `std::env::args`, runs the command, prints and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
            } else {
                print!("{}", out.text);
            }
            if let Some(n) = &out.note {
                eprintln!("{n}");
            }
            if let Some(ms) = out.report.timing_ms {
                eprintln!("elapsed: {ms} ms");
            }
            out.exit
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring {THREADS_ENV}={v:?}"),
    }
}

fn triangle_from_args(a: &ClassifyArgs) -> Result<ProjectiveTriangle, CliError> {
    if let Some(angles) = &a.angles {
        if angles.len() != 3 {
            return Err(CliError(format!("--angles takes exactly three values, got {}", angles.len())));
        }
        let t = AngleTriple::from_degrees(angles[0], angles[1], angles[2])?;
        return Ok(triangle_from_angles(&t)?);
    }
    let path = a.points.as_ref().ok_or_else(|| CliError("need --angles or --points".into()))?;
    let pts = read_points(path)?;
    if pts.len() != 3 || pts[0].dim() != 3 {
        return Err(CliError(format!(
            "{}: expected three points in R^3, got {} of dimension {}",
            path.display(),
            pts.len(),
            pts[0].dim()
        )));
    }
    let [a, b, c]: [_; 3] = pts.try_into().expect("three points");
    Ok(crate::projective::normalize_signs([a, b, c])?)
}

fn solution_text(t: &ProjectiveTriangle, ss: &SolutionSet) -> String {
    let ang = t.angles().to_degrees();
    let mut s = format!(
        "angles (deg): phi_AB={:.6} phi_AC={:.6} phi_BC={:.6}\ncoverage: {}\n",
        ang[0], ang[1], ang[2], ss.coverage
    );
    for m in &ss.members {
        s.push_str(&format!("{}  {}  J={:.12}\n", m.label, m.point, m.value));
    }
    s
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<Outcome, CliError> {
    let t = triangle_from_args(a)?;
    let tol = if a.physical { PHYSICAL_ANGLE_TOL } else { a.tol };
    let ss = classify(&t, tol)?;
    let (exit, note) = if ss.coverage == Coverage::NotCovered {
        (
            EXIT_NOT_COVERED,
            Some(
                "triangle is outside the closed-form cases; use `projmed solve` for a numerical minimizer".to_string(),
            ),
        )
    } else {
        (EXIT_OK, None)
    };
    let outputs = json!({
        "angles_deg": t.angles().to_degrees(),
        "vertex_objective": vertex_objective_table(&t),
        "solution": to_value(&ss),
        "winner": ss.winner_string(),
    });
    Ok(Outcome {
        report: RunReport { command: "classify".into(), inputs: to_value(a), outputs, timing_ms: None },
        text: solution_text(&t, &ss),
        exit,
        note,
    })
}

#[derive(Clone, Debug, Serialize)]
struct Certificate {
    bound: CertifiedBound,
    contains_value: bool,
    agrees: bool,
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let pts = read_points(&a.points)?;
    let ps = match &a.weights {
        Some(w) => WeightedPointSet::new(pts, read_weights(w)?)?,
        None => WeightedPointSet::uniform(pts)?,
    };
    let cfg = SolverConfig {
        seed: a.seed,
        restarts: a.restarts as usize,
        max_iters: a.max_iters as usize,
        metric: a.metric,
        ..SolverConfig::default()
    };
    let res: SolverResult = solve(&ps, &cfg)?;
    let mut text = format!(
        "minimizer: {}\nvalue: {:.12}\nresidual: {:.3e}\nstatus: {:?}\niterations: {}\n",
        res.minimizer,
        res.value,
        res.residual,
        res.status,
        res.trace.last().map_or(0, |t| t.iter)
    );
    let mut certificate = None;
    let mut certified = false;
    if a.certify {
        if a.metric != Metric::Sine {
            return Err(CliError("--certify is only available for the sine metric".into()));
        }
        let bound = if ps.dim() == 3 {
            certified_min(&ps, a.grid, DEFAULT_REFINE)?
        } else {
            sampled_min(&ps, SAMPLED_ORACLE_POINTS, a.seed)
        };
        let slack = 1e-9;
        let contains_value = bound.contains(res.value, slack);
        let agrees = bound.certified && contains_value;
        certified = agrees;
        text.push_str(&format!(
            "certificate: [{:.12}, {:.12}] resolution={:.3e} rad {}\nagreement: {}\n",
            bound.lower,
            bound.upper,
            bound.resolution.0,
            if bound.certified { "certified" } else { "UNCERTIFIED (dimension > 3)" },
            if agrees {
                "yes"
            } else if bound.certified {
                "NO"
            } else {
                "not certified"
            }
        ));
        certificate = Some(Certificate { bound, contains_value, agrees });
    } else if ps.dim() > 3 {
        text.push_str("certificate: none (dimension > 3 results are uncertified)\n");
    }
    let outputs = json!({
        "result": to_value(&res),
        "certificate": certificate.as_ref().map(to_value),
        "certified": certified,
        "dimension": ps.dim(),
    });
    Ok(Outcome {
        report: RunReport { command: "solve".into(), inputs: to_value(a), outputs, timing_ms: None },
        text,
        exit: EXIT_OK,
        note: None,
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let mut suites: Vec<SuiteReport> = Vec::new();
    for s in a.suite.sections() {
        suites.push(verify_lemma_suite(s, a.seed, a.trials as usize)?);
    }
    let mut text = String::new();
    for s in &suites {
        text.push_str(&format!("[{}] seed={} trials={} violations={}\n", s.section, s.seed, s.trials, s.violations()));
        for r in &s.reports {
            text.push_str(&format!("  {r}\n"));
        }
    }
    let violations: usize = suites.iter().map(|s| s.violations()).sum();
    text.push_str(&format!("total violations: {violations}\n"));
    let exit = if violations == 0 { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome {
        report: RunReport {
            command: "verify".into(),
            inputs: to_value(a),
            outputs: json!({ "suites": to_value(&suites), "violations": violations }),
            timing_ms: None,
        },
        text,
        exit,
        note: (exit != EXIT_OK).then(|| format!("{violations} violation(s)")),
    })
}

/// One CSV row of the phase sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub phi_ab: f64,
    pub phi_ac: f64,
    pub phi_bc: f64,
    pub winner: String,
    #[serde(rename = "J_A")]
    pub j_a: f64,
    #[serde(rename = "J_B")]
    pub j_b: f64,
    #[serde(rename = "J_C")]
    pub j_c: f64,
    #[serde(rename = "J_E")]
    pub j_e: Option<f64>,
    pub oracle_low: Option<f64>,
    pub oracle_high: Option<f64>,
}

/// `from, from + step, ...` up to `to` (inclusive within rounding).
fn sweep(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor();
    if n < 0.0 {
        return Vec::new();
    }
    (0..=n as usize).map(|k| from + k as f64 * step).collect()
}

fn phase_row(angles: [f64; 3], certify: bool, grid: usize) -> Result<Option<PhaseRow>, CliError> {
    let triple = match AngleTriple::from_degrees(angles[0], angles[1], angles[2]) {
        Ok(t) => t,
        Err(_) => return Ok(None),
    };
    let t = match triangle_from_angles(&triple) {
        Ok(t) => t,
        Err(Error::Unrealizable(_)) | Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let ps = WeightedPointSet::triangle(&t);
    let ss = classify(&t, DEFAULT_ANGLE_TOL)?;
    let winner = if ss.is_covered() {
        ss.winner_string()
    } else {
        let r = solve_triangle(&t, &SolverConfig::default())?;
        match r.status {
            crate::solver::SolverStatus::Vertex(i) => crate::classifier::Label::vertex(i).to_string(),
            _ => "P".to_string(),
        }
    };
    let [j_a, j_b, j_c] = vertex_objective_table(&t);
    let j_e = if is_big(&t) { None } else { Some(evaluate(&ps, &centroid(&t)?, Metric::Sine)?) };
    let (oracle_low, oracle_high) = if certify {
        let cb = certified_min(&ps, grid, DEFAULT_REFINE)?;
        (Some(cb.lower), Some(cb.upper))
    } else {
        (None, None)
    };
    let d = triple.to_degrees();
    Ok(Some(PhaseRow { phi_ab: d[0], phi_ac: d[1], phi_bc: d[2], winner, j_a, j_b, j_c, j_e, oracle_low, oracle_high }))
}

pub fn phase_rows(a: &PhaseArgs) -> Result<Vec<PhaseRow>, CliError> {
    if !(a.step.is_finite() && a.step > 0.0) {
        return Err(CliError(format!("step must be a positive number, got {}", a.step)));
    }
    let (dfrom, dto) = match a.mode {
        PhaseMode::Equilateral => (40.0, 80.0),
        PhaseMode::General => (a.step, 90.0),
    };
    let (from, to) = (a.from.unwrap_or(dfrom), a.to.unwrap_or(dto));
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError("range bounds must be finite".into()));
    }
    let mut rows = Vec::new();
    match a.mode {
        PhaseMode::Equilateral => {
            for phi in sweep(from, to, a.step) {
                if let Some(r) = phase_row([phi, phi, phi], a.certify, a.grid)? {
                    rows.push(r);
                }
            }
        }
        PhaseMode::General => {
            let xs = sweep(from, to, a.step);
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in xs.iter().enumerate().skip(i) {
                    for &z in &xs[j..] {
                        if let Some(r) = phase_row([x, y, z], a.certify, a.grid)? {
                            rows.push(r);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[PhaseRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["phi_ab", "phi_ac", "phi_bc", "winner", "J_A", "J_B", "J_C", "J_E", "oracle_low", "oracle_high"])
        .map_err(|e| CliError(e.to_string()))?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            format!("{:.6}", r.phi_ab),
            format!("{:.6}", r.phi_ac),
            format!("{:.6}", r.phi_bc),
            r.winner.clone(),
            format!("{:.12}", r.j_a),
            format!("{:.12}", r.j_b),
            format!("{:.12}", r.j_c),
            opt(r.j_e),
            opt(r.oracle_low),
            opt(r.oracle_high),
        ])
        .map_err(|e| CliError(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cmd_phase(a: &PhaseArgs) -> Result<Outcome, CliError> {
    let rows = phase_rows(a)?;
    Ok(Outcome {
        report: RunReport {
            command: "phase".into(),
            inputs: to_value(a),
            outputs: json!({ "rows": to_value(&rows) }),
            timing_ms: None,
        },
        text: rows_to_csv(&rows)?,
        exit: EXIT_OK,
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("projmed").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn classify_examples() {
        let out = execute(&parse(&["classify", "--angles", "65,70,80"])).unwrap();
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.report.outputs["winner"], "A");
        assert_eq!(out.report.outputs["solution"]["coverage"], "Theorem1_1");

        let out = execute(&parse(&["classify", "--angles", "50,50,50"])).unwrap();
        assert_eq!(out.report.outputs["winner"], "E");

        assert!(execute(&parse(&["classify", "--angles", "30,40,85"])).is_err());

        let out = execute(&parse(&["classify", "--angles", "50,55,58"])).unwrap();
        assert_eq!(out.exit, EXIT_NOT_COVERED);
    }

    #[test]
    fn trials_zero_is_a_usage_error() {
        let e = Cli::try_parse_from(["projmed", "verify", "--trials", "0"]).unwrap_err();
        assert!(e.use_stderr());
    }

    #[test]
    fn phase_sweeps() {
        let rows = phase_rows(&PhaseArgs {
            mode: PhaseMode::Equilateral,
            from: Some(55.0),
            to: Some(65.0),
            step: 1.0,
            certify: false,
            grid: 1000,
        })
        .unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows {
            let expect = match r.phi_ab {
                x if x < 59.5 => "E",
                x if x < 60.5 => "A+B+C+E",
                _ => "A+B+C",
            };
            assert_eq!(r.winner, expect, "{}", r.phi_ab);
        }
        let empty = phase_rows(&PhaseArgs {
            mode: PhaseMode::Equilateral,
            from: Some(70.0),
            to: Some(60.0),
            step: 1.0,
            certify: false,
            grid: 1000,
        })
        .unwrap();
        assert!(empty.is_empty());
        let csv = rows_to_csv(&empty).unwrap();
        assert_eq!(csv.trim(), "phi_ab,phi_ac,phi_bc,winner,J_A,J_B,J_C,J_E,oracle_low,oracle_high");
    }

    #[test]
    fn sweep_includes_endpoint() {
        assert_eq!(sweep(55.0, 65.0, 1.0).len(), 11);
        assert_eq!(sweep(0.1, 0.3, 0.1).len(), 3);
        assert!(sweep(2.0, 1.0, 1.0).is_empty());
    }

    #[test]
    fn report_round_trips() {
        let out = execute(&parse(&["classify", "--angles", "65,80,80"])).unwrap();
        let s = serde_json::to_string(&out.report).unwrap();
        let back: RunReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, out.report);
    }
}
