//! `momentmap`: command-line front end for weights, classification, flows
//! and boundary computations on scene files.
//!
//! Exit status: 0 on success, 1 when a job fails, 2 on usage or parse errors.

mod encode;
mod inputs;
mod job;
mod scene_file;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use job::{Command, JobSpec, Level};

/// Why a job did not produce a successful report.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or invalid input files.
    Usage(String),
    /// An error inside the computation.
    Job(String),
}

impl Failure {
    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Job(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "momentmap", version, about = "Maximal weights, stability and Kempf-Ness flows on scene files")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scene file (TOML).
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Group for scene-free commands: u:N, su:N or torus:N.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance override, also accepted as --tol.NAME VALUE.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Random samples for the sampling classifier.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Self-test level.
    #[arg(long, global = true, value_enum)]
    level: Option<Level>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximal weight λ_x(e_s), analytic and ray-mode.
    Weight {
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        direction: String,
    },
    /// The curve t ↦ λ_t(x; s) as CSV (t, lambda_t, slope).
    Curve {
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Stability verdicts with certificates.
    Classify {
        /// Points to classify; all points of the scene by default.
        #[arg(long)]
        point: Vec<String>,
    },
    /// Kempf–Ness flow, with the trajectory as CSV (t, mu_norm, distance).
    Flow {
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        max_time: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The boundary action s·g.
    BoundaryAct {
        #[arg(long)]
        direction: String,
        #[arg(long)]
        element: String,
    },
    /// Whether two Lie algebra elements are opposed.
    Opposed {
        #[arg(long)]
        direction: String,
        #[arg(long)]
        other: String,
    },
    /// An element h with h ∈ P_u and v·h = −u.
    Connect {
        #[arg(long)]
        direction: String,
        #[arg(long)]
        other: String,
    },
    /// The integral Ψ_x(g) of the moment map.
    Integral {
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        element: String,
    },
    /// Built-in verification suites.
    Selftest,
    /// Run the jobs of a batch file; failures are recorded, not fatal.
    Batch { jobs: PathBuf },
}

/// Rewrites `--tol.NAME=V` and `--tol.NAME V` into `--tol NAME=V`.
fn expand_tol_flags(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) if rest.contains('=') => out.extend(["--tol".to_string(), rest.to_string()]),
            Some(rest) => {
                let value = it.next().unwrap_or_default();
                out.extend(["--tol".to_string(), format!("{rest}={value}")]);
            }
            None => out.push(a),
        }
    }
    out
}

fn build_job(cmd: Cmd, common: &Common) -> Result<JobSpec, Failure> {
    let mut job = JobSpec::new(Command::Selftest);
    let one = |p: Option<String>| p.into_iter().collect::<Vec<_>>();
    match cmd {
        Cmd::Weight { point, direction } => {
            job.command = Command::Weight;
            job.points = one(point);
            job.direction = Some(direction);
        }
        Cmd::Curve { point, direction, t_max, steps, csv } => {
            job.command = Command::Curve;
            job.points = one(point);
            job.direction = Some(direction);
            job.t_max = Some(t_max);
            job.steps = Some(steps);
            job.csv = csv;
        }
        Cmd::Classify { point } => {
            job.command = Command::Classify;
            job.points = point;
        }
        Cmd::Flow { point, max_time, csv } => {
            job.command = Command::Flow;
            job.points = one(point);
            job.max_time = max_time;
            job.csv = csv;
        }
        Cmd::BoundaryAct { direction, element } => {
            job.command = Command::BoundaryAct;
            job.direction = Some(direction);
            job.element = Some(element);
        }
        Cmd::Opposed { direction, other } => {
            job.command = Command::Opposed;
            job.direction = Some(direction);
            job.other = Some(other);
        }
        Cmd::Connect { direction, other } => {
            job.command = Command::Connect;
            job.direction = Some(direction);
            job.other = Some(other);
        }
        Cmd::Integral { point, element } => {
            job.command = Command::Integral;
            job.points = one(point);
            job.element = Some(element);
        }
        Cmd::Selftest => job.command = Command::Selftest,
        Cmd::Batch { .. } => unreachable!("batch jobs are read from file"),
    }
    job.scene = common.scene.clone();
    job.group = common.group.clone();
    job.seed = common.seed;
    job.budget = common.budget;
    job.level = common.level;
    for entry in &common.tol {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("tolerance `{entry}` is not NAME=VALUE")))?;
        let value: f64 = value.parse().map_err(|e| Failure::Usage(format!("tolerance `{name}`: {e}")))?;
        job.tol.insert(name.to_string(), value);
    }
    Ok(job)
}

fn write_report(path: &Option<PathBuf>, json: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, json).map_err(|e| Failure::Job(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    if let Cmd::Batch { jobs } = &cli.command {
        let (report, lines) = job::run_batch(jobs)?;
        lines.iter().for_each(|l| println!("{l}"));
        println!("{} of {} jobs failed", report.failures.len(), report.reports.len());
        write_report(&cli.common.out, &serde_json::to_string_pretty(&report).expect("reports serialize"))?;
        return Ok(report.ok);
    }
    let job = build_job(cli.command, &cli.common)?;
    let report = job::run(&job)?;
    report.summary.iter().for_each(|l| println!("{l}"));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    write_report(&cli.common.out, &report.to_json())?;
    Ok(report.ok)
}

fn main() -> ExitCode {
    let args = expand_tol_flags(std::env::args());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Job(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
