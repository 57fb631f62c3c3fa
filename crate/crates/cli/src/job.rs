//! Jobs and reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use momentmap::random::seeded;
use momentmap::scenes::{SceneKind, ScenePoint};
use momentmap::stability::{
    classify_sampling, classify_torus_scene, kempf_ness_flow, stabilizer_dimension, FlowOutcome, FlowParams,
    SamplingBudget, StabilityVerdict,
};
use momentmap::symspace::{
    boundary_action, connect_geodesic, opposed_in, parabolic_contains, BoundaryPoint, CompactGroup,
};
use momentmap::weights::{boundary_weight, kn_integral, ExtendedReal, WeightCurve, WeightMode};
use momentmap::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::inputs::{parse_direction, parse_element, parse_group};
use crate::scene_file::{self, LoadedScene};
use crate::{encode, selftest, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Weight,
    Curve,
    Classify,
    Flow,
    BoundaryAct,
    Opposed,
    Connect,
    Integral,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Quick,
    Full,
}

/// One unit of work. Every command-line invocation and every batch entry is
/// turned into a `JobSpec`; the report echoes it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<PathBuf>,
    /// Group for scene-free commands: `u:3`, `su:2`, `torus:2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// Names of points from the scene file; `classify` uses all when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Random samples for the sampling classifier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
    /// Tolerance overrides by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tol: BTreeMap<String, f64>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            scene: None,
            group: None,
            points: Vec::new(),
            direction: None,
            other: None,
            element: None,
            t_max: None,
            steps: None,
            max_time: None,
            csv: None,
            seed: 0,
            budget: None,
            level: None,
            tol: BTreeMap::new(),
        }
    }

    /// Tolerances with the overrides applied. Unknown names are usage errors;
    /// non-positive values are left for the commands (and `selftest`) to
    /// report.
    pub fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut tol = Tolerances::default();
        for (name, value) in &self.tol {
            tol.set(name, *value).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        Ok(tol)
    }

    /// Resolves relative paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        for p in [&mut self.scene, &mut self.csv].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub format: u32,
    pub job: JobSpec,
    pub ok: bool,
    /// How the numbers were obtained: `analytic`, `ray-mode`, `sampled`,
    /// `exact`, `quadrature` or `integrated`.
    pub provenance: Vec<String>,
    pub results: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub tolerances: Tolerances,
    /// Human-readable lines printed to standard output.
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    fn new(job: &JobSpec, tol: &Tolerances) -> Self {
        Self {
            tool: "momentmap",
            version: env!("CARGO_PKG_VERSION"),
            format: scene_file::FORMAT_VERSION,
            job: job.clone(),
            ok: true,
            provenance: Vec::new(),
            results: Value::Null,
            warnings: Vec::new(),
            error: None,
            tolerances: tol.clone(),
            summary: Vec::new(),
        }
    }

    fn provenance(&mut self, p: &str) {
        if !self.provenance.iter().any(|q| q == p) {
            self.provenance.push(p.to_string());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn job_err(e: impl std::fmt::Display) -> Failure {
    Failure::Job(e.to_string())
}

fn need<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str, Failure> {
    field.as_deref().ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

struct Context {
    loaded: Option<LoadedScene>,
    group: CompactGroup,
    tol: Tolerances,
}

impl Context {
    fn scene(&self) -> Result<&LoadedScene, Failure> {
        self.loaded.as_ref().ok_or_else(|| Failure::Usage("this command needs --scene".into()))
    }

    fn single_point(&self, job: &JobSpec) -> Result<(String, ScenePoint), Failure> {
        let loaded = self.scene()?;
        match job.points.as_slice() {
            [name] => Ok((name.clone(), loaded.point(name)?.clone())),
            [] if loaded.points.len() == 1 => {
                let (k, v) = loaded.points.iter().next().expect("one point");
                Ok((k.clone(), v.clone()))
            }
            _ => Err(Failure::Usage("this command needs exactly one --point".into())),
        }
    }
}

/// Runs a job. Usage problems (bad flags, unreadable scenes) are returned as
/// errors; failures inside the computation are recorded in the report.
pub fn run(job: &JobSpec) -> Result<Report, Failure> {
    let tol = job.tolerances()?;
    if job.command == Command::Selftest {
        return Ok(selftest::run(job, &tol));
    }
    let loaded = match &job.scene {
        Some(path) => Some(scene_file::load(path, &tol)?),
        None => None,
    };
    let group = match (&job.group, &loaded) {
        (Some(g), _) => parse_group(g)?,
        (None, Some(l)) => l.scene.group,
        (None, None) => return Err(Failure::Usage("give --scene or --group".into())),
    };
    let ctx = Context { loaded, group, tol: tol.clone() };
    let mut report = Report::new(job, &tol);
    let outcome = match job.command {
        Command::Weight => weight(job, &ctx, &mut report),
        Command::Curve => curve(job, &ctx, &mut report),
        Command::Classify => classify(job, &ctx, &mut report),
        Command::Flow => flow(job, &ctx, &mut report),
        Command::BoundaryAct => boundary_act(job, &ctx, &mut report),
        Command::Opposed => opposed_cmd(job, &ctx, &mut report),
        Command::Connect => connect(job, &ctx, &mut report),
        Command::Integral => integral(job, &ctx, &mut report),
        Command::Selftest => unreachable!("handled above"),
    };
    match outcome {
        Ok(()) => Ok(report),
        Err(Failure::Job(msg)) => {
            report.ok = false;
            report.summary.push(format!("error: {msg}"));
            report.error = Some(msg);
            Ok(report)
        }
        Err(usage) => Err(usage),
    }
}

fn weight(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let scene = &ctx.scene()?.scene;
    let (name, x) = ctx.single_point(job)?;
    let s = parse_direction(need(&job.direction, "direction")?, &ctx.group, Some(&x), &ctx.tol)?;
    let e = BoundaryPoint::normalize(&s).map_err(|e| Failure::Usage(e.to_string()))?;
    let analytic = boundary_weight(scene, &x, &e, WeightMode::Analytic, &ctx.tol).map_err(job_err)?;
    report.provenance("analytic");
    let ray = match boundary_weight(scene, &x, &e, WeightMode::Ray, &ctx.tol) {
        Ok(w) => {
            report.provenance("ray-mode");
            if !analytic.agrees(w, ctx.tol.boundary_weight) {
                report.warnings.push(format!("ray-mode weight {w} differs from the analytic weight {analytic}"));
            }
            Some(w)
        }
        Err(err) => {
            report.warnings.push(format!("ray-mode weight unavailable: {err}"));
            None
        }
    };
    if let ExtendedReal::Finite(v) = analytic {
        if v.abs() > ctx.tol.delta && v.abs() <= 10.0 * ctx.tol.delta {
            report.warnings.push(format!("weight {v:e} lies within 10δ of the zero band"));
        }
    }
    report.summary.push(format!("λ_{name}(e_s) = {analytic} (analytic)"));
    if let Some(w) = ray {
        report.summary.push(format!("λ_{name}(e_s) ≈ {w} (ray-mode)"));
    }
    report.results = json!({
        "point": name,
        "direction": encode::skew(e.direction()),
        "direction_norm": s.norm(),
        "analytic": encode::extended(analytic),
        "ray_mode": ray.map(encode::extended),
    });
    Ok(())
}

fn curve(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let scene = &ctx.scene()?.scene;
    let (name, x) = ctx.single_point(job)?;
    let s = parse_direction(need(&job.direction, "direction")?, &ctx.group, Some(&x), &ctx.tol)?;
    let t_max = job.t_max.unwrap_or(20.0);
    let steps = job.steps.unwrap_or(200);
    if !(t_max > 0.0) || steps == 0 {
        return Err(Failure::Usage("curve needs t_max > 0 and steps > 0".into()));
    }
    let curve = WeightCurve::uniform(scene, &x, &s, t_max, steps).map_err(job_err)?;
    report.provenance("analytic");
    let decrease = curve.worst_decrease();
    if !curve.is_monotone(ctx.tol.mono) {
        report.warnings.push(format!("curve decreases by {decrease:e}, more than ε_mono"));
    }
    if let Some(path) = &job.csv {
        std::fs::write(path, curve.to_csv()).map_err(|e| job_err(format!("{}: {e}", path.display())))?;
    }
    let last = curve.last().unwrap_or(f64::NAN);
    report.summary.push(format!("λ_t({name}; s) from {:.6e} at t = 0 to {last:.6e} at t = {t_max}", curve.values[0]));
    report.summary.push(format!("largest decrease {decrease:.3e}"));
    report.results = json!({
        "point": name,
        "samples": curve.times.len(),
        "first": curve.values[0],
        "last": last,
        "worst_decrease": decrease,
        "monotone": curve.is_monotone(ctx.tol.mono),
        "csv": job.csv,
    });
    Ok(())
}

fn classify(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let loaded = ctx.scene()?;
    let scene = &loaded.scene;
    let names: Vec<String> = if job.points.is_empty() { loaded.points.keys().cloned().collect() } else { job.points.clone() };
    if names.is_empty() {
        return Err(Failure::Usage(format!("{} defines no points", loaded.path)));
    }
    let budget = SamplingBudget { samples: job.budget.unwrap_or(SamplingBudget::default().samples), seed: job.seed, ..SamplingBudget::default() };
    let exact_available = scene.kind == SceneKind::Projective && scene.torus_weights().is_some();
    let mut results = Vec::new();
    for name in &names {
        let x = loaded.point(name)?;
        let sampled = classify_sampling(scene, x, &budget, &ctx.tol).map_err(|e| job_err(format!("{name}: {e}")))?;
        report.provenance("sampled");
        near_band_warning(name, &sampled, ctx, report);
        let exact = if exact_available {
            report.provenance("exact");
            Some(classify_torus_scene(scene, x, &ctx.tol).map_err(|e| job_err(format!("{name}: {e}")))?)
        } else {
            None
        };
        let mut line = format!("{name}: {}", sampled.tag);
        if let Some(ex) = &exact {
            line.push_str(&format!(" (exact: {})", ex.tag));
            if ex.tag != sampled.tag {
                report.warnings.push(format!("{name}: sampled verdict {} disagrees with exact verdict {}", sampled.tag, ex.tag));
            }
        }
        report.summary.push(line);
        results.push(json!({
            "point": name,
            "verdict": exact.as_ref().unwrap_or(&sampled).tag,
            "sampled": encode::verdict(&sampled),
            "exact": exact.as_ref().map(encode::verdict),
        }));
    }
    report.results = Value::Array(results);
    Ok(())
}

fn near_band_warning(name: &str, v: &StabilityVerdict, ctx: &Context, report: &mut Report) {
    if let momentmap::stability::Certificate::Stable { min_weight, .. } = v.certificate {
        if min_weight <= 10.0 * ctx.tol.delta {
            report.warnings.push(format!("{name}: smallest sampled weight {min_weight:e} lies within 10δ of the zero band"));
        }
    }
}

fn flow(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let scene = &ctx.scene()?.scene;
    let (name, x) = ctx.single_point(job)?;
    let mut params = FlowParams::from_tolerances(&ctx.tol);
    if let Some(t) = job.max_time {
        params.max_time = t;
    }
    let trace = kempf_ness_flow(scene, &x, &params).map_err(job_err)?;
    report.provenance("integrated");
    if trace.outcome == FlowOutcome::BudgetExhausted {
        report.warnings.push("flow budget exhausted before any stopping rule fired".into());
    }
    if let Some(path) = &job.csv {
        std::fs::write(path, trace.to_csv()).map_err(|e| job_err(format!("{}: {e}", path.display())))?;
    }
    let stabilizer = (trace.outcome == FlowOutcome::ConvergedInOrbit)
        .then(|| stabilizer_dimension(scene, &trace.final_point, 1e-6));
    report.summary.push(format!(
        "{name}: {:?} after {} steps, |μ| = {:.3e}, distance {:.4}",
        trace.outcome,
        trace.steps,
        trace.final_mu(),
        trace.final_distance()
    ));
    report.results = json!({
        "point": name,
        "outcome": trace.outcome,
        "final_mu": trace.final_mu(),
        "final_distance": trace.final_distance(),
        "final_time": trace.times.last(),
        "steps": trace.steps,
        "rejected": trace.rejected,
        "worst_increase": trace.worst_increase(),
        "final_point": encode::point(&trace.final_point),
        "stabilizer_dimension": stabilizer,
        "csv": job.csv,
    });
    Ok(())
}

fn boundary_act(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let s = parse_direction(need(&job.direction, "direction")?, &ctx.group, None, &ctx.tol)?;
    let mut rng = seeded(job.seed);
    let g = parse_element(need(&job.element, "element")?, &ctx.group, None, &mut rng, &ctx.tol)?;
    let e = BoundaryPoint::normalize(&s).map_err(|e| Failure::Usage(e.to_string()))?;
    let moved = boundary_action(&e, &g, &ctx.tol).map_err(job_err)?;
    let parabolic = parabolic_contains(e.direction(), &g, 1e-8, &ctx.tol).map_err(job_err)?;
    let shift = moved.direction().sub(e.direction()).norm();
    report.provenance("analytic");
    report.summary.push(format!("|s·g − s| = {shift:.3e}; g in P_s: {parabolic}"));
    report.results = json!({
        "direction": encode::skew(e.direction()),
        "element": encode::matrix(g.matrix()),
        "image": encode::skew(moved.direction()),
        "displacement": shift,
        "parabolic": parabolic,
    });
    Ok(())
}

fn opposed_cmd(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let u = parse_direction(need(&job.direction, "direction")?, &ctx.group, None, &ctx.tol)?;
    let v = parse_direction(need(&job.other, "other")?, &ctx.group, None, &ctx.tol)?;
    let (ok, cert) = opposed_in(&ctx.group, &u, &v, &ctx.tol).map_err(job_err)?;
    report.provenance("analytic");
    report.summary.push(format!("opposed: {ok}"));
    report.results = json!({ "opposed": ok, "certificate": cert.as_ref().map(encode::opposedness) });
    Ok(())
}

fn connect(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let u = parse_direction(need(&job.direction, "direction")?, &ctx.group, None, &ctx.tol)?;
    let v = parse_direction(need(&job.other, "other")?, &ctx.group, None, &ctx.tol)?;
    let eu = BoundaryPoint::normalize(&u).map_err(|e| Failure::Usage(e.to_string()))?;
    let ev = BoundaryPoint::normalize(&v).map_err(|e| Failure::Usage(e.to_string()))?;
    let h = connect_geodesic(&ctx.group, &eu, &ev, &ctx.tol).map_err(job_err)?;
    let moved = boundary_action(&ev, &h, &ctx.tol).map_err(job_err)?;
    let defect = moved.direction().add(eu.direction()).norm();
    report.provenance("analytic");
    report.summary.push(format!("h found; |v·h + u| = {defect:.3e}"));
    report.results = json!({ "element": encode::matrix(h.matrix()), "defect": defect });
    Ok(())
}

fn integral(job: &JobSpec, ctx: &Context, report: &mut Report) -> Result<(), Failure> {
    let scene = &ctx.scene()?.scene;
    let (name, x) = ctx.single_point(job)?;
    let mut rng = seeded(job.seed);
    let g = parse_element(need(&job.element, "element")?, &ctx.group, Some(&x), &mut rng, &ctx.tol)?;
    let v = kn_integral(scene, &x, &g, &ctx.tol).map_err(job_err)?;
    report.provenance("quadrature");
    report.summary.push(format!("Ψ_{name}(g) = {:.12e} ± {:.1e}", v.value, v.error));
    report.results = json!({
        "point": name,
        "element": encode::matrix(g.matrix()),
        "value": v.value,
        "error_estimate": v.error,
    });
    Ok(())
}

/// A batch file: `version = 1` and a list of `[[job]]` tables.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchFile {
    version: u32,
    #[serde(rename = "job")]
    jobs: Vec<JobSpec>,
}

#[derive(Debug, Serialize)]
pub struct BatchReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub format: u32,
    pub ok: bool,
    /// Indices of failed jobs.
    pub failures: Vec<usize>,
    pub reports: Vec<Value>,
}

/// Runs every job of a batch file; a failing job is recorded and the rest
/// still run.
pub fn run_batch(path: &Path) -> Result<(BatchReport, Vec<String>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file: BatchFile =
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: parse error: {e}", path.display())))?;
    if file.version != scene_file::FORMAT_VERSION {
        return Err(Failure::Usage(format!("{}: unsupported version {}", path.display(), file.version)));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = BatchReport {
        tool: "momentmap",
        version: env!("CARGO_PKG_VERSION"),
        format: scene_file::FORMAT_VERSION,
        ok: true,
        failures: Vec::new(),
        reports: Vec::new(),
    };
    let mut lines = Vec::new();
    for (i, mut job) in file.jobs.into_iter().enumerate() {
        job.rebase(base);
        match run(&job) {
            Ok(report) => {
                lines.push(format!("[{i}] {:?}: {}", job.command, if report.ok { "ok" } else { "FAILED" }));
                lines.extend(report.summary.iter().map(|l| format!("    {l}")));
                if !report.ok {
                    out.failures.push(i);
                }
                out.reports.push(serde_json::to_value(&report).expect("reports serialize"));
            }
            Err(f) => {
                let msg = f.message().to_string();
                lines.push(format!("[{i}] {:?}: FAILED\n    {msg}", job.command));
                out.failures.push(i);
                out.reports.push(json!({ "job": job, "ok": false, "error": msg }));
            }
        }
    }
    out.ok = out.failures.is_empty();
    Ok((out, lines))
}
