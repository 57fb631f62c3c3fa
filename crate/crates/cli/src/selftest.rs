//! Built-in verification suites.
//!
//! `quick` covers the matrix kernel, the boundary and opposedness routines,
//! weight curves and the classifiers on small examples; `full` adds the
//! cocycle, equivariance and flow-consistency suites. Every suite derives its
//! seed from the job seed so that a failure can be replayed.

use anyhow::{ensure, Result};
use momentmap::matcore::{frobenius, herm_eig, polar_cartan};
use momentmap::random::{random_gl, random_hermitian, random_sphere_point, seeded, SeededRng};
use momentmap::scenes::{Representation, Scene, SceneKind, ScenePoint};
use momentmap::stability::{
    classify_sampling, classify_torus_scene, kempf_ness_flow, FlowOutcome, FlowParams, SamplingBudget, VerdictTag,
};
use momentmap::symspace::{
    boundary_action, boundary_action_extrapolated, connect_geodesic, opposed, parabolic_contains, BoundaryPoint,
    CompactGroup,
};
use momentmap::weights::{kn_integral, max_weight, WeightCurve};
use momentmap::Tolerances;
use nalgebra::{DVector, Vector3};
use num_complex::Complex;
use serde::Serialize;
use serde_json::json;

use crate::job::{JobSpec, Level, Report};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub detail: String,
}

type Suite = fn(&mut SeededRng, &Tolerances) -> Result<String>;

const QUICK: [(&str, Suite); 6] = [
    ("tolerances", tolerances),
    ("matcore", matcore),
    ("symspace", symspace),
    ("weights", weights),
    ("sphere-examples", sphere_examples),
    ("torus-oracle", torus_oracle),
];

const FULL: [(&str, Suite); 3] = [("cocycle", cocycle), ("equivariance", equivariance), ("flow-consistency", flow_consistency)];

pub fn run(job: &JobSpec, tol: &Tolerances) -> Report {
    let level = job.level.unwrap_or(Level::Quick);
    let mut suites: Vec<(&str, Suite)> = QUICK.to_vec();
    if level == Level::Full {
        suites.extend(FULL);
    }
    let mut results = Vec::new();
    for (i, (name, suite)) in suites.into_iter().enumerate() {
        let seed = job.seed.wrapping_mul(1000).wrapping_add(i as u64);
        let outcome = suite(&mut seeded(seed), tol);
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(e) => (false, format!("{e:#}")),
        };
        results.push(SuiteResult { name, seed, passed, detail });
    }
    let mut report = Report {
        tool: "momentmap",
        version: env!("CARGO_PKG_VERSION"),
        format: crate::scene_file::FORMAT_VERSION,
        job: job.clone(),
        ok: results.iter().all(|r| r.passed),
        provenance: vec!["selftest".into()],
        results: json!(results),
        warnings: Vec::new(),
        error: None,
        tolerances: tol.clone(),
        summary: Vec::new(),
    };
    for r in &results {
        report.summary.push(format!("{} {} (seed {}): {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.seed, r.detail));
    }
    if !report.ok {
        let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        report.error = Some(format!("failed suites: {}", failed.join(", ")));
    }
    report
}

fn tolerances(_: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    tol.validate()?;
    Ok(format!("{} tolerances positive", tol.entries().len()))
}

fn matcore(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = 2 + case % 4;
        let h = random_hermitian::<f64>(rng, n);
        let sp = herm_eig(&h, tol.sym, 0.0)?;
        worst = worst.max(frobenius(&(sp.reconstruct() - &h)) / (1.0 + frobenius(&h)));
        let g = random_gl::<f64>(rng, n, 1.5);
        let cp = polar_cartan(&g, tol.cond_max)?;
        worst = worst.max(frobenius(&(cp.to_matrix()? - g.matrix())) / frobenius(g.matrix()));
        let k = cp.k.adjoint() * &cp.k;
        worst = worst.max(frobenius(&(k - momentmap::matcore::identity::<f64>(n))));
    }
    ensure!(worst <= 1e-10, "eigen/polar reconstruction error {worst:e}");
    Ok(format!("20 eigen and polar decompositions, worst residual {worst:.2e}"))
}

fn gapped(rng: &mut SeededRng, n: usize) -> momentmap::Skew {
    use rand::Rng;
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        d.sort_by(f64::total_cmp);
        let nrm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        d.iter_mut().for_each(|x| *x /= nrm);
        if d.windows(2).all(|w| w[1] - w[0] >= 0.1) {
            let k = momentmap::random::haar_unitary::<f64>(rng, n);
            return momentmap::Skew::from_imag_diagonal(&d).conjugate(&k);
        }
    }
}

fn symspace(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let mut worst_limit: f64 = 0.0;
    let mut cases = 0;
    while cases < 10 {
        let n = 2 + cases % 3;
        let s = gapped(rng, n);
        let g = random_gl::<f64>(rng, n, 2.0);
        if g.condition_number() > 1e3 {
            continue;
        }
        cases += 1;
        let b = boundary_action(&BoundaryPoint::new(s.clone())?, &g, tol)?;
        let lim = boundary_action_extrapolated(&s, &g, 25.0)?;
        worst_limit = worst_limit.max(lim.value.sub(b.direction()).norm());
    }
    ensure!(worst_limit <= 1e-3, "boundary action misses the limit by {worst_limit:e}");
    for n in 2..=4 {
        let group = CompactGroup::unitary(n);
        for _ in 0..5 {
            let u = group.random_unit::<f64>(rng);
            ensure!(opposed(&u, &u.neg(), true, tol)?.0, "u and −u not opposed (n = {n})");
        }
    }
    let group = CompactGroup::unitary(3);
    let mut worst_connect: f64 = 0.0;
    for _ in 0..5 {
        let u = BoundaryPoint::normalize(&gapped(rng, 3))?;
        let v = BoundaryPoint::new(u.direction().neg().conjugate(&group.haar::<f64>(rng)))?;
        let h = connect_geodesic(&group, &u, &v, tol)?;
        ensure!(parabolic_contains(u.direction(), &h, 1e-8, tol)?, "connecting element leaves P_u");
        worst_connect = worst_connect.max(boundary_action(&v, &h, tol)?.direction().add(u.direction()).norm());
    }
    ensure!(worst_connect <= 1e-8, "v·h misses −u by {worst_connect:e}");
    Ok(format!("limit gap {worst_limit:.2e}, 15 antipodal pairs opposed, connect defect {worst_connect:.2e}"))
}

fn test_scenes() -> Vec<Scene> {
    vec![
        Scene::projective(Representation::defining(CompactGroup::unitary(3))),
        Scene::projective(
            Representation::torus(vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![2, -1]]).expect("valid weights"),
        ),
        Scene::flat(Representation::torus(vec![vec![1, 2], vec![-1, 0], vec![0, -1]]).expect("valid weights")),
        Scene::sphere_tuple(4),
    ]
}

fn weights(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let mut worst: f64 = 0.0;
    let mut curves = 0;
    for scene in test_scenes() {
        let t_max = if scene.kind == SceneKind::Flat { 5.0 } else { 20.0 };
        for _ in 0..5 {
            let x = scene.random_point(rng);
            let s = scene.group.random_unit::<f64>(rng);
            let curve = WeightCurve::uniform(&scene, &x, &s, t_max, 200)?;
            ensure!(
                curve.is_monotone(tol.mono),
                "{:?} curve decreases by {:e} > ε_mono = {:e}",
                scene.kind,
                curve.worst_decrease(),
                tol.mono
            );
            worst = worst.max(curve.worst_decrease());
            curves += 1;
        }
    }
    Ok(format!("{curves} curves nondecreasing, worst step decrease {worst:.2e}"))
}

fn four_points(rng: &mut SeededRng) -> [Vector3<f64>; 4] {
    std::array::from_fn(|_| Vector3::from_vec(random_sphere_point(rng, 3)))
}

fn sphere_examples(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let scene = Scene::sphere_tuple(4);
    let [x1, x2, x3, x4] = four_points(rng);
    let cases = [
        (vec![x1, x2, x3, x4], VerdictTag::Stable),
        (vec![x1, x1, x2, x3], VerdictTag::NonnegativeNotPolystable),
        (vec![x1, x1, x2, x2], VerdictTag::Polystable),
        (vec![x1, x1, x1, x2], VerdictTag::Unstable),
    ];
    let budget = SamplingBudget { samples: 200, ..SamplingBudget::default() };
    for (points, want) in cases {
        let got = classify_sampling(&scene, &ScenePoint::Sphere(points), &budget, tol)?.tag;
        ensure!(got == want, "expected {want}, got {got}");
    }
    Ok("x, x', x'' and a triple point classified as expected".into())
}

fn random_torus_point(rng: &mut SeededRng) -> (Vec<Vec<i64>>, ScenePoint) {
    use rand::Rng;
    let r = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=6);
    let weights: Vec<Vec<i64>> = (0..n).map(|_| (0..r).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.7) {
                Complex::new(rng.gen_range(0.2..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex::new(0.0, 0.0)
            }
        })
        .collect();
    if z.iter().all(|c| c.norm() == 0.0) {
        z[0] = Complex::new(1.0, 0.0);
    }
    (weights, ScenePoint::Vector(DVector::from_vec(z)))
}

fn torus_oracle(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let budget = SamplingBudget { samples: 200, ..SamplingBudget::default() };
    for case in 0..10 {
        let (weights, x) = random_torus_point(rng);
        let scene = Scene::projective(Representation::torus(weights.clone())?);
        let exact = classify_torus_scene(&scene, &x, tol)?.tag;
        let sampled = classify_sampling(&scene, &x, &budget, tol)?.tag;
        ensure!(exact == sampled, "case {case} {weights:?}: exact {exact}, sampled {sampled}");
    }
    Ok("10 random torus scenes: exact and sampled verdicts agree".into())
}

fn cocycle(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let mut worst: f64 = 0.0;
    for scene in test_scenes() {
        for _ in 0..10 {
            let x = scene.random_point(rng);
            let g = scene.group.random_element::<f64>(rng, 1.0);
            let h = scene.group.random_element::<f64>(rng, 1.0);
            let a = kn_integral(&scene, &x, &g, tol)?.value;
            let b = kn_integral(&scene, &scene.act(&g, &x, tol)?, &h, tol)?.value;
            let c = kn_integral(&scene, &x, &h.mul(&g), tol)?.value;
            let ratio = (a + b - c).abs() / (2.0 * tol.quad * (1.0 + c.abs()));
            ensure!(ratio <= 1.0, "{:?}: cocycle defect {:e}", scene.kind, a + b - c);
            worst = worst.max(ratio);
        }
    }
    Ok(format!("40 triples, worst defect {worst:.2e} of the bound"))
}

fn equivariance(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let scene = Scene::sphere_tuple(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let [p, q, r, _] = four_points(rng);
        let x = ScenePoint::Sphere(vec![p, p, q, r]);
        let g = scene.group.random_element::<f64>(rng, 1.0);
        let gx = scene.act(&g, &x, tol)?;
        let s = scene.group.random_unit::<f64>(rng);
        let lhs = max_weight(&scene, &gx, &s, tol)?;
        let sg = boundary_action(&BoundaryPoint::new(s)?, &g, tol)?;
        let rhs = max_weight(&scene, &x, sg.direction(), tol)?;
        ensure!(lhs.agrees(rhs, 1e-5), "λ_gx(e_s) = {lhs} but λ_x(e_sg) = {rhs}");
        if let (Some(a), Some(b)) = (lhs.finite(), rhs.finite()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(format!("10 cases, worst gap {worst:.2e}"))
}

fn flow_consistency(rng: &mut SeededRng, tol: &Tolerances) -> Result<String> {
    let scene = Scene::sphere_tuple(4);
    let [x1, x2, x3, x4] = four_points(rng);
    let params = FlowParams::from_tolerances(tol);
    let budget = SamplingBudget { samples: 200, ..SamplingBudget::default() };
    for points in [vec![x1, x2, x3, x4], vec![x1, x1, x2, x3], vec![x1, x1, x2, x2]] {
        let x = ScenePoint::Sphere(points);
        let tag = classify_sampling(&scene, &x, &budget, tol)?.tag;
        let trace = kempf_ness_flow(&scene, &x, &params)?;
        ensure!(trace.worst_increase() <= 0.0, "|μ| increased by {:e}", trace.worst_increase());
        let reaches = trace.outcome == FlowOutcome::ConvergedInOrbit;
        ensure!(
            matches!(tag, VerdictTag::Stable | VerdictTag::Polystable) == reaches,
            "verdict {tag} but flow outcome {:?}",
            trace.outcome
        );
    }
    Ok("verdicts match flow outcomes on x, x', x''".into())
}
