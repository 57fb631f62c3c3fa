//! The ten acceptance criteria. Each prints one pass/fail line; the test
//! fails if any criterion fails.

use momentmap::matcore::SkewHermitian;
use momentmap::random::{haar_unitary, random_gl, random_sphere_point, seeded, SeededRng};
use momentmap::scenes::sphere::su2_from_vector;
use momentmap::scenes::{Representation, Scene, ScenePoint};
use momentmap::stability::{
    classify_sampling, classify_torus_scene, kempf_ness_flow, korbit_equal, Certificate, FlowOutcome, FlowParams,
    SamplingBudget, VerdictTag,
};
use momentmap::symspace::{
    boundary_action, boundary_action_extrapolated, connect_geodesic, opposed, parabolic_contains, spectrum,
    BoundaryPoint, CompactGroup,
};
use momentmap::weights::{kn_integral, max_weight, WeightCurve};
use momentmap::Tolerances;
use nalgebra::{DVector, Vector3};
use num_complex::Complex;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn four_points(seed: u64) -> [Vector3<f64>; 4] {
    let mut rng = seeded(seed);
    std::array::from_fn(|_| Vector3::from_vec(random_sphere_point(&mut rng, 3)))
}

fn sphere_examples() -> ([Vector3<f64>; 4], [ScenePoint; 3]) {
    let p = four_points(2024);
    let [x1, x2, x3, x4] = p;
    let t = |v: &[Vector3<f64>]| ScenePoint::Sphere(v.to_vec());
    (p, [t(&[x1, x2, x3, x4]), t(&[x1, x1, x2, x3]), t(&[x1, x1, x2, x2])])
}

fn gapped_direction(rng: &mut SeededRng, n: usize, gap: f64) -> SkewHermitian<f64> {
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        d.sort_by(f64::total_cmp);
        let nrm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        d.iter_mut().for_each(|x| *x /= nrm);
        if d.windows(2).all(|w| w[1] - w[0] >= gap) {
            let k = haar_unitary::<f64>(rng, n);
            return SkewHermitian::from_imag_diagonal(&d).conjugate(&k);
        }
    }
}

fn scenes() -> Vec<Scene> {
    vec![
        Scene::projective(Representation::defining(CompactGroup::unitary(3))),
        Scene::projective(Representation::torus(vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![2, -1]]).unwrap()),
        Scene::flat(Representation::torus(vec![vec![1, 2], vec![-1, 0], vec![0, -1]]).unwrap()),
        Scene::sphere_tuple(4),
    ]
}

fn sphere_example_reproduction() -> Outcome {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let ([x1, x2, ..], points) = sphere_examples();
    let expected = [VerdictTag::Stable, VerdictTag::NonnegativeNotPolystable, VerdictTag::Polystable];
    let mut tags = Vec::new();
    let mut pair_found = false;
    for (point, want) in points.iter().zip(expected) {
        let v = classify_sampling(&scene, point, &SamplingBudget::default(), &tol).map_err(|e| e.to_string())?;
        if v.tag != want {
            return Err(format!("expected {want}, got {}", v.tag));
        }
        if let Certificate::Polystable { pairs } = &v.certificate {
            let (a, b) = (su2_from_vector(&-x1), su2_from_vector(&-x2));
            pair_found = pairs.iter().any(|p| {
                let hit = (p.s.sub(&a).norm() < 1e-10 && p.u.sub(&b).norm() < 1e-10)
                    || (p.s.sub(&b).norm() < 1e-10 && p.u.sub(&a).norm() < 1e-10);
                hit && p.certificate.as_ref().is_some_and(|c| c.is_complete())
            });
        }
        tags.push(v.tag.to_string());
    }
    check(pair_found, format!("{}; zero pair (-x1, -x2) certified: {pair_found}", tags.join(" / ")))
}

fn boundary_action_agreement() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(2);
    let mut worst: f64 = 0.0;
    let mut spectra = true;
    let mut cases = 0;
    while cases < 50 {
        let n = 2 + cases % 4;
        let s = gapped_direction(&mut rng, n, 0.1);
        let g = random_gl::<f64>(&mut rng, n, 2.0);
        if g.condition_number() > 1e3 {
            continue;
        }
        cases += 1;
        let b = boundary_action(&BoundaryPoint::new(s.clone()).unwrap(), &g, &tol).map_err(|e| e.to_string())?;
        let lim = boundary_action_extrapolated(&s, &g, 25.0).map_err(|e| e.to_string())?;
        worst = worst.max(lim.value.sub(b.direction()).norm());
        let a = spectrum(&s, &tol).unwrap();
        let c = spectrum(b.direction(), &tol).unwrap();
        spectra &= a.same_spectrum(&c, 1e-8);
    }
    check(worst <= 1e-3 && spectra, format!("50 cases, worst limit gap {worst:.2e}, spectra preserved: {spectra}"))
}

fn cocycle_identity() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(3);
    let mut worst_ratio: f64 = 0.0;
    for scene in scenes() {
        for _ in 0..50 {
            let x = scene.random_point(&mut rng);
            let g = scene.group.random_element::<f64>(&mut rng, 1.0);
            let h = scene.group.random_element::<f64>(&mut rng, 1.0);
            let run = || -> momentmap::Result<f64> {
                let a = kn_integral(&scene, &x, &g, &tol)?.value;
                let gx = scene.act(&g, &x, &tol)?;
                let b = kn_integral(&scene, &gx, &h, &tol)?.value;
                let c = kn_integral(&scene, &x, &h.mul(&g), &tol)?.value;
                Ok((a + b - c).abs() / (2.0 * tol.quad * (1.0 + c.abs())))
            };
            worst_ratio = worst_ratio.max(run().map_err(|e| e.to_string())?);
        }
    }
    check(worst_ratio <= 1.0, format!("4 scenes x 50 triples, worst defect {worst_ratio:.2e} of the 2ε_quad bound"))
}

fn weight_equivariance() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(4);
    let sphere = Scene::sphere_tuple(4);
    let proj = Scene::projective(Representation::defining(CompactGroup::unitary(3)));
    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let (scene, x, s) = if case % 2 == 0 {
            let p: Vec<Vector3<f64>> = (0..3).map(|_| Vector3::from_vec(random_sphere_point(&mut rng, 3))).collect();
            let x = ScenePoint::Sphere(vec![p[0], p[0], p[1], p[2]]);
            (&sphere, x, sphere.group.random_unit::<f64>(&mut rng))
        } else {
            let k = haar_unitary::<f64>(&mut rng, 3);
            let z = (k.column(0) + k.column(1) * Complex::new(0.5, 0.0)).into_owned();
            let x = ScenePoint::Vector(DVector::from_column_slice(z.as_slice()).normalize());
            (&proj, x, proj.group.random_unit::<f64>(&mut rng))
        };
        let g = scene.group.random_element::<f64>(&mut rng, 1.0);
        let gx = scene.act(&g, &x, &tol).map_err(|e| e.to_string())?;
        let lhs = max_weight(scene, &gx, &s, &tol).map_err(|e| e.to_string())?;
        let sg = boundary_action(&BoundaryPoint::new(s.clone()).unwrap(), &g, &tol).map_err(|e| e.to_string())?;
        let rhs = max_weight(scene, &x, sg.direction(), &tol).map_err(|e| e.to_string())?;
        match (lhs.finite(), rhs.finite()) {
            (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
            _ => return Err(format!("case {case}: infinite weight {lhs} vs {rhs}")),
        }
    }
    check(worst <= 1e-5, format!("30 cases, worst gap {worst:.2e}"))
}

fn monotonicity() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(5);
    let mut worst: f64 = 0.0;
    let mut curves = 0;
    for scene in scenes() {
        let t_max = if scene.kind == momentmap::scenes::SceneKind::Flat { 5.0 } else { 20.0 };
        for _ in 0..10 {
            let x = scene.random_point(&mut rng);
            let s = scene.group.random_unit::<f64>(&mut rng);
            let curve = WeightCurve::uniform(&scene, &x, &s, t_max, 200).map_err(|e| e.to_string())?;
            worst = worst.max(curve.worst_decrease());
            curves += 1;
        }
    }
    let sphere = Scene::sphere_tuple(4);
    let ([x1, ..], points) = sphere_examples();
    let s = su2_from_vector(&-x1);
    for point in &points {
        let curve = WeightCurve::uniform(&sphere, point, &s, 30.0, 300).map_err(|e| e.to_string())?;
        worst = worst.max(curve.worst_decrease());
        curves += 1;
    }
    check(worst <= tol.mono, format!("{curves} curves, worst decrease {worst:.2e}"))
}

fn flow_consistency() -> Outcome {
    let scene = Scene::sphere_tuple(4);
    let params = FlowParams::default();
    let (_, [x, xp, xpp]) = sphere_examples();
    let mut notes = Vec::new();
    for (name, point) in [("x", &x), ("x''", &xpp)] {
        let tr = kempf_ness_flow(&scene, point, &params).map_err(|e| e.to_string())?;
        if tr.outcome != FlowOutcome::ConvergedInOrbit || tr.final_mu() > 1e-8 {
            return Err(format!("{name}: {:?} with |mu| {:.2e}", tr.outcome, tr.final_mu()));
        }
        notes.push(format!("{name}: |mu| {:.1e} at distance {:.2}", tr.final_mu(), tr.final_distance()));
    }
    let tr = kempf_ness_flow(&scene, &xp, &params).map_err(|e| e.to_string())?;
    notes.push(format!("x': {:?}", tr.outcome));
    check(matches!(tr.outcome, FlowOutcome::ConvergedDegenerate | FlowOutcome::Diverged), notes.join(", "))
}

fn k_orbit_uniqueness() -> Outcome {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let (_, [_, _, xpp]) = sphere_examples();
    let mut rng = seeded(7);
    let mut limits = Vec::new();
    for _ in 0..5 {
        let g = scene.group.random_element::<f64>(&mut rng, 1.0);
        let gx = scene.act(&g, &xpp, &tol).map_err(|e| e.to_string())?;
        limits.push(kempf_ness_flow(&scene, &gx, &FlowParams::default()).map_err(|e| e.to_string())?.final_point);
    }
    let mut worst: f64 = 0.0;
    let mut all = true;
    for i in 0..5 {
        for j in i + 1..5 {
            let m = korbit_equal(&scene, &limits[i], &limits[j], 1e-6).map_err(|e| e.to_string())?;
            all &= m.equal;
            worst = worst.max(m.distance);
        }
    }
    check(all, format!("10 pairs, worst K-orbit distance {worst:.2e}"))
}

fn torus_oracle_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(8);
    let budget = SamplingBudget { samples: 200, ..SamplingBudget::default() };
    let mut counts = std::collections::BTreeMap::new();
    for case in 0..30 {
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
        let x = ScenePoint::Vector(DVector::from_vec(z));
        let scene = Scene::projective(Representation::torus(weights.clone()).map_err(|e| e.to_string())?);
        let exact = classify_torus_scene(&scene, &x, &tol).map_err(|e| e.to_string())?;
        let sampled = classify_sampling(&scene, &x, &budget, &tol).map_err(|e| e.to_string())?;
        if exact.tag != sampled.tag {
            return Err(format!("case {case} {weights:?}: exact {} vs sampled {}", exact.tag, sampled.tag));
        }
        *counts.entry(exact.tag.to_string()).or_insert(0) += 1;
    }
    check(true, format!("30 scenes agree {counts:?}"))
}

fn opposedness_baseline() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(9);
    let mut antipodes = true;
    let mut symmetric = true;
    for n in 2..=4 {
        let g = CompactGroup::unitary(n);
        for _ in 0..20 {
            let u = g.random_unit::<f64>(&mut rng);
            antipodes &= opposed(&u, &u.neg(), true, &tol).map_err(|e| e.to_string())?.0;
            let v = g.random_unit::<f64>(&mut rng);
            let w = u.neg().conjugate(&g.haar::<f64>(&mut rng));
            for (a, b) in [(&u, &v), (&u, &w), (&u, &u.neg())] {
                symmetric &= opposed(a, b, true, &tol).unwrap().0 == opposed(b, a, true, &tol).unwrap().0;
            }
        }
    }
    let s = gapped_direction(&mut rng, 3, 0.1);
    let hits = (0..200)
        .filter(|_| {
            let k = haar_unitary::<f64>(&mut rng, 3);
            opposed(&s, &s.neg().conjugate(&k), true, &tol).map(|r| r.0).unwrap_or(false)
        })
        .count();
    check(
        antipodes && symmetric && hits >= 190,
        format!("antipodes opposed: {antipodes}, symmetric: {symmetric}, density {hits}/200"),
    )
}

fn connect_geodesic_contract() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = seeded(10);
    let mut worst: f64 = 0.0;
    for (group, n) in [(CompactGroup::special_unitary(2), 2), (CompactGroup::unitary(3), 3)] {
        for case in 0..20 {
            let u = BoundaryPoint::normalize(&group.project(&gapped_direction(&mut rng, n, 0.1)))
                .map_err(|e| e.to_string())?;
            let v = BoundaryPoint::new(u.direction().neg().conjugate(&group.haar::<f64>(&mut rng))).unwrap();
            let h = connect_geodesic(&group, &u, &v, &tol).map_err(|e| format!("n = {n}, case {case}: {e}"))?;
            if !parabolic_contains(u.direction(), &h, 1e-8, &tol).map_err(|e| e.to_string())? {
                return Err(format!("n = {n}, case {case}: h leaves the parabolic subgroup"));
            }
            let moved = boundary_action(&v, &h, &tol).map_err(|e| e.to_string())?;
            worst = worst.max(moved.direction().add(u.direction()).norm());
        }
    }
    check(worst <= 1e-8, format!("40 pairs, worst |v·h + u| {worst:.2e}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 sphere example reproduction", sphere_example_reproduction),
        ("2 boundary-action agreement", boundary_action_agreement),
        ("3 cocycle identity", cocycle_identity),
        ("4 equivariance of maximal weights", weight_equivariance),
        ("5 monotonicity", monotonicity),
        ("6 flow/theorem consistency", flow_consistency),
        ("7 uniqueness of the K-orbit", k_orbit_uniqueness),
        ("8 torus oracle equivalence", torus_oracle_equivalence),
        ("9 opposedness baseline", opposedness_baseline),
        ("10 connect_geodesic contract", connect_geodesic_contract),
    ];
    let mut failures = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
