use momentmap::random::{random_sphere_point, seeded, SeededRng};
use momentmap::scenes::sphere::su2_from_vector;
use momentmap::scenes::{Representation, Scene, ScenePoint};
use momentmap::stability::{
    classify_sampling, classify_torus_projective, classify_torus_scene, kempf_ness_flow, korbit_equal,
    polystable_witness_check, stabilizer_dimension, torus_support, Certificate, FlowOutcome, FlowParams,
    SamplingBudget, VerdictTag,
};
use momentmap::symspace::CompactGroup;
use momentmap::weights::max_weight;
use momentmap::{Error, Tolerances};
use nalgebra::{DVector, Vector3};
use num_complex::Complex;
use rand::Rng;

fn four_points(seed: u64) -> [Vector3<f64>; 4] {
    let mut rng = seeded(seed);
    std::array::from_fn(|_| Vector3::from_vec(random_sphere_point(&mut rng, 3)))
}

fn tuple(p: &[Vector3<f64>]) -> ScenePoint {
    ScenePoint::Sphere(p.to_vec())
}

fn examples(seed: u64) -> (ScenePoint, ScenePoint, ScenePoint) {
    let [x1, x2, x3, x4] = four_points(seed);
    (tuple(&[x1, x2, x3, x4]), tuple(&[x1, x1, x2, x3]), tuple(&[x1, x1, x2, x2]))
}

fn budget() -> SamplingBudget {
    SamplingBudget { samples: 200, ..SamplingBudget::default() }
}

#[test]
fn sphere_example_verdicts_and_certificates() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let [x1, x2, ..] = four_points(7);
    let (x, xp, xpp) = examples(7);
    let v = classify_sampling(&scene, &x, &budget(), &tol).unwrap();
    assert_eq!(v.tag, VerdictTag::Stable);
    match v.certificate {
        Certificate::Stable { min_weight, .. } => assert!((min_weight - 0.5).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    let v = classify_sampling(&scene, &xp, &budget(), &tol).unwrap();
    assert_eq!(v.tag, VerdictTag::NonnegativeNotPolystable);
    match v.certificate {
        Certificate::NonnegativeNotPolystable { zero_direction, .. } => {
            assert!(zero_direction.sub(&su2_from_vector(&-x1)).norm() < 1e-12)
        }
        other => panic!("{other:?}"),
    }
    let v = classify_sampling(&scene, &xpp, &budget(), &tol).unwrap();
    assert_eq!(v.tag, VerdictTag::Polystable);
    let Certificate::Polystable { pairs } = v.certificate else { panic!() };
    let (a, b) = (su2_from_vector(&-x1), su2_from_vector(&-x2));
    assert!(pairs.iter().any(|p| {
        let direct = p.s.sub(&a).norm() < 1e-12 && p.u.sub(&b).norm() < 1e-12;
        let swapped = p.s.sub(&b).norm() < 1e-12 && p.u.sub(&a).norm() < 1e-12;
        (direct || swapped) && p.certificate.as_ref().is_some_and(|c| c.is_complete())
    }));
}

#[test]
fn verdicts_are_invariant_under_the_group() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let mut rng = seeded(8);
    let (x, xp, xpp) = examples(8);
    for (point, tag) in [(x, VerdictTag::Stable), (xp, VerdictTag::NonnegativeNotPolystable), (xpp, VerdictTag::Polystable)] {
        for _ in 0..3 {
            let g = scene.group.random_element::<f64>(&mut rng, 1.0);
            let gx = scene.act(&g, &point, &tol).unwrap();
            assert_eq!(classify_sampling(&scene, &gx, &budget(), &tol).unwrap().tag, tag);
        }
    }
}

#[test]
fn witness_checks() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let [x1, x2, ..] = four_points(9);
    let (x, _, xpp) = examples(9);
    let (s, u) = (su2_from_vector(&-x1), su2_from_vector(&-x2));
    let ok = polystable_witness_check(&scene, &xpp, &s, &u, &tol).unwrap();
    assert!(ok.passed());
    assert!(ok.geodesic.is_some());
    let same = polystable_witness_check(&scene, &xpp, &s, &s, &tol).unwrap();
    assert!(!same.passed());
    assert!(same.failure().unwrap().starts_with("third"));
    let positive = polystable_witness_check(&scene, &x, &s, &u, &tol).unwrap();
    assert!(positive.failure().unwrap().starts_with("first"));
}

#[test]
fn flows_from_the_sphere_examples() {
    let scene = Scene::sphere_tuple(4);
    let params = FlowParams::default();
    let (x, xp, xpp) = examples(10);
    for point in [&x, &xpp] {
        let trace = kempf_ness_flow(&scene, point, &params).unwrap();
        assert_eq!(trace.outcome, FlowOutcome::ConvergedInOrbit, "{:?}", trace.final_mu());
        assert!(trace.final_mu() <= 1e-8);
        assert!(trace.worst_increase() <= 0.0);
    }
    let trace = kempf_ness_flow(&scene, &xp, &params).unwrap();
    assert!(matches!(trace.outcome, FlowOutcome::ConvergedDegenerate | FlowOutcome::Diverged), "{:?}", trace.outcome);
    assert!(trace.worst_increase() <= 0.0);
}

#[test]
fn flow_from_a_zero_of_the_moment_map_stops_at_once() {
    let scene = Scene::sphere_tuple(4);
    let p = Vector3::new(0.2, 0.3, -0.9).normalize();
    let trace = kempf_ness_flow(&scene, &tuple(&[p, p, -p, -p]), &FlowParams::default()).unwrap();
    assert_eq!(trace.outcome, FlowOutcome::ConvergedInOrbit);
    assert_eq!(trace.steps, 0);
    assert_eq!(trace.final_distance(), 0.0);
}

#[test]
fn flow_limits_of_a_polystable_orbit_share_one_k_orbit() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let mut rng = seeded(11);
    let (_, _, xpp) = examples(11);
    let limits: Vec<ScenePoint> = (0..5)
        .map(|_| {
            let g = scene.group.random_element::<f64>(&mut rng, 1.0);
            let gx = scene.act(&g, &xpp, &tol).unwrap();
            kempf_ness_flow(&scene, &gx, &FlowParams::default()).unwrap().final_point
        })
        .collect();
    for i in 0..5 {
        for j in i + 1..5 {
            let m = korbit_equal(&scene, &limits[i], &limits[j], 1e-6).unwrap();
            assert!(m.equal, "{} {}: {}", i, j, m.distance);
        }
    }
    // The limit has a one-dimensional stabilizer: rotations about the axis.
    assert_eq!(stabilizer_dimension(&scene, &limits[0], 1e-6), 1);
}

#[test]
fn k_orbit_comparison() {
    let scene = Scene::sphere_tuple(4);
    let mut rng = seeded(12);
    let (x, xp, _) = examples(12);
    let k = scene.group.haar::<f64>(&mut rng);
    let kx = scene.act_unitary(&k, &x).unwrap();
    assert!(korbit_equal(&scene, &x, &kx, 1e-10).unwrap().equal);
    assert!(!korbit_equal(&scene, &x, &xp, 1e-6).unwrap().equal);

    let proj = Scene::projective(Representation::defining(CompactGroup::special_unitary(3)));
    let z = proj.random_point(&mut rng);
    let k = proj.group.haar::<f64>(&mut rng);
    let kz = proj.act_unitary(&k, &z).unwrap();
    assert!(korbit_equal(&proj, &z, &kz, 1e-6).unwrap().equal);
}

fn random_torus_case(rng: &mut SeededRng) -> (Vec<Vec<i64>>, ScenePoint) {
    let r = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=6);
    let weights: Vec<Vec<i64>> = (0..n).map(|_| (0..r).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|_| if rng.gen_bool(0.7) { Complex::new(rng.gen_range(0.2..1.0), rng.gen_range(-1.0..1.0)) } else { Complex::new(0.0, 0.0) })
        .collect();
    if z.iter().all(|c| c.norm() == 0.0) {
        z[0] = Complex::new(1.0, 0.0);
    }
    (weights, ScenePoint::Vector(DVector::from_vec(z)))
}

#[test]
fn torus_classifiers_agree() {
    let tol = Tolerances::default();
    let mut rng = seeded(13);
    let mut seen = std::collections::HashSet::new();
    for case in 0..30 {
        let (weights, x) = random_torus_case(&mut rng);
        let scene = Scene::projective(Representation::torus(weights.clone()).unwrap());
        let exact = classify_torus_scene(&scene, &x, &tol).unwrap();
        let sampled = classify_sampling(&scene, &x, &budget(), &tol).unwrap();
        assert_eq!(exact.tag, sampled.tag, "case {case}: weights {weights:?}, support {:?}", torus_support(&x, &tol).unwrap());
        seen.insert(exact.tag);
    }
    assert!(seen.len() >= 3, "{seen:?}");
}

#[test]
fn exact_unstable_witness_replays() {
    let tol = Tolerances::default();
    let weights = vec![vec![1, 2], vec![2, 1], vec![1, -1]];
    let scene = Scene::projective(Representation::torus(weights.clone()).unwrap());
    let x = ScenePoint::Vector(DVector::from_element(3, Complex::new(1.0, 0.0)));
    let v = classify_torus_projective(&weights, &[0, 1, 2]).unwrap();
    let Certificate::Unstable { witness, weight } = v.certificate else { panic!() };
    let replay = max_weight(&scene, &x, &witness, &tol).unwrap().finite().unwrap();
    assert!((replay - weight).abs() < 1e-12 && weight < 0.0);
}

#[test]
fn non_torus_scenes_are_rejected_by_the_exact_classifier() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(3);
    let mut rng = seeded(14);
    let x = scene.random_point(&mut rng);
    assert!(matches!(classify_torus_scene(&scene, &x, &tol), Err(Error::NotATorusScene)));
}

#[test]
fn classifier_and_flow_agree_on_the_example_suite() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    for seed in [20, 21] {
        let (x, xp, xpp) = examples(seed);
        for point in [x, xp, xpp] {
            let tag = classify_sampling(&scene, &point, &budget(), &tol).unwrap().tag;
            let outcome = kempf_ness_flow(&scene, &point, &FlowParams::default()).unwrap().outcome;
            let reaches = outcome == FlowOutcome::ConvergedInOrbit;
            assert_eq!(matches!(tag, VerdictTag::Stable | VerdictTag::Polystable), reaches, "{tag} vs {outcome:?}");
        }
    }
}

