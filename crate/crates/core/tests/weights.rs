use momentmap::random::{haar_unitary, random_sphere_point, seeded, SeededRng};
use momentmap::scenes::sphere::{su2_from_vector, vector_from_su2};
use momentmap::scenes::{Representation, Scene, ScenePoint, SceneKind};
use momentmap::symspace::{boundary_action, BoundaryPoint, CompactGroup};
use momentmap::weights::{
    boundary_weight, kn_integral, kn_integral_path, kn_integral_ray, lambda_t, max_weight, max_weight_numeric,
    weight_zero_implies_fixed, ExtendedReal, WeightCurve, WeightMode,
};
use momentmap::{Error, Group, Matrix, Skew, Tolerances};
use nalgebra::{DVector, Vector3};
use num_complex::Complex;
use proptest::prelude::*;

fn scenes() -> Vec<Scene> {
    vec![
        Scene::projective(Representation::defining(CompactGroup::unitary(3))),
        Scene::projective(Representation::torus(vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![2, -1]]).unwrap()),
        Scene::flat(Representation::torus(vec![vec![1, 2], vec![-1, 0], vec![0, -1]]).unwrap()),
        Scene::sphere_tuple(4),
    ]
}

fn sphere_point(v: &[Vector3<f64>]) -> ScenePoint {
    ScenePoint::Sphere(v.iter().map(|p| p.normalize()).collect())
}

fn random_s2(rng: &mut SeededRng) -> Vector3<f64> {
    Vector3::from_vec(random_sphere_point(rng, 3))
}

/// A unit direction whose spectrum under `i dρ` has gaps of at least `gap`,
/// so that `λ_t` settles exponentially fast along the ladder.
fn gapped_unit(scene: &Scene, rng: &mut SeededRng, gap: f64) -> Skew {
    loop {
        let s = scene.group.random_unit::<f64>(rng);
        if scene.kind == SceneKind::SphereTuple {
            return s;
        }
        let h = scene.rep.as_ref().unwrap().hermitian(&s);
        let mut d: Vec<f64> = momentmap::matcore::herm_eig(&h, 1e-10, 0.0).unwrap().raw.clone();
        d.sort_by(f64::total_cmp);
        let min_gap = d.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 1e-9).fold(f64::INFINITY, f64::min);
        if min_gap >= gap {
            return s;
        }
    }
}

#[test]
fn lambda_zero_is_the_moment_pairing() {
    let mut rng = seeded(201);
    for scene in scenes() {
        let x = scene.random_point(&mut rng);
        let s = scene.group.random_unit::<f64>(&mut rng);
        assert!((lambda_t(&scene, &x, &s, 0.0).unwrap() - scene.mu_pair(&x, &s)).abs() < 1e-15);
    }
}

#[test]
fn weight_curves_are_nondecreasing() {
    let tol = Tolerances::default();
    let mut rng = seeded(202);
    for scene in scenes() {
        for _ in 0..10 {
            let x = scene.random_point(&mut rng);
            let s = scene.group.random_unit::<f64>(&mut rng);
            let t_max = if scene.kind == SceneKind::Flat { 5.0 } else { 20.0 };
            let curve = WeightCurve::uniform(&scene, &x, &s, t_max, 200).unwrap();
            assert!(curve.is_monotone(tol.mono), "{:?}: decrease {}", scene.kind, curve.worst_decrease());
            assert!(curve.slopes.iter().all(|d| *d >= 0.0));
        }
    }
}

#[test]
fn fixed_points_give_constant_curves() {
    let scene = Scene::projective(Representation::defining(CompactGroup::unitary(3)));
    let s = Skew::from_imag_diagonal(&[0.2, -0.5, 0.3]);
    let mut z = DVector::zeros(3);
    z[1] = Complex::new(0.0, 1.0);
    let x = ScenePoint::Vector(z);
    let curve = WeightCurve::uniform(&scene, &x, &s, 30.0, 10).unwrap();
    assert!(curve.values.iter().all(|v| (v - curve.values[0]).abs() < 1e-14));
}

#[test]
fn closed_forms_match_the_numeric_limit() {
    let tol = Tolerances::default();
    let mut rng = seeded(203);
    for scene in scenes() {
        for _ in 0..20 {
            let x = scene.random_point(&mut rng);
            let s = gapped_unit(&scene, &mut rng, 0.2);
            let closed = max_weight(&scene, &x, &s, &tol).unwrap();
            let (numeric, change) = max_weight_numeric(&scene, &x, &s, 1e6).unwrap();
            assert!(closed.agrees(numeric, 1e-6), "{:?}: {closed} vs {numeric} ({change})", scene.kind);
        }
    }
}

#[test]
fn maximal_weight_is_positively_homogeneous() {
    let tol = Tolerances::default();
    let mut rng = seeded(204);
    for scene in scenes() {
        for _ in 0..10 {
            let x = scene.random_point(&mut rng);
            let s = scene.group.random_unit::<f64>(&mut rng);
            let a = 0.1 + 5.0 * rand::Rng::gen::<f64>(&mut rng);
            let one = max_weight(&scene, &x, &s, &tol).unwrap().scale(a);
            let two = max_weight(&scene, &x, &s.scaled(a), &tol).unwrap();
            assert!(one.agrees(two, 1e-9 * a));
        }
    }
}

#[test]
fn sphere_double_pairs_have_a_vanishing_weight() {
    let tol = Tolerances::default();
    let mut rng = seeded(205);
    let scene = Scene::sphere_tuple(4);
    let (x1, x2) = (random_s2(&mut rng), random_s2(&mut rng));
    let x = sphere_point(&[x1, x1, x2, x2]);
    let s = su2_from_vector(&-x1);
    assert_eq!(max_weight(&scene, &x, &s, &tol).unwrap(), ExtendedReal::Finite(0.0));
    let (numeric, _) = max_weight_numeric(&scene, &x, &s, 1e6).unwrap();
    assert!(numeric.finite().unwrap().abs() < 1e-8, "{numeric}");
}

#[test]
fn torus_pair_of_opposite_weights() {
    let tol = Tolerances::default();
    let scene = Scene::projective(Representation::torus(vec![vec![1], vec![-1]]).unwrap());
    let s = scene.group.basis::<f64>()[0].clone();
    let x = ScenePoint::Vector(DVector::from_vec(vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]));
    assert_eq!(max_weight(&scene, &x, &s, &tol).unwrap(), ExtendedReal::Finite(1.0));
    assert_eq!(max_weight(&scene, &x, &s.neg(), &tol).unwrap(), ExtendedReal::Finite(1.0));
}

#[test]
fn integral_vanishes_on_k() {
    let tol = Tolerances::default();
    let mut rng = seeded(206);
    for scene in scenes() {
        let x = scene.random_point(&mut rng);
        let k = Group::new(scene.group.haar::<f64>(&mut rng)).unwrap();
        assert!(kn_integral(&scene, &x, &k, &tol).unwrap().value.abs() < 1e-12);
        assert_eq!(kn_integral(&scene, &x, &Group::identity(scene.group.n), &tol).unwrap().value, 0.0);
    }
}

#[test]
fn integral_along_a_ray_matches_independent_quadrature() {
    let tol = Tolerances::default();
    let mut rng = seeded(207);
    for scene in scenes() {
        for _ in 0..5 {
            let x = scene.random_point(&mut rng);
            let s = scene.group.random_unit::<f64>(&mut rng);
            let t = 1.5;
            let g = Group::exp_i(&s, t).unwrap();
            let psi = kn_integral(&scene, &x, &g, &tol).unwrap();
            // Composite Simpson on 2000 panels as the referee.
            let n = 2000;
            let h = t / n as f64;
            let mut acc = lambda_t(&scene, &x, &s, 0.0).unwrap() + lambda_t(&scene, &x, &s, t).unwrap();
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * lambda_t(&scene, &x, &s, i as f64 * h).unwrap();
            }
            let simpson = acc * h / 3.0;
            assert!((psi.value - simpson).abs() < 1e-8 * (1.0 + simpson.abs()), "{:?}: {} vs {simpson}", scene.kind, psi.value);
        }
    }
}

#[test]
fn integral_is_left_k_invariant() {
    let tol = Tolerances::default();
    let mut rng = seeded(208);
    for scene in scenes() {
        for _ in 0..5 {
            let x = scene.random_point(&mut rng);
            let g = scene.group.random_element::<f64>(&mut rng, 1.0);
            let k = Group::new(scene.group.haar::<f64>(&mut rng)).unwrap();
            let a = kn_integral(&scene, &x, &g, &tol).unwrap().value;
            let b = kn_integral(&scene, &x, &k.mul(&g), &tol).unwrap().value;
            assert!((a - b).abs() < 2e-8 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn integral_satisfies_the_cocycle_identity() {
    let tol = Tolerances::default();
    let mut rng = seeded(209);
    for scene in scenes() {
        for _ in 0..20 {
            let x = scene.random_point(&mut rng);
            let g = scene.group.random_element::<f64>(&mut rng, 1.0);
            let h = scene.group.random_element::<f64>(&mut rng, 1.0);
            let a = kn_integral(&scene, &x, &g, &tol).unwrap().value;
            let gx = scene.act(&g, &x, &tol).unwrap();
            let b = kn_integral(&scene, &gx, &h, &tol).unwrap().value;
            let c = kn_integral(&scene, &x, &h.mul(&g), &tol).unwrap().value;
            let eps = tol.quad * (1.0 + c.abs());
            assert!((a + b - c).abs() <= 2.0 * eps, "{:?}: defect {}", scene.kind, a + b - c);
        }
    }
}

#[test]
fn integral_is_path_independent() {
    let tol = Tolerances::default();
    let mut rng = seeded(210);
    for scene in scenes() {
        for _ in 0..5 {
            let x = scene.random_point(&mut rng);
            let a = scene.group.random_unit::<f64>(&mut rng).scaled(0.4);
            let b = scene.group.random_unit::<f64>(&mut rng).scaled(0.8);
            // γ(ν) = exp(ν(a + ib)) is not a Cartan path unless [a, b] = 0.
            let gen: Matrix = a.matrix() + b.matrix() * Complex::new(0.0, 1.0);
            let path = |nu: f64| {
                let e = momentmap::matcore::mat_exp(&(&gen * Complex::new(nu, 0.0))).unwrap();
                (Group::new(e.clone()).unwrap(), &gen * e)
            };
            let end = path(1.0).0;
            let direct = kn_integral(&scene, &x, &end, &tol).unwrap().value;
            let along = kn_integral_path(&scene, &x, path, &tol).unwrap().value;
            assert!((direct - along).abs() <= 2.0 * tol.quad * (1.0 + direct.abs()), "{:?}: {direct} vs {along}", scene.kind);
        }
    }
}

#[test]
fn ray_mode_agrees_with_the_closed_form() {
    let tol = Tolerances::default();
    let mut rng = seeded(211);
    for scene in scenes() {
        for _ in 0..20 {
            let x = scene.random_point(&mut rng);
            let s = gapped_unit(&scene, &mut rng, 0.2);
            let e = BoundaryPoint::new(s).unwrap();
            let analytic = boundary_weight(&scene, &x, &e, WeightMode::Analytic, &tol).unwrap();
            let ray = boundary_weight(&scene, &x, &e, WeightMode::Ray, &tol).unwrap();
            assert!(analytic.agrees(ray, tol.boundary_weight), "{:?}: {analytic} vs {ray}", scene.kind);
        }
    }
}

#[test]
fn boundary_weights_are_equivariant() {
    // λ_{g·x}(e_s) = λ_x(e_{s·g}) on points with degenerate support.
    let tol = Tolerances::default();
    let mut rng = seeded(212);
    let sphere = Scene::sphere_tuple(4);
    for _ in 0..10 {
        let (p, q, r) = (random_s2(&mut rng), random_s2(&mut rng), random_s2(&mut rng));
        let x = sphere_point(&[p, p, q, r]);
        let g = sphere.group.random_element::<f64>(&mut rng, 1.0);
        let gx = sphere.act(&g, &x, &tol).unwrap();
        // The direction whose antipode is the double point of g·x.
        let s = su2_from_vector(&-gx.sphere().unwrap()[0]);
        let lhs = max_weight(&sphere, &gx, &s, &tol).unwrap();
        let sg = boundary_action(&BoundaryPoint::new(s.clone()).unwrap(), &g, &tol).unwrap();
        let rhs = max_weight(&sphere, &x, sg.direction(), &tol).unwrap();
        assert!(lhs.agrees(rhs, 1e-5), "{lhs} vs {rhs}");
        assert_eq!(lhs, ExtendedReal::Finite(0.0));
        assert!((vector_from_su2(sg.direction()) + p).norm() < 1e-6);
    }
    let proj = Scene::projective(Representation::defining(CompactGroup::unitary(3)));
    for _ in 0..10 {
        let k = haar_unitary::<f64>(&mut rng, 3);
        let z = (k.column(0) + k.column(1) * Complex::new(0.5, 0.0)).into_owned();
        let x = ScenePoint::Vector(DVector::from_column_slice(z.as_slice()).normalize());
        let g = proj.group.random_element::<f64>(&mut rng, 1.0);
        let gx = proj.act(&g, &x, &tol).unwrap();
        let s = proj.group.random_unit::<f64>(&mut rng);
        let lhs = max_weight(&proj, &gx, &s, &tol).unwrap();
        let sg = boundary_action(&BoundaryPoint::new(s.clone()).unwrap(), &g, &tol).unwrap();
        let rhs = max_weight(&proj, &x, sg.direction(), &tol).unwrap();
        assert!(lhs.agrees(rhs, 1e-5), "{lhs} vs {rhs}");
    }
}

#[test]
fn weights_add_along_commuting_directions() {
    let tol = Tolerances::default();
    let mut rng = seeded(213);
    let scene = Scene::projective(Representation::torus(vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![2, -1]]).unwrap());
    // Points supported on one weight, where λ is linear on the whole torus.
    for j in 0..4 {
        let mut z = DVector::zeros(4);
        z[j] = Complex::new(1.0, 0.0);
        let x = ScenePoint::Vector(z);
        for _ in 0..5 {
            let s = scene.group.random_unit::<f64>(&mut rng);
            let t = scene.group.random_unit::<f64>(&mut rng);
            let a = max_weight(&scene, &x, &s, &tol).unwrap().finite().unwrap();
            let b = max_weight(&scene, &x, &t, &tol).unwrap().finite().unwrap();
            let c = max_weight(&scene, &x, &s.add(&t), &tol).unwrap().finite().unwrap();
            assert!((a + b - c).abs() < 1e-12);
        }
    }
}

#[test]
fn vanishing_weights_in_both_directions_fix_the_point() {
    let tol = Tolerances::default();
    let scene = Scene::sphere_tuple(4);
    let p = Vector3::new(0.3, -0.4, 0.5).normalize();
    let x = sphere_point(&[p, p, -p, -p]);
    let s = su2_from_vector(&p);
    assert!(weight_zero_implies_fixed(&scene, &x, &s, &tol).unwrap());

    let proj = Scene::projective(Representation::defining(CompactGroup::unitary(3)));
    let s = Skew::from_imag_diagonal(&[1.0, 0.0, -1.0]);
    let mut z = DVector::zeros(3);
    z[1] = Complex::new(1.0, 0.0);
    assert!(weight_zero_implies_fixed(&proj, &ScenePoint::Vector(z), &s, &tol).unwrap());

    let y = sphere_point(&[p, p, -p, Vector3::new(1.0, 0.0, 0.0)]);
    assert!(matches!(weight_zero_implies_fixed(&scene, &y, &su2_from_vector(&p), &tol), Err(Error::PreconditionUnmet(_))));
}

#[test]
fn ray_distance_stays_sublinear_for_bounded_sequences() {
    // For unit s with λ(x; s) finite the flowed points move at most O(√t).
    let tol = Tolerances::default();
    let mut rng = seeded(214);
    let scene = Scene::sphere_tuple(4);
    let x = scene.random_point(&mut rng);
    let s = scene.group.random_unit::<f64>(&mut rng);
    let ratios: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&t| scene.distance(&scene.flow(&s, t, &x).unwrap(), &x) / f64::sqrt(t))
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{ratios:?}");
    let _ = kn_integral_ray(&scene, &x, &s, 1.0, &tol).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cocycle_holds_for_random_sphere_configurations(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = seeded(seed);
        let scene = Scene::sphere_tuple(5);
        let x = scene.random_point(&mut rng);
        let g = scene.group.random_element::<f64>(&mut rng, 1.5);
        let h = scene.group.random_element::<f64>(&mut rng, 1.5);
        let a = kn_integral(&scene, &x, &g, &tol).unwrap().value;
        let b = kn_integral(&scene, &scene.act(&g, &x, &tol).unwrap(), &h, &tol).unwrap().value;
        let c = kn_integral(&scene, &x, &h.mul(&g), &tol).unwrap().value;
        prop_assert!((a + b - c).abs() <= 2.0 * tol.quad * (1.0 + c.abs()));
    }
}

#[test]
fn ray_potential_matches_the_quadrature() {
    let tol = Tolerances::default();
    let mut rng = seeded(215);
    for scene in scenes() {
        for _ in 0..5 {
            let x = scene.random_point(&mut rng);
            let s = scene.group.random_unit::<f64>(&mut rng);
            for t in [0.5, 3.0] {
                let closed = scene.ray_potential(&s, t, &x).unwrap();
                let quad = kn_integral_ray(&scene, &x, &s, t, &tol).unwrap().value;
                assert!((closed - quad).abs() < 1e-8 * (1.0 + closed.abs()), "{:?}: {closed} vs {quad}", scene.kind);
            }
        }
    }
}
