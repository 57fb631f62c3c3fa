use nalgebra::{DMatrix, Matrix3};

use crate::error::Result;
use crate::random::seeded;
use crate::scenes::{Scene, ScenePoint};
use crate::symspace::{connect_geodesic, opposed_in, BoundaryPoint, OpposednessCertificate};
use crate::tolerance::Tolerances;
use crate::weights::max_weight;
use crate::{Group, Matrix, Skew};

/// Result of [`korbit_equal`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OrbitMatch {
    pub equal: bool,
    /// Smallest `d(k·x1, x2)` found.
    pub distance: f64,
    /// Set when the search ran out of budget without an exact minimizer.
    pub flagged: bool,
}

/// Whether `x2 ∈ K·x1`, up to `tol` in the scene metric.
///
/// Sphere tuples use the Kabsch alignment over `SO(3)`, which is the image
/// of `SU(2)`; other scenes minimize `d(k·x1, x2)` by multistart pattern
/// search over `K`.
pub fn korbit_equal(scene: &Scene, x1: &ScenePoint, x2: &ScenePoint, tol: f64) -> Result<OrbitMatch> {
    let x1 = scene.validate_point(x1)?;
    let x2 = scene.validate_point(x2)?;
    if let (ScenePoint::Sphere(a), ScenePoint::Sphere(b)) = (&x1, &x2) {
        let mut cov = Matrix3::zeros();
        for (p, q) in a.iter().zip(b) {
            cov += p * q.transpose();
        }
        let svd = cov.svd(true, true);
        let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v"));
        let v = vt.transpose();
        let sign = (v * u.transpose()).determinant().signum();
        let r = v * Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, sign)) * u.transpose();
        let rotated = ScenePoint::Sphere(a.iter().map(|p| r * p).collect());
        let distance = scene.distance(&rotated, &x2);
        return Ok(OrbitMatch { equal: distance <= tol, distance, flagged: false });
    }

    let basis = scene.group.basis::<f64>();
    let mut rng = seeded(0x6b6f7262);
    let objective = |k: &Matrix| -> f64 {
        scene.act_unitary(k, &x1).map(|y| scene.distance(&y, &x2)).unwrap_or(f64::INFINITY)
    };
    let mut best = f64::INFINITY;
    let starts = 12;
    for start in 0..starts {
        let mut k = if start == 0 { Matrix::identity(scene.group.n, scene.group.n) } else { scene.group.haar::<f64>(&mut rng) };
        let mut f = objective(&k);
        let mut h = 0.5;
        let mut sweeps = 0;
        while h > 1e-10 && sweeps < 2000 {
            sweeps += 1;
            let mut improved = false;
            for b in &basis {
                for sign in [1.0, -1.0] {
                    let trial = b.exp_unitary(sign * h)? * &k;
                    let ft = objective(&trial);
                    if ft < f - 1e-15 {
                        f = ft;
                        k = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        best = best.min(f);
        if best <= tol {
            return Ok(OrbitMatch { equal: true, distance: best, flagged: false });
        }
    }
    Ok(OrbitMatch { equal: false, distance: best, flagged: true })
}

/// Result of [`polystable_witness_check`].
#[derive(Debug, Clone)]
pub struct WitnessCheck {
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub s_vanishes: bool,
    pub u_vanishes: bool,
    pub connected: bool,
    pub certificate: Option<OpposednessCertificate<f64>>,
    /// An element `h` with `h ∈ P_s` and `u·h = −s` when the pair is connected.
    pub geodesic: Option<Group>,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.s_vanishes && self.u_vanishes && self.connected
    }

    /// Which condition failed first, if any.
    pub fn failure(&self) -> Option<&'static str> {
        if !self.s_vanishes {
            Some("first condition failed: λ(x; s) ≠ 0")
        } else if !self.u_vanishes {
            Some("second condition failed: λ(x; u) ≠ 0")
        } else if !self.connected {
            Some("third condition failed: e_s and e_u are not joined by a geodesic")
        } else {
            None
        }
    }
}

/// Checks a claimed zero pair: `λ(x; s) = λ(x; u) = 0` within `δ` and
/// `e_s`, `e_u` geodesically connected.
pub fn polystable_witness_check(scene: &Scene, x: &ScenePoint, s: &Skew, u: &Skew, tol: &Tolerances) -> Result<WitnessCheck> {
    let es = BoundaryPoint::normalize(s)?;
    let eu = BoundaryPoint::normalize(u)?;
    let weight = |d: &Skew| -> Result<f64> { Ok(max_weight(scene, x, d, tol)?.finite().unwrap_or(f64::INFINITY)) };
    let lambda_s = weight(es.direction())?;
    let lambda_u = weight(eu.direction())?;
    let (connected, certificate) = opposed_in(&scene.group, es.direction(), eu.direction(), tol)?;
    let geodesic = if connected { connect_geodesic(&scene.group, &es, &eu, tol).ok() } else { None };
    Ok(WitnessCheck {
        lambda_s,
        lambda_u,
        s_vanishes: lambda_s.abs() <= tol.delta,
        u_vanishes: lambda_u.abs() <= tol.delta,
        connected,
        certificate,
        geodesic,
    })
}

/// Dimension of the stabilizer algebra `{s ∈ k : ξ_s(x) = 0}`.
pub fn stabilizer_dimension(scene: &Scene, x: &ScenePoint, tol: f64) -> usize {
    let basis = scene.group.basis::<f64>();
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| scene.inf_action(b, x).components.iter().flat_map(|c| [c.re, c.im]).collect())
        .collect();
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    if rows == 0 {
        return basis.len();
    }
    let m = DMatrix::from_fn(rows, basis.len(), |i, j| columns[j][i]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|v| **v > tol * top.max(1.0)).count();
    basis.len() - rank
}
