//! Kähler model spaces with a Hamiltonian action of a compact group:
//! projective space and flat space carrying a unitary representation, and
//! tuples of points on the sphere under `SU(2)`.

mod rep;
pub mod sphere;

use nalgebra::{DVector, Vector3};
use rand::Rng;

pub use rep::Representation;

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, polar_cartan, CartanPair};
use crate::random::{random_complex_matrix, random_sphere_point, random_unit_vector};
use crate::scalar::cplx;
use crate::symspace::CompactGroup;
use crate::tolerance::Tolerances;
use crate::{Complex, Group, Matrix, Skew};

use sphere::{point_from_spinor, spinor_from_point, su2_from_vector, vector_from_su2};

/// Which model space a [`Scene`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    /// `P(C^N)` with the Fubini–Study form, scaled so that the gradient
    /// identity holds for `μ_s([z]) = z*(i dρ(s))z / z*z`.
    Projective,
    /// `C^N` with the flat form and `μ_s(z) = ½ z*(i dρ(s))z`.
    Flat,
    /// `(S²)^m` with `μ = φ(mean of the points)`, `φ(v) = −i(σ·v)/√2`.
    SphereTuple,
}

/// A point of a scene.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenePoint {
    /// Unit representative of a line (projective) or an arbitrary vector (flat).
    Vector(DVector<Complex>),
    /// Unit vectors in `R³`.
    Sphere(Vec<Vector3<f64>>),
}

impl ScenePoint {
    pub fn vector(&self) -> Option<&DVector<Complex>> {
        match self {
            Self::Vector(z) => Some(z),
            Self::Sphere(_) => None,
        }
    }

    pub fn sphere(&self) -> Option<&[Vector3<f64>]> {
        match self {
            Self::Sphere(p) => Some(p),
            Self::Vector(_) => None,
        }
    }
}

/// A tangent vector `ξ_s(x)` and its length in the scene metric.
#[derive(Debug, Clone)]
pub struct TangentData {
    /// Complex components (projective, flat) or the `3m` real components of a
    /// sphere tuple stored with zero imaginary part.
    pub components: Vec<Complex>,
    pub norm: f64,
}

/// Constants certifying `|ξ_s(x)| ≤ C|s|(1 + d(x, x₀))` and
/// `|μ(x)| ≤ C(1 + d(x, x₀)²)`.
#[derive(Debug, Clone)]
pub struct GrowthConstants {
    pub c: f64,
    pub base: ScenePoint,
}

/// Worst ratios seen by [`Scene::check_growth_bounds`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthReport {
    pub samples: usize,
    pub c: f64,
    /// Largest `|ξ_s(x)| / (|s|(1 + d))`.
    pub action_ratio: f64,
    /// Largest `|μ(x)| / (1 + d²)`.
    pub moment_ratio: f64,
}

/// Default [`Scene::support_floor`], equal to the default support tolerance.
pub const SUPPORT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Scene {
    pub kind: SceneKind,
    pub group: CompactGroup,
    /// Present for projective and flat scenes.
    pub rep: Option<Representation>,
    /// Tuple length for sphere scenes.
    pub m: usize,
    pub growth: GrowthConstants,
    /// Spectral components of a point below this fraction of its norm are
    /// treated as absent by the complexified action. Without it, rounding
    /// noise at a repelling fixed point grows like `e^{t·gap}`.
    pub support_floor: f64,
}

impl Scene {
    pub fn projective(rep: Representation) -> Self {
        let n = rep.dim();
        let mut base = DVector::zeros(n);
        base[0] = cplx(1.0, 0.0);
        let c = 1.0 + std::f64::consts::SQRT_2 * rep.norm_bound();
        Self { kind: SceneKind::Projective, group: rep.group, rep: Some(rep), m: 0, growth: GrowthConstants { c, base: ScenePoint::Vector(base) }, support_floor: SUPPORT_FLOOR }
    }

    pub fn flat(rep: Representation) -> Self {
        let n = rep.dim();
        // |ξ_s(z)| ≤ c|s||z| and |μ(z)| ≤ ½c|z|², with x₀ = 0 and μ(x₀) = 0.
        let c = rep.norm_bound();
        let c = c.max(c * c);
        Self {
            kind: SceneKind::Flat,
            group: rep.group,
            rep: Some(rep),
            m: 0,
            growth: GrowthConstants { c, base: ScenePoint::Vector(DVector::zeros(n)) },
            support_floor: 0.0,
        }
    }

    pub fn sphere_tuple(m: usize) -> Self {
        let base = ScenePoint::Sphere(vec![Vector3::z(); m]);
        Self {
            kind: SceneKind::SphereTuple,
            group: CompactGroup::special_unitary(2),
            rep: None,
            m,
            growth: GrowthConstants { c: 1.0 + std::f64::consts::FRAC_1_SQRT_2, base },
            support_floor: SUPPORT_FLOOR,
        }
    }

    pub fn with_support_floor(mut self, floor: f64) -> Self {
        self.support_floor = floor;
        self
    }

    pub fn with_growth_constant(mut self, c: f64) -> Self {
        self.growth.c = c;
        self
    }

    /// Whether the scene is a torus representation on projective space.
    pub fn torus_weights(&self) -> Option<&[Vec<i64>]> {
        match (self.kind, &self.rep) {
            (SceneKind::Projective, Some(rep)) => rep.weights.as_deref(),
            _ => None,
        }
    }

    fn rep(&self) -> &Representation {
        self.rep.as_ref().expect("projective and flat scenes carry a representation")
    }

    /// Checks the normalisation invariants of a point and returns the
    /// normalised copy.
    pub fn validate_point(&self, x: &ScenePoint) -> Result<ScenePoint> {
        match (self.kind, x) {
            (SceneKind::Projective, ScenePoint::Vector(z)) => {
                if z.len() != self.rep().dim() {
                    return Err(Error::Dimension(format!("point has {} coordinates, scene {}", z.len(), self.rep().dim())));
                }
                let n = z.norm();
                if !n.is_finite() || n == 0.0 {
                    return Err(Error::Invalid("projective point must be a nonzero finite vector".into()));
                }
                Ok(ScenePoint::Vector(z / cplx(n, 0.0)))
            }
            (SceneKind::Flat, ScenePoint::Vector(z)) => {
                if z.len() != self.rep().dim() {
                    return Err(Error::Dimension(format!("point has {} coordinates, scene {}", z.len(), self.rep().dim())));
                }
                if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Invalid("non-finite coordinate".into()));
                }
                Ok(x.clone())
            }
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                if p.len() != self.m {
                    return Err(Error::Dimension(format!("tuple of {} points, scene expects {}", p.len(), self.m)));
                }
                for (i, v) in p.iter().enumerate() {
                    if !v.iter().all(|c| c.is_finite()) || (v.norm() - 1.0).abs() > 1e-6 {
                        return Err(Error::Invalid(format!("point {i} is not a unit vector")));
                    }
                }
                Ok(ScenePoint::Sphere(p.iter().map(|v| v.normalize()).collect()))
            }
            _ => Err(Error::Invalid("point type does not match the scene".into())),
        }
    }

    pub fn random_point(&self, rng: &mut (impl Rng + ?Sized)) -> ScenePoint {
        match self.kind {
            SceneKind::Projective => ScenePoint::Vector(random_unit_vector::<f64>(rng, self.rep().dim()).column(0).into_owned()),
            SceneKind::Flat => ScenePoint::Vector(random_complex_matrix::<f64>(rng, self.rep().dim(), 1).column(0).into_owned()),
            SceneKind::SphereTuple => {
                ScenePoint::Sphere((0..self.m).map(|_| Vector3::from_vec(random_sphere_point(rng, 3))).collect())
            }
        }
    }

    /// `g·x`.
    pub fn act(&self, g: &Group, x: &ScenePoint, tol: &Tolerances) -> Result<ScenePoint> {
        if !self.group.contains_element(g, 1e-8) {
            return Err(Error::Invalid("group element lies outside the scene's group".into()));
        }
        let cp = polar_cartan(g, tol.cond_max)?;
        self.act_cartan(&cp, x)
    }

    /// `k·exp(iu)·x` for a Cartan pair; stable for arbitrarily large `u`.
    pub fn act_cartan(&self, cp: &CartanPair<f64>, x: &ScenePoint) -> Result<ScenePoint> {
        let u = self.group.project(&cp.u);
        match (self.kind, x) {
            (SceneKind::Projective | SceneKind::Flat, ScenePoint::Vector(z)) => {
                let rep = self.rep();
                let projective = self.kind == SceneKind::Projective;
                let floor = if projective { self.support_floor } else { 0.0 };
                let w = exp_hermitian_apply(&rep.hermitian(&u), z, projective, floor)?;
                let w = rep.rho_unitary(&cp.k)? * w;
                if projective {
                    let n = w.norm();
                    Ok(ScenePoint::Vector(w / cplx(n, 0.0)))
                } else if w.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Ok(ScenePoint::Vector(w))
                } else {
                    Err(Error::Overflow("flat scene action"))
                }
            }
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                let mut out = Vec::with_capacity(p.len());
                for x in p {
                    let psi = spinor_from_point(x);
                    let z = DVector::from_column_slice(psi.as_slice());
                    let w = &cp.k * exp_hermitian_apply(&u.hermitian(), &z, true, self.support_floor)?;
                    out.push(point_from_spinor(&sphere::Spinor::new(w[0], w[1])));
                }
                Ok(ScenePoint::Sphere(out))
            }
            _ => Err(Error::Invalid("point type does not match the scene".into())),
        }
    }

    /// `exp(its)·x`.
    pub fn flow(&self, s: &Skew, t: f64, x: &ScenePoint) -> Result<ScenePoint> {
        let cp = CartanPair { k: Matrix::identity(s.dim(), s.dim()), u: s.scaled(t) };
        self.act_cartan(&cp, x)
    }

    /// `k·x` for `k ∈ K`.
    pub fn act_unitary(&self, k: &Matrix, x: &ScenePoint) -> Result<ScenePoint> {
        let cp = CartanPair { k: k.clone(), u: Skew::zeros(k.nrows()) };
        self.act_cartan(&cp, x)
    }

    /// `μ_s(x) = ⟨μ(x), s⟩`.
    pub fn mu_pair(&self, x: &ScenePoint, s: &Skew) -> f64 {
        match (self.kind, x) {
            (SceneKind::Projective, ScenePoint::Vector(z)) => {
                let h = self.rep().hermitian(s);
                (z.adjoint() * h * z)[(0, 0)].re / z.norm_squared()
            }
            (SceneKind::Flat, ScenePoint::Vector(z)) => {
                let h = self.rep().hermitian(s);
                0.5 * (z.adjoint() * h * z)[(0, 0)].re
            }
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                let v = vector_from_su2(s);
                p.iter().map(|x| x.dot(&v)).sum::<f64>() / p.len().max(1) as f64
            }
            _ => f64::NAN,
        }
    }

    /// The moment map as an element of `k`.
    pub fn moment(&self, x: &ScenePoint) -> Skew {
        match (self.kind, x) {
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                let mean = p.iter().fold(Vector3::zeros(), |a, x| a + x) / p.len().max(1) as f64;
                su2_from_vector(&mean)
            }
            _ => {
                let basis = self.group.basis::<f64>();
                let c: Vec<f64> = basis.iter().map(|b| self.mu_pair(x, b)).collect();
                self.group.from_coords(&c).expect("basis coordinates")
            }
        }
    }

    /// `ξ_s(x) = d/dt|₀ exp(ts)·x`.
    pub fn inf_action(&self, s: &Skew, x: &ScenePoint) -> TangentData {
        self.tangent(s, x, false)
    }

    /// `ξ_{is}(x) = I·ξ_s(x) = d/dt|₀ exp(its)·x`.
    pub fn inf_action_complex(&self, s: &Skew, x: &ScenePoint) -> TangentData {
        self.tangent(s, x, true)
    }

    fn tangent(&self, s: &Skew, x: &ScenePoint, complex: bool) -> TangentData {
        match (self.kind, x) {
            (SceneKind::Projective, ScenePoint::Vector(z)) => {
                let z = z / cplx(z.norm(), 0.0);
                let mut w = self.rep().d_rho(s) * &z;
                if complex {
                    w *= cplx(0.0, 1.0);
                }
                let along = (z.adjoint() * &w)[(0, 0)];
                let h = w - &z * along;
                let norm = std::f64::consts::SQRT_2 * h.norm();
                TangentData { components: h.iter().copied().collect(), norm }
            }
            (SceneKind::Flat, ScenePoint::Vector(z)) => {
                let mut w = self.rep().d_rho(s) * z;
                if complex {
                    w *= cplx(0.0, 1.0);
                }
                let norm = w.norm();
                TangentData { components: w.iter().copied().collect(), norm }
            }
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                let v = vector_from_su2(s) * std::f64::consts::SQRT_2;
                let mut comps = Vec::with_capacity(3 * p.len());
                let mut sq = 0.0;
                for x in p {
                    let t = if complex { v - x * x.dot(&v) } else { v.cross(x) };
                    sq += t.norm_squared();
                    comps.extend(t.iter().map(|&c| cplx(c, 0.0)));
                }
                let norm = (sq * self.sphere_metric_weight()).sqrt();
                TangentData { components: comps, norm }
            }
            _ => TangentData { components: Vec::new(), norm: f64::NAN },
        }
    }

    /// Weight `1/(√2·m)` of the round metric on each sphere factor.
    fn sphere_metric_weight(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.m.max(1) as f64)
    }

    /// Riemannian distance in the scene metric.
    pub fn distance(&self, x: &ScenePoint, y: &ScenePoint) -> f64 {
        match (self.kind, x, y) {
            (SceneKind::Projective, ScenePoint::Vector(z), ScenePoint::Vector(w)) => {
                let c = (z.adjoint() * w)[(0, 0)].norm() / (z.norm() * w.norm());
                std::f64::consts::SQRT_2 * c.min(1.0).acos()
            }
            (SceneKind::Flat, ScenePoint::Vector(z), ScenePoint::Vector(w)) => (z - w).norm(),
            (SceneKind::SphereTuple, ScenePoint::Sphere(a), ScenePoint::Sphere(b)) => {
                let sq: f64 = a.iter().zip(b).map(|(p, q)| sphere::angle(p, q).powi(2)).sum();
                (sq * self.sphere_metric_weight()).sqrt()
            }
            _ => f64::NAN,
        }
    }

    /// Smallest chordal distance between points of a sphere tuple whose
    /// indices are listed as initially distinct pairs.
    pub fn min_pair_distance(&self, x: &ScenePoint, pairs: &[(usize, usize)]) -> Option<f64> {
        let p = x.sphere()?;
        pairs.iter().map(|&(i, j)| (p[i] - p[j]).norm()).min_by(|a, b| a.total_cmp(b))
    }

    /// Samples `(x, s)` and checks both growth bounds with the declared constant.
    pub fn check_growth_bounds(&self, samples: usize, rng: &mut (impl Rng + ?Sized)) -> Result<GrowthReport> {
        let c = self.growth.c;
        let mut action_ratio: f64 = 0.0;
        let mut moment_ratio: f64 = 0.0;
        for i in 0..samples {
            let mut x = self.random_point(rng);
            if let (SceneKind::Flat, ScenePoint::Vector(z)) = (self.kind, &x) {
                let r = 10.0 * rng.gen::<f64>();
                x = ScenePoint::Vector(z * cplx(r, 0.0));
            }
            let s = self.group.random_unit::<f64>(rng).scaled(0.1 + 3.0 * rng.gen::<f64>());
            let d = self.distance(&x, &self.growth.base);
            let a = self.inf_action(&s, &x).norm / (s.norm() * (1.0 + d));
            let m = self.moment(&x).norm() / (1.0 + d * d);
            action_ratio = action_ratio.max(a);
            moment_ratio = moment_ratio.max(m);
            if a > c * (1.0 + 1e-12) || m > c * (1.0 + 1e-12) {
                return Err(Error::BoundViolated(format!(
                    "sample {i}: |ξ_s|/(|s|(1+d)) = {a:.6}, |μ|/(1+d²) = {m:.6}, C = {c}"
                )));
            }
        }
        Ok(GrowthReport { samples, c, action_ratio, moment_ratio })
    }

    /// `Ψ_x(exp(its))` in closed form.
    ///
    /// Projective: `½ log(|e^{tH}z|²/|z|²)`; flat: `¼(|e^{tH}z|² − |z|²)`;
    /// sphere tuples: the mean over points of `(1/√2)·log|e^{t·is}ψ_i|²` for
    /// unit spinors `ψ_i`. Its `t`-derivative is `λ_t(x; s)`.
    pub fn ray_potential(&self, s: &Skew, t: f64, x: &ScenePoint) -> Result<f64> {
        match (self.kind, x) {
            (SceneKind::Projective | SceneKind::Flat, ScenePoint::Vector(z)) => {
                let h = self.rep().hermitian(s);
                let floor = if self.kind == SceneKind::Projective { self.support_floor } else { 0.0 };
                let (values, weights) = spectral_weights(&h, z, floor)?;
                let z2 = z.norm_squared();
                if self.kind == SceneKind::Projective {
                    Ok(0.5 * (log_sum_exp(&values, &weights, 2.0 * t) - z2.ln()))
                } else {
                    let grown: f64 = values.iter().zip(&weights).map(|(a, w)| w * (2.0 * t * a).exp()).sum();
                    if grown.is_finite() {
                        Ok(0.25 * (grown - z2))
                    } else {
                        Err(Error::Overflow("flat potential"))
                    }
                }
            }
            (SceneKind::SphereTuple, ScenePoint::Sphere(p)) => {
                let h = s.hermitian();
                let mut acc = 0.0;
                for x in p {
                    let psi = spinor_from_point(x);
                    let z = DVector::from_column_slice(psi.as_slice());
                    let (values, weights) = spectral_weights(&h, &z, self.support_floor)?;
                    acc += log_sum_exp(&values, &weights, 2.0 * t) * std::f64::consts::FRAC_1_SQRT_2;
                }
                Ok(acc / p.len().max(1) as f64)
            }
            _ => Err(Error::Invalid("point type does not match the scene".into())),
        }
    }

    /// The eigenvalues of `i dρ(s)` (projective and flat scenes) with the
    /// weight of `x` on each eigenspace.
    pub fn spectral_support(&self, x: &ScenePoint, s: &Skew, tol: &Tolerances) -> Result<Vec<(f64, f64)>> {
        let z = x.vector().ok_or_else(|| Error::Invalid("spectral support needs a vector point".into()))?;
        let h = self.rep().hermitian(s);
        let cluster = tol.cluster * (1.0 + crate::matcore::frobenius(&h));
        let sp = herm_eig(&h, tol.sym, cluster)?;
        let zn = z.norm();
        let zm = Matrix::from_column_slice(z.len(), 1, z.as_slice());
        Ok((0..sp.len())
            .map(|j| {
                let b = sp.cluster_basis(j);
                let w = (b.adjoint() * &zm).norm() / zn.max(f64::MIN_POSITIVE);
                (sp.values[j], w)
            })
            .collect())
    }
}

/// Eigenvalues of `H` and the squared weights of `z` on the eigenvectors,
/// with components below `floor·|z|` removed.
fn spectral_weights(h: &Matrix, z: &DVector<Complex>, floor: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let sp = herm_eig(h, 1e-6, 0.0)?;
    let c = sp.basis.adjoint() * z;
    let cutoff = floor * c.norm();
    let weights = c.iter().map(|cj| if cj.norm() <= cutoff { 0.0 } else { cj.norm_sqr() }).collect();
    Ok((sp.raw.clone(), weights))
}

/// `log Σ w_j e^{k a_j}` over positive weights, evaluated without overflow.
fn log_sum_exp(a: &[f64], w: &[f64], k: f64) -> f64 {
    let top = a.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(a, _)| k * a).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = a.iter().zip(w).filter(|(_, w)| **w > 0.0).map(|(a, w)| w * (k * a - top).exp()).sum();
    top + sum.ln()
}

/// `exp(H)·z` for Hermitian `H`, computed spectrally. With `normalize` the
/// exponent is shifted by the largest eigenvalue and the result scaled to
/// unit norm, so any size of `H` is safe for projective use. Components
/// below `floor·|z|` are dropped first.
fn exp_hermitian_apply(h: &Matrix, z: &DVector<Complex>, normalize: bool, floor: f64) -> Result<DVector<Complex>> {
    let sp = herm_eig(h, 1e-6, 0.0)?;
    let q = &sp.basis;
    let mut c = q.adjoint() * z;
    let cutoff = floor * c.norm();
    for cj in c.iter_mut() {
        if cj.norm() <= cutoff {
            *cj = cplx(0.0, 0.0);
        }
    }
    let shift = if normalize {
        // Largest eigenvalue on which z has weight, so that the result stays
        // of unit order even when that component is tiny.
        sp.raw.iter().zip(c.iter()).filter(|(_, w)| w.norm() > 0.0).map(|(l, _)| *l).fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    };
    let shift = if shift.is_finite() { shift } else { 0.0 };
    for (j, l) in sp.raw.iter().enumerate() {
        c[j] *= cplx((l - shift).exp(), 0.0);
    }
    let out = q * c;
    if normalize {
        let n = out.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Overflow("projective action"));
        }
        return Ok(out / cplx(n, 0.0));
    }
    Ok(out)
}
