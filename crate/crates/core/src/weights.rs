//! Maximal weights `λ(x; s)`, weight curves `λ_t`, the integral of the moment
//! map `Ψ_x`, and the maximal-weight function on the boundary at infinity.

use std::fmt;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::matcore::polar_cartan;
use crate::scenes::{sphere, Scene, SceneKind, ScenePoint};
use crate::tolerance::Tolerances;
use crate::{Boundary, Group, Matrix, Skew};

/// A value in `R ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "tag", content = "value")]
pub enum ExtendedReal {
    Finite(f64),
    PlusInfinity,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::PlusInfinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::PlusInfinity)
    }

    /// Scales by a positive factor.
    pub fn scale(self, a: f64) -> Self {
        match self {
            Self::Finite(v) => Self::Finite(a * v),
            Self::PlusInfinity => Self::PlusInfinity,
        }
    }

    /// Whether the two values agree: both infinite, or finite within `tol`.
    pub fn agrees(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => (a - b).abs() <= tol,
            (Self::PlusInfinity, Self::PlusInfinity) => true,
            _ => false,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
            (Self::Finite(_), Self::PlusInfinity) => Some(Less),
            (Self::PlusInfinity, Self::Finite(_)) => Some(Greater),
            (Self::PlusInfinity, Self::PlusInfinity) => Some(Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// `λ_t(x; s) = μ_s(exp(its)·x)`.
pub fn lambda_t(scene: &Scene, x: &ScenePoint, s: &Skew, t: f64) -> Result<f64> {
    let y = scene.flow(s, t, x)?;
    let v = scene.mu_pair(&y, s);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("weight curve"))
    }
}

/// Sampled weight curve; the slope is `|ξ_s(exp(its)·x)|²`, the exact
/// derivative of `λ_t`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WeightCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl WeightCurve {
    pub fn sample(scene: &Scene, x: &ScenePoint, s: &Skew, times: &[f64]) -> Result<Self> {
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("curve times must be strictly increasing".into()));
        }
        let mut values = Vec::with_capacity(times.len());
        let mut slopes = Vec::with_capacity(times.len());
        for &t in times {
            let y = scene.flow(s, t, x)?;
            let v = scene.mu_pair(&y, s);
            let d = scene.inf_action(s, &y).norm;
            if !v.is_finite() || !d.is_finite() {
                return Err(Error::Overflow("weight curve"));
            }
            values.push(v);
            slopes.push(d * d);
        }
        Ok(Self { times: times.to_vec(), values, slopes })
    }

    /// Evenly spaced times on `[0, t_max]`.
    pub fn uniform(scene: &Scene, x: &ScenePoint, s: &Skew, t_max: f64, steps: usize) -> Result<Self> {
        let steps = steps.max(1);
        let times: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
        Self::sample(scene, x, s, &times)
    }

    /// The largest decrease between consecutive samples (zero for a
    /// nondecreasing curve).
    pub fn worst_decrease(&self) -> f64 {
        self.values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    pub fn is_monotone(&self, eps_mono: f64) -> bool {
        self.worst_decrease() <= eps_mono
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// CSV with columns `t, lambda_t, slope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda_t,slope\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", self.times[i], self.values[i], self.slopes[i]));
        }
        out
    }
}

/// The maximal weight `λ(x; s) = lim λ_t(x; s)` from its closed form.
///
/// Projective: the largest eigenvalue of `i dρ(s)` on which `x` has weight
/// above `supp`. Flat: `+∞` if that eigenvalue is positive, else `0`. Sphere
/// tuples: `|s|(m − 2·#{x_i = −ŝ})/m`.
pub fn max_weight(scene: &Scene, x: &ScenePoint, s: &Skew, tol: &Tolerances) -> Result<ExtendedReal> {
    match scene.kind {
        SceneKind::Projective | SceneKind::Flat => {
            let support = scene.spectral_support(x, s, tol)?;
            let top = support.iter().filter(|(_, w)| *w > tol.supp).map(|(a, _)| *a).fold(f64::NEG_INFINITY, f64::max);
            if scene.kind == SceneKind::Projective {
                if top.is_finite() {
                    Ok(ExtendedReal::Finite(top))
                } else {
                    Err(Error::Invalid("projective point has no support".into()))
                }
            } else if top > tol.zero * (1.0 + s.norm()) {
                Ok(ExtendedReal::PlusInfinity)
            } else {
                Ok(ExtendedReal::Finite(0.0))
            }
        }
        SceneKind::SphereTuple => {
            let p = x.sphere().ok_or_else(|| Error::Invalid("sphere scene needs a sphere point".into()))?;
            let v = sphere::vector_from_su2(s);
            let r = v.norm();
            if r == 0.0 {
                return Ok(ExtendedReal::Finite(0.0));
            }
            let south = -v / r;
            let antipodal = p.iter().filter(|x| sphere::angle(x, &south) <= tol.angle).count();
            let m = p.len() as f64;
            Ok(ExtendedReal::Finite(r * (m - 2.0 * antipodal as f64) / m))
        }
    }
}

/// Estimate of `λ(x; s)` from `λ_t` at `t ∈ {10, 20, 40}`, independent of
/// the closed forms. Returns the estimate and the change between the last two
/// rungs; flat scenes whose curve overflows or passes `cap` report `+∞`.
pub fn max_weight_numeric(scene: &Scene, x: &ScenePoint, s: &Skew, cap: f64) -> Result<(ExtendedReal, f64)> {
    let mut v = [0.0; 3];
    for (i, t) in [10.0, 20.0, 40.0].into_iter().enumerate() {
        match lambda_t(scene, x, s, t) {
            Ok(l) => v[i] = l,
            Err(Error::Overflow(_)) if scene.kind == SceneKind::Flat => return Ok((ExtendedReal::PlusInfinity, f64::INFINITY)),
            Err(e) => return Err(e),
        }
    }
    if scene.kind == SceneKind::Flat && v[2] > cap {
        return Ok((ExtendedReal::PlusInfinity, f64::INFINITY));
    }
    Ok((ExtendedReal::Finite(v[2]), (v[2] - v[1]).abs()))
}

/// `Ψ_x(g)` with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub error: f64,
}

/// Adaptive composite Gauss–Legendre integration on `[a, b]`.
///
/// Each panel is compared with its two halves; panels are bisected until the
/// summed discrepancy is below `eps(|I|)`. The 16-point rule is exact for
/// polynomials of degree 31, so smooth integrands settle after a few levels.
pub struct Quadrature {
    rule: GaussLegendre,
    max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(16, 4096)
    }
}

impl Quadrature {
    pub fn new(points: usize, max_panels: usize) -> Self {
        let degree = NonZeroUsize::new(points.max(1)).expect("nonzero degree");
        Self { rule: GaussLegendre::new(degree), max_panels }
    }

    /// Integrates `f` over `[a, b]` until the error estimate is at most
    /// `eps(|I|)`. Errors from `f` abort the integration.
    pub fn integrate<F>(&self, a: f64, b: f64, eps: impl Fn(f64) -> f64, mut f: F) -> Result<IntegralValue>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if a == b {
            return Ok(IntegralValue { value: 0.0, error: 0.0 });
        }
        let mut panel = |lo: f64, hi: f64| -> Result<f64> {
            let mut err = None;
            let v = self.rule.integrate(lo, hi, |t| match f(t) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(v),
            }
        };
        // Work list of (lo, hi, coarse value).
        let whole = panel(a, b)?;
        let mut pending = vec![(a, b, whole)];
        let mut done_value = 0.0f64;
        let mut done_error = 0.0;
        let mut panels = 1;
        let length = (b - a).abs();
        while let Some((lo, hi, coarse)) = pending.pop() {
            let mid = 0.5 * (lo + hi);
            let left = panel(lo, mid)?;
            let right = panel(mid, hi)?;
            panels += 2;
            let fine = left + right;
            let diff = (fine - coarse).abs();
            let scale = (whole.abs()).max(done_value.abs() + fine.abs());
            let share = (hi - lo).abs() / length;
            if diff <= share * eps(scale) || (hi - lo).abs() <= 1e-12 * length {
                done_value += fine;
                done_error += diff;
                continue;
            }
            if panels >= self.max_panels {
                return Err(Error::QuadratureFailure { estimate: done_error + diff });
            }
            pending.push((lo, mid, left));
            pending.push((mid, hi, right));
        }
        Ok(IntegralValue { value: done_value, error: done_error })
    }
}

/// `Ψ_x(g)`, integrating the one-form `σ_x` along `1 → k → k·exp(iνu)`.
///
/// The first leg lies in `K`, where `σ_x` vanishes. On the second leg
/// `σ_x = ⟨μ(k e^{iνu}·x), Ad(k)u⟩ = λ_ν(x; u)` by equivariance, so
/// `Ψ_x(g) = ∫₀¹ λ_ν(x; u) dν`.
pub fn kn_integral(scene: &Scene, x: &ScenePoint, g: &Group, tol: &Tolerances) -> Result<IntegralValue> {
    let cp = polar_cartan(g, tol.cond_max)?;
    let u = scene.group.project(&cp.u);
    kn_integral_ray(scene, x, &u, 1.0, tol)
}

/// `Ψ_x(exp(itu)) = ∫₀ᵗ λ_τ(x; u) dτ`.
pub fn kn_integral_ray(scene: &Scene, x: &ScenePoint, u: &Skew, t: f64, tol: &Tolerances) -> Result<IntegralValue> {
    // Target a tenth of the contract so that sums of two integrals stay inside it.
    let eps = |v: f64| 0.1 * tol.quad * (1.0 + v);
    Quadrature::default().integrate(0.0, t, eps, |tau| lambda_t(scene, x, u, tau))
}

/// `∫ σ_x` along an arbitrary smooth path `γ: [0, 1] → G` starting at the
/// identity. `path(ν)` returns `(γ(ν), γ'(ν))`.
///
/// `σ_x(g)(v) = ⟨μ(g·x), −i·π(v g⁻¹)⟩` with `π` the Hermitian part.
pub fn kn_integral_path<P>(scene: &Scene, x: &ScenePoint, path: P, tol: &Tolerances) -> Result<IntegralValue>
where
    P: Fn(f64) -> (Group, Matrix),
{
    let eps = |v: f64| 0.1 * tol.quad * (1.0 + v);
    Quadrature::default().integrate(0.0, 1.0, eps, |nu| {
        let (g, dg) = path(nu);
        let ginv = g.inverse()?;
        let w = dg * ginv.matrix();
        let herm = (&w + w.adjoint()) * crate::scalar::cplx(0.5, 0.0);
        let direction = Skew::from_hermitian(&herm);
        let y = scene.act(&g, x, tol)?;
        Ok(scene.moment(&y).inner(&direction))
    })
}

/// How [`boundary_weight`] evaluates `λ_x(e_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// The closed-form maximal weight.
    Analytic,
    /// Extrapolation of `Ψ_x(exp(its))/t` along the ray.
    Ray,
}

/// Divergence cap for ray-mode sequences.
pub const RAY_CAP: f64 = 1e6;

/// `λ_x(e_s)` for a unit direction `s`.
///
/// Ray mode evaluates `φ(t) = Ψ_x(exp(its))/t` at `t ∈ {10, 20, 40}`.
/// For a finite weight `φ(t) = λ − C/t + O(e^{−ct})`, so the Richardson
/// step `2φ(40) − φ(20)` removes the leading term. A sequence whose
/// increments grow, or that passes [`RAY_CAP`], is reported as `+∞`.
pub fn boundary_weight(scene: &Scene, x: &ScenePoint, e: &Boundary, mode: WeightMode, tol: &Tolerances) -> Result<ExtendedReal> {
    let s = e.direction();
    match mode {
        WeightMode::Analytic => max_weight(scene, x, s, tol),
        WeightMode::Ray => {
            let mut phi = [0.0; 3];
            for (i, t) in [10.0, 20.0, 40.0].into_iter().enumerate() {
                match kn_integral_ray(scene, x, s, t, tol) {
                    Ok(v) => phi[i] = v.value / t,
                    Err(Error::Overflow(_)) if scene.kind == SceneKind::Flat => return Ok(ExtendedReal::PlusInfinity),
                    Err(e) => return Err(e),
                }
                if phi[i] > RAY_CAP {
                    return Ok(ExtendedReal::PlusInfinity);
                }
            }
            let slack = tol.boundary_weight;
            let (d1, d2) = (phi[1] - phi[0], phi[2] - phi[1]);
            if d1 < -slack || d2 < -slack {
                return Err(Error::Inconclusive(format!("φ decreases along the ray: {phi:?}")));
            }
            if d2 > slack && d2 > d1 {
                return Ok(ExtendedReal::PlusInfinity);
            }
            Ok(ExtendedReal::Finite(2.0 * phi[2] - phi[1]))
        }
    }
}

/// Whether `ξ_s(x)` vanishes, given `λ(x; s) = λ(x; −s) = 0`.
pub fn weight_zero_implies_fixed(scene: &Scene, x: &ScenePoint, s: &Skew, tol: &Tolerances) -> Result<bool> {
    let plus = max_weight(scene, x, s, tol)?;
    let minus = max_weight(scene, x, &s.neg(), tol)?;
    let zero = |w: ExtendedReal| w.finite().is_some_and(|v| v.abs() <= tol.delta * (1.0 + s.norm()));
    if !zero(plus) || !zero(minus) {
        return Err(Error::PreconditionUnmet(format!("λ(x; s) = {plus}, λ(x; −s) = {minus}; both must vanish")));
    }
    Ok(scene.inf_action(s, x).norm <= tol.fix * (1.0 + s.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_smooth_and_sharp_functions() {
        let q = Quadrature::default();
        let v = q.integrate(0.0, 1.0, |_| 1e-12, |t| Ok(t.exp())).unwrap();
        assert!((v.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = q.integrate(0.0, 40.0, |_| 1e-10, |t| Ok((10.0 * (t - 7.0)).tanh())).unwrap();
        let exact = ((10.0f64 * 33.0).cosh().ln() - (70.0f64).cosh().ln()) / 10.0;
        assert!((v.value - exact).abs() < 1e-9, "{} vs {exact}", v.value);
    }

    #[test]
    fn quadrature_reports_exhaustion() {
        let q = Quadrature::new(2, 8);
        let r = q.integrate(0.0, 1.0, |_| 1e-15, |t| Ok((50.0 * t).sin()));
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn extended_real_ordering() {
        assert!(ExtendedReal::Finite(1e300) < ExtendedReal::PlusInfinity);
        assert!(ExtendedReal::Finite(-1.0) < ExtendedReal::Finite(0.0));
        assert!(ExtendedReal::PlusInfinity.agrees(ExtendedReal::PlusInfinity, 0.0));
    }
}
