use crate::error::{Error, Result};
use crate::matcore::{
    frobenius, jacobi_svd, polar_graded, ComplexMatrix, GroupElement, SkewHermitian, SpectralData, Subspace,
};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Clustered spectrum of the Hermitian matrix `i·s`.
pub fn spectrum<T: Real>(s: &SkewHermitian<T>, tol: &Tolerances) -> Result<SpectralData<T>> {
    let h = s.hermitian();
    let cluster = T::lit(tol.cluster) * (T::one() + frobenius(&h));
    crate::matcore::herm_eig(&h, T::lit(tol.sym), cluster)
}

/// A point `e_s` of the boundary at infinity: the class of the ray
/// `t ↦ [exp(i t s)]` for a unit vector `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint<T: Real> {
    s: SkewHermitian<T>,
}

impl<T: Real> BoundaryPoint<T> {
    /// Requires `|‖s‖ − 1| ≤ 1e-12`; see [`BoundaryPoint::normalize`] otherwise.
    pub fn new(s: SkewHermitian<T>) -> Result<Self> {
        let tol = T::lit(1e-12).max(T::eps() * T::lit(64.0));
        if (s.norm() - T::one()).abs() > tol {
            return Err(Error::Invalid(format!("boundary direction has norm {}", s.norm())));
        }
        Ok(Self { s })
    }

    pub fn normalize(s: &SkewHermitian<T>) -> Result<Self> {
        s.normalized()
            .map(|s| Self { s })
            .ok_or_else(|| Error::Invalid("zero direction has no boundary point".into()))
    }

    pub fn direction(&self) -> &SkewHermitian<T> {
        &self.s
    }

    pub fn into_direction(self) -> SkewHermitian<T> {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    /// The antipodal point `e_{−s}`.
    pub fn antipode(&self) -> Self {
        Self { s: self.s.neg() }
    }
}

/// The geodesic `t ↦ [exp(i t s)·g]` with unit direction `s`.
#[derive(Debug, Clone)]
pub struct GeodesicRay<T: Real> {
    pub direction: SkewHermitian<T>,
    pub base: GroupElement<T>,
}

impl<T: Real> GeodesicRay<T> {
    pub fn new(direction: &SkewHermitian<T>, base: GroupElement<T>) -> Result<Self> {
        let direction = direction
            .normalized()
            .ok_or_else(|| Error::Invalid("geodesic with zero direction".into()))?;
        if direction.dim() != base.dim() {
            return Err(Error::Dimension("direction and base point differ in size".into()));
        }
        Ok(Self { direction, base })
    }

    /// The group element `exp(i t s)·g` representing the point at time `t`.
    pub fn at(&self, t: T) -> Result<GroupElement<T>> {
        Ok(GroupElement::exp_i(&self.direction, t)?.mul(&self.base))
    }
}

/// Invariant distance between `[g]` and `[h]` in `K\G`.
///
/// Equals `½‖log(P^{−1/2} Q P^{−1/2})‖_F` for `P = g*g`, `Q = h*h`, which is
/// the 2-norm of the logarithms of the singular values of `h g^{-1}`.
pub fn distance<T: Real>(g: &GroupElement<T>, h: &GroupElement<T>, tol: &Tolerances) -> Result<T> {
    if g.dim() != h.dim() {
        return Err(Error::Dimension("distance between different groups".into()));
    }
    let x = h.matrix() * g.inverse()?.matrix();
    let svd = jacobi_svd(&x)?;
    let max = svd.sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let min = svd.sigma.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
    let cond_max = T::lit(tol.cond_max);
    if !(min > T::zero()) || max / min > cond_max * cond_max {
        return Err(Error::Singular { cond: (max / min).as_f64() });
    }
    Ok(svd.sigma.iter().fold(T::zero(), |a, &s| a + s.ln() * s.ln()).sqrt())
}

/// The right action `s·g` of `G` on the boundary.
///
/// With `λ_1 < … < λ_r` the eigenvalues of `is`, `V^j` the sum of the first
/// `j` eigenspaces and `V_j^∞ = (g^{-1}V^{j−1})^⊥ ∩ g^{-1}V^j`, the result acts
/// as `−iλ_j` on `V_j^∞`.
pub fn boundary_action<T: Real>(
    s: &BoundaryPoint<T>,
    g: &GroupElement<T>,
    tol: &Tolerances,
) -> Result<BoundaryPoint<T>> {
    let out = boundary_action_raw(s.direction(), g, tol)?;
    // The spectrum is preserved, so the norm is too; renormalise the rounding.
    BoundaryPoint::normalize(&out)
}

/// [`boundary_action`] for a direction of any norm.
pub fn boundary_action_raw<T: Real>(
    s: &SkewHermitian<T>,
    g: &GroupElement<T>,
    tol: &Tolerances,
) -> Result<SkewHermitian<T>> {
    let n = s.dim();
    if g.dim() != n {
        return Err(Error::Dimension("direction and group element differ in size".into()));
    }
    let sp = spectrum(s, tol)?;
    let g_inv = g.inverse()?;
    let rank = T::lit(tol.rank);
    let mut pieces: Vec<Subspace<T>> = Vec::with_capacity(sp.len());
    let mut below = Subspace::zero(n);
    for j in 0..sp.len() {
        let flag = Subspace::from_orthonormal(sp.ascending_basis(j)).image(&g_inv, rank)?;
        let piece = below.complement().intersect(&flag, rank)?;
        if piece.dim() != sp.multiplicities[j] {
            return Err(Error::DegenerateFiltration(format!(
                "piece {} has dimension {} but the eigenspace has dimension {}",
                j,
                piece.dim(),
                sp.multiplicities[j]
            )));
        }
        below = flag;
        pieces.push(piece);
    }
    let mut h = ComplexMatrix::zeros(n, n);
    let mut basis = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    for (piece, &lambda) in pieces.iter().zip(&sp.values) {
        h += piece.projector().map(|z| z * lambda);
        basis.columns_mut(col, piece.dim()).copy_from(piece.basis());
        col += piece.dim();
    }
    let gram = basis.adjoint() * &basis - ComplexMatrix::identity(n, n);
    if frobenius(&gram) > T::lit(1e-6).max(T::eps().sqrt()) {
        return Err(Error::DegenerateFiltration(format!(
            "pieces fail to be orthogonal (Gram defect {})",
            frobenius(&gram)
        )));
    }
    Ok(SkewHermitian::from_hermitian(&h))
}

/// `τ^{-1}·log(exp(iτs)·g)` through the Cartan logarithm.
///
/// The product is never formed: `g*·exp(iτs)` is decomposed with the graded
/// polar algorithm, so large `τ` stays accurate.
pub fn boundary_action_limit<T: Real>(s: &SkewHermitian<T>, g: &GroupElement<T>, tau: T) -> Result<SkewHermitian<T>> {
    if !(tau > T::zero()) {
        return Err(Error::Invalid("limit parameter must be positive".into()));
    }
    if g.dim() != s.dim() {
        return Err(Error::Dimension("direction and group element differ in size".into()));
    }
    // g* e^{iτs} = k e^{iu}  ⇒  e^{iτs} g = k* e^{i Ad(k) u}.
    let cp = polar_graded(&g.matrix().adjoint(), &s.scaled(tau))?;
    Ok(cp.u.conjugate(&cp.k).scaled(T::one() / tau))
}

/// Result of the extrapolated limit oracle.
#[derive(Debug, Clone)]
pub struct LimitEstimate<T: Real> {
    pub value: SkewHermitian<T>,
    /// Difference between the two Richardson estimates on the ladder.
    pub error: T,
}

/// Richardson extrapolation of [`boundary_action_limit`] over `τ ∈ {τ₀, 2τ₀, 4τ₀}`.
///
/// The Cartan logarithm approaches `τ·(s·g) + C` with an exponentially small
/// remainder, so `2f(2τ) − f(τ)` cancels the `C/τ` term.
pub fn boundary_action_extrapolated<T: Real>(
    s: &SkewHermitian<T>,
    g: &GroupElement<T>,
    tau0: T,
) -> Result<LimitEstimate<T>> {
    let two = T::lit(2.0);
    let f1 = boundary_action_limit(s, g, tau0)?;
    let f2 = boundary_action_limit(s, g, tau0 * two)?;
    let f4 = boundary_action_limit(s, g, tau0 * two * two)?;
    let r1 = f2.scaled(two).sub(&f1);
    let r2 = f4.scaled(two).sub(&f2);
    let error = r2.sub(&r1).norm();
    Ok(LimitEstimate { value: r2, error })
}

/// Whether `g` lies in the parabolic subgroup `P_s`, i.e. whether
/// `exp(its) g exp(−its)` stays bounded as `t → ∞`.
///
/// In the ascending eigenbasis of `is` this is block upper-triangularity:
/// every block `g_jk` with `λ_j > λ_k` has norm at most `tol·‖g‖`.
pub fn parabolic_contains<T: Real>(s: &SkewHermitian<T>, g: &GroupElement<T>, tol: T, tols: &Tolerances) -> Result<bool> {
    if g.dim() != s.dim() {
        return Err(Error::Dimension("direction and group element differ in size".into()));
    }
    let sp = spectrum(s, tols)?;
    let q = &sp.basis;
    let h = q.adjoint() * g.matrix() * q;
    let bound = tol * frobenius(g.matrix());
    for j in 0..sp.len() {
        for k in 0..j {
            let block = h.view((sp.offset(j), sp.offset(k)), (sp.multiplicities[j], sp.multiplicities[k]));
            let nrm = block.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            if nrm > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
