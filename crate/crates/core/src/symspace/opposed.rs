use crate::error::{Error, Result};
use crate::matcore::{frobenius, herm_eig, ComplexMatrix, GroupElement, SkewHermitian, Subspace};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::boundary::{boundary_action_raw, parabolic_contains, spectrum, BoundaryPoint};
use super::group::{normalize_det, CompactGroup, GroupKind};

/// Ascending filtration `W^0 ⊂ … ⊂ W^r = C^N` by the eigenspaces of a
/// Hermitian matrix: `W^j` is the sum of the eigenspaces for the `j + 1`
/// smallest eigenvalues.
#[derive(Debug, Clone)]
pub struct Filtration<T: Real> {
    pub spaces: Vec<Subspace<T>>,
    /// Eigenvalue attached to each step, ascending.
    pub labels: Vec<T>,
    /// Orthonormal basis of each eigenspace.
    pub graded: Vec<Subspace<T>>,
}

impl<T: Real> Filtration<T> {
    pub fn ascending(h: &ComplexMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let cluster = T::lit(tol.cluster) * (T::one() + frobenius(h));
        let sp = herm_eig(h, T::lit(tol.sym), cluster)?;
        let spaces = (0..sp.len()).map(|j| Subspace::from_orthonormal(sp.ascending_basis(j))).collect();
        let graded = (0..sp.len()).map(|j| Subspace::from_orthonormal(sp.cluster_basis(j))).collect();
        Ok(Self { spaces, labels: sp.values, graded })
    }

    /// Number of steps minus one (`r`).
    pub fn length(&self) -> usize {
        self.labels.len().saturating_sub(1)
    }

    pub fn ambient(&self) -> usize {
        self.spaces.last().map(|s| s.ambient()).unwrap_or(0)
    }
}

/// Evidence that two filtrations are opposed: the pieces
/// `E_p = W_a^p ∩ W_b^{r−p}` and their dimensions.
#[derive(Debug, Clone)]
pub struct OpposednessCertificate<T: Real> {
    /// Shared spectrum `λ_0 < … < λ_r` of `ia` and `−ib`.
    pub spectrum: Vec<T>,
    pub pieces: Vec<Subspace<T>>,
    pub dims: Vec<usize>,
    pub ambient: usize,
    /// Numerical rank of the concatenated piece bases.
    pub rank: usize,
    /// Whether the test ran on `gl(n)` through the adjoint action.
    pub adjoint: bool,
}

impl<T: Real> OpposednessCertificate<T> {
    /// `Σ dim E_p = N` and the pieces span `C^N`.
    pub fn is_complete(&self) -> bool {
        self.dims.iter().sum::<usize>() == self.ambient && self.rank == self.ambient
    }
}

/// `i·ad(u)` on `gl(n, C)` in the column-major basis: `I ⊗ iu − (iu)ᵀ ⊗ I`.
pub fn ad_hermitian<T: Real>(u: &SkewHermitian<T>) -> ComplexMatrix<T> {
    let n = u.dim();
    let h = u.hermitian();
    let id = ComplexMatrix::<T>::identity(n, n);
    id.kronecker(&h) - h.transpose().kronecker(&id)
}

/// Filtration test for Hermitian `a`, `b`: same spectrum for `a` and `−b`,
/// and `C^N = ⊕_p W_a^p ∩ W_b^{r−p}`.
pub fn filtrations_opposed<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    adjoint: bool,
    tol: &Tolerances,
) -> Result<(bool, Option<OpposednessCertificate<T>>)> {
    let fa = Filtration::ascending(a, tol)?;
    let fb = Filtration::ascending(b, tol)?;
    let scale = T::one() + frobenius(a).max(frobenius(b));
    let vtol = T::lit(tol.cluster) * scale * T::lit(10.0);
    let matches = fa.labels.len() == fb.labels.len()
        && fa.graded.iter().zip(fb.graded.iter().rev()).all(|(x, y)| x.dim() == y.dim())
        && fa.labels.iter().zip(fb.labels.iter().rev()).all(|(x, y)| (*x + *y).abs() <= vtol);
    if !matches {
        return Ok((false, None));
    }
    let r = fa.length();
    let n = fa.ambient();
    let rank_tol = T::lit(tol.rank);
    let mut pieces = Vec::with_capacity(r + 1);
    for p in 0..=r {
        pieces.push(fa.spaces[p].intersect(&fb.spaces[r - p], rank_tol)?);
    }
    let dims: Vec<usize> = pieces.iter().map(|e| e.dim()).collect();
    let total: usize = dims.iter().sum();
    let mut joined = ComplexMatrix::zeros(n, total);
    let mut col = 0;
    for e in &pieces {
        joined.columns_mut(col, e.dim()).copy_from(e.basis());
        col += e.dim();
    }
    let rank = Subspace::span(&joined, T::lit(1e-8).max(rank_tol)).dim();
    let cert = OpposednessCertificate { spectrum: fa.labels.clone(), pieces, dims, ambient: n, rank, adjoint };
    Ok((cert.is_complete(), Some(cert)))
}

/// Whether `u, v ∈ u(n)` are opposed.
///
/// With `use_adjoint` the test follows the definition for elements of the Lie
/// algebra: `−v` must lie in the adjoint orbit of `u` (equal spectra of `iu`
/// and `−iv`), and `ad(u)`, `ad(v)` must be opposed endomorphisms of
/// `gl(n, C)`. Without it the filtration test runs in `C^n` directly.
pub fn opposed<T: Real>(
    u: &SkewHermitian<T>,
    v: &SkewHermitian<T>,
    use_adjoint: bool,
    tol: &Tolerances,
) -> Result<(bool, Option<OpposednessCertificate<T>>)> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension("opposedness of elements of different sizes".into()));
    }
    let su = spectrum(u, tol)?;
    let sv = spectrum(&v.neg(), tol)?;
    let vtol = T::lit(tol.cluster) * (T::one() + u.norm().max(v.norm())) * T::lit(10.0);
    if !su.same_spectrum(&sv, vtol) {
        return Ok((false, None));
    }
    if use_adjoint {
        filtrations_opposed(&ad_hermitian(u), &ad_hermitian(v), true, tol)
    } else {
        filtrations_opposed(&u.hermitian(), &v.hermitian(), false, tol)
    }
}

/// [`opposed`] for elements of the Lie algebra of `group`.
///
/// For a torus the adjoint action is trivial, so `u` and `v` are opposed
/// exactly when `v = −u`; no certificate pieces beyond the whole space exist.
pub fn opposed_in<T: Real>(
    group: &CompactGroup,
    u: &SkewHermitian<T>,
    v: &SkewHermitian<T>,
    tol: &Tolerances,
) -> Result<(bool, Option<OpposednessCertificate<T>>)> {
    if group.is_abelian() {
        let ok = group.same_orbit(u, &v.neg(), T::lit(tol.cluster) * T::lit(10.0))?;
        if !ok {
            return Ok((false, None));
        }
        let n = u.dim();
        let cert = OpposednessCertificate {
            spectrum: vec![T::zero()],
            pieces: vec![Subspace::full(n * n)],
            dims: vec![n * n],
            ambient: n * n,
            rank: n * n,
            adjoint: true,
        };
        return Ok((true, Some(cert)));
    }
    opposed(u, v, true, tol)
}

/// Whether `e_u` and `e_v` are the two ends of one geodesic.
pub fn geodesically_connected<T: Real>(
    group: &CompactGroup,
    u: &BoundaryPoint<T>,
    v: &BoundaryPoint<T>,
    tol: &Tolerances,
) -> Result<bool> {
    Ok(opposed_in(group, u.direction(), v.direction(), tol)?.0)
}

/// An element `h ∈ P_u` with `v·h = −u`.
///
/// Then `t ↦ [exp(itu)·h^{-1}]` tends to `e_u` as `t → +∞` and to `e_v` as
/// `t → −∞`. The element maps each eigenspace `V_p(u)` of `iu` onto the piece
/// `E_p = W_u^p ∩ W_v^{r−p}` of the defining representation.
pub fn connect_geodesic<T: Real>(
    group: &CompactGroup,
    u: &BoundaryPoint<T>,
    v: &BoundaryPoint<T>,
    tol: &Tolerances,
) -> Result<GroupElement<T>> {
    let n = u.dim();
    if v.dim() != n {
        return Err(Error::Dimension("boundary points of different spaces".into()));
    }
    let check = T::lit(1e-8);
    if group.is_abelian() {
        if u.direction().add(v.direction()).norm() <= check {
            return Ok(GroupElement::identity(n));
        }
        return Err(Error::ConnectFailure("torus directions are connected only to their antipodes".into()));
    }
    let (ok, cert) = opposed(u.direction(), v.direction(), false, tol)?;
    let cert = match (ok, cert) {
        (true, Some(c)) => c,
        _ => return Err(Error::ConnectFailure("the directions are not opposed".into())),
    };
    let fu = Filtration::ascending(&u.direction().hermitian(), tol)?;
    let mut h = ComplexMatrix::zeros(n, n);
    for (piece, eig) in cert.pieces.iter().zip(&fu.graded) {
        if piece.dim() != eig.dim() {
            return Err(Error::ConnectFailure("piece dimensions differ from eigenspace dimensions".into()));
        }
        h += piece.basis() * eig.basis().adjoint();
    }
    if group.kind == GroupKind::SpecialUnitary {
        h = normalize_det(h);
    }
    let h = GroupElement::new(h)?;
    if !parabolic_contains(u.direction(), &h, check, tol)? {
        return Err(Error::ConnectFailure("constructed element leaves the parabolic subgroup".into()));
    }
    let moved = boundary_action_raw(v.direction(), &h, tol)?;
    let defect = moved.add(u.direction()).norm();
    if defect > check {
        return Err(Error::ConnectFailure(format!("v·h misses −u by {}", defect.as_f64())));
    }
    Ok(h)
}
