use super::{frobenius, jacobi_svd, ComplexMatrix, GroupElement};
use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// Linear subspace of `C^n`, stored as an orthonormal basis (`n×d`).
#[derive(Debug, Clone)]
pub struct Subspace<T: Real> {
    basis: ComplexMatrix<T>,
}

/// Orthonormal basis of the column span, keeping singular values above
/// `rank_tol·σ_max`.
fn orth<T: Real>(m: &ComplexMatrix<T>, rank_tol: T) -> ComplexMatrix<T> {
    let (n, k) = m.shape();
    if k == 0 || n == 0 {
        return ComplexMatrix::zeros(n, 0);
    }
    // One-sided Jacobi needs at least as many rows as columns; for wide input
    // the left singular vectors of `m` are the right ones of `m*`.
    let wide = k > n;
    let svd = if wide { jacobi_svd(&m.adjoint()) } else { jacobi_svd(m) };
    let Ok(svd) = svd else {
        return ComplexMatrix::zeros(n, 0);
    };
    let vectors = if wide { &svd.v } else { &svd.u };
    let smax = svd.sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if smax == T::zero() {
        return ComplexMatrix::zeros(n, 0);
    }
    let keep: Vec<usize> = (0..svd.sigma.len()).filter(|&j| svd.sigma[j] > rank_tol * smax).collect();
    let mut out = ComplexMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &vectors.column(src));
    }
    out
}

impl<T: Real> Subspace<T> {
    /// Span of the columns of `m`.
    pub fn span(m: &ComplexMatrix<T>, rank_tol: T) -> Self {
        Self { basis: orth(m, rank_tol) }
    }

    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(basis: ComplexMatrix<T>) -> Self {
        Self { basis }
    }

    pub fn zero(n: usize) -> Self {
        Self { basis: ComplexMatrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: ComplexMatrix::identity(n, n) }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut b = ComplexMatrix::zeros(n, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            b[(i, col)] = re(T::one());
        }
        Self { basis: b }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &ComplexMatrix<T> {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::Dimension(format!(
                "subspaces of C^{} and C^{}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// `U ∩ V` from the null space of the stacked matrix `[I − P_U; I − P_V]`.
    pub fn intersect(&self, other: &Self, rank_tol: T) -> Result<Self> {
        self.check_same(other)?;
        let n = self.ambient();
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(n));
        }
        let id = ComplexMatrix::<T>::identity(n, n);
        let mut stacked = ComplexMatrix::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&(&id - self.projector()));
        stacked.view_mut((n, 0), (n, n)).copy_from(&(&id - other.projector()));
        let svd = jacobi_svd(&stacked)?;
        let smax = svd.sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
        if smax == T::zero() {
            return Ok(Self::full(n));
        }
        let null: Vec<usize> = (0..n).filter(|&j| svd.sigma[j] <= rank_tol * smax).collect();
        let mut basis = ComplexMatrix::zeros(n, null.len());
        for (dst, &src) in null.iter().enumerate() {
            basis.set_column(dst, &svd.v.column(src));
        }
        Ok(Self { basis })
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> Self {
        let n = self.ambient();
        if self.dim() == 0 {
            return Self::full(n);
        }
        if self.dim() == n {
            return Self::zero(n);
        }
        let p = ComplexMatrix::<T>::identity(n, n) - self.projector();
        Self { basis: orth(&p, T::lit(0.5)) }
    }

    /// `g(U)`, re-orthonormalized.
    pub fn image(&self, g: &GroupElement<T>, rank_tol: T) -> Result<Self> {
        if g.dim() != self.ambient() {
            return Err(Error::Dimension("group element and subspace differ in size".into()));
        }
        Ok(Self { basis: orth(&(g.matrix() * &self.basis), rank_tol) })
    }

    /// `U + V`.
    pub fn sum(&self, other: &Self, rank_tol: T) -> Result<Self> {
        self.check_same(other)?;
        let n = self.ambient();
        let mut joined = ComplexMatrix::zeros(n, self.dim() + other.dim());
        joined.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        joined.view_mut((0, self.dim()), (n, other.dim())).copy_from(&other.basis);
        Ok(Self { basis: orth(&joined, rank_tol) })
    }

    /// Projector distance `‖P_U − P_V‖_F`.
    pub fn distance(&self, other: &Self) -> T {
        frobenius(&(self.projector() - other.projector()))
    }

    pub fn contains(&self, v: &ComplexMatrix<T>, tol: T) -> bool {
        let resid = v - self.projector() * v;
        frobenius(&resid) <= tol * (T::one() + frobenius(v))
    }
}
