//! Dense complex linear algebra: Hermitian spectra, matrix exponentials,
//! Cartan (polar) decompositions and subspace arithmetic.

mod eig;
mod expm;
mod jacobi;
mod polar;
mod subspace;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, imag_unit, re, Real};

pub use eig::{default_cluster_tol, herm_apply, herm_eig, SpectralData};
pub use expm::mat_exp;
pub use jacobi::{jacobi_svd, JacobiSvd};
pub use polar::{polar_cartan, polar_graded, unitary_log, CartanPair};
pub use subspace::Subspace;

/// Dense complex matrix.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;

pub fn frobenius<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `‖A − A*‖_F`.
pub fn hermitian_defect<T: Real>(m: &ComplexMatrix<T>) -> T {
    frobenius(&(m - m.adjoint()))
}

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    ComplexMatrix::identity(n, n)
}

pub(crate) fn scale<T: Real>(m: &ComplexMatrix<T>, s: T) -> ComplexMatrix<T> {
    m.map(|z| z * s)
}

pub(crate) fn all_finite<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Real Frobenius inner product `Re tr(A B*)`.
pub fn frobenius_inner<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc + x.re * y.re + x.im * y.im)
}

/// Element of `u(n)`: an `n×n` matrix with `A* = −A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewHermitian<T: Real> {
    m: ComplexMatrix<T>,
}

impl<T: Real> SkewHermitian<T> {
    /// Validates `‖A + A*‖_F ≤ sym_tol·(1 + ‖A‖_F)` and returns the exact
    /// skew-Hermitian part.
    pub fn new(m: ComplexMatrix<T>, sym_tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        if !all_finite(&m) {
            return Err(Error::Invalid("non-finite entry".into()));
        }
        let defect = frobenius(&(&m + m.adjoint()));
        if defect > sym_tol * (T::one() + frobenius(&m)) {
            return Err(Error::NotSkewHermitian { asymmetry: defect.as_f64() });
        }
        Ok(Self::project(&m))
    }

    /// Skew-Hermitian part `(A − A*)/2` of any square matrix.
    pub fn project(m: &ComplexMatrix<T>) -> Self {
        let half = T::lit(0.5);
        Self { m: (m - m.adjoint()).map(|z| z * half) }
    }

    /// The element `s` with `i·s = h`, i.e. `s = −i h` for Hermitian `h`.
    pub fn from_hermitian(h: &ComplexMatrix<T>) -> Self {
        Self::project(&h.map(|z| -imag_unit::<T>() * z))
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: ComplexMatrix::zeros(n, n) }
    }

    /// `diag(i·d_1, …, i·d_n)`; the Hermitian matrix `i·s` is `diag(−d)`.
    pub fn from_imag_diagonal(d: &[T]) -> Self {
        let n = d.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, &x) in d.iter().enumerate() {
            m[(j, j)] = cplx(T::zero(), x);
        }
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.m
    }

    /// The Hermitian matrix `i·s`.
    pub fn hermitian(&self) -> ComplexMatrix<T> {
        self.m.map(|z| imag_unit::<T>() * z)
    }

    pub fn norm(&self) -> T {
        frobenius(&self.m)
    }

    pub fn inner(&self, other: &Self) -> T {
        frobenius_inner(&self.m, &other.m)
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { m: scale(&self.m, a) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }

    pub fn neg(&self) -> Self {
        Self { m: -&self.m }
    }

    /// `s/‖s‖`, or `None` for the zero element.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() {
            Some(self.scaled(T::one() / n))
        } else {
            None
        }
    }

    /// `[s, t] = st − ts`.
    pub fn bracket(&self, other: &Self) -> Self {
        Self::project(&(&self.m * &other.m - &other.m * &self.m))
    }

    /// `Ad(k)(s) = k s k*` for unitary `k`.
    pub fn conjugate(&self, k: &ComplexMatrix<T>) -> Self {
        Self::project(&(k * &self.m * k.adjoint()))
    }

    /// `exp(t·s)`, a unitary matrix.
    pub fn exp_unitary(&self, t: T) -> Result<ComplexMatrix<T>> {
        // exp(t s) = exp(−i t (i s)).
        let h = self.hermitian();
        herm_apply(&h, |x| {
            let a = -t * x;
            cplx(a.cos(), a.sin())
        })
    }

    /// `exp(i·t·s)`, a positive definite Hermitian matrix.
    pub fn exp_positive(&self, t: T) -> Result<ComplexMatrix<T>> {
        let h = self.hermitian();
        let out = herm_apply(&h, |x| re((t * x).exp()))?;
        if !all_finite(&out) {
            return Err(Error::Overflow("exp(i t s)"));
        }
        Ok(out)
    }
}

/// Element of `GL(n, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<T: Real> {
    m: ComplexMatrix<T>,
}

impl<T: Real> GroupElement<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        if !all_finite(&m) {
            return Err(Error::Invalid("non-finite entry".into()));
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { m: &self.m * &other.m }
    }

    pub fn inverse(&self) -> Result<Self> {
        self.m
            .clone()
            .try_inverse()
            .filter(all_finite)
            .map(|m| Self { m })
            .ok_or(Error::Singular { cond: f64::INFINITY })
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// 2-norm condition number from the singular values.
    pub fn condition_number(&self) -> T {
        let Ok(svd) = jacobi_svd(&self.m) else {
            return T::max_value().unwrap();
        };
        let sv = svd.sigma;
        let max = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let min = sv.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
        if min > T::zero() {
            max / min
        } else {
            T::max_value().unwrap()
        }
    }

    /// `exp(i·t·s)` for `s ∈ u(n)`.
    pub fn exp_i(s: &SkewHermitian<T>, t: T) -> Result<Self> {
        Ok(Self { m: s.exp_positive(t)? })
    }
}
