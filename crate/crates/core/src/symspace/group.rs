use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, GroupElement, SkewHermitian};
use crate::random::{gaussian, haar_unitary, random_gl};
use crate::scalar::{cplx, re, Real};

/// Which compact group `K ⊂ U(n)` a symmetric space is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// `U(n)`, complexification `GL(n, C)`.
    Unitary,
    /// `SU(n)`, complexification `SL(n, C)`.
    SpecialUnitary,
    /// The diagonal torus of `U(n)`, complexification `(C*)^n`.
    Torus,
}

/// A compact matrix group together with a Frobenius-orthonormal basis of its
/// Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactGroup {
    pub kind: GroupKind,
    pub n: usize,
}

impl CompactGroup {
    pub fn unitary(n: usize) -> Self {
        Self { kind: GroupKind::Unitary, n }
    }

    pub fn special_unitary(n: usize) -> Self {
        Self { kind: GroupKind::SpecialUnitary, n }
    }

    pub fn torus(n: usize) -> Self {
        Self { kind: GroupKind::Torus, n }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, GroupKind::Torus) || self.n <= 1
    }

    /// Real dimension of the Lie algebra `k`.
    pub fn algebra_dim(&self) -> usize {
        match self.kind {
            GroupKind::Unitary => self.n * self.n,
            GroupKind::SpecialUnitary => self.n * self.n - 1,
            GroupKind::Torus => self.n,
        }
    }

    /// Orthonormal basis of `k`: diagonal elements first, then the
    /// off-diagonal pairs `(E_ab − E_ba)/√2`, `i(E_ab + E_ba)/√2` for `a < b`.
    pub fn basis<T: Real>(&self) -> Vec<SkewHermitian<T>> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.algebra_dim());
        match self.kind {
            GroupKind::Unitary | GroupKind::Torus => {
                for j in 0..n {
                    let mut d = vec![T::zero(); n];
                    d[j] = T::one();
                    out.push(SkewHermitian::from_imag_diagonal(&d));
                }
            }
            GroupKind::SpecialUnitary => {
                for k in 1..n {
                    let kf = T::from_usize(k).unwrap();
                    let norm = (kf * (kf + T::one())).sqrt();
                    let mut d = vec![T::zero(); n];
                    for x in d.iter_mut().take(k) {
                        *x = T::one() / norm;
                    }
                    d[k] = -kf / norm;
                    out.push(SkewHermitian::from_imag_diagonal(&d));
                }
            }
        }
        if self.kind != GroupKind::Torus {
            let h = T::one() / T::lit(2.0).sqrt();
            for a in 0..n {
                for b in (a + 1)..n {
                    let mut m = ComplexMatrix::zeros(n, n);
                    m[(a, b)] = re(h);
                    m[(b, a)] = re(-h);
                    out.push(SkewHermitian::project(&m));
                    let mut m = ComplexMatrix::zeros(n, n);
                    m[(a, b)] = cplx(T::zero(), h);
                    m[(b, a)] = cplx(T::zero(), h);
                    out.push(SkewHermitian::project(&m));
                }
            }
        }
        out
    }

    /// Coordinates of `s` in [`CompactGroup::basis`].
    pub fn coords<T: Real>(&self, s: &SkewHermitian<T>) -> Vec<T> {
        self.basis::<T>().iter().map(|b| b.inner(s)).collect()
    }

    pub fn from_coords<T: Real>(&self, c: &[T]) -> Result<SkewHermitian<T>> {
        let basis = self.basis::<T>();
        if c.len() != basis.len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for an algebra of dimension {}",
                c.len(),
                basis.len()
            )));
        }
        let mut s = SkewHermitian::zeros(self.n);
        for (b, &x) in basis.iter().zip(c) {
            s = s.add(&b.scaled(x));
        }
        Ok(s)
    }

    /// Orthogonal projection of `s ∈ u(n)` onto `k`.
    pub fn project<T: Real>(&self, s: &SkewHermitian<T>) -> SkewHermitian<T> {
        match self.kind {
            GroupKind::Unitary => s.clone(),
            _ => self.from_coords(&self.coords(s)).expect("matching dimension"),
        }
    }

    /// Whether `s ∈ u(n)` lies in `k` up to `tol·(1 + ‖s‖)`.
    pub fn contains_algebra<T: Real>(&self, s: &SkewHermitian<T>, tol: T) -> bool {
        s.dim() == self.n && s.sub(&self.project(s)).norm() <= tol * (T::one() + s.norm())
    }

    /// Uniformly distributed unit vector of `k`.
    pub fn random_unit<T: Real>(&self, rng: &mut (impl Rng + ?Sized)) -> SkewHermitian<T> {
        loop {
            let c: Vec<T> = (0..self.algebra_dim()).map(|_| gaussian::<T>(rng)).collect();
            if let Some(s) = self.from_coords(&c).expect("matching dimension").normalized() {
                return s;
            }
        }
    }

    /// Haar-distributed element of `K`.
    pub fn haar<T: Real>(&self, rng: &mut (impl Rng + ?Sized)) -> ComplexMatrix<T> {
        match self.kind {
            GroupKind::Unitary => haar_unitary(rng, self.n),
            GroupKind::SpecialUnitary => {
                let k = haar_unitary::<T>(rng, self.n);
                normalize_det(k)
            }
            GroupKind::Torus => {
                let mut k = ComplexMatrix::zeros(self.n, self.n);
                for j in 0..self.n {
                    let a = T::two_pi() * T::lit(rng.gen::<f64>());
                    k[(j, j)] = cplx(a.cos(), a.sin());
                }
                k
            }
        }
    }

    /// Random element `k·exp(i·spread·û)` of the complexification with `k`
    /// Haar and `û` a uniform unit vector of `k`.
    pub fn random_element<T: Real>(&self, rng: &mut (impl Rng + ?Sized), spread: T) -> GroupElement<T> {
        match self.kind {
            GroupKind::Unitary => random_gl(rng, self.n, spread),
            _ => {
                let k = self.haar::<T>(rng);
                let u = self.random_unit::<T>(rng);
                let p = u.exp_positive(spread).expect("bounded exponent");
                GroupElement::new(k * p).expect("finite")
            }
        }
    }

    /// Whether `g` lies in the complexified group up to `tol`.
    pub fn contains_element<T: Real>(&self, g: &GroupElement<T>, tol: T) -> bool {
        if g.dim() != self.n {
            return false;
        }
        let m = g.matrix();
        let scale = T::one() + crate::matcore::frobenius(m);
        match self.kind {
            GroupKind::Unitary => true,
            GroupKind::SpecialUnitary => {
                let d = m.determinant() - re(T::one());
                crate::scalar::abs_c(d) <= tol * scale
            }
            GroupKind::Torus => {
                let mut off = T::zero();
                for i in 0..self.n {
                    for j in 0..self.n {
                        if i != j {
                            off += m[(i, j)].norm_sqr();
                        }
                    }
                }
                off.sqrt() <= tol * scale
            }
        }
    }

    /// Whether `v` lies in the adjoint orbit `Ad(K)·u`.
    ///
    /// For `U(n)` and `SU(n)` this is equality of the spectra of `iu` and
    /// `iv`; for the torus the orbit is a single point.
    pub fn same_orbit<T: Real>(&self, u: &SkewHermitian<T>, v: &SkewHermitian<T>, tol: T) -> Result<bool> {
        if u.dim() != v.dim() {
            return Err(Error::Dimension("elements of different algebras".into()));
        }
        if self.is_abelian() {
            return Ok(u.sub(v).norm() <= tol * (T::one() + u.norm()));
        }
        let a = crate::matcore::herm_eig(&u.hermitian(), T::lit(1e-6), T::zero())?;
        let b = crate::matcore::herm_eig(&v.hermitian(), T::lit(1e-6), T::zero())?;
        Ok(a.raw.iter().zip(&b.raw).all(|(x, y)| (*x - *y).abs() <= tol * (T::one() + x.abs())))
    }
}

/// Rescales an invertible matrix to determinant one.
pub fn normalize_det<T: Real>(m: ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = m.nrows();
    if n == 0 {
        return m;
    }
    let d = m.determinant();
    let r = crate::scalar::abs_c(d).powf(T::one() / T::from_usize(n).unwrap());
    let a = crate::scalar::arg_c(d) / T::from_usize(n).unwrap();
    let f = cplx(a.cos(), -a.sin()) / r;
    m.map(|z| z * f)
}
