use nalgebra::Schur;

use super::{all_finite, herm_eig, jacobi_svd, ComplexMatrix, SkewHermitian};
use crate::error::{Error, Result};
use crate::matcore::GroupElement;
use crate::scalar::{arg_c, cplx, re, Real};

/// Cartan decomposition `g = k·exp(i u)` with `k` unitary and `u ∈ u(n)`.
///
/// `u` is the logarithm of `g` in the sense of the symmetric space `K\G`:
/// the class `[g]` lies at distance `‖u‖_F` from the base point.
#[derive(Debug, Clone)]
pub struct CartanPair<T: Real> {
    pub k: ComplexMatrix<T>,
    pub u: SkewHermitian<T>,
}

impl<T: Real> CartanPair<T> {
    pub fn identity(n: usize) -> Self {
        Self { k: ComplexMatrix::identity(n, n), u: SkewHermitian::zeros(n) }
    }

    /// `k·exp(i u)` as a matrix. May overflow for very large `u`.
    pub fn to_matrix(&self) -> Result<ComplexMatrix<T>> {
        Ok(&self.k * self.u.exp_positive(T::one())?)
    }

    pub fn to_group(&self) -> Result<GroupElement<T>> {
        GroupElement::new(self.to_matrix()?)
    }

    /// Distance from `[1]` to `[g]` in `K\G`.
    pub fn distance_from_origin(&self) -> T {
        self.u.norm()
    }

    /// Cartan form of `exp(i a)·g` for `a ∈ u(n)`, stable for any size of `u`.
    pub fn left_mul_exp_i(&self, a: &SkewHermitian<T>) -> Result<Self> {
        // exp(i a) k = k exp(i Ad(k*) a).
        let a_k = a.conjugate(&self.k.adjoint());
        let b = a_k.exp_positive(T::one())?;
        let inner = polar_graded(&b, &self.u)?;
        Ok(Self { k: &self.k * inner.k, u: inner.u })
    }

    /// Cartan form of `k'·g` for unitary `k'`.
    pub fn left_mul_unitary(&self, k: &ComplexMatrix<T>) -> Self {
        Self { k: k * &self.k, u: self.u.clone() }
    }
}

/// Cartan decomposition through the principal logarithm of `g*g`:
/// `u = −i·log(g*g)/2`, `k = g·exp(−i u)`.
pub fn polar_cartan<T: Real>(g: &GroupElement<T>, cond_max: T) -> Result<CartanPair<T>> {
    let m = g.matrix();
    let n = m.nrows();
    let p = m.adjoint() * m;
    let sp = herm_eig(&p, T::lit(1e-6), T::zero())?;
    let lo = sp.raw.first().copied().unwrap_or(T::one());
    let hi = sp.raw.last().copied().unwrap_or(T::one());
    if lo <= T::zero() {
        return Err(Error::Singular { cond: f64::INFINITY });
    }
    let cond = (hi / lo).sqrt();
    if cond > cond_max || !cond.is_finite() {
        return Err(Error::Singular { cond: cond.as_f64() });
    }
    let q = &sp.basis;
    let mut log_half = ComplexMatrix::zeros(n, n);
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    for (j, &x) in sp.raw.iter().enumerate() {
        log_half[(j, j)] = re(x.ln() * T::lit(0.5));
        inv_sqrt[(j, j)] = re(T::one() / x.sqrt());
    }
    let iu = q * log_half * q.adjoint();
    let k = m * q * inv_sqrt * q.adjoint();
    Ok(CartanPair { k, u: SkewHermitian::from_hermitian(&iu) })
}

/// Cartan decomposition of `b·exp(i u)` for well-conditioned `b` and
/// arbitrarily large `u`.
///
/// Writes `i u = W diag(θ) W*` and runs a one-sided Jacobi SVD on the
/// column-graded matrix `b W diag(e^θ)`, so the result keeps relative accuracy
/// far beyond the range where `(b e^{iu})*(b e^{iu})` can be formed.
pub fn polar_graded<T: Real>(b: &ComplexMatrix<T>, u: &SkewHermitian<T>) -> Result<CartanPair<T>> {
    let n = b.nrows();
    if u.dim() != n || !b.is_square() {
        return Err(Error::Dimension("polar_graded operands differ in size".into()));
    }
    let sp = herm_eig(&u.hermitian(), T::lit(1e-6), T::zero())?;
    let w = &sp.basis;
    let (lo, hi) = match (sp.raw.first(), sp.raw.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok(CartanPair::identity(0)),
    };
    let shift = (lo + hi) * T::lit(0.5);
    let mut y = b * w;
    for (j, &theta) in sp.raw.iter().enumerate() {
        let f = (theta - shift).exp();
        for i in 0..n {
            y[(i, j)] *= f;
        }
    }
    if !all_finite(&y) {
        return Err(Error::Overflow("polar_graded"));
    }
    let svd = jacobi_svd(&y)?;
    if svd.sigma.iter().any(|&s| s <= T::zero() || !s.is_finite()) {
        return Err(Error::Singular { cond: f64::INFINITY });
    }
    let wv = w * &svd.v;
    let mut logs = ComplexMatrix::zeros(n, n);
    for (j, &s) in svd.sigma.iter().enumerate() {
        logs[(j, j)] = re(s.ln() + shift);
    }
    let iu = &wv * logs * wv.adjoint();
    let k = &svd.u * wv.adjoint();
    Ok(CartanPair { k, u: SkewHermitian::from_hermitian(&iu) })
}

/// Logarithm of a unitary matrix with eigenvalue angles in `(−π, π]`.
pub fn unitary_log<T: Real>(k: &ComplexMatrix<T>) -> Result<SkewHermitian<T>> {
    let n = k.nrows();
    if n == 0 {
        return Ok(SkewHermitian::zeros(0));
    }
    let schur = Schur::try_new(k.clone(), T::eps(), 200 * n.max(10)).ok_or(Error::EigFailure)?;
    let (q, t) = schur.unpack();
    let mut d = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        d[(j, j)] = cplx(T::zero(), arg_c(t[(j, j)]));
    }
    let log = &q * d * q.adjoint();
    Ok(SkewHermitian::project(&log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{frobenius, mat_exp};
    use crate::random::{haar_unitary, random_gl, random_skew, seeded};

    #[test]
    fn unitary_input_has_zero_log() {
        let mut rng = seeded(1);
        let k = haar_unitary::<f64>(&mut rng, 3);
        let cp = polar_cartan(&GroupElement::new(k.clone()).unwrap(), 1e12).unwrap();
        assert!(cp.u.norm() < 1e-12);
        assert!(frobenius(&(cp.k - k)) < 1e-12);
    }

    #[test]
    fn positive_input_has_identity_unitary() {
        let mut rng = seeded(2);
        let u = random_skew::<f64>(&mut rng, 3);
        let g = GroupElement::exp_i(&u, 1.0).unwrap();
        let cp = polar_cartan(&g, 1e12).unwrap();
        assert!(frobenius(&(cp.k - ComplexMatrix::identity(3, 3))) < 1e-10);
        assert!(cp.u.sub(&u).norm() < 1e-10);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = seeded(3);
        for n in 1..6 {
            let g = random_gl::<f64>(&mut rng, n, 1.5);
            let cp = polar_cartan(&g, 1e12).unwrap();
            let back = cp.to_matrix().unwrap();
            assert!(frobenius(&(back - g.matrix())) <= 1e-9 * frobenius(g.matrix()));
            let kk = cp.k.adjoint() * &cp.k;
            assert!(frobenius(&(kk - ComplexMatrix::identity(n, n))) < 1e-10);
        }
    }

    #[test]
    fn singular_is_refused() {
        let m = ComplexMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![re(1.0), re(1e-14)]));
        let err = polar_cartan(&GroupElement::new(m).unwrap(), 1e12).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn graded_matches_plain_in_range() {
        let mut rng = seeded(4);
        for n in 2..5 {
            let b = random_gl::<f64>(&mut rng, n, 1.0);
            let u = random_skew::<f64>(&mut rng, n).scaled(0.5);
            let m = b.matrix() * u.exp_positive(1.0).unwrap();
            let plain = polar_cartan(&GroupElement::new(m.clone()).unwrap(), 1e12).unwrap();
            let graded = polar_graded(b.matrix(), &u).unwrap();
            assert!(plain.u.sub(&graded.u).norm() < 1e-9);
            assert!(frobenius(&(&plain.k - &graded.k)) < 1e-9);
            let back = graded.to_matrix().unwrap();
            assert!(frobenius(&(back - &m)) < 1e-12 * frobenius(&m));
        }
    }

    #[test]
    fn graded_handles_huge_exponents() {
        // b = 1: the Cartan form of exp(i u) is (1, u) for any size of u.
        let mut rng = seeded(5);
        let u = random_skew::<f64>(&mut rng, 3).scaled(300.0);
        let cp = polar_graded(&ComplexMatrix::identity(3, 3), &u).unwrap();
        assert!(cp.u.sub(&u).norm() < 1e-9 * u.norm());
    }

    #[test]
    fn unitary_log_inverts_exp() {
        let mut rng = seeded(6);
        let a = random_skew::<f64>(&mut rng, 4).scaled(0.5);
        let k = mat_exp(a.matrix()).unwrap();
        let back = unitary_log(&k).unwrap();
        assert!(back.sub(&a).norm() < 1e-10);
    }

    #[test]
    fn single_precision_round_trip() {
        let mut rng = seeded(8);
        let g = random_gl::<f32>(&mut rng, 3, 1.0);
        let cp = polar_cartan(&g, 1e6).unwrap();
        let back = cp.to_matrix().unwrap();
        assert!(frobenius(&(back - g.matrix())) <= 1e-4 * frobenius(g.matrix()));
    }
}
