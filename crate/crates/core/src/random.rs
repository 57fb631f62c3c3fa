//! Seeded random generators for matrices, group elements and test data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{ComplexMatrix, GroupElement, SkewHermitian};
use crate::scalar::{abs_c, cplx, Real};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<T: Real>(rng: &mut (impl Rng + ?Sized)) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Entries with independent standard complex Gaussian real and imaginary parts.
pub fn random_complex_matrix<T: Real>(rng: &mut (impl Rng + ?Sized), rows: usize, cols: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| cplx(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize) -> ComplexMatrix<T> {
    let a = random_complex_matrix::<T>(rng, n, n);
    (&a + a.adjoint()).map(|z| z * T::lit(0.5))
}

pub fn random_skew<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize) -> SkewHermitian<T> {
    SkewHermitian::project(&random_complex_matrix::<T>(rng, n, n))
}

/// Uniform on the unit sphere of `u(n)`.
pub fn random_unit_skew<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize) -> SkewHermitian<T> {
    loop {
        if let Some(s) = random_skew::<T>(rng, n).normalized() {
            return s;
        }
    }
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize) -> ComplexMatrix<T> {
    let a = random_complex_matrix::<T>(rng, n, n);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let nd = abs_c(d);
        let phase = if nd > T::zero() { d / nd } else { cplx(T::one(), T::zero()) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `k·exp(i·spread·û)` with Haar `k` and uniform unit `û`; the condition
/// number is at most `exp(√2·spread)`.
pub fn random_gl<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize, spread: T) -> GroupElement<T> {
    let k = haar_unitary::<T>(rng, n);
    let u = random_unit_skew::<T>(rng, n);
    let p = u.exp_positive(spread).expect("bounded exponent");
    GroupElement::new(k * p).expect("finite")
}

/// Unit vector in `C^n`.
pub fn random_unit_vector<T: Real>(rng: &mut (impl Rng + ?Sized), n: usize) -> ComplexMatrix<T> {
    let v = random_complex_matrix::<T>(rng, n, 1);
    let nrm = crate::matcore::frobenius(&v);
    v.map(|z| z / nrm)
}

/// Uniform point on the unit sphere of `R^d`.
pub fn random_sphere_point(rng: &mut (impl Rng + ?Sized), d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian::<f64>(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
