use super::{all_finite, frobenius, herm_apply, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{cplx, re, Real};

/// Matrix exponential.
///
/// Hermitian and skew-Hermitian inputs go through their spectral
/// decomposition; general matrices use scaling and squaring with a Padé
/// approximant.
pub fn mat_exp<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::Dimension("mat_exp needs a square matrix".into()));
    }
    let scale = T::one() + frobenius(a);
    let tol = T::lit(1e3) * T::eps() * scale;
    let out = if frobenius(&(a - a.adjoint())) <= tol {
        herm_apply(a, |x| re(x.exp()))?
    } else if frobenius(&(a + a.adjoint())) <= tol {
        // A = −iH with H = iA Hermitian.
        let h = a.map(|z| cplx(-z.im, z.re));
        herm_apply(&h, |x| cplx(x.cos(), -x.sin()))?
    } else {
        a.clone().exp()
    };
    if !all_finite(&out) {
        return Err(Error::Overflow("mat_exp"));
    }
    Ok(out)
}
