use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{abs_c, cplx, Real};

/// One-sided Jacobi SVD: `Y·V = U·diag(σ)` with `V` unitary and the columns of
/// `U` of unit norm.
///
/// Singular values are computed to high relative accuracy when `Y = B·D` with
/// `B` well conditioned and `D` an arbitrary positive diagonal scaling, which
/// is what graded products such as `b·exp(i u)` look like after a change of
/// basis.
#[derive(Debug, Clone)]
pub struct JacobiSvd<T: Real> {
    pub sigma: Vec<T>,
    pub u: ComplexMatrix<T>,
    pub v: ComplexMatrix<T>,
}

pub fn jacobi_svd<T: Real>(y: &ComplexMatrix<T>) -> Result<JacobiSvd<T>> {
    let (rows, k) = y.shape();
    let mut w = y.clone();
    let mut v = ComplexMatrix::<T>::identity(k, k);
    let tol = T::from_usize(rows.max(1)).unwrap() * T::eps();
    let max_sweeps = 80;
    let mut converged = k < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                // Norms and the cosine are formed from rescaled columns so that
                // entries near the overflow or underflow threshold stay exact.
                let np = column_norm(&w, p);
                let nq = column_norm(&w, q);
                if np == T::zero() || nq == T::zero() {
                    continue;
                }
                let mut gamma = cplx(T::zero(), T::zero());
                for i in 0..rows {
                    gamma += (w[(i, p)] / np).conj() * (w[(i, q)] / nq);
                }
                let cosine = abs_c(gamma);
                if cosine <= tol {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of γ so that the 2×2 Gram block is real.
                let phase = gamma.conj() / cosine;
                let ratio = nq / np;
                let zeta = (ratio - T::one() / ratio) / (cosine + cosine);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let xp = w[(i, p)];
                    let xq = w[(i, q)] * phase;
                    w[(i, p)] = xp * c - xq * s;
                    w[(i, q)] = xp * s + xq * c;
                }
                for i in 0..k {
                    let xp = v[(i, p)];
                    let xq = v[(i, q)] * phase;
                    v[(i, p)] = xp * c - xq * s;
                    v[(i, q)] = xp * s + xq * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigFailure);
    }
    let mut sigma = Vec::with_capacity(k);
    for j in 0..k {
        let nrm = column_norm(&w, j);
        sigma.push(nrm);
        if nrm > T::zero() {
            let inv = T::one() / nrm;
            for i in 0..rows {
                w[(i, j)] *= inv;
            }
        }
    }
    Ok(JacobiSvd { sigma, u: w, v })
}

fn column_norm<T: Real>(w: &ComplexMatrix<T>, j: usize) -> T {
    let big = w.column(j).iter().fold(T::zero(), |a, z| a.max(z.re.abs()).max(z.im.abs()));
    if big == T::zero() || !big.is_finite() {
        return big;
    }
    let sum = w.column(j).iter().fold(T::zero(), |a, z| a + (*z / big).norm_sqr());
    big * sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius;
    use crate::random::{random_complex_matrix, seeded};

    #[test]
    fn reconstructs_random_matrix() {
        let mut rng = seeded(5);
        let y = random_complex_matrix::<f64>(&mut rng, 5, 5);
        let svd = jacobi_svd(&y).unwrap();
        let mut us = svd.u.clone();
        for j in 0..5 {
            for i in 0..5 {
                us[(i, j)] *= svd.sigma[j];
            }
        }
        assert!(frobenius(&(us - &y * &svd.v)) < 1e-12);
        let vv = svd.v.adjoint() * &svd.v;
        assert!(frobenius(&(vv - ComplexMatrix::identity(5, 5))) < 1e-12);
        let mut ours = svd.sigma.clone();
        ours.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let reference = y.singular_values();
        let mut reference: Vec<f64> = reference.iter().copied().collect();
        reference.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b));
        }
    }

    #[test]
    fn graded_columns_keep_relative_accuracy() {
        // Columns scaled by 1e40 and 1e-40 around a well-conditioned 2x2 block.
        let b: ComplexMatrix<f64> = ComplexMatrix::from_row_slice(2, 2, &[cplx(1.0, 0.0), cplx(0.3, 0.1), cplx(0.2, -0.4), cplx(1.0, 0.0)]);
        let mut y = b.clone();
        for i in 0..2 {
            y[(i, 0)] *= 1e40;
            y[(i, 1)] *= 1e-40;
        }
        let svd = jacobi_svd(&y).unwrap();
        let det = (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).norm();
        // σ1·σ2 = |det Y| = |det B|.
        assert!((svd.sigma[0] * svd.sigma[1] / det - 1.0).abs() < 1e-12);
    }
}
