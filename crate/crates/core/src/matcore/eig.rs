use num_complex::Complex;

use super::{frobenius, hermitian_defect, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{abs_c, re, Real};

/// Clustered spectrum of a Hermitian matrix.
///
/// Eigenvalues ascend strictly across clusters; the eigenbasis columns are
/// grouped by cluster in the same order.
#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    /// Cluster representatives `λ_1 < … < λ_r` (cluster means).
    pub values: Vec<T>,
    pub multiplicities: Vec<usize>,
    /// Unitary `n×n`, columns grouped by cluster.
    pub basis: ComplexMatrix<T>,
    /// Unclustered eigenvalues, ascending, aligned with `basis` columns.
    pub raw: Vec<T>,
}

impl<T: Real> SpectralData<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Column offset of cluster `j` inside `basis`.
    pub fn offset(&self, j: usize) -> usize {
        self.multiplicities[..j].iter().sum()
    }

    /// Orthonormal basis (`n×m_j`) of the eigenspace of cluster `j`.
    pub fn cluster_basis(&self, j: usize) -> ComplexMatrix<T> {
        let start = self.offset(j);
        self.basis.columns(start, self.multiplicities[j]).into_owned()
    }

    /// Orthonormal basis of the sum of the eigenspaces of clusters `0..=j`.
    pub fn ascending_basis(&self, j: usize) -> ComplexMatrix<T> {
        let end = self.offset(j) + self.multiplicities[j];
        self.basis.columns(0, end).into_owned()
    }

    pub fn projector(&self, j: usize) -> ComplexMatrix<T> {
        let b = self.cluster_basis(j);
        &b * b.adjoint()
    }

    /// `Q diag(λ) Q*` with clustered eigenvalues.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut d = ComplexMatrix::zeros(n, n);
        let mut col = 0;
        for (v, &m) in self.values.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                d[(col, col)] = re(*v);
                col += 1;
            }
        }
        &self.basis * d * self.basis.adjoint()
    }

    /// Clustered spectra agree value by value within `tol` with equal multiplicities.
    pub fn same_spectrum(&self, other: &Self, tol: T) -> bool {
        self.multiplicities == other.multiplicities
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (*a - *b).abs() <= tol)
    }
}

/// Default clustering tolerance `1e-8·(1 + spectral radius)`.
pub fn default_cluster_tol<T: Real>(h: &ComplexMatrix<T>) -> T {
    // The Frobenius norm bounds the spectral radius and avoids a second solve.
    T::lit(1e-8) * (T::one() + frobenius(h))
}

/// Cyclic two-sided Jacobi for a Hermitian matrix. Returns ascending
/// eigenvalues and the matching unitary eigenbasis.
fn eigh<T: Real>(h: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let half = T::lit(0.5);
    let mut a = (h + h.adjoint()).map(|z| z * half);
    let mut v = ComplexMatrix::<T>::identity(n, n);
    let scale = frobenius(&a);
    let tol = T::eps() * scale;
    let mut converged = false;
    for _ in 0..100 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[(i, j)].norm_sqr())
            .sqrt();
        if off <= tol || scale == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let c = abs_c(a[(p, q)]);
                if c <= tol * T::lit(1e-3) {
                    continue;
                }
                let e = a[(p, q)] / c;
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (c + c);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                let ec = e.conj();
                // Columns: A ← A·G with G = diag(1, ē)·R(cs, sn).
                for i in 0..n {
                    let xp = a[(i, p)];
                    let xq = a[(i, q)] * ec;
                    a[(i, p)] = xp * cs - xq * sn;
                    a[(i, q)] = xp * sn + xq * cs;
                    let yp = v[(i, p)];
                    let yq = v[(i, q)] * ec;
                    v[(i, p)] = yp * cs - yq * sn;
                    v[(i, q)] = yp * sn + yq * cs;
                }
                // Rows: A ← G*·A.
                for j in 0..n {
                    let rp = a[(p, j)];
                    let rq = a[(q, j)] * e;
                    a[(p, j)] = rp * cs - rq * sn;
                    a[(q, j)] = rp * sn + rq * cs;
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    if !converged {
        return Err(Error::EigFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.partial_cmp(&a[(y, y)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut q = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        q.set_column(dst, &v.column(src));
    }
    Ok((values, q))
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues closer than
/// `cluster_tol` (chained) merged into one cluster.
pub fn herm_eig<T: Real>(h: &ComplexMatrix<T>, sym_tol: T, cluster_tol: T) -> Result<SpectralData<T>> {
    if !h.is_square() {
        return Err(Error::Dimension("herm_eig needs a square matrix".into()));
    }
    let defect = hermitian_defect(h);
    if defect > sym_tol * (T::one() + frobenius(h)) {
        return Err(Error::NotHermitian { asymmetry: defect.as_f64() });
    }
    let (raw, basis) = eigh(h)?;
    let mut values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut sum = T::zero();
    let mut count = 0usize;
    let mut last = None;
    for &x in &raw {
        match last {
            Some(prev) if x - prev <= cluster_tol => {
                sum += x;
                count += 1;
            }
            _ => {
                if count > 0 {
                    values.push(sum / T::from_usize(count).unwrap());
                    multiplicities.push(count);
                }
                sum = x;
                count = 1;
            }
        }
        last = Some(x);
    }
    if count > 0 {
        values.push(sum / T::from_usize(count).unwrap());
        multiplicities.push(count);
    }
    Ok(SpectralData { values, multiplicities, basis, raw })
}

/// `Q f(Λ) Q*` for a Hermitian matrix `H = Q Λ Q*`.
pub fn herm_apply<T: Real>(
    h: &ComplexMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<ComplexMatrix<T>> {
    let (vals, q) = eigh(h)?;
    let n = vals.len();
    let mut scaled = q.clone();
    for j in 0..n {
        let fj = f(vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    Ok(scaled * q.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};

    #[test]
    fn zero_matrix_is_one_cluster() {
        let h = ComplexMatrix::<f64>::zeros(3, 3);
        let sp = herm_eig(&h, 1e-10, 1e-8).unwrap();
        assert_eq!(sp.values, vec![0.0]);
        assert_eq!(sp.multiplicities, vec![3]);
    }

    #[test]
    fn near_degenerate_values_merge() {
        let d = 1e-11;
        let h = ComplexMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            re(1.0),
            re(1.0 + d),
            re(2.0),
        ]));
        let sp = herm_eig(&h, 1e-10, 1e-8).unwrap();
        assert_eq!(sp.multiplicities, vec![2, 1]);
        assert!((sp.values[0] - 1.0).abs() < 1e-10);
        assert!((sp.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = seeded(7);
        for n in 1..7 {
            let h = random_hermitian::<f64>(&mut rng, n);
            let sp = herm_eig(&h, 1e-10, 1e-12).unwrap();
            assert!(frobenius(&(sp.reconstruct() - &h)) < 1e-10);
            let qq = sp.basis.adjoint() * &sp.basis;
            assert!(frobenius(&(qq - ComplexMatrix::identity(n, n))) < 1e-10);
            assert_eq!(sp.multiplicities.iter().sum::<usize>(), n);
            assert!(sp.values.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = ComplexMatrix::<f64>::zeros(2, 2);
        h[(0, 1)] = re(1.0);
        assert!(matches!(herm_eig(&h, 1e-10, 1e-8), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let mut rng = seeded(3);
        let h = random_hermitian::<f32>(&mut rng, 4);
        let sp = herm_eig(&h, 1e-5, 1e-5).unwrap();
        assert!(frobenius(&(sp.reconstruct() - &h)) < 1e-4);
    }
}
