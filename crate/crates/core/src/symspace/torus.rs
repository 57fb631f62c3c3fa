use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::rational_rank;
use crate::matcore::SkewHermitian;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::boundary::spectrum;

/// Eigenvalues of `is` declared exactly as rational combinations
/// `Σ_k q_k·ω_k` of real generators `ω_k` assumed linearly independent over `Q`.
#[derive(Debug, Clone)]
pub struct DeclaredSpectrum {
    pub generators: Vec<f64>,
    /// One coordinate vector per distinct eigenvalue.
    pub coordinates: Vec<Vec<BigRational>>,
}

impl DeclaredSpectrum {
    /// Rational eigenvalues `p/q` with the single generator `1`.
    pub fn rational(values: &[(i64, i64)]) -> Result<Self> {
        let mut coordinates = Vec::with_capacity(values.len());
        for &(p, q) in values {
            if q == 0 {
                return Err(Error::Invalid("zero denominator".into()));
            }
            coordinates.push(vec![BigRational::new(BigInt::from(p), BigInt::from(q))]);
        }
        Ok(Self { generators: vec![1.0], coordinates })
    }

    pub fn value(&self, j: usize) -> f64 {
        self.coordinates[j]
            .iter()
            .zip(&self.generators)
            .map(|(q, w)| q.to_f64().unwrap_or(f64::NAN) * w)
            .sum()
    }
}

/// Dimension of the `Q`-span of the eigenvalues of `is`: the dimension of the
/// smallest subtorus whose Lie algebra contains `s`.
///
/// Each cluster of the numeric spectrum must match one declared value within
/// the clustering tolerance; the rank is then computed exactly.
pub fn torus_dim<T: Real>(s: &SkewHermitian<T>, declared: &DeclaredSpectrum, tol: &Tolerances) -> Result<usize> {
    let sp = spectrum(s, tol)?;
    let cluster = tol.cluster * (1.0 + s.norm().as_f64());
    let mut used = Vec::new();
    for &lam in &sp.values {
        let lam = lam.as_f64();
        let hit = (0..declared.coordinates.len())
            .filter(|&j| (declared.value(j) - lam).abs() <= cluster.max(1e-9 * (1.0 + lam.abs())))
            .min_by(|&a, &b| {
                (declared.value(a) - lam)
                    .abs()
                    .partial_cmp(&(declared.value(b) - lam).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        match hit {
            Some(j) => used.push(j),
            None => {
                return Err(Error::SpectrumMismatch(format!(
                    "eigenvalue {lam} matches no declared value"
                )))
            }
        }
    }
    for j in 0..declared.coordinates.len() {
        if !used.contains(&j) {
            return Err(Error::SpectrumMismatch(format!(
                "declared value {} is not an eigenvalue",
                declared.value(j)
            )));
        }
    }
    let rows: Vec<Vec<BigRational>> = used.iter().map(|&j| declared.coordinates[j].clone()).collect();
    Ok(rational_rank(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_spectra_have_dimension_one() {
        let tol = Tolerances::default();
        let s = SkewHermitian::from_imag_diagonal(&[-1.0, -2.0, -3.0]);
        let d = DeclaredSpectrum::rational(&[(1, 1), (2, 1), (3, 1)]).unwrap();
        assert_eq!(torus_dim(&s, &d, &tol).unwrap(), 1);
        let z = SkewHermitian::<f64>::zeros(2);
        assert_eq!(torus_dim(&z, &DeclaredSpectrum::rational(&[(0, 1)]).unwrap(), &tol).unwrap(), 0);
    }

    #[test]
    fn independent_generators_add_dimensions() {
        let tol = Tolerances::default();
        let r2 = 2f64.sqrt();
        let s = SkewHermitian::from_imag_diagonal(&[-1.0, -r2, -(1.0 + r2)]);
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::from_integer(0.into());
        let d = DeclaredSpectrum {
            generators: vec![1.0, r2],
            coordinates: vec![
                vec![one.clone(), zero.clone()],
                vec![zero, one.clone()],
                vec![one.clone(), one],
            ],
        };
        assert_eq!(torus_dim(&s, &d, &tol).unwrap(), 2);
    }

    #[test]
    fn mismatched_declaration_is_reported() {
        let tol = Tolerances::default();
        let s = SkewHermitian::from_imag_diagonal(&[-1.0, -2.0]);
        let d = DeclaredSpectrum::rational(&[(1, 1), (5, 2)]).unwrap();
        assert!(matches!(torus_dim(&s, &d, &tol), Err(Error::SpectrumMismatch(_))));
    }
}
