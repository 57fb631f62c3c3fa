use crate::error::{Error, Result};
use crate::matcore::{frobenius, herm_apply, herm_eig, unitary_log, SkewHermitian};
use crate::scalar::cplx;
use crate::symspace::{CompactGroup, GroupKind};
use crate::{Complex, Matrix, Skew};

/// A unitary representation `ρ: K → U(N)`, given by the images
/// `dρ(b_i) ∈ u(N)` of the orthonormal basis `b_i` of `k`
/// (see [`CompactGroup::basis`]).
#[derive(Debug, Clone)]
pub struct Representation {
    pub group: CompactGroup,
    pub generators: Vec<Matrix>,
    /// Integer weights for torus representations: row `j` is the weight of
    /// the `j`-th coordinate, so that `i·dρ(s) = diag(⟨w_j, c⟩)` for
    /// `s = Σ c_l b_l`.
    pub weights: Option<Vec<Vec<i64>>>,
}

impl Representation {
    /// Validates the generators: one per basis element, all skew-Hermitian,
    /// and `dρ` a Lie algebra homomorphism within `rep_tol`.
    pub fn new(group: CompactGroup, generators: Vec<Matrix>, sym_tol: f64, rep_tol: f64) -> Result<Self> {
        if generators.len() != group.algebra_dim() {
            return Err(Error::Invalid(format!(
                "{} generators for a Lie algebra of dimension {}",
                generators.len(),
                group.algebra_dim()
            )));
        }
        let size = generators.first().map(|g| g.nrows()).unwrap_or(0);
        for (i, g) in generators.iter().enumerate() {
            if g.nrows() != size || g.ncols() != size {
                return Err(Error::Invalid(format!("generator {i} is not {size}x{size}")));
            }
            if let Err(e) = SkewHermitian::new(g.clone(), sym_tol) {
                return Err(Error::Invalid(format!("generator {i} is not skew-Hermitian: {e}")));
            }
        }
        let rep = Self { group, generators, weights: None };
        let defect = rep.homomorphism_defect();
        if defect > rep_tol {
            return Err(Error::Invalid(format!("generators fail the bracket relations by {defect:e}")));
        }
        Ok(rep)
    }

    /// The standard representation of `K ⊂ U(n)` on `C^n`.
    pub fn defining(group: CompactGroup) -> Self {
        let generators = group.basis::<f64>().into_iter().map(|b| b.into_matrix()).collect();
        Self { group, generators, weights: None }
    }

    /// Diagonal representation of the torus `T^r` with integer weights.
    pub fn torus(weights: Vec<Vec<i64>>) -> Result<Self> {
        let r = weights.first().map(|w| w.len()).unwrap_or(0);
        if r == 0 || weights.iter().any(|w| w.len() != r) {
            return Err(Error::Invalid("torus weights must be nonempty vectors of equal length".into()));
        }
        let n = weights.len();
        let generators = (0..r)
            .map(|l| {
                let mut m = Matrix::zeros(n, n);
                for (j, w) in weights.iter().enumerate() {
                    m[(j, j)] = cplx(0.0, -(w[l] as f64));
                }
                m
            })
            .collect();
        Ok(Self { group: CompactGroup::torus(r), generators, weights: Some(weights) })
    }

    /// Dimension `N` of the representation space.
    pub fn dim(&self) -> usize {
        self.generators.first().map(|g| g.nrows()).unwrap_or(0)
    }

    /// `dρ(s) = Σ c_i dρ(b_i)` with `c` the coordinates of `s` in `k`.
    pub fn d_rho(&self, s: &Skew) -> Matrix {
        let c = self.group.coords(s);
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (g, x) in self.generators.iter().zip(c) {
            out += g * Complex::new(x, 0.0);
        }
        out
    }

    /// The Hermitian matrix `i·dρ(s)`.
    pub fn hermitian(&self, s: &Skew) -> Matrix {
        self.d_rho(s) * Complex::new(0.0, 1.0)
    }

    /// Largest `‖[dρ(b_i), dρ(b_j)] − dρ([b_i, b_j])‖_F`.
    pub fn homomorphism_defect(&self) -> f64 {
        let basis = self.group.basis::<f64>();
        let mut worst: f64 = 0.0;
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let a = &self.generators[i];
                let b = &self.generators[j];
                let lhs = a * b - b * a;
                let rhs = self.d_rho(&basis[i].bracket(&basis[j]));
                worst = worst.max(frobenius(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Bound `c` with `‖dρ(s)‖_op ≤ c‖s‖`, from Cauchy–Schwarz over the basis.
    pub fn norm_bound(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| {
                let sv = crate::matcore::jacobi_svd(g).map(|s| s.sigma).unwrap_or_default();
                let top = sv.into_iter().fold(0.0f64, f64::max);
                top * top
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `ρ(k) = exp(dρ(log k))` for `k ∈ K`.
    ///
    /// For `SU(n)` the logarithm is moved to a traceless branch first; the
    /// result does not depend on the branch because `ρ` integrates to `K`.
    pub fn rho_unitary(&self, k: &Matrix) -> Result<Matrix> {
        let log = match self.group.kind {
            GroupKind::SpecialUnitary => traceless_log(k)?,
            _ => unitary_log(k)?,
        };
        let a = self.d_rho(&log);
        let h = a * Complex::new(0.0, 1.0);
        // exp(dρ(L)) = exp(−i·(i dρ(L))).
        herm_apply(&h, |x| Complex::new(x.cos(), -x.sin()))
    }
}

/// A logarithm of `k ∈ SU(n)` with zero trace.
fn traceless_log(k: &Matrix) -> Result<Skew> {
    let log = unitary_log(k)?;
    let sp = herm_eig(&log.hermitian(), 1e-6, 0.0)?;
    let mut values = sp.raw.clone();
    let two_pi = std::f64::consts::TAU;
    let n = values.len();
    for _ in 0..n {
        let sum: f64 = values.iter().sum();
        if sum > 0.5 * two_pi {
            let j = (0..n).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
            values[j] -= two_pi;
        } else if sum < -0.5 * two_pi {
            let j = (0..n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
            values[j] += two_pi;
        } else {
            break;
        }
    }
    let q = &sp.basis;
    let d = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(n, values.iter().map(|&x| Complex::new(x, 0.0))));
    Ok(SkewHermitian::from_hermitian(&(q * d * q.adjoint())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn defining_representation_is_a_homomorphism() {
        for g in [CompactGroup::unitary(3), CompactGroup::special_unitary(2), CompactGroup::special_unitary(3)] {
            assert!(Representation::defining(g).homomorphism_defect() < 1e-12);
        }
    }

    #[test]
    fn broken_generators_are_rejected() {
        let g = CompactGroup::special_unitary(2);
        let mut gens = Representation::defining(g).generators;
        gens[0] *= Complex::new(2.0, 0.0);
        assert!(Representation::new(g, gens.clone(), 1e-10, 1e-9).is_err());
        gens[0][(0, 1)] = Complex::new(1.0, 0.0);
        let err = Representation::new(g, gens, 1e-10, 1e-9).unwrap_err();
        assert!(format!("{err}").contains("generator 0"));
    }

    #[test]
    fn rho_of_k_is_the_identity_map_for_the_defining_representation() {
        let mut rng = seeded(31);
        for g in [CompactGroup::unitary(3), CompactGroup::special_unitary(3)] {
            let rep = Representation::defining(g);
            let k = g.haar::<f64>(&mut rng);
            let r = rep.rho_unitary(&k).unwrap();
            assert!(frobenius(&(r - &k)) < 1e-10);
        }
    }

    #[test]
    fn torus_weights_give_diagonal_hermitian() {
        let rep = Representation::torus(vec![vec![1, 0], vec![-2, 3]]).unwrap();
        let s = rep.group.from_coords(&[0.5, 1.0]).unwrap();
        let h = rep.hermitian(&s);
        assert!((h[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((h[(1, 1)].re - 2.0).abs() < 1e-15);
    }
}
