//! Helpers for tuples of points on `S² ≅ CP¹` acted on by `SL(2, C)`.

use nalgebra::{Vector2, Vector3};

use crate::scalar::cplx;
use crate::{Complex, Matrix, Skew};

pub type Spinor = Vector2<Complex>;

/// Pauli matrices.
pub fn pauli() -> [Matrix; 3] {
    let z = cplx(0.0, 0.0);
    let o = cplx(1.0, 0.0);
    let i = cplx(0.0, 1.0);
    [
        Matrix::from_row_slice(2, 2, &[z, o, o, z]),
        Matrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Matrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// The isometry `R³ → su(2)`, `v ↦ −i(σ·v)/√2`.
pub fn su2_from_vector(v: &Vector3<f64>) -> Skew {
    let p = pauli();
    let mut m = Matrix::zeros(2, 2);
    for j in 0..3 {
        m += &p[j] * cplx(0.0, -v[j] / std::f64::consts::SQRT_2);
    }
    Skew::project(&m)
}

/// Inverse of [`su2_from_vector`] on `su(2)`: `v_j = tr(i s σ_j)/√2`.
pub fn vector_from_su2(s: &Skew) -> Vector3<f64> {
    let p = pauli();
    let is = s.hermitian();
    Vector3::from_fn(|j, _| (&is * &p[j]).trace().re / std::f64::consts::SQRT_2)
}

/// A unit spinor whose Bloch vector is `x`.
pub fn spinor_from_point(x: &Vector3<f64>) -> Spinor {
    if x[2] >= 0.0 {
        let n = (2.0 * (1.0 + x[2])).sqrt();
        Spinor::new(cplx((1.0 + x[2]) / n, 0.0), cplx(x[0] / n, x[1] / n))
    } else {
        let n = (2.0 * (1.0 - x[2])).sqrt();
        Spinor::new(cplx(x[0] / n, -x[1] / n), cplx((1.0 - x[2]) / n, 0.0))
    }
}

/// Bloch vector `ψ*σψ/ψ*ψ`.
pub fn point_from_spinor(psi: &Spinor) -> Vector3<f64> {
    let n = psi[0].norm_sqr() + psi[1].norm_sqr();
    let c = psi[0].conj() * psi[1];
    Vector3::new(2.0 * c.re / n, 2.0 * c.im / n, (psi[0].norm_sqr() - psi[1].norm_sqr()) / n)
}

/// Angle between unit vectors, accurate near 0 and π.
pub fn angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_sphere_point, seeded};

    #[test]
    fn spinor_round_trip() {
        let mut rng = seeded(41);
        for _ in 0..50 {
            let x = Vector3::from_vec(random_sphere_point(&mut rng, 3));
            let back = point_from_spinor(&spinor_from_point(&x));
            assert!((back - x).norm() < 1e-14);
        }
        for x in [Vector3::z(), -Vector3::z()] {
            assert!((point_from_spinor(&spinor_from_point(&x)) - x).norm() < 1e-15);
        }
    }

    #[test]
    fn identification_is_isometric() {
        let v = Vector3::new(0.3, -1.2, 0.5);
        let s = su2_from_vector(&v);
        assert!((s.norm() - v.norm()).abs() < 1e-14);
        assert!((vector_from_su2(&s) - v).norm() < 1e-14);
    }
}
