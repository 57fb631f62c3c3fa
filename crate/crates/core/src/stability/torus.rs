use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Certificate, StabilityVerdict, VerdictTag, ZeroPair};
use crate::error::{Error, Result};
use crate::exact::{maximize, rational_nullspace, rational_rank, LpOutcome};
use crate::scenes::{Scene, ScenePoint};
use crate::symspace::{opposed_in, CompactGroup};
use crate::tolerance::Tolerances;
use crate::Skew;

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn direction(group: &CompactGroup, c: &[BigRational]) -> Skew {
    let coords: Vec<f64> = c.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
    let s = group.from_coords(&coords).expect("torus coordinates");
    s.normalized().unwrap_or(s)
}

/// Exact classification for a torus acting diagonally on projective space.
///
/// With `W` the weights of the support, the maximal weight along the
/// direction with coordinates `c` is `max_{w ∈ W} ⟨w, c⟩`. The point is
/// unstable iff some `c` makes every `⟨w, c⟩` negative (0 ∉ conv W),
/// polystable iff every `c` with all `⟨w, c⟩ ≤ 0` has all `⟨w, c⟩ = 0`
/// (0 in the relative interior), and stable iff moreover `W` spans. Both
/// questions are rational linear programs.
pub fn classify_torus_projective(weights: &[Vec<i64>], support: &[usize]) -> Result<StabilityVerdict> {
    let r = weights.first().map(|w| w.len()).unwrap_or(0);
    if r == 0 || weights.iter().any(|w| w.len() != r) {
        return Err(Error::Invalid("torus weights must be nonempty vectors of equal length".into()));
    }
    if support.is_empty() {
        return Err(Error::Invalid("empty support".into()));
    }
    if let Some(&j) = support.iter().find(|&&j| j >= weights.len()) {
        return Err(Error::Invalid(format!("support index {j} out of range")));
    }
    let group = CompactGroup::torus(r);
    let rows: Vec<Vec<BigRational>> = support.iter().map(|&j| weights[j].iter().map(|&v| q(v)).collect()).collect();
    let lambda = |c: &[BigRational]| -> BigRational {
        rows.iter().map(|w| w.iter().zip(c).map(|(a, b)| a * b).sum::<BigRational>()).max().expect("nonempty support")
    };

    // Separation: ⟨w, c⟩ ≤ −1 for all w.
    let minus_one = vec![q(-1); rows.len()];
    if let LpOutcome::Optimal { x, .. } = maximize(&rows, &minus_one, &vec![BigRational::zero(); r]) {
        let s = direction(&group, &x);
        let norm: f64 = x.iter().map(|v| v.to_f64().unwrap_or(0.0).powi(2)).sum::<f64>().sqrt();
        let weight = lambda(&x).to_f64().unwrap_or(f64::NAN) / norm;
        return Ok(verdict(VerdictTag::Unstable, Certificate::Unstable { witness: s, weight }));
    }

    // Relative interior: maximize −Σ⟨w, c⟩ over ⟨w, c⟩ ≤ 0 and −⟨w, c⟩ ≤ 1.
    let mut a = rows.clone();
    a.extend(rows.iter().map(|w| w.iter().map(|v| -v).collect::<Vec<_>>()));
    let mut b = vec![BigRational::zero(); rows.len()];
    b.extend(std::iter::repeat_n(q(1), rows.len()));
    let objective: Vec<BigRational> = (0..r).map(|l| -rows.iter().map(|w| w[l].clone()).sum::<BigRational>()).collect();
    let (value, x) = match maximize(&a, &b, &objective) {
        LpOutcome::Optimal { value, x } => (value, x),
        other => return Err(Error::Invalid(format!("relative-interior program ended as {other:?}"))),
    };
    if !value.is_zero() {
        let s = direction(&group, &x);
        return Ok(verdict(VerdictTag::NonnegativeNotPolystable, Certificate::NonnegativeNotPolystable { zero_direction: s, search: None }));
    }

    let rank = rational_rank(&rows);
    if rank == r {
        return Ok(verdict(VerdictTag::Stable, Certificate::StableExact { rank }));
    }
    // The zero directions form the subspace orthogonal to the weights; each
    // is opposed to its negative.
    let tol = Tolerances::default();
    let pairs = rational_nullspace(&rows, r)
        .into_iter()
        .map(|c| {
            let s = direction(&group, &c);
            let u = s.neg();
            let certificate = opposed_in(&group, &s, &u, &tol).ok().and_then(|(_, cert)| cert);
            ZeroPair { s, u, lambda_s: 0.0, lambda_u: 0.0, certificate }
        })
        .collect();
    Ok(verdict(VerdictTag::Polystable, Certificate::Polystable { pairs }))
}

fn verdict(tag: VerdictTag, certificate: Certificate) -> StabilityVerdict {
    StabilityVerdict { tag, certificate, delta: 0.0, exact: true, evaluations: 0 }
}

/// Indices of the coordinates of `x` above the support tolerance.
pub fn torus_support(x: &ScenePoint, tol: &Tolerances) -> Result<Vec<usize>> {
    let z = x.vector().ok_or(Error::NotATorusScene)?;
    let n = z.norm();
    Ok((0..z.len()).filter(|&j| z[j].norm() > tol.supp * n).collect())
}

/// [`classify_torus_projective`] for a point of a torus projective scene.
pub fn classify_torus_scene(scene: &Scene, x: &ScenePoint, tol: &Tolerances) -> Result<StabilityVerdict> {
    let weights = scene.torus_weights().ok_or(Error::NotATorusScene)?;
    let support = torus_support(x, tol)?;
    classify_torus_projective(weights, &support)
}
