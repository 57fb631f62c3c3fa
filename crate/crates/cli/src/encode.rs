//! JSON renderings of library values: complex numbers as `[re, im]`,
//! matrices as row-major nested arrays.

use momentmap::scenes::ScenePoint;
use momentmap::stability::{Certificate, StabilityVerdict, ZeroPair};
use momentmap::symspace::OpposednessCertificate;
use momentmap::weights::ExtendedReal;
use momentmap::{Matrix, Skew};
use serde_json::{json, Value};

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn skew(s: &Skew) -> Value {
    matrix(s.matrix())
}

pub fn point(x: &ScenePoint) -> Value {
    match x {
        ScenePoint::Vector(z) => Value::Array(z.iter().map(|c| json!([c.re, c.im])).collect()),
        ScenePoint::Sphere(p) => Value::Array(p.iter().map(|v| json!([v.x, v.y, v.z])).collect()),
    }
}

/// A finite weight as a number, `+∞` as the string `"+inf"`.
pub fn extended(w: ExtendedReal) -> Value {
    match w {
        ExtendedReal::Finite(v) => json!(v),
        ExtendedReal::PlusInfinity => json!("+inf"),
    }
}

pub fn opposedness(c: &OpposednessCertificate<f64>) -> Value {
    json!({
        "spectrum": c.spectrum,
        "piece_dims": c.dims,
        "ambient": c.ambient,
        "rank": c.rank,
        "adjoint": c.adjoint,
        "complete": c.is_complete(),
    })
}

fn zero_pair(p: &ZeroPair) -> Value {
    json!({
        "s": skew(&p.s),
        "u": skew(&p.u),
        "lambda_s": p.lambda_s,
        "lambda_u": p.lambda_u,
        "opposedness": p.certificate.as_ref().map(opposedness),
    })
}

pub fn verdict(v: &StabilityVerdict) -> Value {
    let certificate = match &v.certificate {
        Certificate::Unstable { witness, weight } => json!({"unstable": {"witness": skew(witness), "weight": weight}}),
        Certificate::Stable { min_weight, argmin, samples } => {
            json!({"stable": {"min_weight": min_weight, "argmin": skew(argmin), "samples": samples}})
        }
        Certificate::StableExact { rank } => json!({"stable_exact": {"rank": rank}}),
        Certificate::Polystable { pairs } => json!({"polystable": {"pairs": pairs.iter().map(zero_pair).collect::<Vec<_>>()}}),
        Certificate::NonnegativeNotPolystable { zero_direction, search } => json!({
            "nonnegative_not_polystable": {"zero_direction": skew(zero_direction), "partner_search": search}
        }),
    };
    json!({
        "tag": v.tag,
        "exact": v.exact,
        "delta": v.delta,
        "evaluations": v.evaluations,
        "certificate": certificate,
    })
}
