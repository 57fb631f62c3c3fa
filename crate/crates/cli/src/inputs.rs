//! Parsing of command-line directions and group elements.
//!
//! Directions `s ∈ k`:
//! - `[[[re, im], ...], ...]`: a row-major skew-Hermitian matrix;
//! - `coords:c1,c2,...`: coordinates in the orthonormal basis of `k`;
//! - `diag:d1,d2,...`: the diagonal matrix `i·diag(d)`;
//! - `axis:x,y,z`: the element of `su(2)` for the axis `v ∈ R³` (sphere scenes);
//! - `toward:i` / `toward:-i`: the axis `±x_i` of the chosen sphere tuple, 1-based.
//!
//! Group elements `g ∈ G`:
//! - `identity`;
//! - `exp:<direction>`: `exp(i·s)`;
//! - `random:<spread>`: a seeded random element;
//! - a row-major matrix as above.

use momentmap::matcore::GroupElement;
use momentmap::random::SeededRng;
use momentmap::scenes::sphere::su2_from_vector;
use momentmap::scenes::ScenePoint;
use momentmap::symspace::{CompactGroup, GroupKind};
use momentmap::{Group, Matrix, Skew, Tolerances};
use nalgebra::Vector3;

use crate::scene_file::matrix_from_rows;
use crate::Failure;

fn numbers(list: &str) -> Result<Vec<f64>, Failure> {
    list.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("bad number `{t}`: {e}"))))
        .collect()
}

fn json_matrix(text: &str) -> Result<Matrix, Failure> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("bad matrix `{text}`: {e}")))?;
    matrix_from_rows(&rows).map_err(Failure::Usage)
}

/// `u:3`, `su:2` or `torus:2`.
pub fn parse_group(text: &str) -> Result<CompactGroup, Failure> {
    let (kind, n) = text.split_once(':').ok_or_else(|| Failure::Usage(format!("bad group `{text}`, expected e.g. su:2")))?;
    let n: usize = n.parse().map_err(|e| Failure::Usage(format!("bad group size `{n}`: {e}")))?;
    let kind = match kind {
        "u" => GroupKind::Unitary,
        "su" => GroupKind::SpecialUnitary,
        "torus" => GroupKind::Torus,
        other => return Err(Failure::Usage(format!("unknown group kind `{other}`"))),
    };
    if n == 0 {
        return Err(Failure::Usage("group size must be positive".into()));
    }
    Ok(CompactGroup { kind, n })
}

pub fn parse_direction(text: &str, group: &CompactGroup, point: Option<&ScenePoint>, tol: &Tolerances) -> Result<Skew, Failure> {
    let text = text.trim();
    let s = if let Some(rest) = text.strip_prefix("coords:") {
        group.from_coords(&numbers(rest)?).map_err(|e| Failure::Usage(e.to_string()))?
    } else if let Some(rest) = text.strip_prefix("diag:") {
        Skew::from_imag_diagonal(&numbers(rest)?)
    } else if let Some(rest) = text.strip_prefix("axis:") {
        let v = numbers(rest)?;
        if v.len() != 3 {
            return Err(Failure::Usage("axis needs three components".into()));
        }
        su2_from_vector(&Vector3::new(v[0], v[1], v[2]))
    } else if let Some(rest) = text.strip_prefix("toward:") {
        let index: i64 = rest.trim().parse().map_err(|e| Failure::Usage(format!("bad index `{rest}`: {e}")))?;
        let points = point
            .and_then(ScenePoint::sphere)
            .ok_or_else(|| Failure::Usage("`toward:` needs a sphere tuple point".into()))?;
        let i = index.unsigned_abs() as usize;
        if i == 0 || i > points.len() {
            return Err(Failure::Usage(format!("point index {index} out of range 1..={}", points.len())));
        }
        let v = points[i - 1] * index.signum() as f64;
        su2_from_vector(&v)
    } else if text.starts_with('[') {
        Skew::new(json_matrix(text)?, tol.sym).map_err(|e| Failure::Usage(format!("direction: {e}")))?
    } else {
        return Err(Failure::Usage(format!("cannot parse direction `{text}`")));
    };
    if s.dim() != group.n || !group.contains_algebra(&s, 1e-8) {
        return Err(Failure::Usage(format!("direction `{text}` is not in the Lie algebra of the group")));
    }
    Ok(s)
}

pub fn parse_element(
    text: &str,
    group: &CompactGroup,
    point: Option<&ScenePoint>,
    rng: &mut SeededRng,
    tol: &Tolerances,
) -> Result<Group, Failure> {
    let text = text.trim();
    let g = if text == "identity" {
        GroupElement::identity(group.n)
    } else if let Some(rest) = text.strip_prefix("exp:") {
        let s = parse_direction(rest, group, point, tol)?;
        GroupElement::exp_i(&s, 1.0).map_err(|e| Failure::Usage(e.to_string()))?
    } else if let Some(rest) = text.strip_prefix("random:") {
        let spread: f64 = rest.trim().parse().map_err(|e| Failure::Usage(format!("bad spread `{rest}`: {e}")))?;
        group.random_element::<f64>(rng, spread)
    } else if text.starts_with('[') {
        GroupElement::new(json_matrix(text)?).map_err(|e| Failure::Usage(format!("element: {e}")))?
    } else {
        return Err(Failure::Usage(format!("cannot parse group element `{text}`")));
    };
    if g.dim() != group.n || !group.contains_element(&g, 1e-8) {
        return Err(Failure::Usage(format!("element `{text}` is not in the complexified group")));
    }
    Ok(g)
}
