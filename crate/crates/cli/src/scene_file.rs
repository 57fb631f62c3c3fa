//! Scene files: versioned TOML describing a scene and named points.
//!
//! ```toml
//! version = 1
//! kind = "projective"              # projective | flat | sphere_tuple
//! group = { kind = "torus", n = 1 } # unitary | special_unitary | torus
//! weights = [[1], [-1]]            # torus weights, one row per coordinate
//!
//! [points]
//! both = [[1.0, 0.0], [1.0, 0.0]]  # complex coordinates as [re, im]
//! ```
//!
//! Sphere tuples set `m` and give points as lists of unit vectors in `R³`.
//! Projective and flat scenes take the defining representation of `group`
//! unless `weights` or `generators` (one row-major matrix of `[re, im]`
//! entries per basis element of the Lie algebra) are given.

use std::collections::BTreeMap;
use std::path::Path;

use momentmap::random::seeded;
use momentmap::scenes::{Representation, Scene, SceneKind, ScenePoint};
use momentmap::symspace::{CompactGroup, GroupKind};
use momentmap::{Complex, Matrix, Tolerances};
use nalgebra::{DVector, Vector3};
use serde::Deserialize;

use crate::Failure;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    version: u32,
    kind: SceneKind,
    m: Option<usize>,
    group: Option<GroupSpec>,
    weights: Option<Vec<Vec<i64>>>,
    generators: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    growth_constant: Option<f64>,
    support_floor: Option<f64>,
    #[serde(default)]
    points: BTreeMap<String, Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    kind: GroupKind,
    n: usize,
}

/// A validated scene with its named points.
#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub path: String,
    pub scene: Scene,
    pub points: BTreeMap<String, ScenePoint>,
}

impl LoadedScene {
    pub fn point(&self, name: &str) -> Result<&ScenePoint, Failure> {
        self.points.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.points.keys().map(String::as_str).collect();
            Failure::Usage(format!("{}: no point named `{name}` (known: {})", self.path, known.join(", ")))
        })
    }
}

fn validation(path: &str, field: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{path}: validation error in `{field}`: {msg}"))
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Matrix, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a square matrix with {n} rows"));
    }
    Ok(Matrix::from_fn(n, n, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

pub fn load(path: &Path, tol: &Tolerances) -> Result<LoadedScene, Failure> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{name}: {e}")))?;
    parse(&text, &name, tol)
}

pub fn parse(text: &str, name: &str, tol: &Tolerances) -> Result<LoadedScene, Failure> {
    let file: SceneFile = toml::from_str(text).map_err(|e| Failure::Usage(format!("{name}: parse error: {e}")))?;
    if file.version != FORMAT_VERSION {
        return Err(validation(name, "version", format!("unsupported version {}, expected {FORMAT_VERSION}", file.version)));
    }
    let mut scene = match file.kind {
        SceneKind::SphereTuple => {
            if file.group.is_some() || file.weights.is_some() || file.generators.is_some() {
                return Err(validation(name, "kind", "sphere tuples take only `m` and `points`"));
            }
            let m = file.m.ok_or_else(|| validation(name, "m", "missing number of points"))?;
            if m == 0 {
                return Err(validation(name, "m", "must be positive"));
            }
            Scene::sphere_tuple(m)
        }
        SceneKind::Projective | SceneKind::Flat => {
            let rep = representation(&file, name, tol)?;
            if file.kind == SceneKind::Projective {
                Scene::projective(rep)
            } else {
                Scene::flat(rep)
            }
        }
    };
    if let Some(floor) = file.support_floor {
        if !(0.0..1.0).contains(&floor) {
            return Err(validation(name, "support_floor", "must lie in [0, 1)"));
        }
        scene = scene.with_support_floor(floor);
    }
    if let Some(c) = file.growth_constant {
        scene = scene.with_growth_constant(c);
    }
    scene
        .check_growth_bounds(64, &mut seeded(0x67726f77))
        .map_err(|e| validation(name, "growth_constant", e))?;

    let mut points = BTreeMap::new();
    for (key, rows) in &file.points {
        let field = format!("points.{key}");
        let raw = match scene.kind {
            SceneKind::SphereTuple => {
                if let Some(i) = rows.iter().position(|r| r.len() != 3) {
                    return Err(validation(name, &format!("{field}[{i}]"), "expected [x, y, z]"));
                }
                ScenePoint::Sphere(rows.iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect())
            }
            _ => {
                if let Some(i) = rows.iter().position(|r| r.len() != 2) {
                    return Err(validation(name, &format!("{field}[{i}]"), "expected [re, im]"));
                }
                ScenePoint::Vector(DVector::from_iterator(rows.len(), rows.iter().map(|r| Complex::new(r[0], r[1]))))
            }
        };
        let point = scene.validate_point(&raw).map_err(|e| validation(name, &field, e))?;
        points.insert(key.clone(), point);
    }
    Ok(LoadedScene { path: name.to_string(), scene, points })
}

fn representation(file: &SceneFile, name: &str, tol: &Tolerances) -> Result<Representation, Failure> {
    if let Some(weights) = &file.weights {
        if file.generators.is_some() {
            return Err(validation(name, "weights", "give either `weights` or `generators`"));
        }
        let rep = Representation::torus(weights.clone()).map_err(|e| validation(name, "weights", e))?;
        if let Some(g) = &file.group {
            if g.kind != GroupKind::Torus || g.n != rep.group.n {
                return Err(validation(name, "group", format!("weights describe the torus T^{}", rep.group.n)));
            }
        }
        return Ok(rep);
    }
    let spec = file.group.as_ref().ok_or_else(|| validation(name, "group", "missing group"))?;
    if spec.n == 0 {
        return Err(validation(name, "group.n", "must be positive"));
    }
    let group = CompactGroup { kind: spec.kind, n: spec.n };
    match &file.generators {
        None => Ok(Representation::defining(group)),
        Some(gens) => {
            let mut mats = Vec::with_capacity(gens.len());
            for (i, rows) in gens.iter().enumerate() {
                mats.push(matrix_from_rows(rows).map_err(|e| validation(name, &format!("generators[{i}]"), e))?);
            }
            Representation::new(group, mats, tol.sym, tol.rep).map_err(|e| validation(name, "generators", e))
        }
    }
}
