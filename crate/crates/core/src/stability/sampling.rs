use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{Certificate, PartnerSearch, StabilityVerdict, VerdictTag, ZeroPair};
use crate::error::{Error, Result};
use crate::random::seeded;
use crate::scenes::{sphere, Scene, ScenePoint};
use crate::symspace::opposed_in;
use crate::tolerance::Tolerances;
use crate::weights::max_weight;
use crate::Skew;

/// Effort limits for [`classify_sampling`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplingBudget {
    /// Uniform samples of the unit sphere of `k`.
    pub samples: usize,
    /// Local minimizations started from the best candidates.
    pub restarts: usize,
    /// Sampled `k ∈ K` per zero direction in the partner search.
    pub partner_samples: usize,
    /// Hard cap on maximal-weight evaluations.
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        Self { samples: 400, restarts: 8, partner_samples: 200, max_evaluations: 200_000, seed: 0 }
    }
}

/// The maximal weight as a function on the unit sphere of `k`, in the
/// coordinates of the group's orthonormal basis.
struct Landscape<'a> {
    scene: &'a Scene,
    x: &'a ScenePoint,
    tol: &'a Tolerances,
    evaluations: usize,
    budget: usize,
}

impl Landscape<'_> {
    fn skew(&self, c: &[f64]) -> Skew {
        self.scene.group.from_coords(c).expect("coordinates of k")
    }

    fn coords(&self, s: &Skew) -> Vec<f64> {
        self.scene.group.coords(s)
    }

    /// `λ(x; s)` for unit `s`; `+∞` is mapped to `f64::INFINITY`.
    fn weight(&mut self, c: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        if self.evaluations > self.budget {
            return Err(Error::BudgetExhausted(format!("{} maximal-weight evaluations", self.budget)));
        }
        let s = self.skew(c);
        Ok(max_weight(self.scene, self.x, &s, self.tol)?.finite().unwrap_or(f64::INFINITY))
    }

    /// `Ψ_x(exp(iTs))/T`, a smooth lower approximation of `λ(x; s)`.
    fn smooth(&self, c: &[f64], t: f64) -> f64 {
        match self.scene.ray_potential(&self.skew(c), t, self.x) {
            Ok(v) => v / t,
            Err(_) => f64::INFINITY,
        }
    }

    /// Directions where the maximal weight is known to jump: `−μ(x)`,
    /// coordinate axes, and for sphere tuples the points themselves.
    fn special_directions(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let d = self.scene.group.algebra_dim();
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            out.push(e.clone());
            e[i] = -1.0;
            out.push(e);
        }
        let mu = self.scene.moment(self.x);
        if let Some(m) = mu.normalized() {
            out.push(self.coords(&m.neg()));
        }
        if let ScenePoint::Sphere(p) = self.x {
            for v in p {
                out.push(self.coords(&sphere::su2_from_vector(&-v)));
                out.push(self.coords(&sphere::su2_from_vector(v)));
            }
        }
        out.into_iter().filter_map(normalize).collect()
    }
}

fn normalize(mut c: Vec<f64>) -> Option<Vec<f64>> {
    let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 1e-300) || !n.is_finite() {
        return None;
    }
    c.iter_mut().for_each(|v| *v /= n);
    Some(c)
}

fn random_direction(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let c: Vec<f64> = (0..d).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        if let Some(c) = normalize(c) {
            return c;
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Projected gradient descent of the smoothed weight on the unit sphere with
/// continuation in `T`; returns every iterate's end point per level.
fn descend(land: &Landscape<'_>, start: &[f64]) -> Vec<Vec<f64>> {
    let mut c = start.to_vec();
    let mut ends = Vec::new();
    let d = c.len();
    for t in [1.0, 4.0, 16.0, 64.0, 256.0, 1024.0] {
        let mut f = land.smooth(&c, t);
        if !f.is_finite() {
            break;
        }
        let mut step = 0.5;
        for _ in 0..80 {
            let h = 1e-6;
            let mut g = vec![0.0; d];
            for i in 0..d {
                let mut p = c.clone();
                let mut m = c.clone();
                p[i] += h;
                m[i] -= h;
                g[i] = (land.smooth(&p, t) - land.smooth(&m, t)) / (2.0 * h);
            }
            let radial: f64 = g.iter().zip(&c).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(&c).for_each(|(gi, ci)| *gi -= radial * ci);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !gn.is_finite() || gn < 1e-12 {
                break;
            }
            let mut moved = false;
            while step > 1e-10 {
                let trial = normalize(c.iter().zip(&g).map(|(ci, gi)| ci - step * gi / gn).collect());
                if let Some(trial) = trial {
                    let ft = land.smooth(&trial, t);
                    if ft < f - 1e-4 * step * gn {
                        c = trial;
                        f = ft;
                        step *= 2.0;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        ends.push(c.clone());
    }
    ends
}

/// For torus scenes the maximal weight is `max ⟨w_j, c⟩` over the support.
/// Near a minimizer, projecting onto the common kernel of the nearly active
/// weights lands exactly on the face where they vanish.
fn snap_to_faces(scene: &Scene, x: &ScenePoint, c: &[f64], tol: &Tolerances) -> Vec<Vec<f64>> {
    let (Some(weights), Some(z)) = (scene.torus_weights(), x.vector()) else {
        return Vec::new();
    };
    let zn = z.norm();
    let values: Vec<(usize, f64)> = (0..weights.len())
        .filter(|&j| z[j].norm() > tol.supp * zn)
        .map(|j| (j, weights[j].iter().zip(c).map(|(w, v)| *w as f64 * v).sum()))
        .collect();
    let top = values.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for eta in [3e-1, 1e-1, 3e-2, 1e-2, 1e-3] {
        let active: Vec<usize> = values.iter().filter(|(_, v)| *v >= top - eta).map(|(j, _)| *j).collect();
        let w = DMatrix::from_fn(active.len(), c.len(), |i, l| weights[active[i]][l] as f64);
        let svd = w.clone().svd(false, true);
        let Some(vt) = svd.v_t else { continue };
        // Remove the components along the row space of the active weights.
        let mut p = DVector::from_column_slice(c);
        for (k, sv) in svd.singular_values.iter().enumerate() {
            if *sv > 1e-9 {
                let row = vt.row(k).transpose();
                p -= &row * row.dot(&p);
            }
        }
        if let Some(n) = normalize(p.iter().copied().collect()) {
            out.push(n);
        }
    }
    out
}

/// Numerical classification from maximal weights sampled over the unit
/// sphere of `k`.
///
/// Candidates are uniform samples plus scene-specific directions where `λ`
/// jumps. The best candidates seed a projected descent of the smoothed
/// weight `Ψ_x(e^{iTs})/T` with `T` increasing, whose end points are scored
/// with the exact weight. A minimum below `−δ` gives an unstable witness,
/// above `δ` a stable verdict. Otherwise every zero direction `s` needs a
/// partner `u` with `λ(x; u) = 0` opposed to `s`; partners are sought among
/// the other zero directions, the special directions and `Ad(k)(−s)` for
/// sampled `k ∈ K`.
pub fn classify_sampling(scene: &Scene, x: &ScenePoint, budget: &SamplingBudget, tol: &Tolerances) -> Result<StabilityVerdict> {
    let x = &scene.validate_point(x)?;
    let delta = tol.delta;
    let mut rng = seeded(budget.seed);
    let mut land = Landscape { scene, x, tol, evaluations: 0, budget: budget.max_evaluations };
    let d = scene.group.algebra_dim();

    let mut candidates = land.special_directions();
    let special = candidates.clone();
    candidates.extend((0..budget.samples).map(|_| random_direction(&mut rng, d)));
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let w = land.weight(&c)?;
        scored.push((w, c));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let starts: Vec<Vec<f64>> = scored.iter().take(budget.restarts).map(|(_, c)| c.clone()).collect();
    for start in starts {
        for end in descend(&land, &start) {
            let mut tries = vec![end.clone()];
            tries.extend(snap_to_faces(scene, x, &end, tol));
            for c in tries {
                let w = land.weight(&c)?;
                scored.push((w, c));
            }
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (min_weight, argmin) = scored[0].clone();
    let evaluations = land.evaluations;
    if min_weight < -delta {
        return Ok(StabilityVerdict {
            tag: VerdictTag::Unstable,
            certificate: Certificate::Unstable { witness: land.skew(&argmin), weight: min_weight },
            delta,
            exact: false,
            evaluations,
        });
    }
    if min_weight > delta {
        return Ok(StabilityVerdict {
            tag: VerdictTag::Stable,
            certificate: Certificate::Stable { min_weight, argmin: land.skew(&argmin), samples: evaluations },
            delta,
            exact: false,
            evaluations,
        });
    }

    // Distinct zero directions.
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for (w, c) in &scored {
        if w.abs() > delta {
            continue;
        }
        if zeros.iter().all(|z| distance(z, c) > 1e-6) {
            zeros.push(c.clone());
        }
        if zeros.len() >= 16 {
            break;
        }
    }

    let mut pairs = Vec::new();
    for s in &zeros {
        match find_partner(&mut land, s, &zeros, &special, budget, &mut rng)? {
            Ok(pair) => pairs.push(pair),
            Err(search) => {
                return Ok(StabilityVerdict {
                    tag: VerdictTag::NonnegativeNotPolystable,
                    certificate: Certificate::NonnegativeNotPolystable { zero_direction: land.skew(s), search: Some(search) },
                    delta,
                    exact: false,
                    evaluations: land.evaluations,
                })
            }
        }
    }
    Ok(StabilityVerdict {
        tag: VerdictTag::Polystable,
        certificate: Certificate::Polystable { pairs },
        delta,
        exact: false,
        evaluations: land.evaluations,
    })
}

fn find_partner(
    land: &mut Landscape<'_>,
    s: &[f64],
    zeros: &[Vec<f64>],
    special: &[Vec<f64>],
    budget: &SamplingBudget,
    rng: &mut impl Rng,
) -> Result<std::result::Result<ZeroPair, PartnerSearch>> {
    let delta = land.tol.delta;
    let scene = land.scene;
    let s_skew = land.skew(s);
    let minus_s = s_skew.neg();
    let mut candidates: Vec<Vec<f64>> = vec![land.coords(&minus_s)];
    candidates.extend(zeros.iter().cloned());
    candidates.extend(special.iter().cloned());
    let mut conjugates: Vec<(f64, Vec<f64>)> = Vec::new();
    if !scene.group.is_abelian() {
        for _ in 0..budget.partner_samples {
            let k = scene.group.haar::<f64>(rng);
            let u = land.coords(&minus_s.conjugate(&k));
            let w = land.weight(&u)?;
            conjugates.push((w.abs(), u));
        }
        conjugates.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Local refinement of |λ(x; Ad(k)(−s))| by a pattern search in k.
        for (_, u) in conjugates.iter().take(4) {
            candidates.push(u.clone());
            candidates.push(refine_conjugate(land, u)?);
        }
    }
    let mut best = f64::INFINITY;
    let mut examined = 0;
    for u in candidates {
        if distance(&u, s) <= 1e-6 {
            continue;
        }
        examined += 1;
        let w = land.weight(&u)?;
        if w.abs() > best && w.abs() > delta {
            continue;
        }
        let u_skew = land.skew(&u);
        let (ok, certificate) = opposed_in(&scene.group, &s_skew, &u_skew, land.tol)?;
        if !ok {
            continue;
        }
        best = best.min(w.abs());
        if w.abs() <= delta {
            let lambda_s = land.weight(s)?;
            return Ok(Ok(ZeroPair { s: s_skew, u: u_skew, lambda_s, lambda_u: w, certificate }));
        }
    }
    Ok(Err(PartnerSearch { candidates: examined, best_opposed_weight: best }))
}

fn refine_conjugate(land: &mut Landscape<'_>, u: &[f64]) -> Result<Vec<f64>> {
    let basis = land.scene.group.basis::<f64>();
    let mut cur = land.skew(u);
    let mut f = land.weight(u)?.abs();
    let mut h = 0.3;
    while h > 1e-6 {
        let mut improved = false;
        for b in &basis {
            for sign in [1.0, -1.0] {
                let k = b.exp_unitary(sign * h)?;
                let trial = cur.conjugate(&k);
                let c = land.coords(&trial);
                let w = land.weight(&c)?.abs();
                if w < f - 1e-12 {
                    f = w;
                    cur = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(land.coords(&cur))
}
