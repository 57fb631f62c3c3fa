use crate::error::{Error, Result};
use crate::matcore::CartanPair;
use crate::scenes::{Scene, ScenePoint};
use crate::tolerance::Tolerances;
use crate::Skew;

/// How a Kempf–Ness trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FlowOutcome {
    /// `|μ| ≤ ε_zero` at bounded distance with no degeneration.
    ConvergedInOrbit,
    /// `μ` tends to zero while the orbit point escapes: the distance passed
    /// the cap or points of a sphere tuple merged.
    ConvergedDegenerate,
    /// The distance passed the cap with `|μ| ≥ ε_div`.
    Diverged,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlowParams {
    pub eps_zero: f64,
    pub eps_div: f64,
    pub distance_cap: f64,
    /// Chordal distance at which initially distinct sphere points count as merged.
    pub merge_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    pub max_step: f64,
    /// Accepted relative change of `μ` across one step.
    pub step_tol: f64,
}

impl FlowParams {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        Self {
            eps_zero: tol.zero,
            eps_div: tol.diverge,
            distance_cap: tol.distance_cap,
            merge_tol: tol.merge,
            max_time: 1e5,
            max_steps: 200_000,
            initial_step: 0.1,
            max_step: 50.0,
            step_tol: 0.2,
        }
    }
}

impl Default for FlowParams {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::default())
    }
}

/// A sampled Kempf–Ness trajectory `t ↦ g(t)·x`.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub mu_norms: Vec<f64>,
    /// `d([g(t)], [1])` in `K\G`.
    pub distances: Vec<f64>,
    pub final_point: ScenePoint,
    pub final_element: CartanPair<f64>,
    pub outcome: FlowOutcome,
    pub steps: usize,
    pub rejected: usize,
}

impl FlowTrace {
    pub fn final_mu(&self) -> f64 {
        self.mu_norms.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_distance(&self) -> f64 {
        self.distances.last().copied().unwrap_or(f64::NAN)
    }

    /// The largest increase of `|μ|` between samples.
    pub fn worst_increase(&self) -> f64 {
        self.mu_norms.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// CSV with columns `t, mu_norm, distance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mu_norm,distance\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", self.times[i], self.mu_norms[i], self.distances[i]));
        }
        out
    }
}

/// Gradient flow of `|μ|²/2` along the orbit, integrated in `G`:
/// `g′ = −i·μ(g·x)·g`, `g(0) = 1`.
///
/// Heun's method on the group with Lie–Euler as the embedded lower-order
/// step. Steps are rejected when the two slopes differ by more than
/// `step_tol·|μ|` or when `|μ|` would increase. `g` is kept in Cartan form,
/// so deep orbit points never form large matrices.
pub fn kempf_ness_flow(scene: &Scene, x: &ScenePoint, params: &FlowParams) -> Result<FlowTrace> {
    let x = scene.validate_point(x)?;
    let n = scene.group.n;
    let mut g = CartanPair::identity(n);
    let mut y = x.clone();
    let mut mu = scene.moment(&y);
    let mut mu_norm = mu.norm();
    let mut t = 0.0;
    let mut h = params.initial_step;
    let mut just_rejected = false;
    let mut trace = FlowTrace {
        times: vec![0.0],
        mu_norms: vec![mu_norm],
        distances: vec![0.0],
        final_point: y.clone(),
        final_element: g.clone(),
        outcome: FlowOutcome::BudgetExhausted,
        steps: 0,
        rejected: 0,
    };
    let pairs: Vec<(usize, usize)> = match x.sphere() {
        Some(p) => (0..p.len())
            .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| (p[i] - p[j]).norm() > params.merge_tol)
            .collect(),
        None => Vec::new(),
    };

    loop {
        let distance = g.distance_from_origin();
        let merged = scene.min_pair_distance(&y, &pairs).is_some_and(|d| d < params.merge_tol);
        if mu_norm <= params.eps_zero {
            trace.outcome = if distance <= params.distance_cap && !merged {
                FlowOutcome::ConvergedInOrbit
            } else {
                FlowOutcome::ConvergedDegenerate
            };
            break;
        }
        if merged {
            trace.outcome = FlowOutcome::ConvergedDegenerate;
            break;
        }
        if distance > params.distance_cap {
            trace.outcome = if mu_norm < params.eps_div { FlowOutcome::ConvergedDegenerate } else { FlowOutcome::Diverged };
            break;
        }
        if trace.steps >= params.max_steps || t >= params.max_time {
            trace.outcome = FlowOutcome::BudgetExhausted;
            break;
        }

        let euler = g.left_mul_exp_i(&mu.scaled(-h))?;
        let y1 = scene.act_cartan(&euler, &x)?;
        let mu1 = scene.moment(&y1);
        let slope_gap = mu1.sub(&mu).norm();
        let avg: Skew = mu.add(&mu1).scaled(0.5);
        let heun = g.left_mul_exp_i(&avg.scaled(-h))?;
        let y2 = scene.act_cartan(&heun, &x)?;
        let mu2 = scene.moment(&y2);
        let mu2_norm = mu2.norm();
        // Heun's local error scales with h², so the step follows sqrt(tol/err).
        let ratio = slope_gap / (params.step_tol * mu_norm);
        let factor = if ratio > 0.0 { (0.9 / ratio.sqrt()).clamp(0.2, 2.0) } else { 2.0 };
        if ratio > 1.0 || mu2_norm > mu_norm * (1.0 + 1e-12) {
            trace.rejected += 1;
            h *= factor.min(0.7);
            just_rejected = true;
            if h < 1e-12 {
                return Err(Error::StepFailure { t, step: h });
            }
            continue;
        }
        t += h;
        g = heun;
        y = y2;
        mu = mu2;
        mu_norm = mu2_norm;
        trace.steps += 1;
        trace.times.push(t);
        trace.mu_norms.push(mu_norm);
        trace.distances.push(g.distance_from_origin());
        let growth = if just_rejected { factor.min(1.0) } else { factor };
        just_rejected = false;
        h = (h * growth).min(params.max_step);
    }
    trace.final_point = y;
    trace.final_element = g;
    Ok(trace)
}
