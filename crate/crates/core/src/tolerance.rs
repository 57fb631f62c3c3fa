use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by all modules.
///
/// Every decision that the exact theory makes with equalities (spectral
/// clusters, subspace dimensions, vanishing weights) is made here with a band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Hermitian / skew-Hermitian symmetry check, relative to `1 + ‖A‖_F`.
    pub sym: f64,
    /// Eigenvalue clustering, relative to `1 + spectral radius`.
    pub cluster: f64,
    /// Subspace rank decisions, relative to the largest singular value.
    pub rank: f64,
    /// Largest condition number accepted by the polar decomposition.
    pub cond_max: f64,
    /// Relative target for the moment-map integral quadrature.
    pub quad: f64,
    /// Support threshold for spectral components of a point.
    pub supp: f64,
    /// Coincidence of points on the sphere, in radians.
    pub angle: f64,
    /// Zero band for maximal weights.
    pub delta: f64,
    /// Allowed decrease per step of a weight curve.
    pub mono: f64,
    /// Agreement between analytic and ray-mode boundary weights.
    pub boundary_weight: f64,
    /// Fixed-point test for the infinitesimal action.
    pub fix: f64,
    /// Kempf-Ness flow: moment-map norm counted as zero.
    pub zero: f64,
    /// Kempf-Ness flow: moment-map norm counted as divergent.
    pub diverge: f64,
    /// Kempf-Ness flow: distance cap in `K\G`.
    pub distance_cap: f64,
    /// Sphere scenes: chordal distance at which distinct points count as merged.
    pub merge: f64,
    /// Homomorphism check for representations.
    pub rep: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym: 1e-10,
            cluster: 1e-8,
            rank: 1e-10,
            cond_max: 1e12,
            quad: 1e-8,
            supp: 1e-10,
            angle: 1e-8,
            delta: 1e-6,
            mono: 1e-9,
            boundary_weight: 1e-3,
            fix: 1e-8,
            zero: 1e-8,
            diverge: 1e-4,
            distance_cap: 40.0,
            merge: 1e-2,
            rep: 1e-9,
        }
    }
}

impl Tolerances {
    /// Rejects non-positive or non-finite entries.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("sym", self.sym),
            ("cluster", self.cluster),
            ("rank", self.rank),
            ("cond_max", self.cond_max),
            ("quad", self.quad),
            ("supp", self.supp),
            ("angle", self.angle),
            ("delta", self.delta),
            ("mono", self.mono),
            ("boundary_weight", self.boundary_weight),
            ("fix", self.fix),
            ("zero", self.zero),
            ("diverge", self.diverge),
            ("distance_cap", self.distance_cap),
            ("merge", self.merge),
            ("rep", self.rep),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Names and values, in a fixed order, for reports.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("sym", self.sym),
            ("cluster", self.cluster),
            ("rank", self.rank),
            ("cond_max", self.cond_max),
            ("quad", self.quad),
            ("supp", self.supp),
            ("angle", self.angle),
            ("delta", self.delta),
            ("mono", self.mono),
            ("boundary_weight", self.boundary_weight),
            ("fix", self.fix),
            ("zero", self.zero),
            ("diverge", self.diverge),
            ("distance_cap", self.distance_cap),
            ("merge", self.merge),
            ("rep", self.rep),
        ]
    }

    /// Sets a field by name; used by the command line `--tol.<name>` flags.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "sym" => &mut self.sym,
            "cluster" => &mut self.cluster,
            "rank" => &mut self.rank,
            "cond_max" => &mut self.cond_max,
            "quad" => &mut self.quad,
            "supp" => &mut self.supp,
            "angle" => &mut self.angle,
            "delta" => &mut self.delta,
            "mono" => &mut self.mono,
            "boundary_weight" => &mut self.boundary_weight,
            "fix" => &mut self.fix,
            "zero" => &mut self.zero,
            "diverge" => &mut self.diverge,
            "distance_cap" => &mut self.distance_cap,
            "merge" => &mut self.merge,
            "rep" => &mut self.rep,
            _ => return Err(Error::Invalid(format!("unknown tolerance `{name}`"))),
        };
        *slot = value;
        Ok(())
    }
}
