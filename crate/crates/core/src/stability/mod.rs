//! Stability classification of points, the Kempf–Ness gradient flow, and
//! comparison of flow limits up to the action of `K`.

mod flow;
mod orbit;
mod sampling;
mod torus;

pub use flow::{kempf_ness_flow, FlowOutcome, FlowParams, FlowTrace};
pub use orbit::{korbit_equal, polystable_witness_check, stabilizer_dimension, OrbitMatch, WitnessCheck};
pub use sampling::{classify_sampling, SamplingBudget};
pub use torus::{classify_torus_projective, classify_torus_scene, torus_support};

use crate::symspace::OpposednessCertificate;
use crate::Skew;

/// The four outcomes of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum VerdictTag {
    Stable,
    Polystable,
    NonnegativeNotPolystable,
    Unstable,
}

impl std::fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::Stable => "Stable",
            Self::Polystable => "Polystable",
            Self::NonnegativeNotPolystable => "NonnegativeNotPolystable",
            Self::Unstable => "Unstable",
        };
        f.write_str(name)
    }
}

/// Two directions with vanishing maximal weight whose boundary points are
/// joined by a geodesic.
#[derive(Debug, Clone)]
pub struct ZeroPair {
    pub s: Skew,
    pub u: Skew,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub certificate: Option<OpposednessCertificate<f64>>,
}

/// Diagnostics of a failed search for an opposed zero partner.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PartnerSearch {
    /// Number of candidate partners examined.
    pub candidates: usize,
    /// Smallest `|λ(x; u)|` over candidates opposed to the zero direction.
    pub best_opposed_weight: f64,
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// A direction with negative maximal weight.
    Unstable { witness: Skew, weight: f64 },
    /// The smallest sampled maximal weight over the unit sphere of `k`.
    Stable { min_weight: f64, argmin: Skew, samples: usize },
    /// Torus scenes: the support's weights span and contain 0 in the interior
    /// of their hull.
    StableExact { rank: usize },
    /// One opposed zero pair per zero direction found.
    Polystable { pairs: Vec<ZeroPair> },
    /// A zero direction without an opposed zero partner.
    NonnegativeNotPolystable { zero_direction: Skew, search: Option<PartnerSearch> },
}

#[derive(Debug, Clone)]
pub struct StabilityVerdict {
    pub tag: VerdictTag,
    pub certificate: Certificate,
    /// Band used to decide whether a weight vanishes (0 for exact verdicts).
    pub delta: f64,
    /// Whether the verdict is an exact rational computation.
    pub exact: bool,
    /// Maximal-weight evaluations used.
    pub evaluations: usize,
}
