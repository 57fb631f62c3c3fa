//! The symmetric space `K\G` of a compact matrix group and its boundary at
//! infinity.

mod boundary;
mod group;
mod opposed;
mod torus;

pub use boundary::{
    boundary_action, boundary_action_extrapolated, boundary_action_limit, boundary_action_raw, distance,
    parabolic_contains, spectrum, BoundaryPoint, GeodesicRay, LimitEstimate,
};
pub use group::{normalize_det, CompactGroup, GroupKind};
pub use opposed::{
    ad_hermitian, connect_geodesic, filtrations_opposed, geodesically_connected, opposed, opposed_in, Filtration,
    OpposednessCertificate,
};
pub use torus::{torus_dim, DeclaredSpectrum};
