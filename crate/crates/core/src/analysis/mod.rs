//! Structural measurements of configurations: spanning-tree filaments and
//! their length tiers, radial density, neighbor regularity, voids, fingerprints.

pub mod counting;
pub mod delaunay;
pub mod fingerprint;
pub mod mst;
pub mod neighbors;
pub mod radial;
pub mod tiers;
pub mod voids;

pub use counting::{counting_report, CountingReport};
pub use fingerprint::{fingerprint, ShapeFingerprint};
pub use mst::{euclidean_mst, Edge, MstEdges};
pub use neighbors::{nearest_neighbor_stats, NeighborStats, DEFAULT_INNER_FRACTION};
pub use radial::{radial_density_profile, spearman, RadialProfile};
pub use tiers::{edge_tier_ladder, EdgeTierLadder, Tier, DEFAULT_GAP};
pub use voids::{void_census, VoidBall, VoidReport};
