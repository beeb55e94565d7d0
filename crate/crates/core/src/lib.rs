//! Range-clustering queries over a static point set.
//!
//! A [`RangeClusterIndex`] is built once over a set of integer points in a
//! power-of-two universe. It answers, for any axis-aligned query box, an
//! approximately optimal k-clustering of the points inside the box under any
//! registered regular cost model ([`approx_cluster`]), capacitated rectilinear
//! k-center clusterings ([`capacitated`]), and exact rectilinear k-center
//! answers on the line ([`exact1d`]) and for k = 2, 3 in the plane
//! ([`exact2d`]).
//!
//! The [`oracle`] module holds the brute-force references every guarantee is
//! tested against.

pub mod approx_cluster;
pub mod capacitated;
pub mod datagen;
pub mod error;
pub mod exact1d;
pub mod exact2d;
pub mod geometry;
pub mod index;
pub mod octree;
pub mod oracle;
pub mod range_index;

pub use approx_cluster::{
    baseline_cluster, cluster_query, lower_bound_and_packing, single_shot_solve, ClusterAnswer, Clustering, CostKind,
    CostModel, PackingResult, QuerySpec, SolverBudget,
};
pub use capacitated::{capacitated_cluster_query, delta_sample, CapacitatedSolution, CapacitatedSpec, DeltaApprox};
pub use datagen::Distribution;
pub use error::{RcqError, Result};
pub use geometry::{AxisBox, CanonicalCube, Cover, Norm, PointSet};
pub use exact1d::{Algorithm1D, IntervalSolution, SortedArray1D};
pub use exact2d::{three_center_query, two_center_query, AnchoredSquare, ThreeCenterAnswer, TwoCenterAnswer};
pub use index::{Quantization, RangeClusterIndex};
pub use octree::{CentroidDecomposition, CompressedOctree};
pub use range_index::{ApproxLadder, KdTree};
