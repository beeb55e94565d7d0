use serde::{Deserialize, Serialize};

use crate::error::{RcqError, Result};
use crate::geometry::{convex_hull, enclosing_radius, min_enclosing_ball, Cover, Norm, PointSet};

/// Registered clustering objectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    /// Largest L∞ radius (half the edge of the smallest enclosing cube).
    #[serde(rename = "linf-kcenter")]
    LinfKCenter,
    /// Largest Euclidean enclosing radius.
    #[serde(rename = "l2-kcenter")]
    L2KCenter,
    /// Sum of Euclidean enclosing radii.
    SumRadii,
    /// Root of the sum of squared Euclidean enclosing radii.
    RssRadii,
    /// Sum of convex-hull perimeters, planar only.
    PerimeterSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    Max,
    Sum,
    RootSumSquares,
}

impl Aggregate {
    pub fn combine(self, costs: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            Aggregate::Max => costs.into_iter().fold(0.0, f64::max),
            Aggregate::Sum => costs.into_iter().sum(),
            Aggregate::RootSumSquares => costs.into_iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }
}

/// How covers grow when a clustering of a weak `r`-packing is extended to
/// the whole point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpandRule {
    /// Add `r` to the radius; members go to the first cover holding them.
    AddRadius,
    /// Minkowski sum with a disk; members go to their nearest packing point.
    MinkowskiDisk,
}

impl CostKind {
    pub const ALL: [CostKind; 5] = [
        CostKind::LinfKCenter,
        CostKind::L2KCenter,
        CostKind::SumRadii,
        CostKind::RssRadii,
        CostKind::PerimeterSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostKind::LinfKCenter => "linf-kcenter",
            CostKind::L2KCenter => "l2-kcenter",
            CostKind::SumRadii => "sum-radii",
            CostKind::RssRadii => "rss-radii",
            CostKind::PerimeterSum => "perimeter-sum",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for CostKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A `(c, f(k))`-regular cost function bound to a dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub kind: CostKind,
    pub dim: usize,
}

impl CostModel {
    pub fn new(kind: CostKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(RcqError::invalid("dimension must be positive"));
        }
        if kind == CostKind::PerimeterSum && dim != 2 {
            return Err(RcqError::invalid("perimeter-sum is defined for planar points only"));
        }
        Ok(CostModel { kind, dim })
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn norm(&self) -> Norm {
        match self.kind {
            CostKind::LinfKCenter => Norm::LInf,
            _ => Norm::L2,
        }
    }

    /// Diameter-sensitivity constant: any clustering costs at least
    /// `c` times its largest Euclidean cluster diameter.
    pub fn c(&self) -> f64 {
        let sqrt_d = (self.dim as f64).sqrt();
        match self.kind {
            CostKind::LinfKCenter | CostKind::RssRadii => 1.0 / (2.0 * sqrt_d),
            CostKind::L2KCenter | CostKind::SumRadii => 0.5,
            CostKind::PerimeterSum => 2.0,
        }
    }

    /// Expansion factor: growing every cover by `r` costs at most `r·f(k)`.
    pub fn f(&self, k: usize) -> f64 {
        let k = k as f64;
        match self.kind {
            CostKind::LinfKCenter | CostKind::L2KCenter => 1.0,
            CostKind::SumRadii => k,
            CostKind::RssRadii => k.sqrt(),
            CostKind::PerimeterSum => 2.0 * std::f64::consts::PI * k,
        }
    }

    pub fn aggregate(&self) -> Aggregate {
        match self.kind {
            CostKind::LinfKCenter | CostKind::L2KCenter => Aggregate::Max,
            CostKind::SumRadii | CostKind::PerimeterSum => Aggregate::Sum,
            CostKind::RssRadii => Aggregate::RootSumSquares,
        }
    }

    pub fn expand_rule(&self) -> ExpandRule {
        match self.kind {
            CostKind::PerimeterSum => ExpandRule::MinkowskiDisk,
            _ => ExpandRule::AddRadius,
        }
    }

    pub fn is_center_type(&self) -> bool {
        self.expand_rule() == ExpandRule::AddRadius
    }

    /// Cost of a single cluster; zero for the empty cluster.
    pub fn cluster_cost(&self, points: &PointSet, ids: &[usize]) -> f64 {
        self.cover_of(points, ids).map_or(0.0, |c| c.size())
    }

    /// Smallest cover of a cluster under this model, `None` when empty.
    pub fn cover_of(&self, points: &PointSet, ids: &[usize]) -> Option<Cover> {
        if ids.is_empty() {
            return None;
        }
        Some(match self.kind {
            CostKind::LinfKCenter => {
                let (radius, center) = enclosing_radius(points, ids, Norm::LInf).ok()?;
                Cover::Cube { center, radius }
            }
            CostKind::L2KCenter | CostKind::SumRadii | CostKind::RssRadii => {
                let pts: Vec<Vec<f64>> = ids.iter().map(|&i| points.point_f64(i)).collect();
                let ball = min_enclosing_ball(&pts);
                Cover::Ball {
                    center: ball.center,
                    radius: ball.radius,
                }
            }
            CostKind::PerimeterSum => {
                let pts: Vec<[f64; 2]> = ids
                    .iter()
                    .map(|&i| [points.coord(i, 0) as f64, points.coord(i, 1) as f64])
                    .collect();
                Cover::Polygon {
                    vertices: convex_hull(&pts),
                    inflate: 0.0,
                }
            }
        })
    }

    /// Aggregate cost of a clustering given as id lists.
    pub fn clustering_cost(&self, points: &PointSet, clusters: &[Vec<usize>]) -> f64 {
        self.aggregate()
            .combine(clusters.iter().map(|c| self.cluster_cost(points, c)))
    }
}
