//! Approximate range-clustering under regular cost functions.
//!
//! A query finds a lower bound `LB` on the optimal cost of the points in the
//! box, extracts a small weak `r`-packing with `r = ε·LB/f(k)`, clusters the
//! packing with an exact single-shot solver, and grows the resulting covers
//! by `r` so they capture every point in the box. The answer costs at most
//! `(1+ε)` times the optimum whenever the single-shot solver ran exactly.

mod cost;
mod packing;
mod solver;

use serde::Serialize;

pub use cost::{Aggregate, CostKind, CostModel, ExpandRule};
pub use packing::{lower_bound_and_packing, packing_size_bound};
pub use solver::single_shot_solve;

use crate::error::{RcqError, Result};
use crate::geometry::{dist2_u64, AxisBox, Cover, PointSet};
use crate::index::RangeClusterIndex;

/// Limits on the exact single-shot solvers. `RCQ_BUDGET` overrides them as
/// comma-separated `key=value` pairs, e.g. `subset_dp_max=14,allow_greedy=1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverBudget {
    /// Largest distinct-point count for the exact subset DP.
    pub subset_dp_max: usize,
    /// Largest distinct-point count for exact rectilinear enumeration.
    pub enumeration_max: usize,
    /// Largest combined point count for exact capacitated solving.
    pub pckc_max_points: usize,
    /// Largest k for exact capacitated solving.
    pub pckc_max_k: usize,
    /// Fall back to farthest-first greedy, voiding the approximation bound.
    pub allow_greedy: bool,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            subset_dp_max: 16,
            enumeration_max: 400,
            pckc_max_points: 40,
            pckc_max_k: 3,
            allow_greedy: false,
        }
    }
}

impl SolverBudget {
    pub const ENV: &'static str = "RCQ_BUDGET";

    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV) {
            Ok(s) => Self::parse(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut b = Self::default();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| RcqError::invalid(format!("budget entry `{pair}` is not key=value")))?;
            let num = || {
                value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| RcqError::invalid(format!("budget value `{value}` is not an integer")))
            };
            match key.trim() {
                "subset_dp_max" => b.subset_dp_max = num()?.min(20),
                "enumeration_max" => b.enumeration_max = num()?,
                "pckc_max_points" => b.pckc_max_points = num()?.min(64),
                "pckc_max_k" => b.pckc_max_k = num()?,
                "allow_greedy" => b.allow_greedy = matches!(value.trim(), "1" | "true" | "yes"),
                other => return Err(RcqError::invalid(format!("unknown budget key `{other}`"))),
            }
        }
        Ok(b)
    }
}

#[derive(Clone, Debug)]
pub struct QuerySpec {
    pub query: AxisBox,
    pub k: usize,
    pub eps: f64,
    pub cost: CostKind,
    pub budget: SolverBudget,
    /// When false, clusters list only packing points and the cost is the
    /// aggregate of the expanded covers.
    pub report_members: bool,
}

impl QuerySpec {
    pub fn new(query: AxisBox, k: usize, eps: f64, cost: CostKind) -> Self {
        QuerySpec {
            query,
            k,
            eps,
            cost,
            budget: SolverBudget::default(),
            report_members: true,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.query.dim() != dim {
            return Err(RcqError::DimensionMismatch {
                expected: dim,
                got: self.query.dim(),
            });
        }
        if self.k < 2 {
            return Err(RcqError::invalid("k must be at least 2"));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(RcqError::invalid("eps must be a positive number"));
        }
        Ok(())
    }

    pub fn model(&self, dim: usize) -> Result<CostModel> {
        CostModel::new(self.cost, dim)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PackingStats {
    /// Octree nodes handled by the cube-cover walk.
    pub nodes_visited: usize,
    /// Steps taken through the centroid decomposition.
    pub cd_steps: usize,
    /// Cubes in the cover when the lower bound was taken.
    pub phase1_cubes: usize,
    /// Cubes that produced packing points.
    pub packing_cubes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingResult {
    pub lb: f64,
    pub r: f64,
    /// One point id per final cube.
    pub reps: Vec<usize>,
    /// Set when the packing holds every distinct location of the range.
    pub exact: bool,
    pub stats: PackingStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub covers: Vec<Cover>,
    pub cost: f64,
    /// False when a heuristic fallback produced the clustering.
    pub exact: bool,
}

impl Clustering {
    pub fn empty() -> Self {
        Clustering {
            clusters: Vec::new(),
            covers: Vec::new(),
            cost: 0.0,
            exact: true,
        }
    }

    /// Clustering with tight covers and the model's aggregate cost.
    pub fn from_clusters(points: &PointSet, model: &CostModel, clusters: Vec<Vec<usize>>, exact: bool) -> Self {
        let covers: Vec<Cover> = clusters
            .iter()
            .map(|c| model.cover_of(points, c).expect("clusters are nonempty"))
            .collect();
        let cost = model.aggregate().combine(covers.iter().map(Cover::size));
        Clustering {
            clusters,
            covers,
            cost,
            exact,
        }
    }
}

/// Grows the covers of `clustering` by `r` and assigns every point of `all`
/// to a cluster whose grown cover holds it. The result keeps the grown covers
/// and is costed on its actual members.
pub fn expand_clustering(
    clustering: &Clustering,
    r: f64,
    model: &CostModel,
    points: &PointSet,
    all: &[usize],
) -> Result<Clustering> {
    let covers: Vec<Cover> = clustering.covers.iter().map(|c| c.expanded(r)).collect();
    let mut members = vec![Vec::new(); covers.len()];
    match model.expand_rule() {
        ExpandRule::AddRadius => {
            for &p in all {
                let coords = points.point_f64(p);
                let j = covers.iter().position(|c| c.contains(&coords)).ok_or_else(|| {
                    RcqError::Infeasible(format!("point {p} lies outside every expanded cover"))
                })?;
                members[j].push(p);
            }
        }
        ExpandRule::MinkowskiDisk => {
            let packing: Vec<(usize, usize)> = clustering
                .clusters
                .iter()
                .enumerate()
                .flat_map(|(j, c)| c.iter().map(move |&p| (p, j)))
                .collect();
            for &p in all {
                let (_, j) = packing
                    .iter()
                    .map(|&(q, j)| (dist2_u64(points.point(p), points.point(q)), j))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                    .ok_or(RcqError::Empty("expansion needs a nonempty clustering"))?;
                debug_assert!(covers[j].contains(&points.point_f64(p)));
                members[j].push(p);
            }
        }
    }
    let (clusters, covers): (Vec<_>, Vec<_>) = members
        .into_iter()
        .zip(covers)
        .filter(|(m, _)| !m.is_empty())
        .unzip();
    let cost = model.clustering_cost(points, &clusters);
    Ok(Clustering {
        clusters,
        covers,
        cost,
        exact: clustering.exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterAnswer {
    pub clustering: Clustering,
    /// Absent when the range held at most one point.
    pub packing: Option<PackingResult>,
}

/// `(1+ε)`-approximate k-clustering of the indexed points inside the box.
pub fn cluster_query(index: &RangeClusterIndex, spec: &QuerySpec) -> Result<ClusterAnswer> {
    spec.validate(index.dim())?;
    let model = spec.model(index.dim())?;
    let points = index.points();
    let packing = match lower_bound_and_packing(index, spec) {
        Ok(p) => p,
        Err(RcqError::TrivialRange(_)) => {
            let clustering = match index.kd.report(&spec.query).as_slice() {
                [] => Clustering::empty(),
                ids => Clustering::from_clusters(points, &model, vec![ids.to_vec()], true),
            };
            return Ok(ClusterAnswer {
                clustering,
                packing: None,
            });
        }
        Err(e) => return Err(e),
    };
    let base = single_shot_solve(points, &packing.reps, spec.k, &model, &spec.budget)?;
    let clustering = if spec.report_members {
        let all = index.kd.report(&spec.query);
        expand_clustering(&base, packing.r, &model, points, &all)?
    } else {
        let covers: Vec<Cover> = base.covers.iter().map(|c| c.expanded(packing.r)).collect();
        let cost = model.aggregate().combine(covers.iter().map(Cover::size));
        Clustering {
            clusters: base.clusters.clone(),
            covers,
            cost,
            exact: base.exact,
        }
    };
    Ok(ClusterAnswer {
        clustering,
        packing: Some(packing),
    })
}

/// Report-then-cluster reference: reports every point of the range and runs
/// the single-shot solver on all of them, falling back to greedy when the
/// range exceeds the exact budget. Returns the clustering and the number of
/// points reported.
pub fn baseline_cluster(index: &RangeClusterIndex, spec: &QuerySpec) -> Result<(Clustering, usize)> {
    spec.validate(index.dim())?;
    let model = spec.model(index.dim())?;
    let all = index.kd.report(&spec.query);
    if all.is_empty() {
        return Ok((Clustering::empty(), 0));
    }
    let budget = SolverBudget {
        allow_greedy: true,
        ..spec.budget.clone()
    };
    let c = single_shot_solve(index.points(), &all, spec.k, &model, &budget)?;
    Ok((c, all.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Norm;

    fn index_of(pts: &[[u64; 2]], bits: u32) -> RangeClusterIndex {
        let p = PointSet::from_points(2, bits, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
        RangeClusterIndex::build(p).unwrap()
    }

    #[test]
    fn corners_of_square() {
        let idx = index_of(&[[0, 0], [10, 0], [0, 10], [10, 10]], 8);
        let spec = QuerySpec::new(idx.points().universe(), 2, 0.1, CostKind::LinfKCenter);
        let ans = cluster_query(&idx, &spec).unwrap();
        assert!(ans.clustering.cost >= 5.0 && ans.clustering.cost <= 5.5);
        let packing = ans.packing.unwrap();
        assert!(packing.exact);
        assert_eq!(packing.r, 0.0);
        assert_eq!(packing.reps.len(), 4);
    }

    #[test]
    fn trivial_ranges() {
        let idx = index_of(&[[0, 0], [10, 0], [0, 10]], 8);
        let none = AxisBox::new(vec![1, 1], vec![2, 2]);
        let ans = cluster_query(&idx, &QuerySpec::new(none.clone(), 2, 0.1, CostKind::L2KCenter)).unwrap();
        assert!(ans.clustering.clusters.is_empty());
        assert!(matches!(
            lower_bound_and_packing(&idx, &QuerySpec::new(none, 2, 0.1, CostKind::L2KCenter)),
            Err(RcqError::TrivialRange(0))
        ));
        let one = AxisBox::new(vec![0, 0], vec![2, 2]);
        let ans = cluster_query(&idx, &QuerySpec::new(one, 2, 0.1, CostKind::L2KCenter)).unwrap();
        assert_eq!(ans.clustering.clusters, vec![vec![0]]);
        assert_eq!(ans.clustering.cost, 0.0);
    }

    #[test]
    fn k_exceeding_points_is_free() {
        let idx = index_of(&[[0, 0], [10, 0], [0, 10]], 8);
        let spec = QuerySpec::new(idx.points().universe(), 3, 0.1, CostKind::SumRadii);
        assert_eq!(cluster_query(&idx, &spec).unwrap().clustering.cost, 0.0);
    }

    #[test]
    fn grid_packing_is_valid() {
        let pts: Vec<[u64; 2]> = (0..64).map(|i| [i % 8 * 3, i / 8 * 3]).collect();
        let idx = index_of(&pts, 6);
        let spec = QuerySpec::new(idx.points().universe(), 2, 0.5, CostKind::LinfKCenter);
        let pk = lower_bound_and_packing(&idx, &spec).unwrap();
        // Best split is two 4x8 blocks spanning 9 by 21, radius 10.5.
        assert!(pk.lb <= 10.5);
        assert!(!pk.exact);
        for i in idx.points().ids() {
            let near = pk
                .reps
                .iter()
                .any(|&q| crate::geometry::lp_distance(idx.points().point(i), idx.points().point(q), Norm::L2).unwrap() <= pk.r);
            assert!(near, "point {i} is farther than r from the packing");
        }
    }

    #[test]
    fn expansion_adds_radius() {
        let p = PointSet::from_points(2, 4, &[vec![0, 0], vec![4, 4]]).unwrap();
        let m = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        let c = Clustering::from_clusters(&p, &m, vec![vec![0, 1]], true);
        assert_eq!(c.covers[0].size(), 2.0);
        let e = expand_clustering(&c, 0.5, &m, &p, &[0, 1]).unwrap();
        assert_eq!(e.covers[0].size(), 2.5);
        let same = expand_clustering(&c, 0.0, &m, &p, &[0, 1]).unwrap();
        assert_eq!(same.clusters, c.clusters);
        assert_eq!(same.cost, c.cost);
    }

    #[test]
    fn budget_parsing() {
        let b = SolverBudget::parse("subset_dp_max=12, allow_greedy=1").unwrap();
        assert_eq!(b.subset_dp_max, 12);
        assert!(b.allow_greedy);
        assert!(SolverBudget::parse("bogus=1").is_err());
        assert!(SolverBudget::parse("enumeration_max").is_err());
    }

    #[test]
    fn diameter_sensitivity_holds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let pts: Vec<Vec<u64>> = (0..n).map(|_| vec![rng.gen_range(0..100), rng.gen_range(0..100)]).collect();
            let p = PointSet::from_points(2, 7, &pts).unwrap();
            let ids: Vec<usize> = p.ids().collect();
            let diam = crate::geometry::euclidean_diameter(&p, &ids).unwrap();
            for kind in CostKind::ALL {
                let m = CostModel::new(kind, 2).unwrap();
                assert!(m.cluster_cost(&p, &ids) + 1e-9 >= m.c() * diam, "{kind}");
            }
        }
    }
}
