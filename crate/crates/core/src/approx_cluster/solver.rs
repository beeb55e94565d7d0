use crate::error::{RcqError, Result};
use crate::geometry::{linf_u64, dist2_u64, PointSet};

use super::{Aggregate, Clustering, CostKind, CostModel, SolverBudget};

/// Solves k-clustering of `ids` under `model`: exactly when the instance is
/// within the solver budget, with farthest-first greedy (flagged inexact) when
/// the budget permits it, and with a budget error otherwise.
pub fn single_shot_solve(
    points: &PointSet,
    ids: &[usize],
    k: usize,
    model: &CostModel,
    budget: &SolverBudget,
) -> Result<Clustering> {
    if ids.is_empty() {
        return Err(RcqError::Empty("single-shot solving needs at least one point"));
    }
    if k == 0 {
        return Err(RcqError::invalid("k must be positive"));
    }
    let groups = group_coincident(points, ids);
    let m = groups.len();
    let grouped = |parts: Vec<Vec<usize>>, exact: bool| {
        let clusters = parts
            .into_iter()
            .filter(|p| !p.is_empty())
            .map(|p| {
                let mut c: Vec<usize> = p.iter().flat_map(|&g| groups[g].iter().copied()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        Clustering::from_clusters(points, model, clusters, exact)
    };

    if k >= m {
        return Ok(grouped((0..m).map(|g| vec![g]).collect(), true));
    }
    let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
    if m <= budget.subset_dp_max {
        return Ok(grouped(subset_dp(points, &reps, k, model), true));
    }
    if model.kind == CostKind::LinfKCenter && m <= budget.enumeration_max {
        if let Some(parts) = linf_exact(points, &reps, k) {
            return Ok(grouped(parts, true));
        }
    }
    if budget.allow_greedy && model.is_center_type() {
        return Ok(grouped(gonzalez(points, &reps, k, model), false));
    }
    Err(RcqError::budget(format!(
        "{} with k={k} on {m} distinct points exceeds the exact solver budget",
        model.name()
    )))
}

/// Groups ids by location, each group sorted, groups ordered by smallest id.
fn group_coincident(points: &PointSet, ids: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = ids.to_vec();
    sorted.sort_by(|&a, &b| points.point(a).cmp(points.point(b)).then(a.cmp(&b)));
    sorted.dedup();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for id in sorted {
        match groups.last_mut() {
            Some(g) if points.point(g[0]) == points.point(id) => g.push(id),
            _ => groups.push(vec![id]),
        }
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

/// Exact optimum over all partitions into at most `k` parts, by memoized
/// recursion on (parts left, remaining subset). Returns parts as index lists
/// into `reps`.
fn subset_dp(points: &PointSet, reps: &[usize], k: usize, model: &CostModel) -> Vec<Vec<usize>> {
    let m = reps.len();
    assert!(m <= 24, "subset DP is exponential");
    let full = (1usize << m) - 1;
    let agg = model.aggregate();
    // Root-sum-squares is optimized on squared costs.
    let cost: Vec<f64> = (0..=full)
        .map(|mask| {
            let ids: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| reps[i]).collect();
            let c = model.cluster_cost(points, &ids);
            if agg == Aggregate::RootSumSquares {
                c * c
            } else {
                c
            }
        })
        .collect();
    let combine = |a: f64, b: f64| match agg {
        Aggregate::Max => a.max(b),
        Aggregate::Sum | Aggregate::RootSumSquares => a + b,
    };

    struct Dp<'a, F: Fn(f64, f64) -> f64> {
        cost: &'a [f64],
        combine: F,
        memo: Vec<Vec<f64>>,
        choice: Vec<Vec<usize>>,
    }
    impl<F: Fn(f64, f64) -> f64> Dp<'_, F> {
        fn solve(&mut self, j: usize, mask: usize) -> f64 {
            if mask == 0 {
                return 0.0;
            }
            if j == 1 {
                self.choice[1][mask] = mask;
                return self.cost[mask];
            }
            let cached = self.memo[j][mask];
            if !cached.is_nan() {
                return cached;
            }
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let (mut best, mut arg) = (f64::INFINITY, mask);
            // Enumerate subsets of `rest`; the part always holds the low bit.
            let mut sub = rest;
            loop {
                let part = sub | low;
                let tail = self.solve(j - 1, mask ^ part);
                let v = (self.combine)(self.cost[part], tail);
                if v < best {
                    best = v;
                    arg = part;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            self.memo[j][mask] = best;
            self.choice[j][mask] = arg;
            best
        }
    }

    let mut dp = Dp {
        cost: &cost,
        combine,
        memo: vec![Vec::new(); k + 1],
        choice: vec![Vec::new(); k + 1],
    };
    for j in 1..=k {
        dp.memo[j] = vec![f64::NAN; full + 1];
        dp.choice[j] = vec![0; full + 1];
    }
    dp.solve(k, full);
    let mut parts = Vec::new();
    let (mut j, mut mask) = (k, full);
    while mask != 0 {
        let part = dp.choice[j][mask];
        parts.push((0..m).filter(|i| part >> i & 1 == 1).collect());
        mask ^= part;
        j -= 1;
    }
    parts
}

/// Exact rectilinear k-center by binary search over integer cube edges with
/// an exact covering decision. Supports `k = 1`, any `k` on the line, `k = 2`
/// in any dimension and `k = 3` in the plane; `None` otherwise.
pub(crate) fn linf_exact(points: &PointSet, reps: &[usize], k: usize) -> Option<Vec<Vec<usize>>> {
    let d = points.dim();
    if !(k <= 2 || d == 1 || (k == 3 && d == 2)) {
        return None;
    }
    let pts: Vec<&[u64]> = reps.iter().map(|&i| points.point(i)).collect();
    let extent = bbox(&pts).map(|(lo, hi)| (0..d).map(|a| hi[a] - lo[a]).max().unwrap_or(0))?;
    let (mut lo, mut hi) = (0u64, extent);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cover_decision(&pts, k, mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let anchors = cover_decision(&pts, k, lo).expect("the full extent always fits");
    let mut parts = vec![Vec::new(); anchors.len()];
    for (i, p) in pts.iter().enumerate() {
        let j = anchors
            .iter()
            .position(|a| in_cube(p, a, lo))
            .expect("decision covers every point");
        parts[j].push(i);
    }
    Some(parts)
}

fn bbox(pts: &[&[u64]]) -> Option<(Vec<u64>, Vec<u64>)> {
    let first = pts.first()?;
    let mut lo = first.to_vec();
    let mut hi = first.to_vec();
    for p in pts {
        for a in 0..p.len() {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    Some((lo, hi))
}

fn in_cube(p: &[u64], anchor: &[u64], s: u64) -> bool {
    p.iter().zip(anchor).all(|(&x, &a)| a <= x && x - a <= s)
}

/// Lower corners of at most `k` cubes of edge `s` covering `pts`, if any.
fn cover_decision(pts: &[&[u64]], k: usize, s: u64) -> Option<Vec<Vec<u64>>> {
    let Some((lo, hi)) = bbox(pts) else {
        return Some(Vec::new());
    };
    let d = lo.len();
    if (0..d).all(|a| hi[a] - lo[a] <= s) {
        return Some(vec![lo]);
    }
    if k <= 1 {
        return None;
    }
    if d == 1 {
        let mut xs: Vec<u64> = pts.iter().map(|p| p[0]).collect();
        xs.sort_unstable();
        let mut anchors = Vec::new();
        let mut i = 0;
        while i < xs.len() {
            if anchors.len() == k {
                return None;
            }
            anchors.push(vec![xs[i]]);
            let end = xs[i] + s;
            while i < xs.len() && xs[i] <= end {
                i += 1;
            }
        }
        return Some(anchors);
    }
    if k == 2 {
        // Each axis has its low end in one cube and its high end in the
        // other; fixing the first axis removes the mirror configurations.
        for config in 0..1u32 << (d - 1) {
            let mut a = Vec::with_capacity(d);
            let mut b = Vec::with_capacity(d);
            for axis in 0..d {
                let low_in_a = axis == 0 || config >> (axis - 1) & 1 == 0;
                let (at_lo, at_hi) = (lo[axis], hi[axis].saturating_sub(s));
                if low_in_a {
                    a.push(at_lo);
                    b.push(at_hi);
                } else {
                    a.push(at_hi);
                    b.push(at_lo);
                }
            }
            if pts.iter().all(|p| in_cube(p, &a, s) || in_cube(p, &b, s)) {
                return Some(vec![a, b]);
            }
        }
        return None;
    }
    if k == 3 && d == 2 {
        // Some square of an optimal planar 3-cover sits in a bounding-box corner.
        for corner in 0..4u32 {
            let ax = if corner & 1 == 0 { lo[0] } else { hi[0].saturating_sub(s) };
            let ay = if corner & 2 == 0 { lo[1] } else { hi[1].saturating_sub(s) };
            let anchor = vec![ax, ay];
            let rest: Vec<&[u64]> = pts.iter().copied().filter(|p| !in_cube(p, &anchor, s)).collect();
            if let Some(mut others) = cover_decision(&rest, 2, s) {
                others.insert(0, anchor);
                return Some(others);
            }
        }
        return None;
    }
    None
}

/// Farthest-first traversal: a 2-approximation for k-center objectives.
fn gonzalez(points: &PointSet, reps: &[usize], k: usize, model: &CostModel) -> Vec<Vec<usize>> {
    let dist = |a: usize, b: usize| match model.kind {
        CostKind::LinfKCenter => linf_u64(points.point(a), points.point(b)) as f64,
        _ => dist2_u64(points.point(a), points.point(b)),
    };
    let mut centers = vec![0usize];
    let mut near: Vec<(f64, usize)> = (0..reps.len()).map(|i| (dist(reps[i], reps[0]), 0)).collect();
    while centers.len() < k {
        let (far, _) = near
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(b.0.cmp(&a.0)))
            .map(|(i, &(dd, _))| (i, dd))
            .unwrap();
        let c = centers.len();
        centers.push(far);
        for (i, slot) in near.iter_mut().enumerate() {
            let dd = dist(reps[i], reps[far]);
            if dd < slot.0 {
                *slot = (dd, c);
            }
        }
    }
    let mut parts = vec![Vec::new(); centers.len()];
    for (i, &(_, c)) in near.iter().enumerate() {
        parts[c].push(i);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[[u64; 2]]) -> PointSet {
        PointSet::from_points(2, 8, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn square_corners_linf() {
        let p = set(&[[0, 0], [10, 0], [0, 10], [10, 10]]);
        let ids: Vec<usize> = p.ids().collect();
        let m = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        let c = single_shot_solve(&p, &ids, 2, &m, &SolverBudget::default()).unwrap();
        assert_eq!(c.cost, 5.0);
        let big = SolverBudget {
            subset_dp_max: 0,
            ..SolverBudget::default()
        };
        let c = single_shot_solve(&p, &ids, 2, &m, &big).unwrap();
        assert_eq!(c.cost, 5.0);
        assert!(c.exact);
    }

    #[test]
    fn k_at_least_points_costs_nothing() {
        let p = set(&[[1, 2], [3, 4], [1, 2]]);
        let ids: Vec<usize> = p.ids().collect();
        for kind in CostKind::ALL {
            let m = CostModel::new(kind, 2).unwrap();
            let c = single_shot_solve(&p, &ids, 2, &m, &SolverBudget::default()).unwrap();
            assert_eq!(c.cost, 0.0);
            assert_eq!(c.clusters.len(), 2);
        }
    }

    #[test]
    fn budget_error_without_fallback() {
        let pts: Vec<[u64; 2]> = (0..30).map(|i| [i * 7 % 31, i * 3 % 29]).collect();
        let p = set(&pts);
        let ids: Vec<usize> = p.ids().collect();
        let m = CostModel::new(CostKind::L2KCenter, 2).unwrap();
        let err = single_shot_solve(&p, &ids, 3, &m, &SolverBudget::default()).unwrap_err();
        assert!(matches!(err, RcqError::Budget(_)));
        let greedy = SolverBudget {
            allow_greedy: true,
            ..SolverBudget::default()
        };
        let c = single_shot_solve(&p, &ids, 3, &m, &greedy).unwrap();
        assert!(!c.exact);
        assert!(c.clusters.len() <= 3);
    }

    #[test]
    fn dp_matches_linf_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let m = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        let enum_only = SolverBudget {
            subset_dp_max: 0,
            ..SolverBudget::default()
        };
        for _ in 0..40 {
            let n = rng.gen_range(4..13);
            let pts: Vec<[u64; 2]> = (0..n).map(|_| [rng.gen_range(0..50), rng.gen_range(0..50)]).collect();
            let p = set(&pts);
            let ids: Vec<usize> = p.ids().collect();
            for k in 2..=3 {
                let a = single_shot_solve(&p, &ids, k, &m, &SolverBudget::default()).unwrap();
                let b = single_shot_solve(&p, &ids, k, &m, &enum_only).unwrap();
                assert_eq!(a.cost, b.cost, "k={k} pts={pts:?}");
            }
        }
    }
}
