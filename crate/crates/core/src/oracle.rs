//! Brute-force reference solvers and verifiers.
//!
//! Written from the problem definitions with no engine code beyond the
//! geometry primitives. They are slow by design; each has a size budget.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::approx_cluster::{CostKind, CostModel};
use crate::error::{RcqError, Result};
use crate::geometry::{enclosing_radius, hull_perimeter, lp_distance, min_enclosing_ball, Norm, PointSet};

pub const DP_MAX_POINTS: usize = 16;
pub const ENUM_MAX_POINTS: usize = 400;
pub const CAPACITATED_MAX_POINTS: usize = 24;

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub opt: f64,
    /// Clusters achieving `opt`.
    pub clusters: Vec<Vec<usize>>,
    pub instance_hash: u64,
    pub runtime: Duration,
}

fn instance_hash(points: &PointSet, ids: &[usize], k: usize) -> u64 {
    let mut h = DefaultHasher::new();
    k.hash(&mut h);
    for &i in ids {
        points.point(i).hash(&mut h);
    }
    h.finish()
}

/// Cost of one cluster under `kind`, from the definitions.
fn cluster_value(points: &PointSet, ids: &[usize], kind: CostKind) -> f64 {
    if ids.is_empty() {
        return 0.0;
    }
    match kind {
        CostKind::LinfKCenter => enclosing_radius(points, ids, Norm::LInf).map_or(0.0, |r| r.0),
        CostKind::L2KCenter | CostKind::SumRadii | CostKind::RssRadii => {
            let pts: Vec<Vec<f64>> = ids.iter().map(|&i| points.point_f64(i)).collect();
            min_enclosing_ball(&pts).radius
        }
        CostKind::PerimeterSum => hull_perimeter(points, ids),
    }
}

/// Folds cluster values; root-sum-squares stays squared until the end.
fn fold(kind: CostKind, acc: f64, v: f64) -> f64 {
    match kind {
        CostKind::LinfKCenter | CostKind::L2KCenter => acc.max(v),
        CostKind::SumRadii | CostKind::PerimeterSum => acc + v,
        CostKind::RssRadii => acc + v * v,
    }
}

fn finish(kind: CostKind, acc: f64) -> f64 {
    if kind == CostKind::RssRadii {
        acc.sqrt()
    } else {
        acc
    }
}

/// Distinct locations among `ids`, each with the ids sitting there.
fn locations(points: &PointSet, ids: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = ids.to_vec();
    sorted.sort_by(|&a, &b| points.point(a).cmp(points.point(b)).then(a.cmp(&b)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in sorted {
        match out.last_mut() {
            Some(g) if points.point(g[0]) == points.point(i) => g.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Exact optimum: subset DP for at most 16 locations, otherwise square-cover
/// enumeration for L∞ k-center with `k ≤ 3` and at most 400 locations.
pub fn brute_kcenter(points: &PointSet, ids: &[usize], k: usize, model: &CostModel) -> Result<OracleReport> {
    let m = locations(points, ids).len();
    if m <= DP_MAX_POINTS {
        brute_kcenter_dp(points, ids, k, model)
    } else if model.kind == CostKind::LinfKCenter && k <= 3 && m <= ENUM_MAX_POINTS {
        brute_kcenter_enum(points, ids, k)
    } else {
        Err(RcqError::budget(format!(
            "oracle supports {DP_MAX_POINTS} locations, or {ENUM_MAX_POINTS} for L∞ with k ≤ 3; got {m}"
        )))
    }
}

/// Minimum over all partitions of the locations into at most `k` parts.
pub fn brute_kcenter_dp(points: &PointSet, ids: &[usize], k: usize, model: &CostModel) -> Result<OracleReport> {
    let start = Instant::now();
    let locs = locations(points, ids);
    let m = locs.len();
    if m > DP_MAX_POINTS {
        return Err(RcqError::budget(format!("subset DP takes at most {DP_MAX_POINTS} locations")));
    }
    let kind = model.kind;
    let full = (1usize << m) - 1;
    let value: Vec<f64> = (0..=full)
        .map(|mask| {
            let members: Vec<usize> = (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| locs[b][0]).collect();
            cluster_value(points, &members, kind)
        })
        .collect();
    // best[j][mask]: optimum for `mask` with at most j clusters.
    let mut best = vec![vec![f64::INFINITY; full + 1]; k + 1];
    let mut pick = vec![vec![0usize; full + 1]; k + 1];
    for row in best.iter_mut() {
        row[0] = 0.0;
    }
    for j in 1..=k {
        for mask in 1..=full {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                let v = fold(kind, best[j - 1][mask ^ part], value[part]);
                if v < best[j][mask] {
                    best[j][mask] = v;
                    pick[j][mask] = part;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
    }
    let mut clusters = Vec::new();
    let (mut j, mut mask) = (k, full);
    while mask != 0 {
        let part = pick[j][mask];
        let mut c: Vec<usize> = (0..m).filter(|&b| part >> b & 1 == 1).flat_map(|b| locs[b].iter().copied()).collect();
        c.sort_unstable();
        clusters.push(c);
        mask ^= part;
        j -= 1;
    }
    Ok(OracleReport {
        opt: if m == 0 { 0.0 } else { finish(kind, best[k][full]) },
        clusters,
        instance_hash: instance_hash(points, ids, k),
        runtime: start.elapsed(),
    })
}

/// L∞ k-center by enumerating square sides and checking cover by `k` squares.
pub fn brute_kcenter_enum(points: &PointSet, ids: &[usize], k: usize) -> Result<OracleReport> {
    let start = Instant::now();
    if points.dim() != 2 {
        return Err(RcqError::DimensionMismatch {
            expected: 2,
            got: points.dim(),
        });
    }
    let pts = planar(points, ids);
    let side = min_square_side(&pts, k);
    let squares = cover_squares(&pts, k, side).expect("optimal side is feasible");
    let mut clusters = vec![Vec::new(); squares.len()];
    for (&i, p) in ids.iter().zip(&pts) {
        let j = squares.iter().position(|&lo| in_square(lo, side, *p)).expect("covered");
        clusters[j].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    Ok(OracleReport {
        opt: side as f64 / 2.0,
        clusters,
        instance_hash: instance_hash(points, ids, k),
        runtime: start.elapsed(),
    })
}

fn planar(points: &PointSet, ids: &[usize]) -> Vec<[u64; 2]> {
    ids.iter().map(|&i| [points.coord(i, 0), points.coord(i, 1)]).collect()
}

fn in_square(lo: [u64; 2], side: u64, p: [u64; 2]) -> bool {
    (0..2).all(|a| lo[a] <= p[a] && p[a] - lo[a] <= side)
}

/// Lower-left corners of at most `k` squares of side `side` covering `pts`.
/// The leftmost point fixes the left edge of its square; its bottom edge
/// is tried at every point height within reach.
fn cover_squares(pts: &[[u64; 2]], k: usize, side: u64) -> Option<Vec<[u64; 2]>> {
    let Some(&left) = pts.iter().min_by_key(|p| p[0]) else {
        return Some(Vec::new());
    };
    if k == 0 {
        return None;
    }
    let mut bottoms: Vec<u64> = pts
        .iter()
        .filter(|p| p[1] <= left[1] && left[1] - p[1] <= side)
        .map(|p| p[1])
        .collect();
    bottoms.sort_unstable();
    bottoms.dedup();
    for y in bottoms {
        let lo = [left[0], y];
        let rest: Vec<[u64; 2]> = pts.iter().copied().filter(|&p| !in_square(lo, side, p)).collect();
        if let Some(mut more) = cover_squares(&rest, k - 1, side) {
            more.insert(0, lo);
            return Some(more);
        }
    }
    None
}

fn side_candidates(pts: &[[u64; 2]]) -> Vec<u64> {
    let mut c = vec![0];
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            c.push(p[0].abs_diff(q[0]));
            c.push(p[1].abs_diff(q[1]));
        }
    }
    c.sort_unstable();
    c.dedup();
    c
}

fn min_square_side(pts: &[[u64; 2]], k: usize) -> u64 {
    let cands = side_candidates(pts);
    let i = cands.partition_point(|&s| cover_squares(pts, k, s).is_none());
    cands[i]
}

/// Smallest side of `k` congruent axis-parallel squares covering the points.
pub fn brute_square_cover(points: &PointSet, ids: &[usize], k: usize) -> u64 {
    min_square_side(&planar(points, ids), k)
}

/// Rectilinear 2-center by the anchored pair: for both diagonals of the
/// bounding box, the smallest side such that every point is within that
/// L∞ distance of one of the two corners.
pub fn anchored_two_center(points: &PointSet, ids: &[usize]) -> u64 {
    let pts = planar(points, ids);
    let Some(bb) = bbox(&pts) else { return 0 };
    let diagonals = [
        ([bb[0][0], bb[1][1]], [bb[1][0], bb[0][1]]),
        ([bb[1][0], bb[1][1]], [bb[0][0], bb[0][1]]),
    ];
    let linf = |a: [u64; 2], b: [u64; 2]| a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1]));
    let mut best = u64::MAX;
    for (c, c2) in diagonals {
        let mut sizes: Vec<u64> = pts.iter().flat_map(|&p| [linf(p, c), linf(p, c2)]).collect();
        sizes.sort_unstable();
        if let Some(&s) = sizes.iter().find(|&&s| pts.iter().all(|&p| linf(p, c) <= s || linf(p, c2) <= s)) {
            best = best.min(s);
        }
    }
    best
}

/// Rectilinear 3-center with one square anchored at a bounding-box corner
/// and the rest covered by two free squares.
pub fn anchored_three_center(points: &PointSet, ids: &[usize]) -> u64 {
    let pts = planar(points, ids);
    let Some(bb) = bbox(&pts) else { return 0 };
    let feasible = |s: u64| {
        [0, 1].iter().any(|&cx| {
            [0, 1].iter().any(|&cy| {
                let corner = [bb[cx][0], bb[cy][1]];
                let rest: Vec<[u64; 2]> = pts
                    .iter()
                    .copied()
                    .filter(|p| p[0].abs_diff(corner[0]).max(p[1].abs_diff(corner[1])) > s)
                    .collect();
                cover_squares(&rest, 2, s).is_some()
            })
        })
    };
    let cands = side_candidates(&pts);
    cands[cands.partition_point(|&s| !feasible(s))]
}

fn bbox(pts: &[[u64; 2]]) -> Option<[[u64; 2]; 2]> {
    let first = *pts.first()?;
    Some(pts.iter().fold([first, first], |[lo, hi], p| {
        [[lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])]]
    }))
}

/// Capacity of a cluster when `m` points are split into `k` clusters.
pub fn capacity(m: usize, k: usize, alpha: f64) -> usize {
    (alpha * m as f64 / k as f64 + 1e-9).floor() as usize
}

/// Exact capacitated rectilinear k-center for `k ≤ 2`: the smallest square
/// edge such that the points split into `k` groups of at most
/// `⌊α·m/k⌋` points, each fitting in a square of that edge.
pub fn brute_capacitated(points: &PointSet, ids: &[usize], k: usize, alpha: f64) -> Result<OracleReport> {
    let start = Instant::now();
    let m = ids.len();
    if m > CAPACITATED_MAX_POINTS || !(1..=2).contains(&k) || points.dim() != 2 {
        return Err(RcqError::budget(format!(
            "capacitated oracle takes planar inputs with at most {CAPACITATED_MAX_POINTS} points and k ≤ 2"
        )));
    }
    let cap = capacity(m, k, alpha);
    if m > k * cap {
        return Err(RcqError::Infeasible(format!("{m} points exceed {k} clusters of {cap}")));
    }
    let pts = planar(points, ids);
    // Each square can slide until a member touches its left and bottom edges.
    let mut corners: Vec<[u64; 2]> = pts.iter().flat_map(|p| pts.iter().map(move |q| [p[0], q[1]])).collect();
    corners.sort_unstable();
    corners.dedup();
    let try_side = |s: u64| -> Option<Vec<Vec<usize>>> {
        if k == 1 {
            return corners
                .iter()
                .any(|&lo| pts.iter().all(|&p| in_square(lo, s, p)))
                .then(|| vec![ids.to_vec()]);
        }
        for (i, &a) in corners.iter().enumerate() {
            for &b in &corners[i..] {
                let (mut only_a, mut only_b, mut both) = (Vec::new(), Vec::new(), Vec::new());
                let mut ok = true;
                for (&id, &p) in ids.iter().zip(&pts) {
                    match (in_square(a, s, p), in_square(b, s, p)) {
                        (true, true) => both.push(id),
                        (true, false) => only_a.push(id),
                        (false, true) => only_b.push(id),
                        (false, false) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok || only_a.len() > cap || only_b.len() > cap {
                    continue;
                }
                let fill = cap - only_a.len();
                let (to_a, to_b) = both.split_at(fill.min(both.len()));
                only_a.extend_from_slice(to_a);
                only_b.extend_from_slice(to_b);
                if only_b.len() <= cap {
                    return Some(vec![only_a, only_b]);
                }
            }
        }
        None
    };
    let cands = side_candidates(&pts);
    let i = cands.partition_point(|&s| try_side(s).is_none());
    let clusters = try_side(cands[i]).expect("largest side is feasible");
    Ok(OracleReport {
        opt: cands[i] as f64,
        clusters,
        instance_hash: instance_hash(points, ids, k),
        runtime: start.elapsed(),
    })
}

/// Smallest common interval length covering sorted `xs` with `k` intervals,
/// by binary search on the length and greedy feasibility.
pub fn dp_1d(xs: &[u64], k: usize) -> u64 {
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    let (Some(&first), Some(&last)) = (xs.first(), xs.last()) else { return 0 };
    let fits = |len: u64| {
        let mut start = 0;
        for _ in 0..k {
            let reach = xs[start] + len;
            start += xs[start..].partition_point(|&x| x <= reach);
            if start == xs.len() {
                return true;
            }
        }
        false
    };
    let (mut lo, mut hi) = (0, last - first);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// The same optimum by the interval DP `T[j][i] = min_t max(x_t − x_i, T[j−1][t+1])`.
pub fn dp_1d_table(xs: &[u64], k: usize) -> u64 {
    let n = xs.len();
    if n == 0 {
        return 0;
    }
    // cur[i]: optimum for the suffix starting at i with the current j.
    let mut cur: Vec<u64> = (0..=n).map(|i| if i == n { 0 } else { xs[n - 1] - xs[i] }).collect();
    for _ in 1..k {
        let mut next = vec![0u64; n + 1];
        for i in 0..n {
            next[i] = (i..n).map(|t| (xs[t] - xs[i]).max(cur[t + 1])).min().unwrap();
        }
        cur = next;
    }
    cur[0]
}

/// Whether every point of `sub` is within Euclidean distance `r` of a point
/// of `packing`, and `packing ⊆ sub`.
pub fn verify_weak_packing(points: &PointSet, sub: &[usize], packing: &[usize], r: f64) -> bool {
    let mut members = sub.to_vec();
    members.sort_unstable();
    if !packing.iter().all(|q| members.binary_search(q).is_ok()) {
        return false;
    }
    let tol = 1e-9 * (1.0 + r);
    sub.iter().all(|&p| {
        packing.iter().any(|&q| {
            lp_distance(points.point(p), points.point(q), Norm::L2).is_ok_and(|d| d <= r + tol)
        })
    })
}

/// Largest rectangle discrepancy `| |P∩σ|/|P| − |A∩σ|/|A| |` over closed
/// axis-parallel rectangles, with `A` counted as a multiset.
pub fn max_rect_discrepancy(points: &PointSet, p: &[usize], a: &[usize]) -> f64 {
    if p.is_empty() || a.is_empty() {
        return f64::INFINITY;
    }
    let mut xs: Vec<u64> = p.iter().chain(a).map(|&i| points.coord(i, 0)).collect();
    let mut ys: Vec<u64> = p.iter().chain(a).map(|&i| points.coord(i, 1)).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    // Weight |A| per point of P and −|P| per point of A, on the coordinate grid.
    let mut grid = vec![vec![0i64; ys.len()]; xs.len()];
    let cell = |i: usize| {
        (
            xs.binary_search(&points.coord(i, 0)).unwrap(),
            ys.binary_search(&points.coord(i, 1)).unwrap(),
        )
    };
    for &i in p {
        let (cx, cy) = cell(i);
        grid[cx][cy] += a.len() as i64;
    }
    for &i in a {
        let (cx, cy) = cell(i);
        grid[cx][cy] -= p.len() as i64;
    }
    let mut best = 0i64;
    let mut col = vec![0i64; ys.len()];
    for left in 0..xs.len() {
        col.iter_mut().for_each(|c| *c = 0);
        for row in &grid[left..] {
            for (c, g) in col.iter_mut().zip(row) {
                *c += g;
            }
            // Kadane for the largest and the smallest run sum.
            let (mut hi, mut lo) = (0i64, 0i64);
            for &c in &col {
                hi = (hi + c).max(c);
                lo = (lo + c).min(c);
                best = best.max(hi).max(-lo);
            }
        }
    }
    best as f64 / (p.len() as f64 * a.len() as f64)
}

/// Whether `a` is a `delta`-approximation of `p` for rectangles.
pub fn verify_delta_approx(points: &PointSet, p: &[usize], a: &[usize], delta: f64) -> bool {
    !a.is_empty() && max_rect_discrepancy(points, p, a) <= delta + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(pts: &[[u64; 2]]) -> PointSet {
        let v: Vec<Vec<u64>> = pts.iter().map(|p| p.to_vec()).collect();
        PointSet::from_points(2, 16, &v).unwrap()
    }

    fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn kcenter_examples() {
        let ps = set(&[[0, 0], [4, 0]]);
        let linf = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        assert_eq!(brute_kcenter(&ps, &all(2), 1, &linf).unwrap().opt, 2.0);
        assert_eq!(brute_kcenter(&ps, &all(2), 2, &linf).unwrap().opt, 0.0);
        let ps = set(&[[0, 0], [0, 10], [10, 0], [10, 10]]);
        let rep = brute_kcenter(&ps, &all(4), 2, &linf).unwrap();
        assert_eq!(rep.opt, 5.0);
        assert!(rep.clusters.len() <= 2);
    }

    #[test]
    fn dp_and_enumeration_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let linf = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        for _ in 0..40 {
            let pts: Vec<[u64; 2]> = (0..12).map(|_| [rng.gen_range(0..50), rng.gen_range(0..50)]).collect();
            let ps = set(&pts);
            for k in 1..=3 {
                let dp = brute_kcenter_dp(&ps, &all(12), k, &linf).unwrap();
                let en = brute_kcenter_enum(&ps, &all(12), k).unwrap();
                assert_eq!(dp.opt, en.opt);
                let worst = en.clusters.iter().map(|c| cluster_value(&ps, c, CostKind::LinfKCenter)).fold(0.0, f64::max);
                assert_eq!(worst, en.opt);
            }
        }
    }

    #[test]
    fn square_cover_oracles_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..150 {
            let n = rng.gen_range(1..14);
            let pts: Vec<[u64; 2]> = (0..n).map(|_| [rng.gen_range(0..40), rng.gen_range(0..40)]).collect();
            let ps = set(&pts);
            assert_eq!(brute_square_cover(&ps, &all(n), 2), anchored_two_center(&ps, &all(n)));
            assert_eq!(brute_square_cover(&ps, &all(n), 3), anchored_three_center(&ps, &all(n)));
        }
    }

    #[test]
    fn capacitated_examples() {
        let ps = set(&[[0, 0], [1, 0], [10, 0]]);
        // Capacity ⌊1.4·3/2⌋ = 2.
        assert_eq!(brute_capacitated(&ps, &all(3), 2, 1.4).unwrap().opt, 1.0);
        let ps = set(&[[0, 0], [1, 0], [2, 0], [3, 0]]);
        let loose = brute_capacitated(&ps, &all(4), 2, 2.0).unwrap().opt;
        let linf = CostModel::new(CostKind::LinfKCenter, 2).unwrap();
        assert_eq!(loose, 2.0 * brute_kcenter(&ps, &all(4), 2, &linf).unwrap().opt);
        // Capacity 2 keeps each far pair together.
        let ps = set(&[[0, 0], [1, 0], [100, 0], [101, 0]]);
        let rep = brute_capacitated(&ps, &all(4), 2, 1.0).unwrap();
        assert_eq!(rep.opt, 1.0);
        assert!(rep.clusters.iter().all(|c| c.len() <= 2));
    }

    #[test]
    fn one_dimensional_examples() {
        assert_eq!(dp_1d(&[0, 1, 5, 6], 2), 1);
        assert_eq!(dp_1d_table(&[0, 1, 5, 6], 2), 1);
        assert_eq!(dp_1d(&[0, 1, 5, 6], 4), 0);
        assert_eq!(dp_1d(&[0, 1, 5, 6], 1), 6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let mut xs: Vec<u64> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..100)).collect();
            xs.sort_unstable();
            let k = rng.gen_range(1..6);
            assert_eq!(dp_1d(&xs, k), dp_1d_table(&xs, k));
        }
    }

    #[test]
    fn packing_examples() {
        let ps = set(&[[0, 0], [3, 4], [6, 8]]);
        assert!(verify_weak_packing(&ps, &all(3), &all(3), 0.0));
        assert!(!verify_weak_packing(&ps, &all(3), &[], 1.0));
        assert!(verify_weak_packing(&ps, &all(3), &[1], 5.0));
        assert!(!verify_weak_packing(&ps, &all(3), &[1], 4.9));
    }

    #[test]
    fn discrepancy_examples() {
        let ps = set(&[[0, 0], [1, 1], [2, 2], [3, 3]]);
        assert!(verify_delta_approx(&ps, &all(4), &all(4), 0.0));
        assert!(verify_delta_approx(&ps, &[2], &[2], 0.0));
        assert!(!verify_delta_approx(&ps, &all(4), &[], 1.0));
        // A = {p0}: the rectangle around p0 alone differs by 1 − 1/4.
        assert!((max_rect_discrepancy(&ps, &all(4), &[0]) - 0.75).abs() < 1e-12);
        assert!(verify_delta_approx(&ps, &all(4), &[0, 3], 0.5));
        assert!(!verify_delta_approx(&ps, &all(4), &[0, 3], 0.49));
    }

    #[test]
    fn discrepancy_matches_rectangle_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let pts: Vec<[u64; 2]> = (0..15).map(|_| [rng.gen_range(0..8), rng.gen_range(0..8)]).collect();
            let ps = set(&pts);
            let a: Vec<usize> = (0..15).filter(|_| rng.gen_bool(0.4)).collect();
            if a.is_empty() {
                continue;
            }
            // Every closed rectangle with corners on the half-integer grid.
            let mut want: f64 = 0.0;
            for x0 in 0..8u64 {
                for x1 in x0..8 {
                    for y0 in 0..8u64 {
                        for y1 in y0..8 {
                            let inside = |i: &usize| {
                                let p = pts[*i];
                                (x0..=x1).contains(&p[0]) && (y0..=y1).contains(&p[1])
                            };
                            let fp = (0..15).filter(inside).count() as f64 / 15.0;
                            let fa = a.iter().filter(|i| inside(i)).count() as f64 / a.len() as f64;
                            want = want.max((fp - fa).abs());
                        }
                    }
                }
            }
            assert!((max_rect_discrepancy(&ps, &all(15), &a) - want).abs() < 1e-12);
        }
    }
}
