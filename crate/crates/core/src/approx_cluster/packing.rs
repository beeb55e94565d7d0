use std::collections::BinaryHeap;

use crate::error::{RcqError, Result};
use crate::geometry::AxisBox;
use crate::index::RangeClusterIndex;
use crate::range_index::Extreme;

use super::{PackingResult, PackingStats, QuerySpec};

/// Work state for one query: the octree, the range structure and counters.
struct Walker<'a> {
    index: &'a RangeClusterIndex,
    q: &'a AxisBox,
    stats: PackingStats,
}

/// Heap entry ordered by cube level, then by lowest node id.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Inner {
    level: u32,
    rev_id: std::cmp::Reverse<usize>,
}

impl Inner {
    fn new(level: u32, id: usize) -> Self {
        Inner {
            level,
            rev_id: std::cmp::Reverse(id),
        }
    }

    fn id(&self) -> usize {
        self.rev_id.0
    }
}

impl<'a> Walker<'a> {
    /// Smallest node holding every point of `S_Q ∩ cube(w)`, or `None` when
    /// that set is empty. Nodes fully inside the query are returned as is.
    fn resolve(&mut self, w: usize) -> Option<usize> {
        let tree = &self.index.octree;
        self.stats.nodes_visited += 1;
        if tree.cube_inside(w, self.q) {
            return Some(w);
        }
        let clipped = self.q.intersection(&tree.cube_box(w))?;
        let bb = self.index.kd.bounding_box(&clipped)?;
        let (u, steps) = tree.deepest_containing(&bb);
        self.stats.cd_steps += steps;
        Some(u)
    }

    fn meets(&mut self, w: usize) -> bool {
        let tree = &self.index.octree;
        self.stats.nodes_visited += 1;
        tree.cube_inside(w, self.q)
            || self
                .q
                .intersection(&tree.cube_box(w))
                .is_some_and(|clipped| self.index.kd.any(&clipped))
    }

    /// One point of `S_Q ∩ cube(v)`.
    fn pick(&self, v: usize) -> usize {
        let tree = &self.index.octree;
        if tree.cube_inside(v, self.q) {
            return tree.representative(v);
        }
        let clipped = self
            .q
            .intersection(&tree.cube_box(v))
            .expect("leaf cubes meet the query");
        self.index
            .kd
            .extreme_point(&clipped, 0, Extreme::Min)
            .expect("leaf cubes hold a query point")
    }
}

/// Phase 1 collects a cube cover of `S_Q` largest-first until it has more
/// than `k·4^d` cubes or runs out of splittable cubes; the largest remaining
/// splittable cube gives the lower bound. Phase 2 refines every splittable
/// cube down to edge `r/√d` and emits one point per cube.
pub fn lower_bound_and_packing(index: &RangeClusterIndex, spec: &QuerySpec) -> Result<PackingResult> {
    spec.validate(index.dim())?;
    let q = &spec.query;
    let count = index.kd.count(q);
    if count < 2 {
        return Err(RcqError::TrivialRange(count));
    }
    let model = spec.model(index.dim())?;
    let tree = &index.octree;
    let d = index.dim();
    let mut walker = Walker {
        index,
        q,
        stats: PackingStats::default(),
    };

    let bb = index.kd.bounding_box(q).expect("at least two points");
    let (u0, steps) = tree.deepest_containing(&bb);
    walker.stats.cd_steps += steps;
    walker.stats.nodes_visited += 1;

    let mut inner: BinaryHeap<Inner> = BinaryHeap::new();
    let mut leaves: Vec<usize> = Vec::new();
    if tree.is_leaf(u0) {
        leaves.push(u0);
    } else {
        inner.push(Inner::new(tree.level(u0), u0));
    }

    let threshold = spec.k.saturating_mul(1usize << (2 * d));
    while inner.len() + leaves.len() <= threshold {
        let Some(top) = inner.pop() else { break };
        for &w in tree.children(top.id()) {
            let Some(u) = walker.resolve(w as usize) else { continue };
            if tree.is_leaf(u) {
                leaves.push(u);
            } else {
                inner.push(Inner::new(tree.level(u), u));
            }
        }
    }
    walker.stats.phase1_cubes = inner.len() + leaves.len();

    let Some(largest) = inner.peek() else {
        // Every remaining cube holds a single location: solve exactly.
        let reps = leaves.iter().map(|&v| walker.pick(v)).collect();
        walker.stats.packing_cubes = leaves.len();
        return Ok(PackingResult {
            lb: 0.0,
            r: 0.0,
            reps,
            exact: true,
            stats: walker.stats,
        });
    };
    let lb = model.c() * (1u64 << largest.level) as f64;
    let r = spec.eps * lb / model.f(spec.k);
    debug_assert!(r > 0.0);
    let small = r / (d as f64).sqrt();
    let fits = |level: u32| ((1u64 << level) as f64) <= small;

    let mut pending: Vec<usize> = inner.into_iter().map(|e| e.id()).collect();
    while let Some(v) = pending.pop() {
        for &w in tree.children(v) {
            let w = w as usize;
            if fits(tree.level(w)) {
                if walker.meets(w) {
                    leaves.push(w);
                }
                continue;
            }
            let Some(u) = walker.resolve(w) else { continue };
            if tree.is_leaf(u) || fits(tree.level(u)) {
                leaves.push(u);
            } else {
                pending.push(u);
            }
        }
    }

    let reps = leaves.iter().map(|&v| walker.pick(v)).collect();
    walker.stats.packing_cubes = leaves.len();
    Ok(PackingResult {
        lb,
        r,
        reps,
        exact: false,
        stats: walker.stats,
    })
}

/// Upper bound on the packing size for the given parameters.
pub fn packing_size_bound(k: usize, eps: f64, c: f64, f: f64, d: usize) -> f64 {
    let per_cube = (2.0 * (d as f64).sqrt() * f / (c * eps)).ceil();
    ((k << (2 * d)) + (1 << d)) as f64 * per_cube.powi(d as i32)
}
