//! Orthogonal range services: a k-d tree answering extreme-point, counting,
//! reporting and bounding-box queries, plus the sampled approximation ladder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{AxisBox, PointSet};

const LEAF_SIZE: usize = 8;
const NIL: u32 = u32::MAX;

/// Which end of an axis an extreme-point query asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Clone, Debug)]
struct KdNode {
    /// Slots `start..end` of the tree's permuted arrays.
    start: u32,
    end: u32,
    left: u32,
    right: u32,
}

/// Static k-d tree over a subset of a point set. Each node keeps its bounding
/// box and, per axis, the lowest-id point attaining the minimum and maximum.
#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    ids: Vec<u32>,
    coords: Vec<u64>,
    nodes: Vec<KdNode>,
    lo: Vec<u64>,
    hi: Vec<u64>,
    /// `[node][axis][min, max]` slots into `ids`.
    arg: Vec<[u32; 2]>,
}

impl KdTree {
    pub fn build_all(points: &PointSet) -> Self {
        let ids: Vec<usize> = points.ids().collect();
        Self::build(points, &ids)
    }

    pub fn build(points: &PointSet, ids: &[usize]) -> Self {
        let dim = points.dim();
        let mut slots: Vec<u32> = ids.iter().map(|&i| i as u32).collect();
        let mut tree = KdTree {
            dim,
            ids: Vec::new(),
            coords: Vec::new(),
            nodes: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            arg: Vec::new(),
        };
        if !slots.is_empty() {
            tree.split(points, &mut slots, 0);
        }
        tree.coords = slots
            .iter()
            .flat_map(|&i| points.point(i as usize).iter().copied())
            .collect();
        tree.ids = slots;
        tree.summarize();
        tree
    }

    fn split(&mut self, points: &PointSet, slots: &mut [u32], offset: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(KdNode {
            start: offset as u32,
            end: (offset + slots.len()) as u32,
            left: NIL,
            right: NIL,
        });
        if slots.len() > LEAF_SIZE {
            let axis = (0..self.dim)
                .max_by_key(|&a| {
                    let (mn, mx) = slots.iter().fold((u64::MAX, 0), |(mn, mx), &i| {
                        let c = points.coord(i as usize, a);
                        (mn.min(c), mx.max(c))
                    });
                    mx - mn
                })
                .unwrap_or(0);
            let mid = slots.len() / 2;
            slots.select_nth_unstable_by_key(mid, |&i| (points.coord(i as usize, axis), i));
            let (a, b) = slots.split_at_mut(mid);
            let l = self.split(points, a, offset);
            let r = self.split(points, b, offset + mid);
            self.nodes[id as usize].left = l;
            self.nodes[id as usize].right = r;
        }
        id
    }

    fn summarize(&mut self) {
        let (d, n_nodes) = (self.dim, self.nodes.len());
        self.lo = vec![u64::MAX; n_nodes * d];
        self.hi = vec![0; n_nodes * d];
        self.arg = vec![[NIL; 2]; n_nodes * d];
        // Children always follow their parent, so a reverse pass is bottom-up.
        for v in (0..n_nodes).rev() {
            let node = self.nodes[v].clone();
            let candidates: Vec<(u32, u32)> = if node.left == NIL {
                (node.start..node.end).map(|s| (s, s)).collect()
            } else {
                (0..d)
                    .flat_map(|a| {
                        let (l, r) = (node.left as usize * d + a, node.right as usize * d + a);
                        [self.arg[l], self.arg[r]]
                    })
                    .flat_map(|[x, y]| [(x, x), (y, y)])
                    .collect()
            };
            for a in 0..d {
                let k = v * d + a;
                for &(s, _) in &candidates {
                    let c = self.coords[s as usize * d + a];
                    let id = self.ids[s as usize];
                    let [mn, mx] = &mut self.arg[k];
                    if *mn == NIL || (c, id) < (self.coords[*mn as usize * d + a], self.ids[*mn as usize]) {
                        *mn = s;
                    }
                    let better_max = *mx == NIL || {
                        let (bc, bid) = (self.coords[*mx as usize * d + a], self.ids[*mx as usize]);
                        c > bc || (c == bc && id < bid)
                    };
                    if better_max {
                        *mx = s;
                    }
                }
                let [mn, mx] = self.arg[k];
                self.lo[k] = self.coords[mn as usize * d + a];
                self.hi[k] = self.coords[mx as usize * d + a];
            }
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ids indexed by this tree, in tree order.
    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().map(|&i| i as usize)
    }

    #[inline]
    fn point_at(&self, slot: usize) -> &[u64] {
        &self.coords[slot * self.dim..(slot + 1) * self.dim]
    }

    #[inline]
    fn node_inside(&self, v: usize, q: &AxisBox) -> bool {
        let d = self.dim;
        (0..d).all(|a| q.lo[a] <= self.lo[v * d + a] && self.hi[v * d + a] <= q.hi[a])
    }

    #[inline]
    fn node_disjoint(&self, v: usize, q: &AxisBox) -> bool {
        let d = self.dim;
        (0..d).any(|a| q.hi[a] < self.lo[v * d + a] || self.hi[v * d + a] < q.lo[a])
    }

    /// A point of the tree inside `q` extremal along `axis`, lowest id on ties.
    pub fn extreme_point(&self, q: &AxisBox, axis: usize, dir: Extreme) -> Option<usize> {
        self.extreme_slot(q, axis, dir).map(|s| self.ids[s] as usize)
    }

    fn extreme_slot(&self, q: &AxisBox, axis: usize, dir: Extreme) -> Option<usize> {
        assert!(axis < self.dim, "axis out of range");
        if self.nodes.is_empty() {
            return None;
        }
        // Keys are compared so that larger is better.
        let key = |c: u64| match dir {
            Extreme::Max => c as i128,
            Extreme::Min => -(c as i128),
        };
        let side = match dir {
            Extreme::Min => 0,
            Extreme::Max => 1,
        };
        let d = self.dim;
        let mut best: Option<(i128, u32, usize)> = None;
        let beats = |k: i128, id: u32, best: &Option<(i128, u32, usize)>| match best {
            None => true,
            Some((bk, bid, _)) => k > *bk || (k == *bk && id < *bid),
        };
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            let v = v as usize;
            let slot = self.arg[v * d + axis][side] as usize;
            let bound = key(self.coords[slot * d + axis]);
            if !beats(bound, self.ids[slot], &best) || self.node_disjoint(v, q) {
                continue;
            }
            if self.node_inside(v, q) {
                best = Some((bound, self.ids[slot], slot));
                continue;
            }
            let node = &self.nodes[v];
            if node.left == NIL {
                for s in node.start..node.end {
                    let s = s as usize;
                    if q.contains(self.point_at(s)) {
                        let k = key(self.coords[s * d + axis]);
                        if beats(k, self.ids[s], &best) {
                            best = Some((k, self.ids[s], s));
                        }
                    }
                }
            } else {
                let bound_of = |c: u32| key(self.coords[self.arg[c as usize * d + axis][side] as usize * d + axis]);
                // Push the less promising child first so the better one is explored first.
                let (a, b) = (node.left, node.right);
                if bound_of(a) >= bound_of(b) {
                    stack.push(b);
                    stack.push(a);
                } else {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        best.map(|(_, _, slot)| slot)
    }

    pub fn count(&self, q: &AxisBox) -> usize {
        let mut total = 0;
        self.visit(q, &mut |hit| total += hit.len());
        total
    }

    pub fn report(&self, q: &AxisBox) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(q, &mut |hit| out.extend(hit.iter().map(|&i| i as usize)));
        out.sort_unstable();
        out
    }

    /// Whether any indexed point lies in `q`.
    pub fn any(&self, q: &AxisBox) -> bool {
        self.extreme_point(q, 0, Extreme::Min).is_some()
    }

    /// Bounding box of the indexed points inside `q`.
    pub fn bounding_box(&self, q: &AxisBox) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let mn = self.extreme_slot(q, a, Extreme::Min)?;
            let mx = self.extreme_slot(q, a, Extreme::Max)?;
            lo.push(self.coords[mn * self.dim + a]);
            hi.push(self.coords[mx * self.dim + a]);
        }
        Some(AxisBox::new(lo, hi))
    }

    /// Calls `hit` with runs of ids inside `q`.
    fn visit(&self, q: &AxisBox, hit: &mut dyn FnMut(&[u32])) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            let v = v as usize;
            if self.node_disjoint(v, q) {
                continue;
            }
            let node = &self.nodes[v];
            if self.node_inside(v, q) {
                hit(&self.ids[node.start as usize..node.end as usize]);
            } else if node.left == NIL {
                for s in node.start as usize..node.end as usize {
                    if q.contains(self.point_at(s)) {
                        hit(std::slice::from_ref(&self.ids[s]));
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
    }
}

/// Per-level failure probability of the sampled approximations.
pub const LADDER_FAIL: f64 = 1e-6;
/// Constant in the sample size `m(δ) = ceil(C/δ² · (ln 1/δ + ln 1/fail))`.
pub const LADDER_C: f64 = 1.0;

/// Sample size giving a δ-approximation for rectangles with probability at
/// least `1 - fail`.
pub fn sample_size(delta: f64, fail: f64) -> usize {
    let m = LADDER_C / (delta * delta) * ((1.0 / delta).ln() + (1.0 / fail).ln());
    m.ceil().max(1.0) as usize
}

/// Levels `A_1..A_L`, `L = ceil(log2 n)`, where `A_i` is a uniform sample that
/// is a `2^-i`-approximation of the point set for rectangles. A level whose
/// sample would not be smaller than the set is the whole set.
#[derive(Clone, Debug)]
pub struct ApproxLadder {
    n: usize,
    seed: u64,
    levels: Vec<Option<KdTree>>,
}

impl ApproxLadder {
    pub fn build(points: &PointSet, seed: u64) -> Self {
        let n = points.len();
        let count = (n.max(2) as f64).log2().ceil() as usize;
        let mut levels = Vec::with_capacity(count);
        for i in 1..=count {
            let m = sample_size(0.5f64.powi(i as i32), LADDER_FAIL);
            if m >= n {
                levels.push(None);
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut ids = rand::seq::index::sample(&mut rng, n, m).into_vec();
            ids.sort_unstable();
            levels.push(Some(KdTree::build(points, &ids)));
        }
        ApproxLadder { n, seed, levels }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Guarantee of level `i` (1-based).
    pub fn delta(i: usize) -> f64 {
        0.5f64.powi(i as i32)
    }

    pub fn is_full(&self, i: usize) -> bool {
        self.levels[i - 1].is_none()
    }

    pub fn level_len(&self, i: usize) -> usize {
        self.levels[i - 1].as_ref().map_or(self.n, KdTree::len)
    }

    /// Tree for level `i` (1-based); full levels resolve to `full`.
    pub fn tree<'a>(&'a self, i: usize, full: &'a KdTree) -> &'a KdTree {
        self.levels[i - 1].as_ref().unwrap_or(full)
    }

    /// Ids of level `i`, sorted.
    pub fn level_ids(&self, i: usize) -> Vec<usize> {
        match &self.levels[i - 1] {
            Some(t) => {
                let mut v: Vec<usize> = t.ids().collect();
                v.sort_unstable();
                v
            }
            None => (0..self.n).collect(),
        }
    }

    /// Smallest level whose guarantee is at most `delta`, if any sampled or
    /// full level reaches it.
    pub fn level_for(&self, delta: f64) -> Option<usize> {
        (1..=self.levels.len()).find(|&i| Self::delta(i) <= delta)
    }
}
