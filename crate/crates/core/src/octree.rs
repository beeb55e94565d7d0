//! Compressed octree over a point set, and its centroid decomposition.
//!
//! Nodes store the *tight* canonical cube of their points: an internal node's
//! cube is the smallest canonical cube holding all of its points, so donut
//! regions never appear and compression shows up as a child whose level is
//! more than one below its parent. Every internal node has at least two
//! children. Leaves are unit cells and may hold several coincident points.
//!
//! Node ids are assigned in preorder; the root is node 0.

use std::cmp::Ordering;

use crate::error::{RcqError, Result};
use crate::geometry::{common_level, AxisBox, CanonicalCube, PointSet};

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedOctree {
    dim: usize,
    levels: Vec<u32>,
    anchors: Vec<u64>,
    /// `children[child_start[v]..child_start[v + 1]]` are the children of `v`.
    child_start: Vec<u32>,
    children: Vec<u32>,
    parent: Vec<u32>,
    /// Each node's points are `order[start[v]..end[v]]`.
    start: Vec<u32>,
    end: Vec<u32>,
    order: Vec<u32>,
    cd: CentroidDecomposition,
}

/// Borrowed view of one node.
#[derive(Clone, Copy, Debug)]
pub struct OctreeNode<'a> {
    tree: &'a CompressedOctree,
    pub id: usize,
}

impl<'a> OctreeNode<'a> {
    pub fn cube(&self) -> CanonicalCube {
        self.tree.cube(self.id)
    }

    pub fn children(&self) -> &'a [u32] {
        self.tree.children(self.id)
    }

    pub fn representative(&self) -> usize {
        self.tree.representative(self.id)
    }

    pub fn subtree_count(&self) -> usize {
        self.tree.subtree_count(self.id)
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_empty()
    }
}

/// Z-order comparison without materializing interleaved codes: the axis
/// holding the most significant differing bit decides.
pub fn morton_cmp(a: &[u64], b: &[u64]) -> Ordering {
    let mut axis = 0;
    let mut top = 0u64;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let diff = x ^ y;
        if top < diff && top < (top ^ diff) {
            axis = i;
            top = diff;
        }
    }
    a[axis].cmp(&b[axis])
}

struct Draft {
    level: u32,
    anchor_of: u32,
    start: u32,
    end: u32,
    children: Vec<u32>,
}

impl CompressedOctree {
    pub fn build(points: &PointSet) -> Result<Self> {
        if points.is_empty() {
            return Err(RcqError::Empty("cannot build an octree over no points"));
        }
        let dim = points.dim();
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        order.sort_by(|&a, &b| {
            morton_cmp(points.point(a as usize), points.point(b as usize)).then(a.cmp(&b))
        });

        // Coincident points form one leaf.
        let mut drafts: Vec<Draft> = Vec::new();
        let mut leaves: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let mut j = i + 1;
            while j < order.len() && points.point(order[j] as usize) == points.point(order[i] as usize) {
                j += 1;
            }
            leaves.push(drafts.len() as u32);
            drafts.push(Draft {
                level: 0,
                anchor_of: order[i],
                start: i as u32,
                end: j as u32,
                children: Vec::new(),
            });
            i = j;
        }

        // Rightmost-path stack construction over adjacent common levels.
        let mut stack: Vec<u32> = vec![leaves[0]];
        for w in leaves.windows(2) {
            let (prev, next) = (w[0] as usize, w[1]);
            let level = common_level(
                points.point(drafts[prev].anchor_of as usize),
                points.point(drafts[next as usize].anchor_of as usize),
            );
            let mut last: Option<u32> = None;
            while let Some(&top) = stack.last() {
                if drafts[top as usize].level >= level {
                    break;
                }
                stack.pop();
                if let Some(l) = last {
                    drafts[top as usize].children.push(l);
                }
                last = Some(top);
            }
            let last = last.expect("a leaf is always popped before an internal level");
            match stack.last() {
                Some(&top) if drafts[top as usize].level == level => {
                    drafts[top as usize].children.push(last);
                }
                _ => {
                    let id = drafts.len() as u32;
                    drafts.push(Draft {
                        level,
                        anchor_of: drafts[next as usize].anchor_of,
                        start: 0,
                        end: 0,
                        children: vec![last],
                    });
                    stack.push(id);
                }
            }
            stack.push(next);
        }
        let mut last: Option<u32> = None;
        while let Some(top) = stack.pop() {
            if let Some(l) = last {
                drafts[top as usize].children.push(l);
            }
            last = Some(top);
        }
        let root = last.expect("nonempty");

        // Renumber in preorder and flatten.
        let n_nodes = drafts.len();
        let mut levels = Vec::with_capacity(n_nodes);
        let mut anchors = Vec::with_capacity(n_nodes * dim);
        let mut child_start = Vec::with_capacity(n_nodes + 1);
        let mut children = Vec::with_capacity(n_nodes.saturating_sub(1));
        let mut parent = vec![NONE; n_nodes];
        let mut start = Vec::with_capacity(n_nodes);
        let mut end = Vec::with_capacity(n_nodes);
        let mut new_id = vec![NONE; n_nodes];
        let mut preorder = Vec::with_capacity(n_nodes);
        let mut dfs = vec![root];
        while let Some(v) = dfs.pop() {
            new_id[v as usize] = preorder.len() as u32;
            preorder.push(v);
            dfs.extend(drafts[v as usize].children.iter().rev());
        }
        // Ranges bottom-up: children are contiguous in Z-order.
        for &v in preorder.iter().rev() {
            let d = &drafts[v as usize];
            if !d.children.is_empty() {
                let s = drafts[d.children[0] as usize].start;
                let e = drafts[*d.children.last().unwrap() as usize].end;
                let d = &mut drafts[v as usize];
                d.start = s;
                d.end = e;
            }
        }
        for &v in &preorder {
            let d = &drafts[v as usize];
            levels.push(d.level);
            let p = points.point(d.anchor_of as usize);
            anchors.extend(CanonicalCube::containing(p, d.level).anchor);
            child_start.push(children.len() as u32);
            for &c in &d.children {
                children.push(new_id[c as usize]);
                parent[new_id[c as usize] as usize] = new_id[v as usize];
            }
            start.push(d.start);
            end.push(d.end);
        }
        child_start.push(children.len() as u32);

        Ok(Self::assemble(dim, levels, anchors, child_start, children, parent, start, end, order))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        dim: usize,
        levels: Vec<u32>,
        anchors: Vec<u64>,
        child_start: Vec<u32>,
        children: Vec<u32>,
        parent: Vec<u32>,
        start: Vec<u32>,
        end: Vec<u32>,
        order: Vec<u32>,
    ) -> Self {
        let mut tree = CompressedOctree {
            dim,
            levels,
            anchors,
            child_start,
            children,
            parent,
            start,
            end,
            order,
            cd: CentroidDecomposition::default(),
        };
        tree.cd = CentroidDecomposition::build(&tree);
        tree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.levels.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> OctreeNode<'_> {
        OctreeNode { tree: self, id }
    }

    #[inline]
    pub fn level(&self, v: usize) -> u32 {
        self.levels[v]
    }

    #[inline]
    pub fn size(&self, v: usize) -> u64 {
        1u64 << self.levels[v]
    }

    #[inline]
    pub fn anchor(&self, v: usize) -> &[u64] {
        &self.anchors[v * self.dim..(v + 1) * self.dim]
    }

    pub fn cube(&self, v: usize) -> CanonicalCube {
        CanonicalCube {
            level: self.levels[v],
            anchor: self.anchor(v).to_vec(),
        }
    }

    pub fn cube_box(&self, v: usize) -> AxisBox {
        let last = self.size(v) - 1;
        let a = self.anchor(v);
        AxisBox::new(a.to_vec(), a.iter().map(|&x| x + last).collect())
    }

    /// `z ⊆ cube(v)` for a closed box `z`.
    #[inline]
    pub fn cube_contains_box(&self, v: usize, z: &AxisBox) -> bool {
        let l = self.levels[v];
        let a = self.anchor(v);
        (0..self.dim).all(|i| (z.lo[i] >> l) == (a[i] >> l) && (z.hi[i] >> l) == (a[i] >> l))
    }

    /// `cube(v) ⊆ q` for a closed box `q`.
    #[inline]
    pub fn cube_inside(&self, v: usize, q: &AxisBox) -> bool {
        let last = self.size(v) - 1;
        let a = self.anchor(v);
        (0..self.dim).all(|i| q.lo[i] <= a[i] && a[i] + last <= q.hi[i])
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[self.child_start[v] as usize..self.child_start[v + 1] as usize]
    }

    #[inline]
    pub fn is_leaf(&self, v: usize) -> bool {
        self.child_start[v] == self.child_start[v + 1]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then(|| self.parent[v] as usize)
    }

    pub fn representative(&self, v: usize) -> usize {
        self.order[self.start[v] as usize] as usize
    }

    pub fn subtree_count(&self, v: usize) -> usize {
        (self.end[v] - self.start[v]) as usize
    }

    /// Ids of the points stored below `v`.
    pub fn points_of(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.order[self.start[v] as usize..self.end[v] as usize]
            .iter()
            .map(|&i| i as usize)
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.node_count()];
        let mut best = 0;
        for v in 1..self.node_count() {
            depth[v] = depth[self.parent[v] as usize] + 1;
            best = best.max(depth[v]);
        }
        best
    }

    pub fn centroid_decomposition(&self) -> &CentroidDecomposition {
        &self.cd
    }

    /// Deepest node whose cube contains `z`, searched through the centroid
    /// decomposition. Returns the node and the number of centroid nodes
    /// visited. A box not inside the root cube maps to the root.
    pub fn deepest_containing(&self, z: &AxisBox) -> (usize, usize) {
        let root = self.root();
        if !self.cube_contains_box(root, z) {
            return (root, 1);
        }
        let mut best = root;
        let mut visits = 0;
        let mut cur = self.cd.root;
        while cur != NONE {
            visits += 1;
            let v = cur as usize;
            if self.cube_contains_box(v, z) {
                best = v;
                let base = self.child_start[v] as usize;
                let hit = self
                    .children(v)
                    .iter()
                    .position(|&w| self.cube_contains_box(w as usize, z));
                match hit {
                    Some(j) => cur = self.cd.down[base + j],
                    None => return (v, visits),
                }
            } else {
                cur = self.cd.up[v];
            }
        }
        (best, visits)
    }

    /// Reference implementation: scan every node.
    pub fn deepest_containing_scan(&self, z: &AxisBox) -> usize {
        (0..self.node_count())
            .filter(|&v| self.cube_contains_box(v, z))
            .max_by_key(|&v| (-(self.levels[v] as i64), std::cmp::Reverse(v)))
            .unwrap_or(self.root())
    }

    pub(crate) fn raw_parts(&self) -> RawOctree<'_> {
        RawOctree {
            levels: &self.levels,
            anchors: &self.anchors,
            child_start: &self.child_start,
            start: &self.start,
            end: &self.end,
            order: &self.order,
        }
    }

    /// Rebuilds a tree from its preorder node array. Validates structure.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_raw(
        dim: usize,
        n_points: usize,
        levels: Vec<u32>,
        anchors: Vec<u64>,
        child_counts: Vec<u32>,
        start: Vec<u32>,
        end: Vec<u32>,
        order: Vec<u32>,
    ) -> Result<Self> {
        let n = levels.len();
        let bad = |m: &str| RcqError::Format(format!("octree: {m}"));
        if n == 0 || anchors.len() != n * dim || child_counts.len() != n || start.len() != n || end.len() != n {
            return Err(bad("inconsistent array lengths"));
        }
        if order.len() != n_points {
            return Err(bad("order length differs from point count"));
        }
        // Preorder + child counts determine the shape.
        let mut child_start = Vec::with_capacity(n + 1);
        let mut children = vec![0u32; n - 1];
        let mut parent = vec![NONE; n];
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0u32;
        for &c in &child_counts {
            child_start.push(acc);
            offsets.push(acc);
            acc = acc.checked_add(c).ok_or_else(|| bad("child count overflow"))?;
        }
        if acc as usize != n - 1 {
            return Err(bad("child counts do not describe a tree"));
        }
        child_start.push(acc);
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for v in 0..n as u32 {
            if v > 0 {
                let (p, filled) = loop {
                    let top = stack.last_mut().ok_or_else(|| bad("orphan node"))?;
                    if top.1 < child_counts[top.0 as usize] {
                        break *top;
                    }
                    stack.pop();
                };
                children[(offsets[p as usize] + filled) as usize] = v;
                parent[v as usize] = p;
                stack.last_mut().unwrap().1 += 1;
                if levels[v as usize] >= levels[p as usize] {
                    return Err(bad("child level not below parent"));
                }
            }
            stack.push((v, 0));
        }
        Ok(Self::assemble(dim, levels, anchors, child_start, children, parent, start, end, order))
    }
}

pub(crate) struct RawOctree<'a> {
    pub levels: &'a [u32],
    pub anchors: &'a [u64],
    pub child_start: &'a [u32],
    pub start: &'a [u32],
    pub end: &'a [u32],
    pub order: &'a [u32],
}

/// Balanced recursive split of the octree (viewed as an undirected graph of
/// maximum degree `2^d + 1`) by centroid nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CentroidDecomposition {
    pub root: u32,
    /// Centroid of the component across the edge to the octree parent.
    up: Vec<u32>,
    /// Aligned with the octree child array: centroid of the component across
    /// each child edge.
    down: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    component_size: Vec<u32>,
}

impl CentroidDecomposition {
    pub fn build(tree: &CompressedOctree) -> Self {
        let n = tree.node_count();
        let mut cd = CentroidDecomposition {
            root: NONE,
            up: vec![NONE; n],
            down: vec![NONE; tree.children.len()],
            parent: vec![NONE; n],
            depth: vec![0; n],
            component_size: vec![0; n],
        };
        let mut removed = vec![false; n];
        let mut bfs_parent = vec![NONE; n];
        let mut size = vec![0u32; n];
        let mut comp: Vec<u32> = Vec::new();

        // (entry node, centroid that owns the link, child slot or NONE for up)
        let mut work: Vec<(u32, u32, u32)> = vec![(0, NONE, NONE)];
        while let Some((entry, owner, slot)) = work.pop() {
            comp.clear();
            comp.push(entry);
            bfs_parent[entry as usize] = NONE;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head] as usize;
                head += 1;
                let p = tree.parent[v];
                let mut visit = |w: u32| {
                    if w != NONE && !removed[w as usize] && w != bfs_parent[v] {
                        bfs_parent[w as usize] = v as u32;
                        comp.push(w);
                    }
                };
                visit(p);
                for &w in tree.children(v) {
                    visit(w);
                }
            }
            let total = comp.len() as u32;
            for &v in comp.iter().rev() {
                size[v as usize] = 1;
            }
            for &v in comp.iter().rev() {
                let bp = bfs_parent[v as usize];
                if bp != NONE {
                    size[bp as usize] += size[v as usize];
                }
            }
            let mut centroid = NONE;
            for &v in &comp {
                let mut largest = total - size[v as usize];
                let p = tree.parent[v as usize];
                let neighbours = std::iter::once(p).chain(tree.children(v as usize).iter().copied());
                for w in neighbours {
                    if w != NONE && !removed[w as usize] && bfs_parent[w as usize] == v {
                        largest = largest.max(size[w as usize]);
                    }
                }
                if 2 * largest <= total && v < centroid {
                    centroid = v;
                }
            }
            debug_assert!(centroid != NONE);
            let c = centroid as usize;
            removed[c] = true;
            cd.component_size[c] = total;
            if owner == NONE {
                cd.root = centroid;
            } else {
                cd.parent[c] = owner;
                cd.depth[c] = cd.depth[owner as usize] + 1;
                if slot == NONE {
                    cd.up[owner as usize] = centroid;
                } else {
                    cd.down[slot as usize] = centroid;
                }
            }
            let p = tree.parent[c];
            if p != NONE && !removed[p as usize] {
                work.push((p, centroid, NONE));
            }
            let base = tree.child_start[c];
            for (j, &w) in tree.children(c).iter().enumerate() {
                if !removed[w as usize] {
                    work.push((w, centroid, base + j as u32));
                }
            }
        }
        cd
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Decomposition parent of an octree node, `None` at the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then(|| self.parent[v] as usize)
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Number of octree nodes in the component `v` was chosen from.
    pub fn component_size(&self, v: usize) -> usize {
        self.component_size[v] as usize
    }
}
