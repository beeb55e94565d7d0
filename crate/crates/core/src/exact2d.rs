//! Exact rectilinear 2-center and 3-center queries in the plane.
//!
//! A 2-center query shrinks the range to the bounding box of its points and
//! tries both pairs of opposite corners. For each corner the farthest point
//! on its side of the L∞-bisector is the best of a few candidates: extreme
//! points of two rectangles and of two 45° cones. Cone queries go to a
//! staircase subdivision built per cone orientation.
//!
//! A 3-center query anchors one square at each corner in turn and binary
//! searches its size against the 2-center of the points it leaves uncovered.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{RcqError, Result};
use crate::geometry::{AxisBox, Cover, PointSet};
use crate::index::RangeClusterIndex;
use crate::range_index::{Extreme, KdTree};

const INF: i64 = 1 << 62;

/// A signed coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dir {
    pub axis: usize,
    pub positive: bool,
}

impl Dir {
    pub const fn new(axis: usize, positive: bool) -> Self {
        Dir { axis, positive }
    }

    fn project(self, v: [i64; 2]) -> i64 {
        if self.positive {
            v[self.axis]
        } else {
            -v[self.axis]
        }
    }
}

/// The closed 45° cone `{p : 0 ≤ (p−apex)·side ≤ (p−apex)·along}`. Its
/// extreme point is the one minimizing `(p−apex)·along`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConeOrientation {
    pub along: Dir,
    pub side: Dir,
}

impl ConeOrientation {
    pub fn all() -> Vec<ConeOrientation> {
        let mut out = Vec::with_capacity(8);
        for along_axis in 0..2 {
            for along_pos in [true, false] {
                for side_pos in [true, false] {
                    out.push(ConeOrientation {
                        along: Dir::new(along_axis, along_pos),
                        side: Dir::new(1 - along_axis, side_pos),
                    });
                }
            }
        }
        out
    }

    pub fn contains(&self, apex: [i64; 2], p: [i64; 2]) -> bool {
        let d = [p[0] - apex[0], p[1] - apex[1]];
        let s = self.side.project(d);
        0 <= s && s <= self.along.project(d)
    }

    /// Distance of `p` from the apex along the cone axis.
    pub fn depth(&self, apex: [i64; 2], p: [i64; 2]) -> i64 {
        self.along.project([p[0] - apex[0], p[1] - apex[1]])
    }
}

/// A symmetry of the square taking one cone orientation to the canonical
/// one, `along = +x`, `side = +y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frame {
    swap: bool,
    neg_x: bool,
    neg_y: bool,
}

impl Frame {
    fn of(o: ConeOrientation) -> Self {
        debug_assert_ne!(o.along.axis, o.side.axis);
        Frame {
            swap: o.along.axis == 1,
            neg_x: !o.along.positive,
            neg_y: !o.side.positive,
        }
    }

    fn index(self) -> usize {
        (self.swap as usize) << 2 | (self.neg_x as usize) << 1 | self.neg_y as usize
    }

    fn apply(self, p: [i64; 2]) -> [i64; 2] {
        let (a, b) = if self.swap { (p[1], p[0]) } else { (p[0], p[1]) };
        [if self.neg_x { -a } else { a }, if self.neg_y { -b } else { b }]
    }

    /// Original rectangle of the canonical rectangle `[xl,xh]×[yl,yh]`.
    fn unapply_rect(self, xl: i64, xh: i64, yl: i64, yh: i64) -> IRect {
        let (al, ah) = if self.neg_x { (-xh, -xl) } else { (xl, xh) };
        let (bl, bh) = if self.neg_y { (-yh, -yl) } else { (yl, yh) };
        if self.swap {
            IRect { lo: [bl, al], hi: [bh, ah] }
        } else {
            IRect { lo: [al, bl], hi: [ah, bh] }
        }
    }

    /// The original axis and extreme matching "smallest canonical x".
    fn min_x(self) -> (usize, Extreme) {
        (self.swap as usize, if self.neg_x { Extreme::Max } else { Extreme::Min })
    }

    /// Canonical form of the original half-plane.
    fn half(self, h: Half) -> CanonHalf {
        let canon_axis = if self.swap { 1 - h.axis } else { h.axis };
        let neg = if canon_axis == 0 { self.neg_x } else { self.neg_y };
        let (ge, t) = if neg { (!h.ge, -h.t) } else { (h.ge, h.t) };
        CanonHalf { x: canon_axis == 0, ge, t }
    }
}

/// `coord[axis] ≥ t` when `ge`, else `coord[axis] ≤ t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Half {
    axis: usize,
    ge: bool,
    t: i64,
}

#[derive(Clone, Copy, Debug)]
struct CanonHalf {
    x: bool,
    ge: bool,
    t: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct IRect {
    lo: [i64; 2],
    hi: [i64; 2],
}

impl IRect {
    fn of_box(b: &AxisBox) -> Self {
        IRect {
            lo: [b.lo[0] as i64, b.lo[1] as i64],
            hi: [b.hi[0] as i64, b.hi[1] as i64],
        }
    }

    fn clip(mut self, h: Half) -> Self {
        if h.ge {
            self.lo[h.axis] = self.lo[h.axis].max(h.t);
        } else {
            self.hi[h.axis] = self.hi[h.axis].min(h.t);
        }
        self
    }

    fn to_box(self, umax: i64) -> Option<AxisBox> {
        let lo = [self.lo[0].max(0), self.lo[1].max(0)];
        let hi = [self.hi[0].min(umax), self.hi[1].min(umax)];
        (lo[0] <= hi[0] && lo[1] <= hi[1])
            .then(|| AxisBox::new(vec![lo[0] as u64, lo[1] as u64], vec![hi[0] as u64, hi[1] as u64]))
    }
}

#[derive(Clone, Copy, Debug)]
struct Face {
    t_lo: i64,
    t_hi: i64,
    owner: u32,
}

/// Staircase subdivision of the `(s, t) = (y, x−y)` plane for the canonical
/// cone: the owner of `(s0, t0)` is the leftmost point with `s ≥ s0` and
/// `t ≥ t0`, i.e. the leftmost point in the cone with that apex.
///
/// Built by sweeping `s` downward and painting each point's lower-left
/// quadrant over the current staircase; faces are the maximal rectangles of
/// constant owner, located through a segment tree over `s`.
#[derive(Clone, Debug, Default)]
pub struct ConeVoronoi {
    faces: Vec<Face>,
    slabs: Vec<i64>,
    nodes: Vec<Vec<u32>>,
    leaves: usize,
}

#[derive(Clone, Copy)]
struct Seg {
    t_lo: i64,
    owner: Option<(i64, u32)>,
    born: i64,
}

impl ConeVoronoi {
    /// `items` are `(s, t, x, id)`.
    fn build(mut items: Vec<(i64, i64, i64, u32)>) -> Self {
        items.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
        let mut raw: Vec<(i64, i64, Face)> = Vec::new();
        let mut map: BTreeMap<i64, Seg> = BTreeMap::new();
        map.insert(
            i64::MAX,
            Seg {
                t_lo: i64::MIN,
                owner: None,
                born: i64::MAX,
            },
        );
        let close = |raw: &mut Vec<(i64, i64, Face)>, seg: Seg, t_hi: i64, s: i64| {
            if let Some((_, id)) = seg.owner {
                if seg.born > s {
                    raw.push((s, seg.born, Face { t_lo: seg.t_lo, t_hi, owner: id }));
                }
            }
        };
        let mut slabs = Vec::new();
        for &(s, t, x, id) in &items {
            if slabs.last() != Some(&s) {
                slabs.push(s);
            }
            let key = (x, id);
            let (&hi, &seg) = map.range(t..).next().expect("top segment");
            if seg.owner.is_some_and(|o| o <= key) {
                continue;
            }
            map.remove(&hi);
            close(&mut raw, seg, hi, s);
            if t < hi {
                map.insert(
                    hi,
                    Seg {
                        t_lo: t,
                        owner: seg.owner,
                        born: s,
                    },
                );
            }
            let mut lo = seg.t_lo;
            while lo != i64::MIN {
                let below = map[&lo];
                if below.owner.is_some_and(|o| o <= key) {
                    break;
                }
                map.remove(&lo);
                close(&mut raw, below, lo, s);
                lo = below.t_lo;
            }
            map.insert(
                t,
                Seg {
                    t_lo: lo,
                    owner: Some(key),
                    born: s,
                },
            );
        }
        for (&hi, &seg) in &map {
            close(&mut raw, seg, hi, i64::MIN);
        }

        slabs.reverse();
        let leaves = slabs.len().max(1).next_power_of_two();
        let mut nodes = vec![Vec::new(); 2 * leaves];
        let mut faces = Vec::with_capacity(raw.len());
        for (s_lo, s_hi, face) in raw {
            let fid = faces.len() as u32;
            faces.push(face);
            let first = slabs.partition_point(|&g| g <= s_lo);
            let last = slabs.partition_point(|&g| g <= s_hi);
            let (mut l, mut r) = (first + leaves, last + leaves);
            while l < r {
                if l & 1 == 1 {
                    nodes[l].push(fid);
                    l += 1;
                }
                if r & 1 == 1 {
                    r -= 1;
                    nodes[r].push(fid);
                }
                l >>= 1;
                r >>= 1;
            }
        }
        for node in &mut nodes {
            node.sort_unstable_by_key(|&f| faces[f as usize].t_hi);
        }
        ConeVoronoi {
            faces,
            slabs,
            nodes,
            leaves,
        }
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    fn locate(&self, s0: i64, t0: i64) -> Option<u32> {
        let slab = self.slabs.partition_point(|&g| g < s0);
        if slab == self.slabs.len() {
            return None;
        }
        let mut node = slab + self.leaves;
        while node >= 1 {
            let list = &self.nodes[node];
            let i = list.partition_point(|&f| self.faces[f as usize].t_hi < t0);
            if let Some(&f) = list.get(i) {
                let face = self.faces[f as usize];
                if face.t_lo < t0 {
                    return Some(face.owner);
                }
            }
            node >>= 1;
        }
        None
    }
}

/// One staircase subdivision per cone orientation.
#[derive(Clone, Debug, Default)]
pub struct ConeIndex {
    frames: Vec<ConeVoronoi>,
}

impl ConeIndex {
    /// Empty unless the points are planar.
    pub fn build(points: &PointSet) -> Self {
        if points.dim() != 2 {
            return ConeIndex::default();
        }
        let mut frames = vec![ConeVoronoi::default(); 8];
        for o in ConeOrientation::all() {
            let f = Frame::of(o);
            let items = points
                .ids()
                .map(|i| {
                    let [x, y] = f.apply(ipoint(points, i));
                    (y, x - y, x, i as u32)
                })
                .collect();
            frames[f.index()] = ConeVoronoi::build(items);
        }
        ConeIndex { frames }
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn face_count(&self, o: ConeOrientation) -> usize {
        self.frames.get(Frame::of(o).index()).map_or(0, |v| v.face_count())
    }

    /// The extreme point inside the closed cone at `apex`, lowest id on ties.
    pub fn cone_extreme(&self, apex: [i64; 2], o: ConeOrientation) -> Option<usize> {
        let f = Frame::of(o);
        let [x, y] = f.apply(apex);
        self.canonical(f, x, y)
    }

    fn canonical(&self, f: Frame, x: i64, y: i64) -> Option<usize> {
        self.frames.get(f.index())?.locate(y, x - y).map(|id| id as usize)
    }
}

fn ipoint(points: &PointSet, id: usize) -> [i64; 2] {
    [points.coord(id, 0) as i64, points.coord(id, 1) as i64]
}

/// A square of side `side` with one corner at `corner`, extending toward
/// `dir` on each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnchoredSquare {
    pub corner: [i64; 2],
    pub dir: [i8; 2],
    pub side: u64,
}

impl AnchoredSquare {
    pub fn lo(&self) -> [i64; 2] {
        let s = self.side as i64;
        [0, 1].map(|a| if self.dir[a] > 0 { self.corner[a] } else { self.corner[a] - s })
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        let lo = self.lo();
        (0..2).all(|a| {
            let c = p[a] as i64;
            lo[a] <= c && c <= lo[a] + self.side as i64
        })
    }

    pub fn with_side(mut self, side: u64) -> Self {
        self.side = side;
        self
    }

    pub fn to_cover(&self) -> Cover {
        let lo = self.lo();
        let half = self.side as f64 / 2.0;
        Cover::Cube {
            center: vec![lo[0] as f64 + half, lo[1] as f64 + half],
            radius: half,
        }
    }
}

/// Two congruent squares anchored at opposite corners of the shrunk range.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TwoCenterAnswer {
    /// Common side length.
    pub size: u64,
    pub squares: Vec<AnchoredSquare>,
    /// Farthest point from each square's corner on its side of the bisector.
    pub witnesses: Vec<Option<usize>>,
    pub shrunk: Option<AxisBox>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ThreeCenterAnswer {
    pub size: u64,
    /// The corner-anchored square first, then the other two.
    pub squares: Vec<AnchoredSquare>,
    pub shrunk: Option<AxisBox>,
    /// σ-excluded 2-center evaluations made by the searches.
    pub evaluations: usize,
}

/// Groups `ids` by the first square containing each point.
pub fn assign_to_squares(points: &PointSet, ids: &[usize], squares: &[AnchoredSquare]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); squares.len()];
    for &i in ids {
        if let Some(j) = squares.iter().position(|s| s.contains(points.point(i))) {
            out[j].push(i);
        }
    }
    out
}

/// Maps the range to local coordinates `[0,W]×[0,H]` with `W ≥ H` and the
/// corner of interest at `(0, H)`.
#[derive(Clone, Copy, Debug)]
struct Local {
    swap: bool,
    flip: [bool; 2],
    origin: [i64; 2],
    w: i64,
    h: i64,
}

impl Local {
    fn to_local(self, p: [i64; 2]) -> [i64; 2] {
        let ab = if self.swap { [p[1], p[0]] } else { p };
        [0, 1].map(|i| if self.flip[i] { self.origin[i] - ab[i] } else { ab[i] - self.origin[i] })
    }

    fn to_orig(self, l: [i64; 2]) -> [i64; 2] {
        let ab = [0, 1].map(|i| if self.flip[i] { self.origin[i] - l[i] } else { self.origin[i] + l[i] });
        if self.swap {
            [ab[1], ab[0]]
        } else {
            ab
        }
    }

    fn dir(&self, axis: usize, positive: bool) -> Dir {
        Dir::new(if self.swap { 1 - axis } else { axis }, positive != self.flip[axis])
    }

    fn rect(&self, lo: [i64; 2], hi: [i64; 2]) -> IRect {
        let (a, b) = (self.to_orig(lo), self.to_orig(hi));
        IRect {
            lo: [a[0].min(b[0]), a[1].min(b[1])],
            hi: [a[0].max(b[0]), a[1].max(b[1])],
        }
    }

    /// The point reflection swapping the two corners.
    fn reflected(&self) -> Local {
        let far = self.to_orig([self.w, self.h]);
        let ab = if self.swap { [far[1], far[0]] } else { far };
        Local {
            flip: [!self.flip[0], !self.flip[1]],
            origin: ab,
            ..*self
        }
    }

    fn dist_corner(&self, l: [i64; 2]) -> i64 {
        l[0].max(self.h - l[1])
    }

    fn dist_opposite(&self, l: [i64; 2]) -> i64 {
        (self.w - l[0]).max(l[1])
    }

    fn square(&self, side: u64) -> AnchoredSquare {
        let corner = self.to_orig([0, self.h]);
        let mut dir = [0i8; 2];
        let du = self.dir(0, true);
        let dv = self.dir(1, false);
        dir[du.axis] = if du.positive { 1 } else { -1 };
        dir[dv.axis] = if dv.positive { 1 } else { -1 };
        AnchoredSquare { corner, dir, side }
    }
}

/// The regions tiling the corner's side of the bisector, in doubled local
/// coordinates so that the midline `W/2` is integral. `None` when empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Regions {
    /// Rectangle `[0, W/2] × [H − W/2, H]`.
    pub a1: [[i64; 2]; 2],
    /// Rectangle `[0, W − H] × [0, H − W/2]`.
    pub a2: Option<[[i64; 2]; 2]>,
    /// Triangle under the lower diagonal of the bisector.
    pub a3: Option<[[i64; 2]; 3]>,
    /// Triangle left of the upper diagonal of the bisector.
    pub a4: Option<[[i64; 2]; 3]>,
}

impl Regions {
    pub(crate) fn new(w: i64, h: i64) -> Self {
        debug_assert!(w >= h && h >= 0);
        let (w2, h2) = (2 * w, 2 * h);
        let fat = 2 * h > w;
        Regions {
            a1: [[0, (h2 - w).max(0)], [w, h2]],
            a2: (2 * h >= w).then_some([[0, 0], [w2 - h2, h2 - w]]),
            a3: fat.then_some([[w2 - h2, 0], [w, h2 - w], [w2 - h2, h2 - w]]),
            a4: fat.then_some([[w, w], [h2, h2], [w, h2]]),
        }
    }

    /// Eight times the total area.
    #[cfg(test)]
    pub(crate) fn area8(&self) -> i64 {
        let rect = |r: &[[i64; 2]; 2]| 2 * (r[1][0] - r[0][0]) * (r[1][1] - r[0][1]);
        let tri = |t: &[[i64; 2]; 3]| {
            ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1])).abs()
        };
        rect(&self.a1) + self.a2.as_ref().map_or(0, rect) + self.a3.as_ref().map_or(0, tri) + self.a4.as_ref().map_or(0, tri)
    }
}

/// Integer bounds `[ceil(lo/2), floor(hi/2)]` of a doubled interval.
fn halve(lo: i64, hi: i64) -> Option<(i64, i64)> {
    let (l, h) = (lo.div_euclid(2) + lo.rem_euclid(2), hi.div_euclid(2));
    (l <= h).then_some((l, h))
}

struct Planar<'a> {
    points: &'a PointSet,
    kd: &'a KdTree,
    cones: &'a ConeIndex,
    umax: i64,
    evaluations: usize,
}

/// Farthest point from the corner on its side, with its distance.
type Far = Option<(i64, usize)>;

impl<'a> Planar<'a> {
    fn new(index: &'a RangeClusterIndex) -> Result<Self> {
        if index.dim() != 2 {
            return Err(RcqError::DimensionMismatch {
                expected: 2,
                got: index.dim(),
            });
        }
        Ok(Planar {
            points: index.points(),
            kd: index.kd(),
            cones: index.cones(),
            umax: ((1u64 << index.points().bits()) - 1) as i64,
            evaluations: 0,
        })
    }

    fn rect_extreme(&self, r: IRect, axis: usize, dir: Extreme, out: &mut Vec<usize>) {
        if let Some(b) = r.to_box(self.umax) {
            out.extend(self.kd.extreme_point(&b, axis, dir));
        }
    }

    /// Candidates for the extreme of cone `o` at `apex` restricted to `half`:
    /// the union of the pieces covering `cone ∩ half` contains that extreme.
    fn cone_candidates(&self, apex: [i64; 2], o: ConeOrientation, half: Option<Half>, out: &mut Vec<usize>) {
        let f = Frame::of(o);
        let [x0, y0] = f.apply(apex);
        let x_of = |id: usize| f.apply(ipoint(self.points, id))[0];
        let (axis, dir) = f.min_x();
        let Some(h) = half.map(|h| f.half(h)) else {
            out.extend(self.cones.canonical(f, x0, y0));
            return;
        };
        match (h.x, h.ge) {
            (true, false) => out.extend(self.cones.canonical(f, x0, y0).filter(|&p| x_of(p) <= h.t)),
            (true, true) if h.t <= x0 => out.extend(self.cones.canonical(f, x0, y0)),
            (true, true) => {
                let y1 = y0 + (h.t - x0);
                out.extend(self.cones.canonical(f, h.t, y1));
                self.rect_extreme(f.unapply_rect(h.t, INF, y0, y1 - 1), axis, dir, out);
            }
            (false, true) if h.t <= y0 => out.extend(self.cones.canonical(f, x0, y0)),
            (false, true) => out.extend(self.cones.canonical(f, x0 + (h.t - y0), h.t)),
            (false, false) if h.t < y0 => {}
            (false, false) => {
                let split = x0 + (h.t - y0);
                out.extend(self.cones.canonical(f, x0, y0).filter(|&p| x_of(p) <= split));
                self.rect_extreme(f.unapply_rect(split + 1, INF, y0, h.t), axis, dir, out);
            }
        }
    }

    /// Farthest point from the local corner among points of `q` on the
    /// corner's side of the bisector and outside `excl`.
    fn half_farthest(&self, lf: &Local, q: &AxisBox, excl: Option<&AxisBox>, halves: &[Option<Half>]) -> Far {
        let regions = Regions::new(lf.w, lf.h);
        let mut cands = Vec::new();
        let rect_pieces = |lo: [i64; 2], hi: [i64; 2]| -> Vec<IRect> {
            let r = lf.rect(lo, hi);
            halves.iter().map(|h| h.map_or(r, |h| r.clip(h))).collect()
        };
        let right = lf.dir(0, true);
        let bottom = lf.dir(1, true);
        let ext = |d: Dir, max: bool| if d.positive == max { Extreme::Max } else { Extreme::Min };

        let [lo, hi] = regions.a1;
        if let (Some((u0, u1)), Some((v0, v1))) = (halve(lo[0], hi[0]), halve(lo[1], hi[1])) {
            for piece in rect_pieces([u0, v0], [u1, v1]) {
                self.rect_extreme(piece, right.axis, ext(right, true), &mut cands);
                self.rect_extreme(piece, bottom.axis, ext(bottom, false), &mut cands);
            }
        }
        if let Some([lo, hi]) = regions.a2 {
            if let (Some((u0, u1)), Some((v0, v1))) = (halve(lo[0], hi[0]), halve(lo[1], hi[1])) {
                for piece in rect_pieces([u0, v0], [u1, v1]) {
                    self.rect_extreme(piece, bottom.axis, ext(bottom, false), &mut cands);
                }
            }
        }
        if regions.a3.is_some() {
            let apex = lf.to_orig([lf.w - lf.h, 0]);
            let o = ConeOrientation {
                along: lf.dir(1, true),
                side: lf.dir(0, true),
            };
            for &h in halves {
                self.cone_candidates(apex, o, h, &mut cands);
            }
        }
        if regions.a4.is_some() {
            let apex = lf.to_orig([lf.h, lf.h]);
            let o = ConeOrientation {
                along: lf.dir(0, false),
                side: lf.dir(1, false),
            };
            for &h in halves {
                self.cone_candidates(apex, o, h, &mut cands);
            }
        }

        let mut best: Far = None;
        for id in cands {
            let p = self.points.point(id);
            if !q.contains(p) || excl.is_some_and(|b| b.contains(p)) {
                continue;
            }
            let l = lf.to_local(ipoint(self.points, id));
            let d = lf.dist_corner(l);
            if d <= lf.dist_opposite(l) && best.is_none_or(|(bd, bid)| (d, std::cmp::Reverse(id)) > (bd, std::cmp::Reverse(bid))) {
                best = Some((d, id));
            }
        }
        best
    }

    /// The two local frames of each diagonal configuration for shrunk `q`.
    fn configs(q: &AxisBox) -> [Local; 2] {
        let (x0, x1, y0, y1) = (q.lo[0] as i64, q.hi[0] as i64, q.lo[1] as i64, q.hi[1] as i64);
        let swap = y1 - y0 > x1 - x0;
        let (a0, a1, b0, b1) = if swap { (y0, y1, x0, x1) } else { (x0, x1, y0, y1) };
        let (w, h) = (a1 - a0, b1 - b0);
        [false, true].map(|flip_u| Local {
            swap,
            flip: [flip_u, false],
            origin: [if flip_u { a1 } else { a0 }, b0],
            w,
            h,
        })
    }

    /// 2-center of the points in shrunk `q` outside `excl`.
    fn two_center(&mut self, q: &AxisBox, excl: Option<&AxisBox>) -> TwoCenterAnswer {
        self.evaluations += 1;
        let halves: Vec<Option<Half>> = match excl {
            None => vec![None],
            Some(b) => complement(b, q).into_iter().map(Some).collect(),
        };
        let mut best: Option<(i64, [Local; 2], [Far; 2])> = None;
        for lf in Self::configs(q) {
            let rf = lf.reflected();
            let far = [
                self.half_farthest(&lf, q, excl, &halves),
                self.half_farthest(&rf, q, excl, &halves),
            ];
            let size = far.iter().flatten().map(|f| f.0).max().unwrap_or(0);
            if best.as_ref().is_none_or(|b| size < b.0) {
                best = Some((size, [lf, rf], far));
            }
        }
        let (size, frames, far) = best.expect("two configurations");
        TwoCenterAnswer {
            size: size as u64,
            squares: frames.iter().map(|f| f.square(size as u64)).collect(),
            witnesses: far.iter().map(|f| f.map(|f| f.1)).collect(),
            shrunk: Some(q.clone()),
        }
    }

    /// Bounding box of the points in `q` outside `excl`.
    fn shrink_excluding(&self, q: &AxisBox, excl: &AxisBox) -> Option<AxisBox> {
        let mut acc: Option<AxisBox> = None;
        for h in complement(excl, q) {
            let Some(piece) = IRect::of_box(q).clip(h).to_box(self.umax) else { continue };
            if let Some(b) = self.kd.bounding_box(&piece) {
                match acc.as_mut() {
                    None => acc = Some(b),
                    Some(a) => {
                        a.include(&b.lo);
                        a.include(&b.hi);
                    }
                }
            }
        }
        acc
    }

    /// Square of side `s` anchored at corner `(cx, cy)` of `q`, clipped to `q`.
    fn sigma(q: &AxisBox, corner: [bool; 2], s: u64) -> AxisBox {
        let mut lo = q.lo.clone();
        let mut hi = q.hi.clone();
        for a in 0..2 {
            if corner[a] {
                hi[a] = q.lo[a].saturating_add(s).min(q.hi[a]);
            } else {
                lo[a] = q.hi[a].saturating_sub(s).max(q.lo[a]);
            }
        }
        AxisBox::new(lo, hi)
    }

    /// Offsets from the corner on `axis` of the points in `q`, snapped to
    /// the nearest point at offset `≥ t` (`up`) or `< t` (not `up`).
    fn snap(&self, q: &AxisBox, corner: [bool; 2], axis: usize, t: u64, up: bool) -> Option<u64> {
        let near_lo = corner[axis];
        let span = q.hi[axis] - q.lo[axis];
        let (olo, ohi) = if up {
            (t, span)
        } else {
            if t == 0 {
                return None;
            }
            (0, t - 1)
        };
        let mut b = q.clone();
        if near_lo {
            b.lo[axis] = q.lo[axis] + olo;
            b.hi[axis] = q.lo[axis] + ohi;
        } else {
            b.lo[axis] = q.hi[axis] - ohi;
            b.hi[axis] = q.hi[axis] - olo;
        }
        let dir = if up == near_lo { Extreme::Min } else { Extreme::Max };
        let id = self.kd.extreme_point(&b, axis, dir)?;
        let c = self.points.coord(id, axis);
        Some(if near_lo { c - q.lo[axis] } else { q.hi[axis] - c })
    }

    fn three_center(&mut self, q: &AxisBox) -> ThreeCenterAnswer {
        let mut best: Option<(u64, [bool; 2], u64, TwoCenterAnswer)> = None;
        for corner in [[true, true], [false, true], [true, false], [false, false]] {
            let mut cache: HashMap<u64, TwoCenterAnswer> = HashMap::new();
            let mut g = |this: &mut Self, s: u64| -> TwoCenterAnswer {
                if let Some(a) = cache.get(&s) {
                    return a.clone();
                }
                let sigma = Self::sigma(q, corner, s);
                let ans = match this.shrink_excluding(q, &sigma) {
                    None => TwoCenterAnswer::default(),
                    Some(rest) => this.two_center(&rest, Some(&sigma)),
                };
                cache.insert(s, ans.clone());
                ans
            };
            for axis in 0..2 {
                let span = q.hi[axis] - q.lo[axis];
                let snap_up = |this: &Self, t: u64| this.snap(q, corner, axis, t, true).expect("far edge holds a point");
                let consider = |s: u64, rest: TwoCenterAnswer, best: &mut Option<(u64, [bool; 2], u64, TwoCenterAnswer)>| {
                    let v = s.max(rest.size);
                    if best.as_ref().is_none_or(|b| (v, s) < (b.0, b.2)) {
                        *best = Some((v, corner, s, rest));
                    }
                };
                let top = snap_up(self, span);
                let rest = g(self, top);
                if rest.size > top {
                    consider(top, rest, &mut best);
                    continue;
                }
                let (mut lo, mut hi) = (0u64, span);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    let s = snap_up(self, mid);
                    if g(self, s).size <= s {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                let s_hi = snap_up(self, lo);
                let rest = g(self, s_hi);
                consider(s_hi, rest, &mut best);
                if let Some(s_lo) = self.snap(q, corner, axis, s_hi, false) {
                    let rest = g(self, s_lo);
                    consider(s_lo, rest, &mut best);
                }
            }
        }
        let (size, corner, _, rest) = best.expect("four corners");
        let anchor = [
            if corner[0] { q.lo[0] } else { q.hi[0] } as i64,
            if corner[1] { q.lo[1] } else { q.hi[1] } as i64,
        ];
        let mut squares = vec![AnchoredSquare {
            corner: anchor,
            dir: corner.map(|c| if c { 1 } else { -1 }),
            side: size,
        }];
        squares.extend(rest.squares.iter().map(|s| s.with_side(size)));
        ThreeCenterAnswer {
            size,
            squares,
            shrunk: Some(q.clone()),
            evaluations: self.evaluations,
        }
    }
}

/// Half-planes whose union is the part of `q` outside `b`.
fn complement(b: &AxisBox, q: &AxisBox) -> Vec<Half> {
    let mut out = Vec::new();
    for axis in 0..2 {
        if b.lo[axis] > q.lo[axis] {
            out.push(Half {
                axis,
                ge: false,
                t: b.lo[axis] as i64 - 1,
            });
        }
        if b.hi[axis] < q.hi[axis] {
            out.push(Half {
                axis,
                ge: true,
                t: b.hi[axis] as i64 + 1,
            });
        }
    }
    out
}

/// Smallest box with a point of the range on each edge.
pub fn shrink_box(index: &RangeClusterIndex, q: &AxisBox) -> Result<Option<AxisBox>> {
    index.check_box(q)?;
    Ok(index.kd().bounding_box(q))
}

pub fn two_center_query(index: &RangeClusterIndex, q: &AxisBox) -> Result<TwoCenterAnswer> {
    let mut planar = Planar::new(index)?;
    index.check_box(q)?;
    Ok(match index.kd().bounding_box(q) {
        None => TwoCenterAnswer::default(),
        Some(shrunk) => planar.two_center(&shrunk, None),
    })
}

pub fn three_center_query(index: &RangeClusterIndex, q: &AxisBox) -> Result<ThreeCenterAnswer> {
    let mut planar = Planar::new(index)?;
    index.check_box(q)?;
    Ok(match index.kd().bounding_box(q) {
        None => ThreeCenterAnswer::default(),
        Some(shrunk) => planar.three_center(&shrunk),
    })
}
