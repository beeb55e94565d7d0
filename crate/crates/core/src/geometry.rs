//! Points, boxes, Lp metrics, minimum enclosing balls and canonical cubes.
//!
//! All coordinates are non-negative integers in a `2^bits` universe. Boxes are
//! closed integer boxes; canonical cubes are half-open grid cells, so every
//! point lies in exactly one cell of each grid level.

use serde::{Deserialize, Serialize};

use crate::error::{RcqError, Result};

/// Default universe width in bits.
pub const DEFAULT_BITS: u32 = 30;

/// Relative tolerance used for floating-point containment checks.
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

/// An immutable, id-indexed point set. Point `i` has id `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    bits: u32,
    coords: Vec<u64>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates, checking that every
    /// coordinate fits the universe.
    pub fn new(dim: usize, bits: u32, coords: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(RcqError::invalid("dimension must be at least 1"));
        }
        if bits == 0 || bits > 62 {
            return Err(RcqError::invalid(format!("universe bits {bits} outside 1..=62")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(RcqError::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if let Some(&value) = coords.iter().find(|&&c| c >> bits != 0) {
            return Err(RcqError::CoordinateOverflow { value, bits });
        }
        Ok(PointSet { dim, bits, coords })
    }

    pub fn from_points(dim: usize, bits: u32, points: &[Vec<u64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(RcqError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        PointSet::new(dim, bits, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, id: usize) -> &[u64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    #[inline]
    pub fn coord(&self, id: usize, axis: usize) -> u64 {
        self.coords[id * self.dim + axis]
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn point_f64(&self, id: usize) -> Vec<f64> {
        self.point(id).iter().map(|&c| c as f64).collect()
    }

    pub fn ids(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// The closed box covering the whole universe.
    pub fn universe(&self) -> AxisBox {
        let max = (1u64 << self.bits) - 1;
        AxisBox::new(vec![0; self.dim], vec![max; self.dim])
    }

    /// Linear-scan membership, used by oracles and tests.
    pub fn scan(&self, query: &AxisBox) -> Vec<usize> {
        self.ids().filter(|&i| query.contains(self.point(i))).collect()
    }
}

/// A closed axis-aligned integer box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<u64>,
    pub hi: Vec<u64>,
}

impl AxisBox {
    pub fn new(lo: Vec<u64>, hi: Vec<u64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        debug_assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h), "inverted box");
        AxisBox { lo, hi }
    }

    /// Checked constructor for user input.
    pub fn try_new(lo: Vec<u64>, hi: Vec<u64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(RcqError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(RcqError::invalid("box has lo > hi"));
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn point(p: &[u64]) -> Self {
        AxisBox::new(p.to_vec(), p.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    pub fn contains(&self, p: &[u64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&l, &h))| l <= c && c <= h)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn intersects(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i])
    }

    pub fn intersection(&self, other: &AxisBox) -> Option<AxisBox> {
        if !self.intersects(other) {
            return None;
        }
        let lo = (0..self.dim()).map(|i| self.lo[i].max(other.lo[i])).collect();
        let hi = (0..self.dim()).map(|i| self.hi[i].min(other.hi[i])).collect();
        Some(AxisBox { lo, hi })
    }

    /// Grows the box to include `p`.
    pub fn include(&mut self, p: &[u64]) {
        for (i, &c) in p.iter().enumerate() {
            self.lo[i] = self.lo[i].min(c);
            self.hi[i] = self.hi[i].max(c);
        }
    }

    pub fn extent(&self, axis: usize) -> u64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn max_extent(&self) -> u64 {
        (0..self.dim()).map(|i| self.extent(i)).max().unwrap_or(0)
    }

    /// Bounding box of a set of points, `None` when empty.
    pub fn bounding(points: &PointSet, ids: &[usize]) -> Option<AxisBox> {
        let (&first, rest) = ids.split_first()?;
        let mut bb = AxisBox::point(points.point(first));
        for &i in rest {
            bb.include(points.point(i));
        }
        Some(bb)
    }
}

/// A cell of the origin-anchored grid of side `2^level`, half-open.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalCube {
    pub level: u32,
    pub anchor: Vec<u64>,
}

impl CanonicalCube {
    /// The unique cell of the given level containing `p`.
    pub fn containing(p: &[u64], level: u32) -> Self {
        let mask = if level >= 64 { 0 } else { !((1u64 << level) - 1) };
        CanonicalCube {
            level,
            anchor: p.iter().map(|&c| c & mask).collect(),
        }
    }

    /// Edge length `2^level`.
    #[inline]
    pub fn size(&self) -> u64 {
        1u64 << self.level
    }

    #[inline]
    pub fn contains(&self, p: &[u64]) -> bool {
        p.iter()
            .zip(&self.anchor)
            .all(|(&c, &a)| (c >> self.level) == (a >> self.level))
    }

    /// The closed integer box of lattice points in the cell.
    pub fn to_box(&self) -> AxisBox {
        let last = self.size() - 1;
        AxisBox::new(
            self.anchor.clone(),
            self.anchor.iter().map(|&a| a + last).collect(),
        )
    }

    pub fn contains_box(&self, b: &AxisBox) -> bool {
        self.contains(&b.lo) && self.contains(&b.hi)
    }
}

/// Level of the smallest canonical cube holding both `p` and `q`: the bit
/// length of the largest coordinate-wise XOR.
#[inline]
pub fn common_level(p: &[u64], q: &[u64]) -> u32 {
    let x = p.iter().zip(q).map(|(a, b)| a ^ b).fold(0, |acc, v| acc | v);
    64 - x.leading_zeros()
}

pub fn smallest_canonical_cube(p: &[u64], q: &[u64]) -> CanonicalCube {
    CanonicalCube::containing(p, common_level(p, q))
}

pub fn lp_distance(p: &[u64], q: &[u64], norm: Norm) -> Result<f64> {
    if p.len() != q.len() {
        return Err(RcqError::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(lp_distance_f64(
        &p.iter().map(|&c| c as f64).collect::<Vec<_>>(),
        &q.iter().map(|&c| c as f64).collect::<Vec<_>>(),
        norm,
    ))
}

pub fn lp_distance_f64(p: &[f64], q: &[f64], norm: Norm) -> f64 {
    let diffs = p.iter().zip(q).map(|(a, b)| (a - b).abs());
    match norm {
        Norm::L1 => diffs.sum(),
        Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Norm::LInf => diffs.fold(0.0, f64::max),
    }
}

#[inline]
pub fn linf_u64(p: &[u64], q: &[u64]) -> u64 {
    p.iter().zip(q).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0)
}

#[inline]
pub fn dist2_u64(p: &[u64], q: &[u64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a.abs_diff(*b) as f64;
            d * d
        })
        .sum()
}

/// Maximum pairwise Euclidean distance by quadratic scan.
pub fn euclidean_diameter(points: &PointSet, ids: &[usize]) -> Result<f64> {
    if ids.is_empty() {
        return Err(RcqError::Empty("diameter of an empty set"));
    }
    let mut best = 0.0f64;
    for (a, &i) in ids.iter().enumerate() {
        for &j in &ids[a + 1..] {
            best = best.max(dist2_u64(points.point(i), points.point(j)));
        }
    }
    Ok(best.sqrt())
}

/// Radius and one optimal center of the minimum enclosing ball in the given
/// norm. Only L2 and L∞ are supported.
pub fn enclosing_radius(points: &PointSet, ids: &[usize], norm: Norm) -> Result<(f64, Vec<f64>)> {
    if ids.is_empty() {
        return Err(RcqError::Empty("enclosing ball of an empty set"));
    }
    match norm {
        Norm::LInf => {
            let bb = AxisBox::bounding(points, ids).expect("nonempty");
            let center = (0..points.dim())
                .map(|i| (bb.lo[i] as f64 + bb.hi[i] as f64) / 2.0)
                .collect();
            Ok((bb.max_extent() as f64 / 2.0, center))
        }
        Norm::L2 => {
            let pts: Vec<Vec<f64>> = ids.iter().map(|&i| points.point_f64(i)).collect();
            let ball = min_enclosing_ball(&pts);
            Ok((ball.radius, ball.center))
        }
        Norm::L1 => Err(RcqError::invalid("L1 enclosing balls are not supported")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64]) -> bool {
        lp_distance_f64(&self.center, p, Norm::L2) <= self.radius * (1.0 + CONTAINMENT_TOL) + CONTAINMENT_TOL
    }
}

/// Exact minimum enclosing Euclidean ball (Welzl's move-to-front scheme).
/// Works in any dimension; the recursion depth is bounded by `dim + 1`.
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> Ball {
    assert!(!points.is_empty(), "min_enclosing_ball of an empty set");
    let dim = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    // A fixed pseudo-random permutation keeps the expected linear running
    // time without making results depend on a global RNG.
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ points.len() as u64;
    for i in (1..order.len()).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        order.swap(i, (state % (i as u64 + 1)) as usize);
    }
    let mut support = Vec::with_capacity(dim + 1);
    let n = order.len();
    mtf_ball(points, &mut order, n, &mut support, dim)
}

fn mtf_ball(
    points: &[Vec<f64>],
    order: &mut [usize],
    end: usize,
    support: &mut Vec<usize>,
    dim: usize,
) -> Ball {
    let mut ball = ball_from_support(points, support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let p = order[i];
        if support.is_empty() && i == 0 {
            ball = Ball {
                center: points[p].clone(),
                radius: 0.0,
            };
            continue;
        }
        if !ball.contains(&points[p]) {
            support.push(p);
            ball = mtf_ball(points, order, i, support, dim);
            support.pop();
            order[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball with every support point on its boundary: the circumsphere
/// of the support within its affine hull.
fn ball_from_support(points: &[Vec<f64>], support: &[usize], dim: usize) -> Ball {
    match support.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: points[support[0]].clone(),
            radius: 0.0,
        },
        _ => {
            let p0 = &points[support[0]];
            let vs: Vec<Vec<f64>> = support[1..]
                .iter()
                .map(|&s| points[s].iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            let m = vs.len();
            let mut a = vec![vec![0.0; m + 1]; m];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = 2.0 * dot(&vs[i], &vs[j]);
                }
                a[i][m] = dot(&vs[i], &vs[i]);
            }
            match solve_linear(a) {
                Some(lambda) => {
                    let mut center = p0.clone();
                    for (l, v) in lambda.iter().zip(&vs) {
                        for (c, x) in center.iter_mut().zip(v) {
                            *c += l * x;
                        }
                    }
                    let radius = support
                        .iter()
                        .map(|&s| lp_distance_f64(&center, &points[s], Norm::L2))
                        .fold(0.0, f64::max);
                    Ball { center, radius }
                }
                None => diameter_ball(points, support),
            }
        }
    }
}

/// Fallback for affinely dependent supports: the ball spanned by the
/// farthest support pair.
fn diameter_ball(points: &[Vec<f64>], support: &[usize]) -> Ball {
    let mut best = (support[0], support[0], -1.0);
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            let d = lp_distance_f64(&points[i], &points[j], Norm::L2);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let center = points[best.0]
        .iter()
        .zip(&points[best.1])
        .map(|(a, b)| (a + b) / 2.0)
        .collect();
    Ball {
        center,
        radius: best.2 / 2.0,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_linear(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[row][col..=m].iter_mut().zip(&pivot_row[col..=m]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

/// Convex hull of planar points (Andrew's monotone chain), counter-clockwise,
/// without repeated or collinear vertices.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Perimeter of a closed polygon; a segment counts twice, a point is zero.
pub fn polygon_perimeter(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 2 {
        return 0.0;
    }
    (0..poly.len())
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        })
        .sum()
}

pub fn hull_perimeter(points: &PointSet, ids: &[usize]) -> f64 {
    let pts: Vec<[f64; 2]> = ids
        .iter()
        .map(|&i| [points.coord(i, 0) as f64, points.coord(i, 1) as f64])
        .collect();
    polygon_perimeter(&convex_hull(&pts))
}

/// Euclidean distance from `p` to a convex polygon (zero inside).
pub fn distance_to_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => ((poly[0][0] - p[0]).powi(2) + (poly[0][1] - p[1]).powi(2)).sqrt(),
        _ => {
            let inside = poly.len() >= 3
                && (0..poly.len()).all(|i| {
                    let a = poly[i];
                    let b = poly[(i + 1) % poly.len()];
                    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0
                });
            if inside {
                return 0.0;
            }
            (0..poly.len())
                .map(|i| segment_distance(poly[i], poly[(i + 1) % poly.len()], p))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    ((a[0] + t * dx - p[0]).powi(2) + (a[1] + t * dy - p[1]).powi(2)).sqrt()
}

/// The geometric region a cluster is reported with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cover {
    /// Axis-aligned cube given by its center and half edge length.
    Cube { center: Vec<f64>, radius: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Interval { lo: f64, hi: f64 },
    /// Convex polygon grown by a disk of radius `inflate`.
    Polygon { vertices: Vec<[f64; 2]>, inflate: f64 },
}

impl Cover {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Cover::Cube { center, radius } => {
                lp_distance_f64(center, p, Norm::LInf) <= radius * (1.0 + CONTAINMENT_TOL) + CONTAINMENT_TOL
            }
            Cover::Ball { center, radius } => {
                lp_distance_f64(center, p, Norm::L2) <= radius * (1.0 + CONTAINMENT_TOL) + CONTAINMENT_TOL
            }
            Cover::Interval { lo, hi } => {
                let tol = CONTAINMENT_TOL * (1.0 + hi.abs());
                p[0] >= lo - tol && p[0] <= hi + tol
            }
            Cover::Polygon { vertices, inflate } => {
                distance_to_polygon(vertices, [p[0], p[1]])
                    <= inflate * (1.0 + CONTAINMENT_TOL) + CONTAINMENT_TOL
            }
        }
    }

    /// Radius for center-type covers, perimeter for polygons, length for intervals.
    pub fn size(&self) -> f64 {
        match self {
            Cover::Cube { radius, .. } | Cover::Ball { radius, .. } => *radius,
            Cover::Interval { lo, hi } => hi - lo,
            Cover::Polygon { vertices, inflate } => {
                polygon_perimeter(vertices) + 2.0 * std::f64::consts::PI * inflate
            }
        }
    }

    /// Grows the cover by `r` in every direction.
    pub fn expanded(&self, r: f64) -> Cover {
        match self.clone() {
            Cover::Cube { center, radius } => Cover::Cube {
                center,
                radius: radius + r,
            },
            Cover::Ball { center, radius } => Cover::Ball {
                center,
                radius: radius + r,
            },
            Cover::Interval { lo, hi } => Cover::Interval { lo: lo - r, hi: hi + r },
            Cover::Polygon { vertices, inflate } => Cover::Polygon {
                vertices,
                inflate: inflate + r,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: usize, bits: u32, pts: &[&[u64]]) -> PointSet {
        PointSet::from_points(dim, bits, &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn lp_distance_examples() {
        assert_eq!(lp_distance(&[0, 0], &[3, 4], Norm::L2).unwrap(), 5.0);
        assert_eq!(lp_distance(&[0, 0], &[3, 4], Norm::LInf).unwrap(), 4.0);
        assert_eq!(lp_distance(&[1, 1], &[1, 1], Norm::L1).unwrap(), 0.0);
        assert!(matches!(
            lp_distance(&[1, 1], &[1], Norm::L1),
            Err(RcqError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn enclosing_radius_examples() {
        let p = set(2, 4, &[&[0, 0], &[4, 2]]);
        let (r, c) = enclosing_radius(&p, &[0, 1], Norm::LInf).unwrap();
        assert_eq!((r, c), (2.0, vec![2.0, 1.0]));

        let p = set(2, 4, &[&[0, 0], &[2, 0], &[1, 1]]);
        let (r, c) = enclosing_radius(&p, &[0, 1], Norm::L2).unwrap();
        assert!((r - 1.0).abs() < 1e-12 && (c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);
        let (r, c) = enclosing_radius(&p, &[0, 1, 2], Norm::L2).unwrap();
        assert!((r - 1.0).abs() < 1e-12 && (c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);

        assert!(enclosing_radius(&p, &[], Norm::L2).is_err());
    }

    /// Grid search over candidate centers at a fine resolution; the exact
    /// radius can never exceed the best grid radius and should come close.
    #[test]
    fn enclosing_ball_matches_grid_search() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]];
        let mut best = f64::INFINITY;
        for i in 0..=200 {
            for j in 0..=200 {
                let c = [i as f64 / 100.0, j as f64 / 100.0 - 1.0];
                let r = pts
                    .iter()
                    .map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
                    .fold(0.0, f64::max);
                best = best.min(r);
            }
        }
        let ball = min_enclosing_ball(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>());
        assert!(ball.radius <= best + 1e-12);
        assert!((ball.radius - best).abs() < 1e-2);
    }

    #[test]
    fn canonical_cube_examples() {
        let c = smallest_canonical_cube(&[1, 1], &[2, 2]);
        assert_eq!(c, CanonicalCube { level: 2, anchor: vec![0, 0] });
        let c = smallest_canonical_cube(&[0, 0], &[0, 0]);
        assert_eq!(c, CanonicalCube { level: 0, anchor: vec![0, 0] });
        let c = smallest_canonical_cube(&[0], &[(1 << 30) - 1]);
        assert_eq!(c, CanonicalCube { level: 30, anchor: vec![0] });
    }

    /// Linear scan over levels: the first level at which both points share a cell.
    #[test]
    fn smallest_cube_matches_level_scan() {
        for a in 0..16u64 {
            for b in 0..16u64 {
                let (p, q) = ([a, b], [b ^ 5, (a * 3) % 16]);
                let scan = (0..=4).find(|&l| CanonicalCube::containing(&p, l).contains(&q)).unwrap();
                let c = smallest_canonical_cube(&p, &q);
                assert_eq!(c.level, scan);
                assert!(c.contains(&p) && c.contains(&q));
            }
        }
    }

    #[test]
    fn half_open_cells_partition_the_universe() {
        for level in 0..=3u32 {
            for x in 0..8u64 {
                for y in 0..8u64 {
                    let mut owners = 0;
                    for ax in (0..8u64).step_by(1 << level) {
                        for ay in (0..8u64).step_by(1 << level) {
                            let cube = CanonicalCube { level, anchor: vec![ax, ay] };
                            owners += cube.contains(&[x, y]) as usize;
                        }
                    }
                    assert_eq!(owners, 1);
                }
            }
        }
    }

    #[test]
    fn diameter_examples() {
        let p = set(2, 8, &[&[0, 0], &[3, 4]]);
        assert_eq!(euclidean_diameter(&p, &[0]).unwrap(), 0.0);
        assert_eq!(euclidean_diameter(&p, &[0, 1]).unwrap(), 5.0);
        assert!(euclidean_diameter(&p, &[]).is_err());
    }

    #[test]
    fn hull_perimeter_of_square() {
        let p = set(2, 8, &[&[0, 0], &[2, 0], &[2, 2], &[0, 2], &[1, 1]]);
        assert!((hull_perimeter(&p, &[0, 1, 2, 3, 4]) - 8.0).abs() < 1e-12);
        assert!((hull_perimeter(&p, &[0, 1]) - 4.0).abs() < 1e-12);
        assert_eq!(hull_perimeter(&p, &[4]), 0.0);
    }

    #[test]
    fn overflow_is_rejected() {
        assert!(matches!(
            PointSet::new(1, 3, vec![8]),
            Err(RcqError::CoordinateOverflow { value: 8, bits: 3 })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn enclosing_radius_properties(pts in prop::collection::vec((0u64..1000, 0u64..1000), 1..40)) {
                let p = PointSet::from_points(2, 10, &pts.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>()).unwrap();
                let ids: Vec<usize> = p.ids().collect();
                let (rinf, _) = enclosing_radius(&p, &ids, Norm::LInf).unwrap();
                let bb = AxisBox::bounding(&p, &ids).unwrap();
                prop_assert_eq!(rinf, bb.max_extent() as f64 / 2.0);

                let (r2, c) = enclosing_radius(&p, &ids, Norm::L2).unwrap();
                let diam = euclidean_diameter(&p, &ids).unwrap();
                prop_assert!(r2 >= diam / 2.0 - 1e-9);
                for &i in &ids {
                    let d = lp_distance_f64(&c, &p.point_f64(i), Norm::L2);
                    prop_assert!(d <= r2 + 1e-9 * (1.0 + r2));
                }
                // Never worse than the bounding-box circumcircle.
                prop_assert!(r2 <= diam / 3f64.sqrt() + 1e-9);
            }
        }
    }
}
