//! Capacitated rectilinear k-center queries in the plane.
//!
//! The query combines a weak packing `R` of the range with a small
//! δ-approximation `A` of it, solves the 0/1-weighted capacitated problem on
//! `R ∪ A` (only `A` counts against capacity), grows the squares by the
//! packing radius, and distributes the range over the grown squares cell by
//! cell so every cluster stays within `(1+δ)·α·|S_Q|/k`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx_cluster::{lower_bound_and_packing, CostKind, QuerySpec, SolverBudget};
use crate::error::{RcqError, Result};
use crate::geometry::{AxisBox, Cover, PointSet};
use crate::index::RangeClusterIndex;
use crate::range_index::{sample_size, ApproxLadder};

#[derive(Clone, Debug)]
pub struct CapacitatedSpec {
    pub query: AxisBox,
    pub k: usize,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub budget: SolverBudget,
}

impl CapacitatedSpec {
    pub fn new(query: AxisBox, k: usize, alpha: f64, eps: f64, delta: f64) -> Self {
        CapacitatedSpec {
            query,
            k,
            alpha,
            eps,
            delta,
            budget: SolverBudget::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.query.dim() != 2 {
            return Err(RcqError::invalid("capacitated queries are planar"));
        }
        if self.k < 2 {
            return Err(RcqError::invalid("k must be at least 2"));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(RcqError::invalid("alpha must exceed 1"));
        }
        if !positive(self.eps) || !positive(self.delta) {
            return Err(RcqError::invalid("eps and delta must be positive"));
        }
        Ok(())
    }

    /// Accuracy of the sample: `δ / (16k³)`.
    pub fn delta_q(&self) -> f64 {
        self.delta / (16.0 * (self.k as f64).powi(3))
    }

    /// Capacity on the whole range: `α·|S_Q|/k`.
    pub fn capacity_range(&self, n_q: usize) -> f64 {
        self.alpha * n_q as f64 / self.k as f64
    }

    /// Capacity on the sample: `⌊(1+δ/2)·α·|A_Q|/k⌋`.
    pub fn capacity_sample(&self, a_q: usize) -> usize {
        ((1.0 + self.delta / 2.0) * self.alpha * a_q as f64 / self.k as f64).floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacitatedSolution {
    /// Congruent axis-aligned squares, as cubes with half-edge radius.
    pub squares: Vec<Cover>,
    pub clusters: Vec<Vec<usize>>,
    /// Common edge length of the squares.
    pub size: f64,
    pub lb: f64,
    pub r: f64,
    pub packing_size: usize,
    pub sample_size: usize,
    /// Capacity the sample was solved with.
    pub capacity: usize,
}

/// Assigns each counted item to an allowed bin, at most `cap` per bin, by
/// augmenting paths (Ford–Fulkerson on the unit-capacity network).
pub fn assign_with_capacity(allowed: &[Vec<usize>], bins: usize, cap: usize) -> Option<Vec<usize>> {
    if allowed.len() > bins.saturating_mul(cap) {
        return None;
    }
    let mut owner = vec![usize::MAX; allowed.len()];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); bins];
    fn augment(
        item: usize,
        allowed: &[Vec<usize>],
        cap: usize,
        seen: &mut [bool],
        owner: &mut [usize],
        held: &mut [Vec<usize>],
    ) -> bool {
        for &b in &allowed[item] {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            if held[b].len() < cap {
                held[b].push(item);
                owner[item] = b;
                return true;
            }
            for slot in 0..held[b].len() {
                let other = held[b][slot];
                if augment(other, allowed, cap, seen, owner, held) {
                    held[b][slot] = item;
                    owner[item] = b;
                    return true;
                }
            }
        }
        false
    }
    for item in 0..allowed.len() {
        let mut seen = vec![false; bins];
        if !augment(item, allowed, cap, &mut seen, &mut owner, &mut held) {
            return None;
        }
    }
    Some(owner)
}

/// Flow check for explicit squares: each counted point goes to a square
/// containing it, at most `cap` per square. Returns the square per point.
pub fn flow_feasible(squares: &[Cover], points: &PointSet, counted: &[usize], cap: usize) -> Option<Vec<usize>> {
    let allowed: Vec<Vec<usize>> = counted
        .iter()
        .map(|&p| {
            let c = points.point_f64(p);
            (0..squares.len()).filter(|&j| squares[j].contains(&c)).collect()
        })
        .collect();
    assign_with_capacity(&allowed, squares.len(), cap)
}

/// Solution of the 0/1-weighted problem: squares `[x, x+size] × [y, y+size]`
/// given by lower-left corners, and the square of each counted point.
#[derive(Clone, Debug, PartialEq)]
pub struct PckcSolution {
    pub anchors: Vec<[u64; 2]>,
    pub size: u64,
    /// Indexed like the counted input.
    pub assignment: Vec<usize>,
}

/// Minimum-size 0/1-weighted capacitated k-center: `k` congruent squares
/// covering `uncounted ∪ counted` where only counted points load a square,
/// at most `cap` each. Exhaustive over anchored placements and candidate
/// sizes, so it is gated by the budget.
pub fn pckc(
    points: &PointSet,
    uncounted: &[usize],
    counted: &[usize],
    k: usize,
    cap: usize,
    budget: &SolverBudget,
) -> Result<PckcSolution> {
    let mut all: Vec<usize> = uncounted.iter().chain(counted).copied().collect();
    all.sort_unstable();
    all.dedup();
    let m = all.len();
    if k > budget.pckc_max_k || m > budget.pckc_max_points.min(64) {
        return Err(RcqError::budget(format!(
            "capacitated solving on {m} points with k={k} exceeds the budget"
        )));
    }
    if counted.len() > k.saturating_mul(cap) {
        return Err(RcqError::Infeasible(format!(
            "{} counted points exceed {k} squares of capacity {cap}",
            counted.len()
        )));
    }
    if m == 0 {
        return Ok(PckcSolution {
            anchors: Vec::new(),
            size: 0,
            assignment: Vec::new(),
        });
    }
    let xy: Vec<[u64; 2]> = all.iter().map(|&i| [points.coord(i, 0), points.coord(i, 1)]).collect();
    let slot_of = |id: usize| all.binary_search(&id).expect("counted ids are in the union");
    let counted_slots: Vec<usize> = counted.iter().map(|&i| slot_of(i)).collect();
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };

    let mut sizes: Vec<u64> = vec![0];
    for a in &xy {
        for b in &xy {
            for axis in 0..2 {
                if a[axis] >= b[axis] {
                    sizes.push(a[axis] - b[axis]);
                }
            }
        }
    }
    sizes.sort_unstable();
    sizes.dedup();

    let try_size = |s: u64| -> Option<(Vec<[u64; 2]>, Vec<usize>)> {
        let mut masks: Vec<(u64, [u64; 2])> = Vec::new();
        for p in &xy {
            for q in &xy {
                let anchor = [p[0], q[1]];
                let mask = xy.iter().enumerate().fold(0u64, |acc, (i, c)| {
                    let inside = anchor[0] <= c[0] && c[0] - anchor[0] <= s && anchor[1] <= c[1] && c[1] - anchor[1] <= s;
                    acc | ((inside as u64) << i)
                });
                if mask != 0 {
                    masks.push((mask, anchor));
                }
            }
        }
        masks.sort_by_key(|&(mask, anchor)| (std::cmp::Reverse(mask.count_ones()), mask, anchor));
        masks.dedup_by_key(|e| e.0);
        let mut maximal: Vec<(u64, [u64; 2])> = Vec::new();
        for &(mask, anchor) in &masks {
            if !maximal.iter().any(|&(big, _)| mask & big == mask) {
                maximal.push((mask, anchor));
            }
        }
        let flow = |choice: &[usize]| {
            let allowed: Vec<Vec<usize>> = counted_slots
                .iter()
                .map(|&slot| (0..choice.len()).filter(|&j| maximal[choice[j]].0 >> slot & 1 == 1).collect())
                .collect();
            assign_with_capacity(&allowed, choice.len(), cap)
        };
        let mut choice = Vec::with_capacity(k);
        search(&maximal, full, k, 0, 0, &mut choice, &flow)
            .map(|(c, assignment)| (c.iter().map(|&j| maximal[j].1).collect(), assignment))
    };

    // Feasibility is monotone in the size: larger squares cover more.
    let (mut lo, mut hi) = (0usize, sizes.len() - 1);
    let mut best = try_size(sizes[hi]);
    if best.is_none() {
        return Err(RcqError::Infeasible("no placement satisfies the capacity".into()));
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        match try_size(sizes[mid]) {
            Some(found) => {
                hi = mid;
                best = Some(found);
            }
            None => lo = mid + 1,
        }
    }
    let (mut anchors, assignment) = best.expect("feasible at the largest size");
    let size = sizes[hi];
    // Pad with copies so exactly k squares are reported.
    while anchors.len() < k {
        anchors.push(anchors[0]);
    }
    Ok(PckcSolution {
        anchors,
        size,
        assignment,
    })
}

/// Chooses up to `k` square masks (non-decreasing indices) whose union is
/// `full` and for which the capacity flow succeeds.
fn search(
    masks: &[(u64, [u64; 2])],
    full: u64,
    k: usize,
    start: usize,
    covered: u64,
    choice: &mut Vec<usize>,
    flow: &dyn Fn(&[usize]) -> Option<Vec<usize>>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if covered == full {
        if let Some(a) = flow(choice) {
            return Some((choice.clone(), a));
        }
    }
    if choice.len() == k {
        return None;
    }
    let missing = full & !covered;
    for j in start..masks.len() {
        let mask = masks[j].0;
        // The last pick must finish the cover.
        if choice.len() + 1 == k && mask & missing != missing {
            continue;
        }
        choice.push(j);
        let found = search(masks, full, k, j, covered | mask, choice, flow);
        choice.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Subset of the range that is a `delta_q`-approximation of it for
/// rectangles, with the ladder level it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaApprox {
    pub ids: Vec<usize>,
    /// Ladder level used, `None` when the whole range was taken.
    pub level: Option<usize>,
    pub resampled: bool,
}

/// Restricts the smallest ladder level fine enough for the range to the
/// range, then resamples it to a `delta_q/2`-approximation.
pub fn delta_sample(index: &RangeClusterIndex, q: &AxisBox, delta_q: f64) -> Result<DeltaApprox> {
    if !(delta_q > 0.0 && delta_q <= 1.0) {
        return Err(RcqError::invalid("delta_q must lie in (0, 1]"));
    }
    let n = index.len();
    let n_q = index.kd.count(q);
    if n_q == 0 {
        return Err(RcqError::Empty("the query range holds no points"));
    }
    let target = delta_q / 4.0 * n_q as f64 / n as f64;
    let ladder = index.ladder();
    let level = ladder.level_for(target).filter(|&i| !ladder.is_full(i));
    let base = match level {
        Some(i) => ladder.tree(i, &index.kd).report(q),
        None => index.kd.report(q),
    };
    let m = sample_size(delta_q / 2.0, crate::range_index::LADDER_FAIL);
    if m >= base.len() {
        return Ok(DeltaApprox {
            ids: base,
            level,
            resampled: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(ladder, q, delta_q));
    let mut ids: Vec<usize> = rand::seq::index::sample(&mut rng, base.len(), m)
        .into_iter()
        .map(|j| base[j])
        .collect();
    ids.sort_unstable();
    Ok(DeltaApprox {
        ids,
        level,
        resampled: true,
    })
}

fn sample_seed(ladder: &ApproxLadder, q: &AxisBox, delta_q: f64) -> u64 {
    let mix = |h: u64, x: u64| (h ^ x).wrapping_mul(0x100_0000_01B3).rotate_left(29);
    let h = q.lo.iter().chain(&q.hi).fold(ladder.seed(), |h, &x| mix(h, x));
    mix(h, delta_q.to_bits())
}

/// Distributes `range` over the squares: the plane is cut along every square
/// edge; inside a cell the points are ordered top-down (then by x and id),
/// each counted point keeps its square, and every other point joins the
/// square of the next counted point in that order (the last one's when none
/// follows). Cells without counted points go to their first covering square.
pub fn assign_points(
    squares: &[Cover],
    points: &PointSet,
    counted: &[usize],
    counted_square: &[usize],
    range: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let bounds: Vec<[f64; 4]> = squares
        .iter()
        .map(|s| match s {
            Cover::Cube { center, radius } => Ok([
                center[0] - radius,
                center[0] + radius,
                center[1] - radius,
                center[1] + radius,
            ]),
            _ => Err(RcqError::invalid("capacitated assignment needs square covers")),
        })
        .collect::<Result<_>>()?;
    let mut xs: Vec<f64> = bounds.iter().flat_map(|b| [b[0], b[1]]).collect();
    let mut ys: Vec<f64> = bounds.iter().flat_map(|b| [b[2], b[3]]).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    // Lines get even slots and open gaps odd slots, so every cell lies in a
    // fixed set of squares.
    let slot = |lines: &[f64], c: f64| match lines.binary_search_by(|l| l.total_cmp(&c)) {
        Ok(i) => 2 * i + 1,
        Err(i) => 2 * i,
    };
    let cell_of = |p: usize| {
        let (x, y) = (points.coord(p, 0) as f64, points.coord(p, 1) as f64);
        (slot(&xs, x), slot(&ys, y))
    };
    let contains = |j: usize, p: usize| squares[j].contains(&points.point_f64(p));

    let mut owner_of_counted = std::collections::HashMap::new();
    for (&p, &j) in counted.iter().zip(counted_square) {
        if !contains(j, p) {
            return Err(RcqError::Infeasible(format!("counted point {p} lies outside its square {j}")));
        }
        owner_of_counted.insert(p, j);
    }
    let mut cells: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for &p in range {
        cells.entry(cell_of(p)).or_default().push(p);
    }
    for &p in counted {
        let cell = cell_of(p);
        let list = cells.entry(cell).or_default();
        if !list.contains(&p) {
            list.push(p);
        }
    }

    let mut clusters = vec![Vec::new(); squares.len()];
    for (_, mut members) in cells {
        members.sort_by(|&a, &b| {
            let (pa, pb) = (points.point(a), points.point(b));
            pb[1].cmp(&pa[1]).then(pa[0].cmp(&pb[0])).then(a.cmp(&b))
        });
        let in_range: std::collections::HashSet<usize> = range.iter().copied().collect();
        let anchors: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(_, p)| owner_of_counted.contains_key(p))
            .map(|(i, _)| i)
            .collect();
        if anchors.is_empty() {
            for &p in &members {
                let j = (0..squares.len())
                    .find(|&j| contains(j, p))
                    .ok_or_else(|| RcqError::Infeasible(format!("point {p} lies outside every square")))?;
                clusters[j].push(p);
            }
            continue;
        }
        let mut next = 0;
        for (i, &p) in members.iter().enumerate() {
            while next + 1 < anchors.len() && anchors[next] < i {
                next += 1;
            }
            let j = owner_of_counted[&members[anchors[next]]];
            if in_range.contains(&p) {
                clusters[j].push(p);
            }
        }
    }
    for c in &mut clusters {
        c.sort_unstable();
    }
    Ok(clusters)
}

/// `(1+ε, 1+δ)`-approximate capacitated rectilinear k-center on the range.
pub fn capacitated_cluster_query(index: &RangeClusterIndex, spec: &CapacitatedSpec) -> Result<CapacitatedSolution> {
    spec.validate()?;
    if index.dim() != 2 {
        return Err(RcqError::DimensionMismatch {
            expected: 2,
            got: index.dim(),
        });
    }
    let points = index.points();
    let range = index.kd.report(&spec.query);
    if range.is_empty() {
        return Ok(CapacitatedSolution {
            squares: Vec::new(),
            clusters: Vec::new(),
            size: 0.0,
            lb: 0.0,
            r: 0.0,
            packing_size: 0,
            sample_size: 0,
            capacity: 0,
        });
    }
    let mut qs = QuerySpec::new(spec.query.clone(), spec.k, spec.eps, CostKind::LinfKCenter);
    qs.budget = spec.budget.clone();
    let (lb, r, reps) = match lower_bound_and_packing(index, &qs) {
        Ok(p) => (p.lb, p.r, p.reps),
        Err(RcqError::TrivialRange(_)) => (0.0, 0.0, range.clone()),
        Err(e) => return Err(e),
    };
    let sample = delta_sample(index, &spec.query, spec.delta_q().min(1.0))?;
    let cap = spec.capacity_sample(sample.ids.len());
    let sol = pckc(points, &reps, &sample.ids, spec.k, cap, &spec.budget)?;
    let side = sol.size as f64 + 2.0 * r;
    let squares: Vec<Cover> = sol
        .anchors
        .iter()
        .map(|a| Cover::Cube {
            center: vec![a[0] as f64 + sol.size as f64 / 2.0, a[1] as f64 + sol.size as f64 / 2.0],
            radius: side / 2.0,
        })
        .collect();
    let clusters = assign_points(&squares, points, &sample.ids, &sol.assignment, &range)?;
    Ok(CapacitatedSolution {
        squares,
        clusters,
        size: side,
        lb,
        r,
        packing_size: reps.len(),
        sample_size: sample.ids.len(),
        capacity: cap,
    })
}
