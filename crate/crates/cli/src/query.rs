use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use rcq_core::exact2d::assign_to_squares;
use rcq_core::{
    capacitated_cluster_query, cluster_query, three_center_query, two_center_query, AxisBox, CapacitatedSpec,
    CostKind, Cover, QuerySpec, RangeClusterIndex, SolverBudget, SortedArray1D,
};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Approx,
    Exact1d,
    Exact2d,
    Capacitated,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Approx => "approx",
            Mode::Exact1d => "exact1d",
            Mode::Exact2d => "exact2d",
            Mode::Capacitated => "capacitated",
        }
    }

    /// Checks that the mode applies to data of dimension `dim` with `k` clusters.
    pub fn validate(self, dim: usize, k: usize) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Usage(m.to_string()));
        match self {
            Mode::Exact1d if dim != 1 => bad("exact1d needs one-dimensional data"),
            Mode::Exact2d if dim != 2 => bad("exact2d needs planar data"),
            Mode::Exact2d if !(2..=3).contains(&k) => bad("exact2d supports k = 2 and k = 3"),
            Mode::Capacitated if dim != 2 => bad("capacitated needs planar data"),
            _ if k == 0 => bad("k must be positive"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryParams {
    pub mode: Mode,
    pub cost: CostKind,
    pub k: usize,
    pub eps: f64,
    pub alpha: f64,
    pub delta: f64,
    pub budget: SolverBudget,
    /// List every member of each cluster, not just packing points.
    pub members: bool,
}

/// The JSON document printed by `rcq query`. Lengths, covers and costs are in
/// the original coordinate units; ids are CSV row ids.
#[derive(Clone, Debug, Serialize)]
pub struct QueryOutput {
    pub schema_version: u32,
    pub mode: Mode,
    /// Objective the cost is measured in.
    pub cost_model: &'static str,
    pub k: usize,
    pub eps: f64,
    pub range_count: usize,
    pub cost: f64,
    pub lb: Option<f64>,
    pub covers: Vec<Cover>,
    pub clusters: Vec<Vec<usize>>,
    pub packing_size: Option<usize>,
    pub nodes_visited: Option<usize>,
    pub quantization_scale: f64,
    pub exact_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<&'static str>,
}

pub fn parse_cost(s: &str) -> Result<CostKind, String> {
    CostKind::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = CostKind::ALL.iter().map(|c| c.name()).collect();
        format!("unknown cost model `{s}`; expected one of {}", names.join(", "))
    })
}

/// Grid box of the points inside the original-unit box `[lo, hi]`; `None`
/// when no grid point lies inside.
pub fn grid_box(index: &RangeClusterIndex, lo: &[f64], hi: &[f64]) -> CliResult<Option<AxisBox>> {
    let dim = index.dim();
    if lo.len() != dim || hi.len() != dim {
        return Err(CliError::Usage(format!("query box needs {dim} coordinates per corner")));
    }
    if lo.iter().chain(hi).any(|x| !x.is_finite()) || lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Err(CliError::Usage("query box needs finite corners with lo <= hi".into()));
    }
    let quant = index.quantization();
    let top = ((1u64 << index.points().bits()) - 1) as f64;
    let (mut qlo, mut qhi) = (Vec::with_capacity(dim), Vec::with_capacity(dim));
    for i in 0..dim {
        let a = ((lo[i] - quant.offsets[i]) * quant.scale).ceil();
        let b = ((hi[i] - quant.offsets[i]) * quant.scale).floor();
        if b < 0.0 || a > top || a > b {
            return Ok(None);
        }
        qlo.push(a.max(0.0) as u64);
        qhi.push(b.min(top) as u64);
    }
    Ok(Some(AxisBox::new(qlo, qhi)))
}

fn unscale_cover(c: Cover, index: &RangeClusterIndex) -> Cover {
    let q = index.quantization();
    let pos = |x: f64, i: usize| x / q.scale + q.offsets[i];
    match c {
        Cover::Cube { center, radius } => Cover::Cube {
            center: center.iter().enumerate().map(|(i, &x)| pos(x, i)).collect(),
            radius: radius / q.scale,
        },
        Cover::Ball { center, radius } => Cover::Ball {
            center: center.iter().enumerate().map(|(i, &x)| pos(x, i)).collect(),
            radius: radius / q.scale,
        },
        Cover::Interval { lo, hi } => Cover::Interval {
            lo: pos(lo, 0),
            hi: pos(hi, 0),
        },
        Cover::Polygon { vertices, inflate } => Cover::Polygon {
            vertices: vertices.iter().map(|v| [pos(v[0], 0), pos(v[1], 1)]).collect(),
            inflate: inflate / q.scale,
        },
    }
}

pub fn cost_model_name(p: &QueryParams) -> &'static str {
    match p.mode {
        Mode::Approx => p.cost.name(),
        Mode::Exact1d => "interval-length",
        Mode::Exact2d | Mode::Capacitated => "square-edge",
    }
}

/// Runs one query. Lengths come back in grid units; [`finish`] converts.
pub fn run_query(index: &RangeClusterIndex, q: Option<&AxisBox>, p: &QueryParams) -> CliResult<QueryOutput> {
    p.mode.validate(index.dim(), p.k)?;
    let mut out = QueryOutput {
        schema_version: SCHEMA_VERSION,
        mode: p.mode,
        cost_model: cost_model_name(p),
        k: p.k,
        eps: p.eps,
        range_count: 0,
        cost: 0.0,
        lb: Some(0.0),
        covers: Vec::new(),
        clusters: Vec::new(),
        packing_size: None,
        nodes_visited: None,
        quantization_scale: index.quantization().scale,
        exact_flag: true,
        algorithm: None,
    };
    let Some(q) = q else { return Ok(out) };
    out.range_count = index.range_count(q);
    let points = index.points();
    match p.mode {
        Mode::Approx => {
            let mut spec = QuerySpec::new(q.clone(), p.k, p.eps, p.cost);
            spec.budget = p.budget.clone();
            spec.report_members = p.members;
            let ans = cluster_query(index, &spec)?;
            let c = ans.clustering;
            out.cost = c.cost;
            out.lb = Some(ans.packing.as_ref().map_or(c.cost, |pk| pk.lb));
            out.packing_size = Some(ans.packing.as_ref().map_or(out.range_count, |pk| pk.reps.len()));
            out.nodes_visited = Some(ans.packing.as_ref().map_or(0, |pk| pk.stats.nodes_visited));
            out.exact_flag = c.exact && ans.packing.as_ref().is_none_or(|pk| pk.exact);
            out.covers = c.covers;
            out.clusters = c.clusters;
        }
        Mode::Exact1d => {
            let arr = SortedArray1D::build(points)?;
            let (sol, algo) = arr.kcenter_query_1d(q.lo[0], q.hi[0], p.k)?;
            out.cost = sol.length as f64;
            out.lb = Some(out.cost);
            out.covers = sol.intervals.iter().map(|&(a, b)| Cover::Interval { lo: a as f64, hi: b as f64 }).collect();
            out.clusters = sol.members;
            out.algorithm = Some(match algo {
                rcq_core::Algorithm1D::LargeK => "large-k",
                rcq_core::Algorithm1D::SmallK => "small-k",
            });
        }
        Mode::Exact2d => {
            let (size, squares) = if p.k == 2 {
                let a = two_center_query(index, q)?;
                (a.size, a.squares)
            } else {
                let a = three_center_query(index, q)?;
                (a.size, a.squares)
            };
            let ids = index.range_report(q);
            out.cost = size as f64;
            out.lb = Some(out.cost);
            out.clusters = assign_to_squares(points, &ids, &squares);
            out.covers = squares.iter().map(|s| s.to_cover()).collect();
        }
        Mode::Capacitated => {
            if out.range_count == 0 {
                return Ok(out);
            }
            let mut spec = CapacitatedSpec::new(q.clone(), p.k, p.alpha, p.eps, p.delta);
            spec.budget = p.budget.clone();
            let sol = capacitated_cluster_query(index, &spec)?;
            out.cost = sol.size;
            out.lb = Some(sol.lb);
            out.packing_size = Some(sol.packing_size);
            out.exact_flag = false;
            out.covers = sol.squares;
            out.clusters = sol.clusters;
        }
    }
    Ok(out)
}

/// Converts grid-unit lengths and covers of `out` to original units.
pub fn finish(mut out: QueryOutput, index: &RangeClusterIndex) -> QueryOutput {
    let scale = index.quantization().scale;
    out.cost /= scale;
    out.lb = out.lb.map(|l| l / scale);
    out.covers = out.covers.into_iter().map(|c| unscale_cover(c, index)).collect();
    out
}
