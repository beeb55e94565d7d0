use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rcq_core::datagen::{generate_set, Distribution};
use rcq_core::oracle::{anchored_three_center, anchored_two_center, brute_capacitated, dp_1d, CAPACITATED_MAX_POINTS};
use rcq_core::{baseline_cluster, AxisBox, CostKind, QuerySpec, RangeClusterIndex, SolverBudget};

use crate::error::{CliError, CliResult};
use crate::query::{grid_box, run_query, Mode, QueryParams};

pub const WORKLOAD_VERSION: u32 = 1;

/// Largest range the exact planar oracles are run on as the reference.
const PLANAR_ORACLE_MAX: [usize; 2] = [4000, 300];

pub const CSV_HEADER: [&str; 17] = [
    "seq",
    "dataset",
    "n",
    "mode",
    "cost_model",
    "k",
    "eps",
    "range_count",
    "query_ns",
    "baseline_ns",
    "packing_size",
    "nodes_visited",
    "cost",
    "opt_or_baseline_cost",
    "ratio",
    "exact_flag",
    "schema_version",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpec {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub datasets: Vec<DatasetRef>,
    #[serde(default)]
    pub queries: Vec<QueryTemplate>,
}

fn default_version() -> u32 {
    WORKLOAD_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetRef {
    /// A saved index file; relative paths resolve against the workload file.
    Index(PathBuf),
    Generate(GenSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub n: usize,
    pub dim: usize,
    #[serde(default = "default_distribution")]
    pub distribution: String,
    #[serde(default = "default_bits")]
    pub bits: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_distribution() -> String {
    "uniform".into()
}

fn default_bits() -> u32 {
    20
}

/// One query shape. Without `lo`/`hi`, each repetition draws a random box
/// whose side on every axis is a `box_frac` fraction of the universe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryTemplate {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_cost")]
    pub cost: CostKind,
    pub k: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    #[serde(default = "default_box_frac")]
    pub box_frac: [f64; 2],
    #[serde(default = "default_repeat")]
    pub repeat: usize,
}

fn default_mode() -> Mode {
    Mode::Approx
}

fn default_cost() -> CostKind {
    CostKind::LinfKCenter
}

fn default_eps() -> f64 {
    0.1
}

fn default_alpha() -> f64 {
    1.2
}

fn default_delta() -> f64 {
    0.25
}

fn default_box_frac() -> [f64; 2] {
    [0.25, 0.5]
}

fn default_repeat() -> usize {
    1
}

impl WorkloadSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: WorkloadSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("workload {}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.version != WORKLOAD_VERSION {
            return Err(CliError::Usage(format!("unsupported workload version {}", self.version)));
        }
        for (i, t) in self.queries.iter().enumerate() {
            let bad = |m: String| Err(CliError::Usage(format!("query {i}: {m}")));
            let [a, b] = t.box_frac;
            if t.lo.is_some() != t.hi.is_some() {
                return bad("give both lo and hi or neither".into());
            }
            if !(0.0 < a && a <= b && b <= 1.0) {
                return bad(format!("box_frac {:?} must satisfy 0 < a <= b <= 1", t.box_frac));
            }
            if !(t.eps.is_finite() && t.eps > 0.0) {
                return bad("eps must be positive".into());
            }
            if t.mode == Mode::Capacitated && !(t.alpha > 1.0 && t.delta > 0.0) {
                return bad("capacitated queries need alpha > 1 and delta > 0".into());
            }
            if t.repeat == 0 {
                return bad("repeat must be positive".into());
            }
        }
        Ok(())
    }
}

/// Result row; empty optional fields print as empty CSV cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchRow {
    pub seq: usize,
    pub dataset: usize,
    pub n: usize,
    pub mode: String,
    pub cost_model: String,
    pub k: usize,
    pub eps: f64,
    pub range_count: usize,
    pub query_ns: u128,
    pub baseline_ns: Option<u128>,
    pub packing_size: Option<usize>,
    pub nodes_visited: Option<usize>,
    pub cost: f64,
    pub opt_or_baseline_cost: Option<f64>,
    pub exact_flag: bool,
}

impl BenchRow {
    pub fn ratio(&self) -> Option<f64> {
        self.opt_or_baseline_cost.filter(|&b| b > 0.0).map(|b| self.cost / b)
    }

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            self.seq.to_string(),
            self.dataset.to_string(),
            self.n.to_string(),
            self.mode.clone(),
            self.cost_model.clone(),
            self.k.to_string(),
            self.eps.to_string(),
            self.range_count.to_string(),
            self.query_ns.to_string(),
            opt(self.baseline_ns.map(|v| v.to_string())),
            opt(self.packing_size.map(|v| v.to_string())),
            opt(self.nodes_visited.map(|v| v.to_string())),
            self.cost.to_string(),
            opt(self.opt_or_baseline_cost.map(|v| v.to_string())),
            opt(self.ratio().map(|v| format!("{v:.6}"))),
            self.exact_flag.to_string(),
            crate::query::SCHEMA_VERSION.to_string(),
        ]
    }
}

struct Job {
    seq: usize,
    dataset: usize,
    query: Option<AxisBox>,
    params: QueryParams,
}

fn load_dataset(d: &DatasetRef, base: &Path) -> CliResult<RangeClusterIndex> {
    match d {
        DatasetRef::Index(p) => Ok(RangeClusterIndex::load(base.join(p))?),
        DatasetRef::Generate(g) => {
            let dist: Distribution = g.distribution.parse()?;
            let pts = generate_set(g.n, g.dim, g.bits, dist, g.seed)?;
            Ok(RangeClusterIndex::build(pts)?)
        }
    }
}

/// Random box in original units. Seeded per (template, repetition) so every
/// dataset with the same universe sees the same boxes.
fn random_box(index: &RangeClusterIndex, seed: u64, t: usize, rep: usize, frac: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((t as u64) << 32) ^ rep as u64);
    let q = index.quantization();
    let side = (1u64 << index.points().bits()) as f64;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for i in 0..index.dim() {
        let w = side * rng.gen_range(frac[0]..=frac[1]);
        let x = rng.gen_range(0.0..=(side - w).max(0.0));
        lo.push(x / q.scale + q.offsets[i]);
        hi.push((x + w) / q.scale + q.offsets[i]);
    }
    (lo, hi)
}

/// Report-then-solve reference cost, in grid units, and its time.
fn baseline(index: &RangeClusterIndex, q: &AxisBox, p: &QueryParams) -> CliResult<(Option<f64>, u128)> {
    let t = Instant::now();
    let cost = match p.mode {
        Mode::Approx => {
            let mut spec = QuerySpec::new(q.clone(), p.k, p.eps, p.cost);
            spec.budget = p.budget.clone();
            Some(baseline_cluster(index, &spec)?.0.cost)
        }
        Mode::Exact1d => {
            let mut xs: Vec<u64> = index.range_report(q).iter().map(|&i| index.points().coord(i, 0)).collect();
            xs.sort_unstable();
            Some(dp_1d(&xs, p.k) as f64)
        }
        Mode::Exact2d => {
            let ids = index.range_report(q);
            (ids.len() <= PLANAR_ORACLE_MAX[p.k - 2]).then(|| {
                let side = if p.k == 2 {
                    anchored_two_center(index.points(), &ids)
                } else {
                    anchored_three_center(index.points(), &ids)
                };
                side as f64
            })
        }
        Mode::Capacitated => {
            let ids = index.range_report(q);
            if ids.is_empty() || ids.len() > CAPACITATED_MAX_POINTS || p.k > 2 {
                None
            } else {
                brute_capacitated(index.points(), &ids, p.k, p.alpha).ok().map(|r| r.opt)
            }
        }
    };
    Ok((cost, t.elapsed().as_nanos()))
}

fn run_job(index: &RangeClusterIndex, job: &Job) -> CliResult<BenchRow> {
    let t = Instant::now();
    let out = run_query(index, job.query.as_ref(), &job.params)?;
    let query_ns = t.elapsed().as_nanos();
    let scale = index.quantization().scale;
    let (base, baseline_ns) = match &job.query {
        Some(q) if out.range_count > 0 => {
            let (c, ns) = baseline(index, q, &job.params)?;
            (c, Some(ns))
        }
        _ => (Some(0.0), None),
    };
    Ok(BenchRow {
        seq: job.seq,
        dataset: job.dataset,
        n: index.len(),
        mode: job.params.mode.name().into(),
        cost_model: out.cost_model.into(),
        k: job.params.k,
        eps: job.params.eps,
        range_count: out.range_count,
        query_ns,
        baseline_ns,
        packing_size: out.packing_size,
        nodes_visited: out.nodes_visited,
        cost: out.cost / scale,
        opt_or_baseline_cost: base.map(|b| b / scale),
        exact_flag: out.exact_flag,
    })
}

/// Runs every query of the workload on every dataset with `jobs` workers.
/// Rows come back ordered by sequence id.
pub fn run_workload(spec: &WorkloadSpec, base: &Path, budget: &SolverBudget, jobs: usize) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let mut seq = 0;
    for (di, d) in spec.datasets.iter().enumerate() {
        let index = load_dataset(d, base)?;
        let mut work = Vec::new();
        for (ti, t) in spec.queries.iter().enumerate() {
            t.mode.validate(index.dim(), t.k)?;
            for rep in 0..t.repeat {
                let (lo, hi) = match (&t.lo, &t.hi) {
                    (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
                    _ => random_box(&index, spec.seed, ti, rep, t.box_frac),
                };
                work.push(Job {
                    seq,
                    dataset: di,
                    query: grid_box(&index, &lo, &hi)?,
                    params: QueryParams {
                        mode: t.mode,
                        cost: t.cost,
                        k: t.k,
                        eps: t.eps,
                        alpha: t.alpha,
                        delta: t.delta,
                        budget: budget.clone(),
                        members: false,
                    },
                });
                seq += 1;
            }
        }
        rows.extend(run_jobs(&index, &work, jobs)?);
    }
    rows.sort_by_key(|r| r.seq);
    Ok(rows)
}

fn run_jobs(index: &RangeClusterIndex, work: &[Job], jobs: usize) -> CliResult<Vec<BenchRow>> {
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(work.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, work.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = work.get(i) else { break };
                let r = run_job(index, job);
                results.lock().expect("worker panicked").push(r);
            });
        }
    });
    results.into_inner().expect("worker panicked").into_iter().collect()
}

pub fn write_csv(out: impl Write, rows: &[BenchRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Static SVG of mean query time against n on log-log axes, one engine
/// series and one baseline series per (mode, cost model, k, eps).
pub fn write_plot(path: &Path, rows: &[BenchRow]) -> CliResult<()> {
    type Key = (String, String, usize, String);
    let mut series: BTreeMap<(Key, bool), BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for r in rows {
        let key = (r.mode.clone(), r.cost_model.clone(), r.k, r.eps.to_string());
        let mut add = |baseline: bool, ns: u128| {
            let e = series.entry((key.clone(), baseline)).or_default().entry(r.n).or_insert((0.0, 0));
            e.0 += ns as f64;
            e.1 += 1;
        };
        add(false, r.query_ns);
        if let Some(b) = r.baseline_ns {
            add(true, b);
        }
    }
    let pts: Vec<(f64, f64)> = series
        .values()
        .flat_map(|s| s.iter().map(|(&n, &(sum, c))| (n as f64, sum / c as f64)))
        .filter(|&(n, t)| n > 0.0 && t > 0.0)
        .collect();
    let (w, h, m) = (720.0, 440.0, 60.0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">mean query time vs n (log-log)</text>\n",
        w / 2.0
    );
    if !pts.is_empty() {
        let lg = |v: f64| v.log10();
        let (x0, x1) = bounds(pts.iter().map(|p| lg(p.0)));
        let (y0, y1) = bounds(pts.iter().map(|p| lg(p.1)));
        let sx = |x: f64| m + (lg(x) - x0) / (x1 - x0) * (w - 2.0 * m - 160.0);
        let sy = |y: f64| h - m - (lg(y) - y0) / (y1 - y0) * (h - 2.0 * m);
        svg += &format!(
            "<line x1=\"{m}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{}\" stroke=\"black\"/>\n",
            h - m,
            w - m - 160.0,
            h - m,
            h - m
        );
        for e in (x0.floor() as i32)..=(x1.ceil() as i32) {
            let x = sx(10f64.powi(e));
            if (m..=w - m - 160.0).contains(&x) {
                svg += &format!("<text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">1e{e}</text>\n", h - m + 18.0);
            }
        }
        for e in (y0.floor() as i32)..=(y1.ceil() as i32) {
            let y = sy(10f64.powi(e));
            if (m..=h - m).contains(&y) {
                svg += &format!("<text x=\"{}\" y=\"{y:.1}\" text-anchor=\"end\">1e{e} ns</text>\n", m - 4.0);
            }
        }
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
        for (i, (((mode, cost, k, eps), baseline), s)) in series.iter().enumerate() {
            let color = COLORS[(i / 2) % COLORS.len()];
            let dash = if *baseline { " stroke-dasharray=\"6 4\"" } else { "" };
            let line: Vec<String> = s
                .iter()
                .map(|(&n, &(sum, c))| format!("{:.1},{:.1}", sx(n as f64), sy((sum / c as f64).max(1.0))))
                .collect();
            svg += &format!("<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} points=\"{}\"/>\n", line.join(" "));
            let label = format!("{mode} {cost} k={k} eps={eps}{}", if *baseline { " baseline" } else { "" });
            svg += &format!(
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{label}</text>\n",
                w - m - 150.0,
                m + 16.0 * i as f64
            );
        }
    }
    svg += "</svg>\n";
    std::fs::write(path, svg)?;
    Ok(())
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
