//! `rcq`: generate point sets, build range-clustering indexes, query them and
//! benchmark query workloads.
//!
//! Exit codes: 0 success, 2 usage error, 3 bad or overflowing data, 4 solver
//! budget exceeded.

mod bench;
mod build;
mod error;
mod gen;
mod query;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rcq_core::datagen::Distribution;
use rcq_core::{CostKind, RangeClusterIndex, SolverBudget};

use error::CliResult;
use query::{Mode, QueryParams};

#[derive(Parser)]
#[command(name = "rcq", version, about = "Range-clustering queries over static point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic point set as CSV (`id,x0,..`).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// uniform, grid, clustered or clustered:<count>
        #[arg(long, default_value = "uniform")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinates lie in [0, 2^bits).
        #[arg(long, default_value_t = 16)]
        bits: u32,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an index file from a points CSV.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Universe bits per axis.
        #[arg(long, default_value_t = 16)]
        bits: u32,
        /// Scale real-valued coordinates onto the grid instead of requiring integers.
        #[arg(long)]
        quantize: bool,
        /// Seed of the sampling ladder.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cluster the points inside a box; prints JSON.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Lower corner, comma separated, in original units.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        hi: Vec<f64>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Mode::Approx)]
        mode: Mode,
        #[arg(long, default_value = "linf-kcenter", value_parser = query::parse_cost)]
        cost: CostKind,
        /// Capacity slack factor for capacitated mode.
        #[arg(long, default_value_t = 1.2)]
        alpha: f64,
        /// Capacity violation allowance for capacitated mode.
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        /// List only packing points per cluster instead of every member.
        #[arg(long)]
        no_members: bool,
        #[arg(long)]
        pretty: bool,
    },
    /// Run a JSON workload and print one CSV row per query.
    Bench {
        #[arg(long)]
        workload: PathBuf,
        /// CSV output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG chart of query time against n.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Parallel query workers.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Gen {
            n,
            dim,
            dist,
            seed,
            bits,
            out,
        } => gen::write_points(output(out.as_deref())?, n, dim, bits, dist, seed),
        Command::Build {
            input,
            output,
            bits,
            quantize,
            seed,
        } => {
            let (dim, raw) = build::read_points(BufReader::new(File::open(&input)?))?;
            let index = build::build_index(dim, &raw, bits, quantize, seed)?;
            index.save(&output)?;
            Ok(())
        }
        Command::Query {
            index,
            lo,
            hi,
            k,
            eps,
            mode,
            cost,
            alpha,
            delta,
            no_members,
            pretty,
        } => {
            let budget = SolverBudget::from_env()?;
            let index = RangeClusterIndex::load(&index)?;
            let params = QueryParams {
                mode,
                cost,
                k,
                eps,
                alpha,
                delta,
                budget,
                members: !no_members,
            };
            let q = query::grid_box(&index, &lo, &hi)?;
            let out = query::finish(query::run_query(&index, q.as_ref(), &params)?, &index);
            let json = if pretty {
                serde_json::to_string_pretty(&out)
            } else {
                serde_json::to_string(&out)
            }
            .expect("query output serializes");
            println!("{json}");
            Ok(())
        }
        Command::Bench {
            workload,
            out,
            plot,
            jobs,
        } => {
            let budget = SolverBudget::from_env()?;
            let spec = bench::WorkloadSpec::load(&workload)?;
            let base = workload.parent().unwrap_or(Path::new("."));
            let rows = bench::run_workload(&spec, base, &budget, jobs)?;
            bench::write_csv(output(out.as_deref())?, &rows)?;
            if let Some(p) = plot {
                bench::write_plot(&p, &rows)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_on_stdout = matches!(cli.command, Command::Query { .. });
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json_on_stdout {
                println!("{}", e.to_json());
            } else {
                eprintln!("{}", e.to_json());
            }
            ExitCode::from(e.code())
        }
    }
}
