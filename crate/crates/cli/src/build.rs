use std::io::Read;

use rcq_core::index::DEFAULT_LADDER_SEED;
use rcq_core::{PointSet, Quantization, RangeClusterIndex};

use crate::error::{CliError, CliResult};

/// Row-major coordinates from a points CSV, checking the header and that ids
/// run `0..n` in order.
pub fn read_points(input: impl Read) -> CliResult<(usize, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let dim = header.len().saturating_sub(1);
    let named = header.iter().skip(1).enumerate().all(|(i, h)| h == format!("x{i}"));
    if dim == 0 || &header[0] != "id" || !named {
        return Err(CliError::Data("header must be id,x0,..,x{d-1}".into()));
    }
    let mut coords = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let id: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Data(format!("row {row}: bad id `{}`", &rec[0])))?;
        if id != row {
            return Err(CliError::Data(format!("row {row}: ids must run 0..n in order, found {id}")));
        }
        for field in rec.iter().skip(1) {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Data(format!("row {row}: bad coordinate `{field}`")))?;
            if !x.is_finite() {
                return Err(CliError::Data(format!("row {row}: non-finite coordinate")));
            }
            coords.push(x);
        }
    }
    if coords.is_empty() {
        return Err(CliError::Data("no points".into()));
    }
    Ok((dim, coords))
}

/// Builds an index from raw coordinates. Without `quantize` the coordinates
/// must already be integers inside the universe.
pub fn build_index(dim: usize, raw: &[f64], bits: u32, quantize: bool, seed: Option<u64>) -> CliResult<RangeClusterIndex> {
    if bits == 0 || bits > 62 {
        return Err(CliError::Usage(format!("universe bits {bits} outside 1..=62")));
    }
    let quant = if quantize {
        Quantization::fit(dim, bits, raw)?
    } else {
        if let Some(x) = raw.iter().find(|x| x.fract() != 0.0) {
            return Err(CliError::Data(format!("coordinate {x} is not an integer; pass --quantize")));
        }
        Quantization::identity(dim)
    };
    let coords = quant.quantize(bits, raw)?;
    let points = PointSet::new(dim, bits, coords)?;
    Ok(RangeClusterIndex::build_full(points, seed.unwrap_or(DEFAULT_LADDER_SEED), quant)?)
}
