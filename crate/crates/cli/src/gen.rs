use std::io::Write;

use rcq_core::datagen::{generate, Distribution};

use crate::error::{CliError, CliResult};

/// Writes `id,x0,..,x{d-1}` rows for a generated point set.
pub fn write_points(out: impl Write, n: usize, dim: usize, bits: u32, dist: Distribution, seed: u64) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("n must be positive".into()));
    }
    let pts = generate(n, dim, bits, dist, seed)?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("id".to_string()).chain((0..dim).map(|i| format!("x{i}"))).collect();
    w.write_record(&header)?;
    for (id, p) in pts.iter().enumerate() {
        w.write_record(std::iter::once(id.to_string()).chain(p.iter().map(u64::to_string)))?;
    }
    w.flush()?;
    Ok(())
}
