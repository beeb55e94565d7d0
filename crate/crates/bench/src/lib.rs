//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcq_core::datagen::{generate_set, Distribution};
use rcq_core::{AxisBox, PointSet, RangeClusterIndex};

pub const BITS: u32 = 20;

pub fn points(n: usize, dim: usize, seed: u64) -> PointSet {
    generate_set(n, dim, BITS, Distribution::Uniform, seed).expect("valid generator parameters")
}

pub fn index(n: usize, dim: usize, seed: u64) -> RangeClusterIndex {
    RangeClusterIndex::build(points(n, dim, seed)).expect("nonempty point set")
}

/// `count` boxes whose side on each axis is a `lo..hi` fraction of the universe.
pub fn boxes(count: usize, dim: usize, lo: f64, hi: f64, seed: u64) -> Vec<AxisBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (1u64 << BITS) as f64;
    (0..count)
        .map(|_| {
            let (a, b): (Vec<u64>, Vec<u64>) = (0..dim)
                .map(|_| {
                    let w = side * rng.gen_range(lo..hi);
                    let x = rng.gen_range(0.0..side - w);
                    (x as u64, (x + w) as u64)
                })
                .unzip();
            AxisBox::new(a, b)
        })
        .collect()
}
