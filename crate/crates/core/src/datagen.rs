//! Deterministic synthetic point sets.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{RcqError, Result};
use crate::geometry::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Uniform,
    /// Gaussian blobs around `clusters` uniformly placed centers.
    Clustered { clusters: usize },
    /// Row-major lattice filling the universe as evenly as possible.
    Grid,
}

impl Distribution {
    pub const DEFAULT_CLUSTERS: usize = 8;
}

impl FromStr for Distribution {
    type Err = RcqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "clustered" => Ok(Self::Clustered {
                clusters: Self::DEFAULT_CLUSTERS,
            }),
            "grid" => Ok(Self::Grid),
            _ => match s.strip_prefix("clustered:").map(str::parse::<usize>) {
                Some(Ok(c)) if c > 0 => Ok(Self::Clustered { clusters: c }),
                _ => Err(RcqError::invalid(format!("unknown distribution '{s}'"))),
            },
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Clustered { clusters } => write!(f, "clustered:{clusters}"),
            Self::Grid => f.write_str("grid"),
        }
    }
}

/// Generates `n` points of dimension `dim` in `[0, 2^bits)^dim`.
pub fn generate(n: usize, dim: usize, bits: u32, dist: Distribution, seed: u64) -> Result<Vec<Vec<u64>>> {
    if dim == 0 {
        return Err(RcqError::invalid("dimension must be positive"));
    }
    if bits == 0 || bits > 62 {
        return Err(RcqError::invalid(format!("universe bits {bits} outside 1..=62")));
    }
    let side = 1u64 << bits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = match dist {
        Distribution::Uniform => (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0..side)).collect()).collect(),
        Distribution::Clustered { clusters } => {
            if clusters == 0 {
                return Err(RcqError::invalid("clustered data needs at least one cluster"));
            }
            let centers: Vec<Vec<f64>> = (0..clusters)
                .map(|_| (0..dim).map(|_| rng.gen_range(0.1..0.9) * side as f64).collect())
                .collect();
            let spread = side as f64 / (20.0 * (clusters as f64).powf(1.0 / dim as f64));
            let noise = Normal::new(0.0, spread).expect("positive spread");
            let top = (side - 1) as f64;
            (0..n)
                .map(|i| {
                    centers[i % clusters]
                        .iter()
                        .map(|&c| (c + noise.sample(&mut rng)).round().clamp(0.0, top) as u64)
                        .collect()
                })
                .collect()
        }
        Distribution::Grid => {
            let per_axis = (1..).find(|&m: &u64| m.saturating_pow(dim as u32) >= n as u64).unwrap_or(1).max(1);
            if per_axis > side {
                return Err(RcqError::invalid(format!("{n} grid points do not fit a {bits}-bit universe")));
            }
            let step = side / per_axis;
            (0..n as u64)
                .map(|mut i| {
                    (0..dim)
                        .map(|_| {
                            let c = i % per_axis;
                            i /= per_axis;
                            c * step
                        })
                        .collect()
                })
                .collect()
        }
    };
    Ok(pts)
}

pub fn generate_set(n: usize, dim: usize, bits: u32, dist: Distribution, seed: u64) -> Result<PointSet> {
    PointSet::from_points(dim, bits, &generate(n, dim, bits, dist, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        for dist in [Distribution::Uniform, Distribution::Clustered { clusters: 3 }, Distribution::Grid] {
            let a = generate(500, 3, 10, dist, 7).unwrap();
            assert_eq!(a, generate(500, 3, 10, dist, 7).unwrap());
            assert_eq!(a.len(), 500);
            assert!(a.iter().flatten().all(|&c| c < 1024));
        }
    }

    #[test]
    fn grid_examples() {
        let g = generate(4, 2, 4, Distribution::Grid, 0).unwrap();
        assert_eq!(g, vec![vec![0, 0], vec![8, 0], vec![0, 8], vec![8, 8]]);
        assert!(generate(100, 1, 4, Distribution::Grid, 0).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("clustered:5".parse::<Distribution>().unwrap(), Distribution::Clustered { clusters: 5 });
        for d in [Distribution::Uniform, Distribution::Grid, Distribution::Clustered { clusters: 2 }] {
            assert_eq!(d.to_string().parse::<Distribution>().unwrap(), d);
        }
        assert!("zipf".parse::<Distribution>().is_err());
    }
}
