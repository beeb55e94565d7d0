//! The bundled index: points, compressed octree, k-d tree, sampling ladder,
//! and lazily built planar structures for the exact 2D queries.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{RcqError, Result};
use crate::exact2d::ConeIndex;
use crate::geometry::{AxisBox, PointSet};
use crate::octree::CompressedOctree;
use crate::range_index::{ApproxLadder, KdTree};

pub const DEFAULT_LADDER_SEED: u64 = 0x5EED_0001;

/// Maps original floating-point coordinates onto the integer grid:
/// `q = round((x - offset[i]) * scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantization {
    pub scale: f64,
    pub offsets: Vec<f64>,
}

impl Quantization {
    pub fn identity(dim: usize) -> Self {
        Quantization {
            scale: 1.0,
            offsets: vec![0.0; dim],
        }
    }

    /// Uniform scale fitting every axis of `raw` into `bits` bits.
    pub fn fit(dim: usize, bits: u32, raw: &[f64]) -> Result<Self> {
        if raw.is_empty() || !raw.len().is_multiple_of(dim) {
            return Err(RcqError::invalid("coordinate count is not a multiple of the dimension"));
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(RcqError::Format("non-finite coordinate".into()));
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in raw.chunks(dim) {
            for i in 0..dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let span = (0..dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        let max_q = ((1u64 << bits) - 1) as f64;
        let scale = if span > 0.0 { max_q / span } else { 1.0 };
        Ok(Quantization { scale, offsets: lo })
    }

    pub fn quantize(&self, bits: u32, raw: &[f64]) -> Result<Vec<u64>> {
        let dim = self.offsets.len();
        let max_q = (1u64 << bits) - 1;
        raw.iter()
            .enumerate()
            .map(|(j, &x)| {
                let q = ((x - self.offsets[j % dim]) * self.scale).round();
                if !q.is_finite() || q < 0.0 || q > max_q as f64 {
                    Err(RcqError::CoordinateOverflow {
                        value: if q.is_finite() && q > 0.0 { q as u64 } else { 0 },
                        bits,
                    })
                } else {
                    Ok(q as u64)
                }
            })
            .collect()
    }

    /// Quantized box covering the original-unit box `[lo, hi]`, clamped to
    /// the universe.
    pub fn quantize_box(&self, bits: u32, lo: &[f64], hi: &[f64]) -> Result<AxisBox> {
        let max_q = ((1u64 << bits) - 1) as f64;
        let conv = |x: f64, i: usize, up: bool| {
            let q = (x - self.offsets[i]) * self.scale;
            let q = if up { q.floor() } else { q.ceil() };
            q.clamp(0.0, max_q) as u64
        };
        let qlo: Vec<u64> = (0..lo.len()).map(|i| conv(lo[i], i, false)).collect();
        let qhi: Vec<u64> = (0..hi.len()).map(|i| conv(hi[i], i, true)).collect();
        AxisBox::try_new(qlo, qhi)
    }
}

#[derive(Debug)]
pub struct RangeClusterIndex {
    pub(crate) points: PointSet,
    pub(crate) octree: CompressedOctree,
    pub(crate) kd: KdTree,
    pub(crate) ladder: ApproxLadder,
    pub(crate) quantization: Quantization,
    pub(crate) cones: OnceLock<ConeIndex>,
}

impl RangeClusterIndex {
    pub fn build(points: PointSet) -> Result<Self> {
        Self::build_with_seed(points, DEFAULT_LADDER_SEED)
    }

    pub fn build_with_seed(points: PointSet, seed: u64) -> Result<Self> {
        let q = Quantization::identity(points.dim());
        Self::build_full(points, seed, q)
    }

    pub fn build_full(points: PointSet, seed: u64, quantization: Quantization) -> Result<Self> {
        if quantization.offsets.len() != points.dim() {
            return Err(RcqError::DimensionMismatch {
                expected: points.dim(),
                got: quantization.offsets.len(),
            });
        }
        let octree = CompressedOctree::build(&points)?;
        Ok(Self::assemble(points, octree, seed, quantization))
    }

    pub(crate) fn assemble(
        points: PointSet,
        octree: CompressedOctree,
        seed: u64,
        quantization: Quantization,
    ) -> Self {
        let kd = KdTree::build_all(&points);
        let ladder = ApproxLadder::build(&points, seed);
        RangeClusterIndex {
            points,
            octree,
            kd,
            ladder,
            quantization,
            cones: OnceLock::new(),
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn octree(&self) -> &CompressedOctree {
        &self.octree
    }

    pub fn kd(&self) -> &KdTree {
        &self.kd
    }

    pub fn ladder(&self) -> &ApproxLadder {
        &self.ladder
    }

    pub fn quantization(&self) -> &Quantization {
        &self.quantization
    }

    /// Ids of the points inside `q`, sorted.
    pub fn range_report(&self, q: &AxisBox) -> Vec<usize> {
        self.kd.report(q)
    }

    pub fn range_count(&self, q: &AxisBox) -> usize {
        self.kd.count(q)
    }

    pub(crate) fn check_box(&self, q: &AxisBox) -> Result<()> {
        if q.dim() != self.dim() {
            return Err(RcqError::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        Ok(())
    }

    /// Cone structures for exact planar queries, built on first use.
    pub fn cones(&self) -> &ConeIndex {
        self.cones.get_or_init(|| ConeIndex::build(&self.points))
    }

    /// Writes the `RCQ1` binary format: header, quantization, ladder seed,
    /// points, then the octree as a preorder node array. The k-d tree, the
    /// ladder and the centroid decomposition are rebuilt on load.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let (dim, n) = (self.dim(), self.len());
        w.write_all(MAGIC)?;
        put_u32(w, FORMAT_VERSION)?;
        put_u32(w, self.points.bits())?;
        put_u32(w, dim as u32)?;
        put_u64(w, n as u64)?;
        w.write_all(&self.quantization.scale.to_le_bytes())?;
        for o in &self.quantization.offsets {
            w.write_all(&o.to_le_bytes())?;
        }
        put_u64(w, self.ladder.seed())?;
        for &c in self.points.coords() {
            put_u64(w, c)?;
        }
        let raw = self.octree.raw_parts();
        let nodes = raw.levels.len();
        put_u64(w, nodes as u64)?;
        for v in 0..nodes {
            put_u32(w, raw.levels[v])?;
            for &a in &raw.anchors[v * dim..(v + 1) * dim] {
                put_u64(w, a)?;
            }
            put_u32(w, raw.child_start[v + 1] - raw.child_start[v])?;
            put_u32(w, raw.start[v])?;
            put_u32(w, raw.end[v])?;
        }
        for &o in raw.order {
            put_u32(w, o)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| RcqError::Format("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(RcqError::Format("bad magic".into()));
        }
        let mut rd = Reader { r };
        let version = rd.u32()?;
        if version != FORMAT_VERSION {
            return Err(RcqError::Format(format!("unsupported version {version}")));
        }
        let bits = rd.u32()?;
        let dim = rd.u32()? as usize;
        let n = rd.u64()? as usize;
        if dim == 0 || dim > 16 || n == 0 || n > u32::MAX as usize {
            return Err(RcqError::Format("implausible header".into()));
        }
        let scale = rd.f64()?;
        let offsets = (0..dim).map(|_| rd.f64()).collect::<Result<Vec<_>>>()?;
        let seed = rd.u64()?;
        let coords = (0..n * dim).map(|_| rd.u64()).collect::<Result<Vec<_>>>()?;
        let points = PointSet::new(dim, bits, coords).map_err(|e| RcqError::Format(e.to_string()))?;
        let nodes = rd.u64()? as usize;
        if nodes == 0 || nodes > 2 * n {
            return Err(RcqError::Format("implausible node count".into()));
        }
        let (mut levels, mut anchors, mut counts, mut start, mut end) =
            (Vec::with_capacity(nodes), Vec::with_capacity(nodes * dim), Vec::new(), Vec::new(), Vec::new());
        for _ in 0..nodes {
            levels.push(rd.u32()?);
            for _ in 0..dim {
                anchors.push(rd.u64()?);
            }
            counts.push(rd.u32()?);
            let (s, e) = (rd.u32()?, rd.u32()?);
            if s > e || e as usize > n {
                return Err(RcqError::Format("node range out of bounds".into()));
            }
            start.push(s);
            end.push(e);
        }
        let order = (0..n).map(|_| rd.u32()).collect::<Result<Vec<_>>>()?;
        let mut seen = vec![false; n];
        for &o in &order {
            if o as usize >= n || std::mem::replace(&mut seen[o as usize], true) {
                return Err(RcqError::Format("point order is not a permutation".into()));
            }
        }
        let octree = CompressedOctree::from_raw(dim, n, levels, anchors, counts, start, end, order)?;
        Ok(Self::assemble(points, octree, seed, Quantization { scale, offsets }))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}

const MAGIC: &[u8; 4] = b"RCQ1";
const FORMAT_VERSION: u32 = 1;

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

struct Reader<'a, R> {
    r: &'a mut R,
}

impl<R: Read> Reader<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.r.read_exact(&mut b).map_err(|_| RcqError::Format("truncated index".into()))?;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32> {
        self.bytes().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.bytes().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.bytes().map(f64::from_le_bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RangeClusterIndex {
        let pts: Vec<Vec<u64>> = (0..200u64).map(|i| vec![(i * 37) % 101, (i * 53) % 97]).collect();
        let q = Quantization {
            scale: 2.5,
            offsets: vec![-1.0, 3.0],
        };
        RangeClusterIndex::build_full(PointSet::from_points(2, 10, &pts).unwrap(), 99, q).unwrap()
    }

    #[test]
    fn round_trip() {
        let idx = sample();
        let mut buf = Vec::new();
        idx.write_to(&mut buf).unwrap();
        let back = RangeClusterIndex::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.points().coords(), idx.points().coords());
        assert_eq!(back.octree().node_count(), idx.octree().node_count());
        assert_eq!(back.quantization(), idx.quantization());
        assert_eq!(back.ladder().seed(), 99);
        for v in 0..idx.octree().node_count() {
            let (a, b) = (back.octree().node(v), idx.octree().node(v));
            assert_eq!(a.cube(), b.cube());
            assert_eq!(a.children(), b.children());
            assert_eq!(a.subtree_count(), b.subtree_count());
        }
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_corruption() {
        let idx = sample();
        let mut buf = Vec::new();
        idx.write_to(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(RangeClusterIndex::read_from(&mut bad.as_slice()), Err(RcqError::Format(_))));
        let cut = &buf[..buf.len() - 3];
        assert!(matches!(RangeClusterIndex::read_from(&mut &cut[..]), Err(RcqError::Format(_))));
    }

    #[test]
    fn quantization_examples() {
        let q = Quantization::fit(2, 8, &[0.0, 10.0, 5.0, 20.0]).unwrap();
        assert_eq!(q.quantize(8, &[0.0, 10.0, 5.0, 20.0]).unwrap(), vec![0, 0, 128, 255]);
        assert!(matches!(Quantization::identity(1).quantize(4, &[16.0]), Err(RcqError::CoordinateOverflow { .. })));
        let b = q.quantize_box(8, &[0.0, 10.0], &[1.0, 11.0]).unwrap();
        assert_eq!((b.lo, b.hi), (vec![0, 0], vec![25, 25]));
    }
}
