//! Points on `S^m`, spherical coordinates, and partitions of the sphere into
//! connected coordinate blocks with exactly computed measures.
//!
//! Coordinate convention: a point on `S^m` is parametrized by colatitudes
//! `θ_1..θ_{m-1}` in `[0, π]` and an azimuth `φ` in `[0, 2π)`, with the last
//! Cartesian coordinate equal to `cos θ_1` and the surface element
//! `sin^{m-1}θ_1 · sin^{m-2}θ_2 ··· sin θ_{m-1} dθ dφ`.

use crate::error::{Error, Result};
use crate::special::sin_power_integral;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Blocks per partition are capped to keep accidental huge level vectors
/// from exhausting memory.
pub const MAX_PARTITION_BLOCKS: usize = 5_000_000;

const POLE_NUDGE: f64 = 1e-9;

/// A point on `S^m`, stored as `m + 1` Cartesian coordinates and
/// renormalized to unit Euclidean norm on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl UnitVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a point on S^m needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        // Leave already-unit inputs untouched so serialized coordinates
        // round-trip bit-exactly.
        let coords = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            coords
        } else {
            coords.into_iter().map(|c| c / norm).collect()
        };
        Ok(Self { coords })
    }

    /// Standard basis vector `e_i` in `R^{m+1}`.
    pub fn basis(m: usize, i: usize) -> Self {
        let mut coords = vec![0.0; m + 1];
        coords[i] = 1.0;
        Self { coords }
    }

    /// North pole: the point with last coordinate 1 (colatitudes all zero).
    pub fn pole(m: usize) -> Self {
        Self::basis(m, m)
    }

    /// Sphere dimension `m` (the ambient dimension minus one).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn geodesic_distance(&self, other: &UnitVector) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn antipode(&self) -> UnitVector {
        UnitVector { coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Serialize for UnitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        UnitVector::new(coords).map_err(D::Error::custom)
    }
}

/// Spherical coordinates: colatitudes in `[0, π]` and azimuth in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalAngles {
    pub thetas: Vec<f64>,
    pub phi: f64,
}

impl SphericalAngles {
    pub fn new(thetas: Vec<f64>, phi: f64) -> Result<Self> {
        if thetas.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::Domain("colatitude outside [0, π]".into()));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Domain("azimuth outside [0, 2π)".into()));
        }
        Ok(Self { thetas, phi })
    }

    /// Sphere dimension this angle tuple parametrizes.
    pub fn dim(&self) -> usize {
        self.thetas.len() + 1
    }
}

/// Map spherical coordinates on `S^m` to Cartesian coordinates.
pub fn spherical_to_cartesian(m: usize, angles: &SphericalAngles) -> UnitVector {
    assert_eq!(angles.thetas.len(), m.saturating_sub(1), "angle count must match dimension");
    let mut coords = vec![0.0; m + 1];
    let mut sin_prod = 1.0;
    for (j, theta) in angles.thetas.iter().enumerate() {
        coords[m - j] = sin_prod * theta.cos();
        sin_prod *= theta.sin();
    }
    coords[0] = sin_prod * angles.phi.cos();
    coords[1] = sin_prod * angles.phi.sin();
    // Construction from sines/cosines is already unit norm up to roundoff.
    UnitVector { coords }
}

/// Inverse of [`spherical_to_cartesian`] away from coordinate degeneracies.
/// At poles (where the azimuth is undefined) the azimuth is set to 0.
pub fn cartesian_to_spherical(x: &UnitVector) -> SphericalAngles {
    let m = x.dim();
    let c = x.coords();
    let mut thetas = Vec::with_capacity(m.saturating_sub(1));
    // Tail norms: theta_j = atan2(||(x_1..x_{m+1-j})||, x_{m+2-j}).
    let mut tail_sq = c[0] * c[0] + c[1] * c[1];
    let mut tails = vec![0.0; m + 1];
    tails[1] = tail_sq.sqrt();
    for i in 2..=m {
        tail_sq += c[i] * c[i];
        tails[i] = tail_sq.sqrt();
    }
    for j in 0..m.saturating_sub(1) {
        thetas.push(tails[m - j - 1].atan2(c[m - j]));
    }
    let mut phi = c[1].atan2(c[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi = 0.0;
    }
    SphericalAngles { thetas, phi }
}

/// A product of per-angle closed intervals; its image on `S^m` is a
/// connected block. The first `m - 1` intervals subset `[0, π]`, the last
/// subsets `[0, 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateBlock {
    pub intervals: Vec<(f64, f64)>,
}

impl CoordinateBlock {
    pub fn new(m: usize, intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.len() != m {
            return Err(Error::InvalidInput(format!(
                "block on S^{m} needs {m} intervals, got {}",
                intervals.len()
            )));
        }
        for (j, &(lo, hi)) in intervals.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidInput(format!("degenerate interval [{lo}, {hi}]")));
            }
            let max = if j + 1 == m { 2.0 * PI } else { PI };
            if lo < 0.0 || hi > max + 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "interval [{lo}, {hi}] outside coordinate domain [0, {max}]"
                )));
            }
        }
        Ok(Self { intervals })
    }

    fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Whether an angle tuple lies inside the block (closed intervals).
    pub fn contains(&self, angles: &SphericalAngles) -> bool {
        let m = self.dim();
        for (j, &(lo, hi)) in self.intervals.iter().enumerate() {
            let a = if j + 1 == m { angles.phi } else { angles.thetas[j] };
            if a < lo - 1e-12 || a > hi + 1e-12 {
                return false;
            }
        }
        true
    }
}

/// Surface measure of a coordinate block:
/// `∏_j ∫_{lo_j}^{hi_j} sin^{m-1-j} θ dθ · (hi_φ - lo_φ)`,
/// each factor by the closed-form antiderivative recursion.
pub fn block_measure(m: usize, block: &CoordinateBlock) -> f64 {
    let mut measure = 1.0;
    for (j, &(lo, hi)) in block.intervals.iter().enumerate() {
        if j + 1 == m {
            measure *= hi - lo;
        } else {
            measure *= sin_power_integral(m - 1 - j, lo, hi);
        }
    }
    measure
}

/// Midpoint of the block in angle space, nudged off exact poles so the
/// azimuth stays well-defined.
pub fn block_center(m: usize, block: &CoordinateBlock) -> UnitVector {
    let angles = block_center_angles(m, block);
    spherical_to_cartesian(m, &angles)
}

fn block_center_angles(m: usize, block: &CoordinateBlock) -> SphericalAngles {
    let mut thetas = Vec::with_capacity(m.saturating_sub(1));
    for &(lo, hi) in &block.intervals[..m - 1] {
        thetas.push(nudge_off_pole(0.5 * (lo + hi)));
    }
    let (plo, phi_hi) = block.intervals[m - 1];
    SphericalAngles { thetas, phi: 0.5 * (plo + phi_hi) }
}

fn nudge_off_pole(theta: f64) -> f64 {
    theta.clamp(POLE_NUDGE, PI - POLE_NUDGE)
}

/// How colatitude cut points are placed by [`build_partition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionMode {
    /// Equal-width subdivision of every angle.
    Uniform,
    /// First colatitude subdivided at arccos-equispaced cut points so block
    /// measures come out more uniform; remaining angles equal-width.
    MeasureBalanced,
}

/// A finite decomposition of `S^m` into coordinate blocks with their exact
/// surface measures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalPartition {
    pub m: usize,
    pub blocks: Vec<CoordinateBlock>,
    pub measures: Vec<f64>,
    #[serde(skip)]
    cuts: Option<Vec<Vec<f64>>>,
}

impl SphericalPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for &w in &self.measures {
            let y = w - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Index of the block containing `x`. Grid-built partitions use binary
    /// search on the cut points; deserialized ones fall back to a scan.
    pub fn locate(&self, x: &UnitVector) -> usize {
        let angles = cartesian_to_spherical(x);
        if let Some(cuts) = &self.cuts {
            let mut index = 0;
            for (j, cut) in cuts.iter().enumerate() {
                let a = if j + 1 == self.m { angles.phi } else { angles.thetas[j] };
                let cells = cut.len() - 1;
                let pos = match cut.binary_search_by(|c| c.partial_cmp(&a).unwrap()) {
                    Ok(i) => i.min(cells - 1),
                    Err(i) => (i - 1).min(cells - 1),
                };
                index = index * cells + pos;
            }
            index
        } else {
            self.blocks
                .iter()
                .position(|b| b.contains(&angles))
                .expect("partition blocks tile the sphere")
        }
    }
}

/// Partition `S^m` into a product grid of coordinate blocks, `levels[j]`
/// subdivisions for angle `j` (colatitudes first, azimuth last). Measures
/// are computed by [`block_measure`], so they sum to `ω_m` up to roundoff.
pub fn build_partition(m: usize, levels: &[usize], mode: PartitionMode) -> Result<SphericalPartition> {
    if m < 1 {
        return Err(Error::Domain("sphere dimension must be >= 1".into()));
    }
    if levels.len() != m {
        return Err(Error::InvalidInput(format!(
            "S^{m} takes {m} per-angle level counts, got {}",
            levels.len()
        )));
    }
    if levels.iter().any(|&l| l == 0) {
        return Err(Error::InvalidInput("level counts must be >= 1".into()));
    }
    let total: usize = levels.iter().try_fold(1usize, |acc, &l| {
        acc.checked_mul(l).filter(|&t| t <= MAX_PARTITION_BLOCKS)
    }).ok_or(Error::ResourceCap { requested: usize::MAX, cap: MAX_PARTITION_BLOCKS })?;

    let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (j, &l) in levels.iter().enumerate() {
        let max = if j + 1 == m { 2.0 * PI } else { PI };
        let cut: Vec<f64> = if j == 0 && j + 1 != m && mode == PartitionMode::MeasureBalanced {
            (0..=l).map(|i| (1.0 - 2.0 * i as f64 / l as f64).clamp(-1.0, 1.0).acos()).collect()
        } else {
            (0..=l).map(|i| max * i as f64 / l as f64).collect()
        };
        cuts.push(cut);
    }

    let mut blocks = Vec::with_capacity(total);
    let mut measures = Vec::with_capacity(total);
    let mut index = vec![0usize; m];
    for _ in 0..total {
        let intervals: Vec<(f64, f64)> =
            index.iter().enumerate().map(|(j, &i)| (cuts[j][i], cuts[j][i + 1])).collect();
        let block = CoordinateBlock { intervals };
        measures.push(block_measure(m, &block));
        blocks.push(block);
        // Row-major increment.
        for j in (0..m).rev() {
            index[j] += 1;
            if index[j] < levels[j] {
                break;
            }
            index[j] = 0;
        }
    }
    Ok(SphericalPartition { m, blocks, measures, cuts: Some(cuts) })
}

/// Locate a point `y` in `block` with `f(y)` equal to `target_avg` within
/// `tol`, by bisection along the piecewise-linear angle-space path
/// argmin → center → argmax over a low-discrepancy sampling net.
///
/// The net has `64 m` points (center first). Fails with
/// [`Error::Bracketing`] when the sampled extremes do not bracket the
/// target; callers fall back to the block center and renormalized weights.
pub fn mean_value_point(
    m: usize,
    block: &CoordinateBlock,
    f: &dyn Fn(&UnitVector) -> f64,
    target_avg: f64,
    tol: f64,
) -> Result<UnitVector> {
    let center = block_center_angles(m, block);
    let center_val = f(&spherical_to_cartesian(m, &center));
    if (center_val - target_avg).abs() <= tol {
        return Ok(spherical_to_cartesian(m, &center));
    }

    let net = sampling_net(m, block, 64 * m);
    let mut min_val = center_val;
    let mut max_val = center_val;
    let mut min_angles = center.clone();
    let mut max_angles = center.clone();
    for angles in net {
        let v = f(&spherical_to_cartesian(m, &angles));
        if v < min_val {
            min_val = v;
            min_angles = angles.clone();
        }
        if v > max_val {
            max_val = v;
            max_angles = angles;
        }
    }
    if target_avg < min_val || target_avg > max_val {
        return Err(Error::Bracketing { target: target_avg, min: min_val, max: max_val });
    }

    // Piecewise path: s in [0, 0.5] from argmin to center, [0.5, 1] from
    // center to argmax. Segments in angle space stay inside the block.
    let at = |s: f64| -> SphericalAngles {
        let (from, to, u) = if s <= 0.5 {
            (&min_angles, &center, 2.0 * s)
        } else {
            (&center, &max_angles, 2.0 * (s - 0.5))
        };
        let thetas = from
            .thetas
            .iter()
            .zip(&to.thetas)
            .map(|(a, b)| nudge_off_pole(a + (b - a) * u))
            .collect();
        SphericalAngles { thetas, phi: from.phi + (to.phi - from.phi) * u }
    };
    let g = |s: f64| f(&spherical_to_cartesian(m, &at(s))) - target_avg;

    // Pick the half of the path whose endpoints bracket the root, keeping
    // the center as one endpoint so the root lands near it.
    let (mut lo, mut hi) = if center_val >= target_avg { (0.0, 0.5) } else { (0.5, 1.0) };
    // g(lo) <= 0 <= g(hi) by construction.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= tol {
            return Ok(spherical_to_cartesian(m, &at(mid)));
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(spherical_to_cartesian(m, &at(mid)))
}

/// Kronecker (generalized golden ratio) low-discrepancy net inside the
/// block's angle box. The block center is prepended as the first point.
fn sampling_net(m: usize, block: &CoordinateBlock, count: usize) -> Vec<SphericalAngles> {
    // Roots of x^{d+1} = x + 1 give well-distributed irrational steps.
    let mut g = 1.5f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (m as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=m).map(|j| (1.0 / g.powi(j as i32)).fract()).collect();

    let mut points = Vec::with_capacity(count);
    let mut frac = vec![0.5; m];
    for _ in 0..count {
        for (fr, a) in frac.iter_mut().zip(&alphas) {
            *fr = (*fr + a).fract();
        }
        let mut thetas = Vec::with_capacity(m - 1);
        for (j, &(lo, hi)) in block.intervals[..m - 1].iter().enumerate() {
            thetas.push(nudge_off_pole(lo + (hi - lo) * frac[j]));
        }
        let (plo, phi_hi) = block.intervals[m - 1];
        points.push(SphericalAngles { thetas, phi: plo + (phi_hi - plo) * frac[m - 1] });
    }
    points
}

/// Uniformly distributed points on `S^m` (normalized Gaussians),
/// deterministic for a given seed.
pub fn uniform_sphere_samples(m: usize, count: usize, seed: u64) -> Vec<UnitVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..=m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
        if norm_sq < 1e-24 {
            continue;
        }
        let norm = norm_sq.sqrt();
        out.push(UnitVector { coords: coords.into_iter().map(|c| c / norm).collect() });
    }
    out
}

/// Uniform scalar draws, used by samplers in other modules.
pub(crate) fn uniform01<R: Rng>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
