//! Numerical integration: Gauss-Legendre rules on `[-1, 1]` carrying the
//! weight `(1 - t²)^{(m-2)/2}`, product quadrature on `S^m`, and sup-norm
//! evaluation grids.
//!
//! All interval rules substitute `t = cos θ` first, turning the weighted
//! integral into `∫ g(cos θ) sin^{m-1} θ dθ`. One rule family then serves
//! every `m`, including `m = 1` where the weight is singular in `t`.

use crate::error::{Error, Result};
use crate::geometry::{spherical_to_cartesian, CoordinateBlock, SphericalAngles, UnitVector};
use crate::special::sin_power_integral;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Hard cap on the number of nodes a single sphere rule or grid may hold.
pub const MAX_RULE_POINTS: usize = 20_000_000;

/// Nodes and positive weights approximating
/// `∫ g(t) (1 - t²)^{(m-2)/2} dt` over a sub-range of `[-1, 1]` as
/// `Σ w_i g(t_i)`. Weights absorb the measure, so `Σ w_i` equals the exact
/// mass of the weight function on the range.
#[derive(Debug, Clone)]
pub struct IntervalRule {
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl IntervalRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        kahan_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)))
    }

    pub fn total_weight(&self) -> f64 {
        kahan_sum(self.weights.iter().copied())
    }
}

/// Points and positive weights approximating `∫_{S^m} f dω` as
/// `Σ w_j f(p_j)`; `Σ w_j = ω_m` exactly by per-angle weight normalization.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub m: usize,
    pub points: Vec<UnitVector>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&UnitVector) -> f64) -> f64 {
        kahan_sum(self.points.iter().zip(&self.weights).map(|(p, &w)| w * f(p)))
    }

    pub fn total_weight(&self) -> f64 {
        kahan_sum(self.weights.iter().copied())
    }
}

/// Description of how a sup-norm grid was generated, including the mesh
/// norm (max geodesic distance from any sphere point to the grid) — exact
/// for the circle, an upper bound for angle products, and an empirical
/// estimate for the Fibonacci grid.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridDescriptor {
    Circle { count: usize, mesh_norm: f64 },
    Fibonacci { count: usize, mesh_norm_estimate: f64 },
    AngleProduct { levels: Vec<usize>, mesh_norm_bound: f64 },
}

impl GridDescriptor {
    pub fn mesh_norm(&self) -> f64 {
        match self {
            GridDescriptor::Circle { mesh_norm, .. } => *mesh_norm,
            GridDescriptor::Fibonacci { mesh_norm_estimate, .. } => *mesh_norm_estimate,
            GridDescriptor::AngleProduct { mesh_norm_bound, .. } => *mesh_norm_bound,
        }
    }
}

/// A finite point set covering `S^m`, used to estimate sup norms.
#[derive(Debug, Clone)]
pub struct SupGrid {
    pub m: usize,
    pub points: Vec<UnitVector>,
    pub descriptor: GridDescriptor,
}

impl SupGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Gauss-Legendre nodes/weights on (-1, 1) by Newton iteration on `P_n`,
/// cached per order since block rules request the same small orders
/// millions of times.
pub(crate) fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let computed = Arc::new(gauss_legendre_compute(n));
    cache.lock().unwrap().insert(n, computed.clone());
    computed
}

fn gauss_legendre_compute(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the Bonnet recurrence.
            let mut p_prev = 1.0;
            let mut p = x;
            for k in 1..n {
                let kf = k as f64;
                let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
                p_prev = p;
                p = p_next;
            }
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Rule for `∫_{-1}^{1} g(t) (1 - t²)^{(m-2)/2} dt`: `Σ w_i = ω_m / ω_{m-1}`.
pub fn interval_rule(m: usize, order: usize) -> IntervalRule {
    interval_rule_segment(m, order, -1.0, 1.0)
}

/// Rule for `∫_{t_lo}^{t_hi} g(t) (1 - t²)^{(m-2)/2} dt`.
///
/// Gauss-Legendre in `θ = arccos t` with `sin^{m-1} θ` absorbed into the
/// weights; the weights are then rescaled so their sum matches the exact
/// closed-form mass of the weight function on the segment, which makes
/// constants integrate exactly at any order.
pub fn interval_rule_segment(m: usize, order: usize, t_lo: f64, t_hi: f64) -> IntervalRule {
    assert!(m >= 1, "sphere dimension must be >= 1");
    assert!(order >= 1, "rule order must be >= 1");
    assert!((-1.0..=1.0).contains(&t_lo) && (-1.0..=1.0).contains(&t_hi) && t_lo < t_hi);
    let th_lo = t_hi.acos();
    let th_hi = t_lo.acos();
    let gl = gauss_legendre(order);
    let half = 0.5 * (th_hi - th_lo);
    let mid = 0.5 * (th_hi + th_lo);
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for (&xi, &wi) in gl.0.iter().zip(&gl.1) {
        let theta = mid + half * xi;
        nodes.push(theta.cos());
        weights.push(wi * half * theta.sin().powi(m as i32 - 1));
    }
    let exact = sin_power_integral(m - 1, th_lo, th_hi);
    let raw: f64 = kahan_sum(weights.iter().copied());
    if raw > 0.0 && exact > 0.0 {
        let scale = exact / raw;
        for w in &mut weights {
            *w *= scale;
        }
    }
    IntervalRule { m, nodes, weights }
}

/// Product quadrature on `S^m`: Gauss-Legendre per colatitude (absorbing
/// its sine power) and the trapezoidal rule in azimuth. `orders` lists the
/// `m - 1` colatitude orders followed by the azimuth order.
pub fn sphere_rule(m: usize, orders: &[usize]) -> Result<SphereRule> {
    if m < 1 {
        return Err(Error::Domain("sphere dimension must be >= 1".into()));
    }
    if orders.len() != m {
        return Err(Error::InvalidInput(format!(
            "S^{m} takes {m} per-angle orders (colatitudes then azimuth), got {}",
            orders.len()
        )));
    }
    if orders.iter().any(|&o| o == 0) {
        return Err(Error::InvalidInput("orders must be >= 1".into()));
    }
    let total: usize = orders.iter().try_fold(1usize, |acc, &o| {
        acc.checked_mul(o).filter(|&t| t <= MAX_RULE_POINTS)
    }).ok_or(Error::ResourceCap { requested: usize::MAX, cap: MAX_RULE_POINTS })?;

    // Per-angle nodes and weights, colatitudes first.
    let mut angle_nodes: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut angle_weights: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (j, &o) in orders[..m - 1].iter().enumerate() {
        let power = m - 1 - j;
        let gl = gauss_legendre(o);
        let mut nodes = Vec::with_capacity(o);
        let mut weights = Vec::with_capacity(o);
        for (&xi, &wi) in gl.0.iter().zip(&gl.1) {
            let theta = 0.5 * PI * (xi + 1.0);
            nodes.push(theta);
            weights.push(wi * 0.5 * PI * theta.sin().powi(power as i32));
        }
        let exact = sin_power_integral(power, 0.0, PI);
        let scale = exact / kahan_sum(weights.iter().copied());
        for w in &mut weights {
            *w *= scale;
        }
        angle_nodes.push(nodes);
        angle_weights.push(weights);
    }
    let azimuth = orders[m - 1];
    angle_nodes.push((0..azimuth).map(|i| 2.0 * PI * (i as f64 + 0.5) / azimuth as f64).collect());
    angle_weights.push(vec![2.0 * PI / azimuth as f64; azimuth]);

    Ok(assemble_product_rule(m, total, &angle_nodes, &angle_weights))
}

/// Product quadrature restricted to a coordinate block, `order` nodes per
/// angle (Gauss-Legendre on every interval, including the azimuth since it
/// is no longer periodic). Integrates the constant 1 to the exact block
/// measure.
pub fn sphere_rule_on_block(m: usize, block: &CoordinateBlock, order: usize) -> SphereRule {
    let gl = gauss_legendre(order);
    let mut angle_nodes: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut angle_weights: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (j, &(lo, hi)) in block.intervals.iter().enumerate() {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        if j + 1 == m {
            for (&xi, &wi) in gl.0.iter().zip(&gl.1) {
                nodes.push(mid + half * xi);
                weights.push(wi * half);
            }
        } else {
            let power = m - 1 - j;
            for (&xi, &wi) in gl.0.iter().zip(&gl.1) {
                let theta = mid + half * xi;
                nodes.push(theta);
                weights.push(wi * half * theta.sin().powi(power as i32));
            }
            let exact = sin_power_integral(power, lo, hi);
            let raw = kahan_sum(weights.iter().copied());
            if raw > 0.0 && exact > 0.0 {
                let scale = exact / raw;
                for w in &mut weights {
                    *w *= scale;
                }
            }
        }
        angle_nodes.push(nodes);
        angle_weights.push(weights);
    }
    let total = order.pow(m as u32);
    assemble_product_rule(m, total, &angle_nodes, &angle_weights)
}

fn assemble_product_rule(
    m: usize,
    total: usize,
    angle_nodes: &[Vec<f64>],
    angle_weights: &[Vec<f64>],
) -> SphereRule {
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut index = vec![0usize; m];
    for _ in 0..total {
        let mut w = 1.0;
        let mut thetas = Vec::with_capacity(m - 1);
        for j in 0..m - 1 {
            thetas.push(angle_nodes[j][index[j]]);
            w *= angle_weights[j][index[j]];
        }
        let phi = angle_nodes[m - 1][index[m - 1]];
        w *= angle_weights[m - 1][index[m - 1]];
        points.push(spherical_to_cartesian(m, &SphericalAngles { thetas, phi }));
        weights.push(w);
        for j in (0..m).rev() {
            index[j] += 1;
            if index[j] < angle_nodes[j].len() {
                break;
            }
            index[j] = 0;
        }
    }
    SphereRule { m, points, weights }
}

/// Default per-angle orders used when a caller does not specify any:
/// 128 nodes per colatitude and 256 azimuth nodes for low dimensions,
/// reduced for `m >= 3` to keep product sizes sane.
pub fn default_sphere_orders(m: usize) -> Vec<usize> {
    match m {
        1 => vec![256],
        2 => vec![128, 256],
        3 => vec![64, 64, 128],
        4 => vec![32, 32, 32, 64],
        _ => {
            let mut v = vec![16; m - 1];
            v.push(32);
            v
        }
    }
}

/// Evaluation grid for sup-norm estimates: equispaced points for the
/// circle, a Fibonacci spiral for `S^2`, and a product angle grid above.
pub fn sup_grid(m: usize, resolution: usize) -> Result<SupGrid> {
    if m < 1 {
        return Err(Error::Domain("sphere dimension must be >= 1".into()));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("sup grid resolution must be >= 2".into()));
    }
    if resolution > MAX_RULE_POINTS {
        return Err(Error::ResourceCap { requested: resolution, cap: MAX_RULE_POINTS });
    }
    match m {
        1 => {
            let points = (0..resolution)
                .map(|i| {
                    let phi = 2.0 * PI * i as f64 / resolution as f64;
                    UnitVector::new(vec![phi.cos(), phi.sin()]).expect("unit by construction")
                })
                .collect();
            Ok(SupGrid {
                m,
                points,
                descriptor: GridDescriptor::Circle {
                    count: resolution,
                    mesh_norm: PI / resolution as f64,
                },
            })
        }
        2 => {
            let points = fibonacci_sphere(resolution);
            let mesh = fibonacci_mesh_norm(&points);
            Ok(SupGrid {
                m,
                points,
                descriptor: GridDescriptor::Fibonacci {
                    count: resolution,
                    mesh_norm_estimate: mesh,
                },
            })
        }
        _ => {
            // n_θ^{m-1} · 2 n_θ ≈ resolution.
            let n_theta = ((resolution as f64 / 2.0).powf(1.0 / m as f64).ceil() as usize).max(2);
            let n_phi = 2 * n_theta;
            let mut levels = vec![n_theta; m - 1];
            levels.push(n_phi);
            let total: usize = levels.iter().product();
            if total > MAX_RULE_POINTS {
                return Err(Error::ResourceCap { requested: total, cap: MAX_RULE_POINTS });
            }
            let mut points = Vec::with_capacity(total);
            let mut index = vec![0usize; m];
            for _ in 0..total {
                let thetas: Vec<f64> =
                    (0..m - 1).map(|j| PI * (index[j] as f64 + 0.5) / n_theta as f64).collect();
                let phi = 2.0 * PI * (index[m - 1] as f64 + 0.5) / n_phi as f64;
                points.push(spherical_to_cartesian(m, &SphericalAngles { thetas, phi }));
                for j in (0..m).rev() {
                    index[j] += 1;
                    if index[j] < levels[j] {
                        break;
                    }
                    index[j] = 0;
                }
            }
            // Geodesic distance is bounded by the Euclidean distance in
            // angle coordinates, so half the cell diagonal bounds the mesh.
            let d_theta = PI / n_theta as f64;
            let d_phi = 2.0 * PI / n_phi as f64;
            let bound = 0.5 * ((m - 1) as f64 * d_theta * d_theta + d_phi * d_phi).sqrt();
            Ok(SupGrid {
                m,
                points,
                descriptor: GridDescriptor::AngleProduct { levels, mesh_norm_bound: bound },
            })
        }
    }
}

/// Fibonacci spiral lattice on `S^2` with the convention that the third
/// coordinate is `cos θ`, strictly decreasing in the point index.
fn fibonacci_sphere(n: usize) -> Vec<UnitVector> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * ((i as f64 * golden) % 1.0);
            UnitVector::new(vec![r * phi.cos(), r * phi.sin(), z]).expect("unit by construction")
        })
        .collect()
}

/// Empirical mesh norm of a z-sorted grid on `S^2`: nearest-grid-point
/// search over a finer probe lattice, restricted to a z-window around each
/// probe (valid because z is monotone in the grid index).
fn fibonacci_mesh_norm(grid: &[UnitVector]) -> f64 {
    let n = grid.len();
    let probes = fibonacci_sphere(4 * n + 37);
    // Any grid point within geodesic r of a probe has |Δz| <= r; start from
    // a generous radius for the lattice and widen if a window comes up empty.
    let mut radius = 6.0 / (n as f64).sqrt();
    loop {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for p in probes.iter().chain([UnitVector::pole(2), UnitVector::pole(2).antipode()].iter()) {
            let z = p.coords()[2];
            // Grid index i has z_i = 1 - (2i+1)/n, so z in [z-dz, z+dz]
            // corresponds to a contiguous index range.
            let dz = radius;
            let lo_idx = (((1.0 - (z + dz)) * n as f64 - 1.0) / 2.0).floor().max(0.0) as usize;
            let hi_idx = (((1.0 - (z - dz)) * n as f64 - 1.0) / 2.0).ceil().min(n as f64 - 1.0) as usize;
            let mut best = f64::INFINITY;
            for g in &grid[lo_idx..=hi_idx] {
                let d = p.geodesic_distance(g);
                if d < best {
                    best = d;
                }
            }
            if !best.is_finite() || best > radius {
                ok = false;
                break;
            }
            worst = worst.max(best);
        }
        if ok {
            return worst;
        }
        radius *= 2.0;
    }
}
