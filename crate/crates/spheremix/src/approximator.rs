//! The mixture-construction engine: given a continuous target density on
//! `S^m` and a sup-norm tolerance, build a vMF mixture
//! `Σ_k c_k K_n(⟨·, y_k⟩)` with `Σ c_k = 1` whose estimated sup error is
//! below the tolerance, growing the concentration and refining the
//! partition in alternation so the two proof stages (kernel smoothing and
//! Riemann discretization) are driven down separately.

use crate::error::{Error, Result};
use crate::geometry::{
    block_center, build_partition, mean_value_point, PartitionMode, SphericalPartition, UnitVector,
};
use crate::quadrature::{
    default_sphere_orders, sphere_rule, sphere_rule_on_block, sup_grid, SphereRule, SupGrid,
};
use crate::special::surface_measure;
use crate::spectral::convolve_on_grid;
use crate::vmf::{MixtureEvaluator, VmfComponent, VmfKernel, VmfMixture};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// A target probability density on `S^m` wrapped with its evaluation
/// contract: whether the caller declares it continuous and safe for
/// concurrent evaluation. The sphere integral is checked once at
/// construction.
#[derive(Clone)]
pub struct TargetDensity {
    m: usize,
    f: Arc<dyn Fn(&UnitVector) -> f64 + Send + Sync>,
    declared_continuous: bool,
    concurrent_safe: bool,
}

impl std::fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TargetDensity")
            .field("m", &self.m)
            .field("declared_continuous", &self.declared_continuous)
            .field("concurrent_safe", &self.concurrent_safe)
            .finish()
    }
}

/// Default tolerance for the construction-time normalization check.
pub const DENSITY_CHECK_TOL: f64 = 1e-6;

impl TargetDensity {
    /// Wrap a density, checking `∫ f dω = 1` within [`DENSITY_CHECK_TOL`]
    /// on a default product rule and rejecting negative values seen at the
    /// rule points.
    pub fn new(
        m: usize,
        f: impl Fn(&UnitVector) -> f64 + Send + Sync + 'static,
        declared_continuous: bool,
        concurrent_safe: bool,
    ) -> Result<Self> {
        Self::with_check_tolerance(m, f, declared_continuous, concurrent_safe, DENSITY_CHECK_TOL)
    }

    pub fn with_check_tolerance(
        m: usize,
        f: impl Fn(&UnitVector) -> f64 + Send + Sync + 'static,
        declared_continuous: bool,
        concurrent_safe: bool,
        tolerance: f64,
    ) -> Result<Self> {
        let target = Self::unchecked(m, f, declared_continuous, concurrent_safe);
        let rule = sphere_rule(m, &default_sphere_orders(m))?;
        let values = target.eval_on(&rule.points);
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!("target density produced the value {v}")));
        }
        let integral: f64 = values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum();
        if (integral - 1.0).abs() > tolerance {
            return Err(Error::NonDensity { integral, tolerance });
        }
        Ok(target)
    }

    /// Wrap without the normalization check.
    pub fn unchecked(
        m: usize,
        f: impl Fn(&UnitVector) -> f64 + Send + Sync + 'static,
        declared_continuous: bool,
        concurrent_safe: bool,
    ) -> Self {
        Self { m, f: Arc::new(f), declared_continuous, concurrent_safe }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn declared_continuous(&self) -> bool {
        self.declared_continuous
    }

    pub fn concurrent_safe(&self) -> bool {
        self.concurrent_safe
    }

    pub fn eval(&self, x: &UnitVector) -> f64 {
        (self.f)(x)
    }

    /// Evaluate on many points, in parallel only when the contract allows.
    pub(crate) fn eval_on(&self, points: &[UnitVector]) -> Vec<f64> {
        if self.concurrent_safe {
            points.par_iter().map(|p| self.eval(p)).collect()
        } else {
            points.iter().map(|p| self.eval(p)).collect()
        }
    }
}

/// How the representative point of a block was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Mean-value point found: `f(y_k) ω(U_k)` matches the block integral.
    MeanValue,
    /// Sampling net failed to bracket the block average; the block center
    /// is used and the weight comes from renormalization alone.
    CenterFallback,
}

/// Options for a single mixture construction.
#[derive(Debug, Clone)]
pub struct MixtureBuildOptions {
    /// Gauss-Legendre nodes per angle for the per-block integrals.
    pub block_order: usize,
    /// Blocks with `∫_U f` below `threshold · ω(U)/ω_m` are discarded.
    pub drop_threshold: f64,
    /// Mean-value tolerance on `f(y_k)` relative to the block average.
    pub mean_value_tol: f64,
}

impl Default for MixtureBuildOptions {
    fn default() -> Self {
        Self { block_order: 8, drop_threshold: 1e-14, mean_value_tol: 1e-9 }
    }
}

/// A constructed mixture plus the per-block bookkeeping the report wants.
#[derive(Debug, Clone)]
pub struct ConstructedMixture {
    pub mixture: VmfMixture,
    /// Resolution mode per retained block.
    pub modes: Vec<WeightMode>,
    /// Indices of the partition blocks that were retained.
    pub retained: Vec<usize>,
    /// Sum of the retained block integrals before normalization.
    pub block_integral_sum: f64,
}

/// Build the mixture `Σ_k c_k K_n(⟨·, y_k⟩)` over a partition: one
/// component per retained block, `μ_k = y_k` the mean-value point (block
/// center on bracketing failure), `κ_k = n`, and `c_k` the renormalized
/// block integral so the weights sum to 1 exactly.
pub fn construct_mixture(
    f: &TargetDensity,
    n: f64,
    partition: &SphericalPartition,
    opts: &MixtureBuildOptions,
) -> Result<ConstructedMixture> {
    let m = f.m();
    if partition.m != m {
        return Err(Error::InvalidInput(format!(
            "partition on S^{}, target on S^{m}",
            partition.m
        )));
    }
    let omega = surface_measure(m);

    // Block integrals.
    let integrate = |idx: usize| -> f64 {
        let rule = sphere_rule_on_block(m, &partition.blocks[idx], opts.block_order);
        rule.points.iter().zip(&rule.weights).map(|(p, w)| w * f.eval(p)).sum()
    };
    let integrals: Vec<f64> = if f.concurrent_safe() {
        (0..partition.len()).into_par_iter().map(integrate).collect()
    } else {
        (0..partition.len()).map(integrate).collect()
    };

    let retained: Vec<usize> = (0..partition.len())
        .filter(|&i| integrals[i] > opts.drop_threshold * partition.measures[i] / omega)
        .collect();
    if retained.is_empty() {
        return Err(Error::InvalidInput(
            "every block integral is degenerate; target carries no detectable mass".into(),
        ));
    }

    let mut total = 0.0;
    let mut comp = 0.0;
    for &i in &retained {
        let y = integrals[i] - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }

    // Representative points: the mean-value point matches f to the block
    // average, so f(y_k) ω(U_k) reproduces the block integral.
    let resolve = |&i: &usize| -> Result<(UnitVector, WeightMode)> {
        let block = &partition.blocks[i];
        let measure = partition.measures[i];
        let avg = integrals[i] / measure;
        let tol = (opts.mean_value_tol * avg.max(1.0))
            .min(opts.mean_value_tol * (1.0 / omega).max(integrals[i]) / measure);
        let eval = |x: &UnitVector| f.eval(x);
        match mean_value_point(m, block, &eval, avg, tol) {
            Ok(y) => Ok((y, WeightMode::MeanValue)),
            Err(Error::Bracketing { .. }) => Ok((block_center(m, block), WeightMode::CenterFallback)),
            Err(e) => Err(e),
        }
    };
    let resolved: Vec<(UnitVector, WeightMode)> = if f.concurrent_safe() {
        retained.par_iter().map(resolve).collect::<Result<_>>()?
    } else {
        retained.iter().map(resolve).collect::<Result<_>>()?
    };

    let mut weights: Vec<f64> = retained.iter().map(|&i| integrals[i] / total).collect();
    // Push the rounding residual into the largest weight so the simplex
    // constraint holds to machine precision.
    let sum: f64 = weights.iter().sum();
    let argmax = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    weights[argmax] += 1.0 - sum;

    let components = resolved
        .iter()
        .map(|(y, _)| VmfComponent::new(y.clone(), n))
        .collect::<Result<Vec<_>>>()?;
    let mixture = VmfMixture::new(m, components, weights)?;
    let modes = resolved.into_iter().map(|(_, mode)| mode).collect();
    Ok(ConstructedMixture { mixture, modes, retained, block_integral_sum: total })
}

/// Sup-norm error estimate over a grid, with the point attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct SupErrorEstimate {
    pub value: f64,
    pub argmax: UnitVector,
}

/// `max_i |f(x_i) - mixture(x_i)|` over the grid points.
pub fn estimate_sup_error(
    f: &TargetDensity,
    mixture: &VmfMixture,
    grid: &SupGrid,
) -> Result<SupErrorEstimate> {
    let f_values = f.eval_on(&grid.points);
    let evaluator = MixtureEvaluator::new(mixture)?;
    Ok(sup_error_cached(&f_values, &evaluator, &grid.points))
}

fn sup_error_cached(
    f_values: &[f64],
    evaluator: &MixtureEvaluator,
    points: &[UnitVector],
) -> SupErrorEstimate {
    let (value, idx) = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| ((f_values[i] - evaluator.density(x)).abs(), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    SupErrorEstimate { value, argmax: points[idx].clone() }
}

/// Schedule and budget knobs for [`approximate`].
#[derive(Debug, Clone, Serialize)]
pub struct ApproximationConfig {
    /// Target sup-norm error (absolute).
    pub delta: f64,
    pub n_init: f64,
    pub n_growth: f64,
    pub max_n: f64,
    pub levels_init: Vec<usize>,
    pub refine_factor: usize,
    pub max_components: usize,
    pub partition_mode: PartitionMode,
    pub sup_resolution: usize,
    /// Resolution of the smaller grid used for the per-stage convolution
    /// and discretization term estimates.
    pub stage_resolution: usize,
    pub block_order: usize,
    /// Product-rule orders for the smoothing-stage convolution; empty means
    /// the per-dimension defaults.
    pub conv_orders: Vec<usize>,
    pub max_stages: usize,
    pub drop_threshold: f64,
    pub mean_value_tol: f64,
}

impl ApproximationConfig {
    pub fn new(m: usize, delta: f64) -> Self {
        let mut levels_init = vec![4; m.saturating_sub(1)];
        if m == 1 {
            levels_init = vec![16];
        } else {
            levels_init.push(8);
        }
        Self {
            delta,
            n_init: 4.0,
            n_growth: 2.0,
            max_n: 512.0,
            levels_init,
            refine_factor: 2,
            max_components: 20_000,
            partition_mode: PartitionMode::Uniform,
            sup_resolution: 20_000,
            stage_resolution: 400,
            block_order: 8,
            conv_orders: Vec::new(),
            max_stages: 60,
            drop_threshold: 1e-14,
            mean_value_tol: 1e-9,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        if self.n_growth <= 1.0 {
            return Err(Error::InvalidInput("n growth factor must exceed 1".into()));
        }
        if self.refine_factor < 2 {
            return Err(Error::InvalidInput("refinement factor must be >= 2".into()));
        }
        if self.levels_init.len() != m {
            return Err(Error::InvalidInput(format!(
                "levels_init needs {m} entries for S^{m}, got {}",
                self.levels_init.len()
            )));
        }
        if self.n_init <= 0.0 || self.max_n < self.n_init {
            return Err(Error::InvalidInput("need 0 < n_init <= max_n".into()));
        }
        if self.max_components == 0 || self.max_stages == 0 {
            return Err(Error::InvalidInput("budgets must be positive".into()));
        }
        Ok(())
    }

    fn conv_orders_for(&self, m: usize) -> Vec<usize> {
        if !self.conv_orders.is_empty() {
            return self.conv_orders.clone();
        }
        match m {
            1 => vec![1024],
            2 => vec![96, 192],
            _ => default_sphere_orders(m),
        }
    }
}

/// One engine stage: a (concentration, partition) pair that was built and
/// measured.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub n: f64,
    pub components: usize,
    pub sup_error: f64,
    pub convolution_term: f64,
    pub discretization_term: f64,
    /// Whether the stage improved on the best error so far.
    pub accepted: bool,
}

/// Result of a full engine run.
#[derive(Debug, Clone, Serialize)]
pub struct ApproximationReport {
    pub mixture: VmfMixture,
    pub n: f64,
    pub partition: SphericalPartition,
    pub sup_error: f64,
    pub argmax: UnitVector,
    pub converged: bool,
    pub history: Vec<StageRecord>,
    pub block_modes: Vec<WeightMode>,
    pub convolution_term: f64,
    pub discretization_term: f64,
    pub sup_grid_mesh_norm: f64,
    pub note: String,
}

impl ApproximationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("n,components,sup_error,convolution_term,discretization_term,accepted\n");
        for s in &self.history {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.n, s.components, s.sup_error, s.convolution_term, s.discretization_term, s.accepted
            ));
        }
        out
    }
}

struct BestStage {
    built: ConstructedMixture,
    n: f64,
    partition: SphericalPartition,
    estimate: SupErrorEstimate,
    convolution_term: f64,
    discretization_term: f64,
}

/// Multiply every level count by the refinement factor, clamping to the
/// component budget; `None` when no further refinement is possible.
fn refine_levels(levels: &[usize], factor: usize, cap: usize) -> Option<Vec<usize>> {
    let product: usize = levels.iter().product();
    let next: Vec<usize> = levels.iter().map(|&l| l * factor).collect();
    let next_product = next.iter().try_fold(1usize, |a, &b| a.checked_mul(b))?;
    if next_product <= cap {
        return Some(next);
    }
    // Partial refinement: scale uniformly to land under the cap.
    let scale = (cap as f64 / product as f64).powf(1.0 / levels.len() as f64);
    if scale <= 1.0 {
        return None;
    }
    let clamped: Vec<usize> = levels.iter().map(|&l| ((l as f64 * scale).floor() as usize).max(l)).collect();
    if clamped == levels {
        return None;
    }
    Some(clamped)
}

/// Run the alternating schedule: for each concentration in the schedule,
/// refine the partition until the discretization term is driven below half
/// the tolerance (or plateaus), then grow the concentration; stop when the
/// measured sup error is below the tolerance or the budget is exhausted
/// (the report is then flagged as non-converged and carries the best stage
/// seen).
pub fn approximate(f: &TargetDensity, config: &ApproximationConfig) -> Result<ApproximationReport> {
    let m = f.m();
    config.validate(m)?;
    if !f.declared_continuous() {
        return Err(Error::InvalidInput("the construction requires a declared-continuous target".into()));
    }

    let grid = sup_grid(m, config.sup_resolution)?;
    let stage_grid = sup_grid(m, config.stage_resolution)?;
    let conv_rule = sphere_rule(m, &config.conv_orders_for(m))?;

    let f_sup = f.eval_on(&grid.points);
    let f_stage = f.eval_on(&stage_grid.points);
    let f_conv = f.eval_on(&conv_rule.points);

    let mut levels = config.levels_init.clone();
    if levels.iter().product::<usize>() > config.max_components {
        return Err(Error::InvalidInput("initial levels already exceed the component budget".into()));
    }
    let mut n = config.n_init;
    let mut history: Vec<StageRecord> = Vec::new();
    let mut best: Option<BestStage> = None;
    let mut stages = 0usize;
    let mut converged = false;

    'schedule: loop {
        let kernel = VmfKernel::new(m, n)?;
        let zonal = kernel.zonal()?;
        let smooth_stage =
            convolve_on_grid(m, &zonal, std::slice::from_ref(&f_conv), &stage_grid.points, &conv_rule)
                .remove(0);
        let convolution_term = f_stage
            .iter()
            .zip(&smooth_stage)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);

        let mut prev_disc = f64::INFINITY;
        loop {
            let partition = build_partition(m, &levels, config.partition_mode)?;
            let opts = MixtureBuildOptions {
                block_order: config.block_order,
                drop_threshold: config.drop_threshold,
                mean_value_tol: config.mean_value_tol,
            };
            let built = construct_mixture(f, n, &partition, &opts)?;
            let evaluator = MixtureEvaluator::new(&built.mixture)?;
            let estimate = sup_error_cached(&f_sup, &evaluator, &grid.points);
            let discretization_term = smooth_stage
                .iter()
                .zip(&stage_grid.points)
                .map(|(s, x)| (s - evaluator.density(x)).abs())
                .fold(0.0f64, f64::max);

            let accepted = best.as_ref().map_or(true, |b| estimate.value < b.estimate.value);
            history.push(StageRecord {
                n,
                components: built.mixture.len(),
                sup_error: estimate.value,
                convolution_term,
                discretization_term,
                accepted,
            });
            if accepted {
                best = Some(BestStage {
                    built,
                    n,
                    partition,
                    estimate,
                    convolution_term,
                    discretization_term,
                });
            }
            stages += 1;
            let current_error = history.last().unwrap().sup_error;
            if current_error < config.delta {
                converged = true;
                break 'schedule;
            }
            if stages >= config.max_stages {
                break 'schedule;
            }
            // Discretization stage resolved (half-tolerance split), clearly
            // dominated by the smoothing stage, or plateaued: grow n.
            if discretization_term <= config.delta / 2.0
                || discretization_term <= 0.25 * convolution_term
                || discretization_term >= 0.9 * prev_disc
            {
                break;
            }
            prev_disc = discretization_term;
            match refine_levels(&levels, config.refine_factor, config.max_components) {
                Some(next) => levels = next,
                None => break,
            }
        }

        n *= config.n_growth;
        if n > config.max_n {
            break;
        }
    }

    let best = best.expect("at least one stage always runs");
    Ok(ApproximationReport {
        mixture: best.built.mixture,
        n: best.n,
        partition: best.partition,
        sup_error: best.estimate.value,
        argmax: best.estimate.argmax,
        converged,
        history,
        block_modes: best.built.modes,
        convolution_term: best.convolution_term,
        discretization_term: best.discretization_term,
        sup_grid_mesh_norm: grid.descriptor.mesh_norm(),
        note: "sup error is a maximum over a finite grid with the recorded mesh norm; \
               between grid points it is not bounded without a modulus of continuity for the target"
            .into(),
    })
}

/// One row of a convergence study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub n: f64,
    pub components: usize,
    pub sup_error: f64,
    pub convolution_term: f64,
    pub discretization_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,components,sup_error,convolution_term,discretization_term\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.components, r.sup_error, r.convolution_term, r.discretization_term
            ));
        }
        out
    }
}

/// Options for [`convergence_study`].
#[derive(Debug, Clone)]
pub struct StudyOptions {
    /// Fixed grid on which all three error columns are measured.
    pub grid_resolution: usize,
    pub conv_orders: Vec<usize>,
    pub build: MixtureBuildOptions,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { grid_resolution: 2000, conv_orders: Vec::new(), build: MixtureBuildOptions::default() }
    }
}

/// Cross table of constructions over concentrations and partition levels:
/// for each `n`, the smoothing error `max |f - K_n * f|`, and for each
/// partition the total sup error and the discretization error
/// `max |K_n * f - mixture|`, all over one fixed grid.
pub fn convergence_study(
    f: &TargetDensity,
    ns: &[f64],
    partition_levels: &[Vec<usize>],
    options: &StudyOptions,
) -> Result<ConvergenceStudy> {
    let m = f.m();
    if ns.is_empty() || partition_levels.is_empty() {
        return Err(Error::InvalidInput("need at least one concentration and one partition".into()));
    }
    let grid = sup_grid(m, options.grid_resolution)?;
    let conv_orders = if options.conv_orders.is_empty() {
        ApproximationConfig::new(m, 1.0).conv_orders_for(m)
    } else {
        options.conv_orders.clone()
    };
    let conv_rule: SphereRule = sphere_rule(m, &conv_orders)?;
    let f_grid = f.eval_on(&grid.points);
    let f_conv = f.eval_on(&conv_rule.points);

    let mut rows = Vec::new();
    for &n in ns {
        let kernel = VmfKernel::new(m, n)?;
        let zonal = kernel.zonal()?;
        let smooth =
            convolve_on_grid(m, &zonal, std::slice::from_ref(&f_conv), &grid.points, &conv_rule)
                .remove(0);
        let convolution_term = f_grid
            .iter()
            .zip(&smooth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        for levels in partition_levels {
            let partition = build_partition(m, levels, PartitionMode::Uniform)?;
            let built = construct_mixture(f, n, &partition, &options.build)?;
            let evaluator = MixtureEvaluator::new(&built.mixture)?;
            let estimate = sup_error_cached(&f_grid, &evaluator, &grid.points);
            let discretization_term = smooth
                .iter()
                .zip(&grid.points)
                .map(|(s, x)| (s - evaluator.density(x)).abs())
                .fold(0.0f64, f64::max);
            rows.push(StudyRow {
                n,
                components: built.mixture.len(),
                sup_error: estimate.value,
                convolution_term,
                discretization_term,
            });
        }
    }
    Ok(ConvergenceStudy { rows })
}
