//! Convolution spectra of zonal kernels: Funk-Hecke eigenvalues, the
//! weighted `L^{1,m}` kernel norm, tail masses with their concentration
//! bounds, numerical spherical convolution, and the diagnostic report that
//! tabulates the convergence conditions for the concentration-indexed
//! kernel family.

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::quadrature::{interval_rule, interval_rule_segment, IntervalRule, SphereRule};
use crate::special::{gegenbauer_normalized, harmonic_dimension, surface_measure, HarmonicDegree};
use crate::vmf::VmfKernel;
use rayon::prelude::*;
use serde::Serialize;

/// Largest interval-rule order the adaptive doubling may request.
const MAX_ADAPTIVE_ORDER: usize = 1 << 17;

/// Relative self-consistency target for adaptive quadrature.
const ADAPTIVE_RTOL: f64 = 1e-10;

/// A function on `[-1, 1]` applied through inner products `K(⟨x, y⟩)`.
///
/// `log_abs_eval` exists so concentrated kernels can be handled in log
/// space; sign-changing kernels only need `eval`.
pub trait ZonalKernel: Sync {
    fn eval(&self, t: f64) -> f64;

    fn log_abs_eval(&self, t: f64) -> f64 {
        self.eval(t).abs().ln()
    }
}

/// Constant kernel, occasionally useful in tests and diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ConstantKernel(pub f64);

impl ZonalKernel for ConstantKernel {
    fn eval(&self, _t: f64) -> f64 {
        self.0
    }
}

/// Funk-Hecke eigenvalues `a_0..a_kmax` of one kernel.
#[derive(Debug, Clone, Serialize)]
pub struct FunkHeckeCoefficients {
    pub m: usize,
    /// Human-readable kernel description for reports.
    pub kernel: String,
    pub values: Vec<f64>,
}

impl FunkHeckeCoefficients {
    /// Eigenvalue domination by the mass, valid for non-negative kernels.
    pub fn dominated_by_mass(&self) -> bool {
        let a0 = self.values[0];
        self.values.iter().all(|&a| a.abs() <= a0 * (1.0 + 1e-12))
    }
}

/// Tail masses of the kernel family below inner-product level `rho`,
/// together with the analytic concentration bound for each index.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub rho: f64,
    pub ns: Vec<f64>,
    pub tails: Vec<f64>,
    pub bounds: Vec<f64>,
}

/// Adaptive doubling driver: evaluates `quantity` on rules of increasing
/// order until two consecutive refinements agree to `ADAPTIVE_RTOL`
/// relative, with an absolute floor taken from `scale` (the integral of the
/// absolute integrand) so exact zeros terminate.
fn adaptive_interval(
    m: usize,
    start_order: usize,
    quantity: impl Fn(&IntervalRule) -> (f64, f64),
) -> Result<f64> {
    let mut order = start_order.max(16);
    let (mut coarse, mut coarse_scale) = quantity(&interval_rule(m, order));
    loop {
        order *= 2;
        if order > MAX_ADAPTIVE_ORDER {
            return Err(Error::NonConvergence(format!(
                "interval quadrature did not self-verify by order {MAX_ADAPTIVE_ORDER}"
            )));
        }
        let (fine, scale) = quantity(&interval_rule(m, order));
        let tol = ADAPTIVE_RTOL * fine.abs().max(1e-13 * scale.max(coarse_scale));
        if (fine - coarse).abs() <= tol {
            return Ok(fine);
        }
        coarse = fine;
        coarse_scale = scale;
    }
}

/// Funk-Hecke eigenvalue
/// `a_k^m(K) = (ω_{m-1}/ω_m) ∫ K(t) Q_k(t)/Q_k(1) (1-t²)^{(m-2)/2} dt`,
/// refined by adaptive doubling starting from the order of `rule`.
pub fn funk_hecke_coefficient(
    m: usize,
    kernel: &dyn ZonalKernel,
    k: usize,
    rule: &IntervalRule,
) -> Result<f64> {
    let spec = HarmonicDegree::new(m, k)?;
    let dim = harmonic_dimension(spec) as f64;
    let prefactor = surface_measure(m - 1) / surface_measure(m);
    adaptive_interval(m, rule.order(), |r| {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (&t, &w) in r.nodes.iter().zip(&r.weights) {
            let q = gegenbauer_normalized(spec, t.clamp(-1.0, 1.0)).expect("t in domain") / dim;
            let term = w * kernel.eval(t) * q;
            value += term;
            scale += term.abs();
        }
        (prefactor * value, prefactor * scale)
    })
}

/// Eigenvalues `a_0..a_kmax` sharing one adaptive refinement per degree.
pub fn funk_hecke_coefficients(
    m: usize,
    kernel: &dyn ZonalKernel,
    kmax: usize,
    rule: &IntervalRule,
    label: &str,
) -> Result<FunkHeckeCoefficients> {
    let values = (0..=kmax)
        .map(|k| funk_hecke_coefficient(m, kernel, k, rule))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FunkHeckeCoefficients { m, kernel: label.to_string(), values })
}

/// Kernel norm `||K||_{1,m} = (ω_{m-1}/ω_m) ∫ |K(t)| (1-t²)^{(m-2)/2} dt`.
pub fn kernel_l1m_norm(m: usize, kernel: &dyn ZonalKernel, rule: &IntervalRule) -> Result<f64> {
    let prefactor = surface_measure(m - 1) / surface_measure(m);
    adaptive_interval(m, rule.order(), |r| {
        let v = prefactor * r.integrate(|t| kernel.eval(t).abs());
        (v, v.abs())
    })
}

/// Mass of the kernel family member below level `rho`:
/// `(ω_{m-1}/ω_m) ∫_{-1}^{ρ} K_n(t) (1-t²)^{(m-2)/2} dt` in the
/// unit-convolution-mass scaling, so the value lies in `[0, 1]` and tends
/// to 0 as the concentration grows.
pub fn tail_mass(m: usize, kernel: &VmfKernel, rho: f64, rule: &IntervalRule) -> Result<f64> {
    if !(-1.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho must lie in (-1, 1), got {rho}")));
    }
    if kernel.m != m {
        return Err(Error::InvalidInput(format!("kernel on S^{}, requested S^{m}", kernel.m)));
    }
    let zonal = kernel.zonal()?;
    let prefactor = surface_measure(m - 1) / surface_measure(m);
    let mut order = rule.order().max(16);
    let tail_at = |order: usize| -> f64 {
        let seg = interval_rule_segment(m, order, -1.0, rho);
        prefactor * seg.integrate(|t| zonal.eval(t))
    };
    let mut coarse = tail_at(order);
    loop {
        order *= 2;
        if order > MAX_ADAPTIVE_ORDER {
            return Err(Error::NonConvergence("tail quadrature did not self-verify".into()));
        }
        let fine = tail_at(order);
        if (fine - coarse).abs() <= ADAPTIVE_RTOL * fine.abs().max(1e-280) {
            return Ok(fine);
        }
        coarse = fine;
    }
}

/// Surface measure of the region `{y : ⟨x, y⟩ <= rho}` (independent of x),
/// via the weighted interval rule over `[-1, ρ]`.
pub fn cap_measure_below(m: usize, rho: f64, order: usize) -> f64 {
    surface_measure(m - 1) * interval_rule_segment(m, order, -1.0, rho).total_weight()
}

/// Surface measure of the ball `{y : ⟨x, y⟩ >= 1 - delta}`.
pub fn ball_measure(m: usize, delta: f64, order: usize) -> f64 {
    surface_measure(m - 1) * interval_rule_segment(m, order, 1.0 - delta, 1.0).total_weight()
}

/// Analytic upper bound for [`tail_mass`] obtained by bounding the
/// numerator by `ω_m({⟨x,y⟩ <= ρ}) e^{nρ}` and the denominator by
/// `e^{n(1-δ)} ω_m(B_δ)`, valid whenever `1 - δ > ρ`.
pub fn concentration_bound(m: usize, n: f64, rho: f64, delta: f64) -> Result<f64> {
    if !(-1.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho must lie in (-1, 1), got {rho}")));
    }
    if !(delta > 0.0 && 1.0 - delta > rho) {
        return Err(Error::Domain(format!(
            "bound needs 0 < delta and 1 - delta > rho, got delta={delta}, rho={rho}"
        )));
    }
    let cap = cap_measure_below(m, rho, 256);
    let ball = ball_measure(m, delta, 256);
    Ok((cap.ln() + n * rho - n * (1.0 - delta) - ball.ln()).exp())
}

/// Spherical convolution at one point:
/// `(K * f)(x) = (1/ω_m) Σ_j w_j K(⟨x, p_j⟩) f(p_j)`.
pub fn spherical_convolve(
    m: usize,
    kernel: &dyn ZonalKernel,
    f: &dyn Fn(&UnitVector) -> f64,
    x: &UnitVector,
    rule: &SphereRule,
) -> f64 {
    let inv = 1.0 / surface_measure(m);
    inv * rule.integrate(|p| kernel.eval(x.dot(p).clamp(-1.0, 1.0)) * f(p))
}

/// Batched convolution: every target shares the kernel evaluations against
/// the rule points, which dominate the cost. `targets[t][j]` holds the t-th
/// target evaluated at rule point `j`; the result is indexed the same way
/// over the grid `xs`.
pub fn convolve_on_grid(
    m: usize,
    kernel: &(dyn ZonalKernel + Sync),
    targets: &[Vec<f64>],
    xs: &[UnitVector],
    rule: &SphereRule,
) -> Vec<Vec<f64>> {
    let inv = 1.0 / surface_measure(m);
    let per_point: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            let mut out = vec![0.0; targets.len()];
            let mut kw = Vec::with_capacity(rule.len());
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                kw.push(w * kernel.eval(x.dot(p).clamp(-1.0, 1.0)));
            }
            for (t, values) in targets.iter().enumerate() {
                let mut acc = 0.0;
                for (kwj, fj) in kw.iter().zip(values) {
                    acc += kwj * fj;
                }
                out[t] = inv * acc;
            }
            out
        })
        .collect();
    let mut result = vec![vec![0.0; xs.len()]; targets.len()];
    for (i, row) in per_point.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            result[t][i] = v;
        }
    }
    result
}

/// Convergence diagnostics for the kernel family over a set of
/// concentrations: the mass `a_0` per index, eigenvalue spectra up to
/// `kmax`, and tail masses with their analytic bounds per `rho` (reported
/// at `delta = (1 - rho)/2`). Violations of the expected behavior are
/// collected as human-readable strings.
#[derive(Debug, Clone, Serialize)]
pub struct KernelConvergenceReport {
    pub m: usize,
    pub ns: Vec<f64>,
    pub mass: Vec<f64>,
    pub spectra: Vec<FunkHeckeCoefficients>,
    pub tails: Vec<TailReport>,
    pub violations: Vec<String>,
}

pub fn convergence_report(
    m: usize,
    ns: &[f64],
    rhos: &[f64],
    kmax: usize,
    base_order: usize,
) -> Result<KernelConvergenceReport> {
    if ns.is_empty() {
        return Err(Error::InvalidInput("need at least one concentration".into()));
    }
    let rule = interval_rule(m, base_order);
    let mut mass = Vec::with_capacity(ns.len());
    let mut spectra = Vec::with_capacity(ns.len());
    let mut violations = Vec::new();

    for &n in ns {
        let kernel = VmfKernel::new(m, n)?;
        let zonal = kernel.zonal()?;
        let coefficients =
            funk_hecke_coefficients(m, &zonal, kmax, &rule, &format!("vmf(m={m}, n={n})"))?;
        let a0 = coefficients.values[0];
        if (a0 - 1.0).abs() > 1e-8 {
            violations.push(format!("mass a_0 = {a0} deviates from 1 at n = {n}"));
        }
        if !coefficients.dominated_by_mass() {
            violations.push(format!("eigenvalue above the mass at n = {n}"));
        }
        mass.push(a0);
        spectra.push(coefficients);
    }

    let mut tails = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let delta = (1.0 - rho) / 2.0;
        let mut tail_values = Vec::with_capacity(ns.len());
        let mut bound_values = Vec::with_capacity(ns.len());
        for &n in ns {
            let kernel = VmfKernel::new(m, n)?;
            let tail = tail_mass(m, &kernel, rho, &rule)?;
            let bound = concentration_bound(m, n, rho, delta)?;
            if tail > bound * (1.0 + 1e-9) {
                violations.push(format!("tail {tail} exceeds bound {bound} at n = {n}, rho = {rho}"));
            }
            tail_values.push(tail);
            bound_values.push(bound);
        }
        for w in tail_values.windows(2) {
            if w[1] >= w[0] {
                violations.push(format!("tail not decreasing at rho = {rho}"));
                break;
            }
        }
        tails.push(TailReport { rho, ns: ns.to_vec(), tails: tail_values, bounds: bound_values });
    }

    Ok(KernelConvergenceReport { m, ns: ns.to_vec(), mass, spectra, tails, violations })
}

impl KernelConvergenceReport {
    /// One row per (n, rho): `m,n,a0,rho,tail,bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,a0,rho,tail,bound\n");
        for tail in &self.tails {
            for (i, &n) in tail.ns.iter().enumerate() {
                let a0 = self.mass[self.ns.iter().position(|&x| x == n).unwrap_or(i)];
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    self.m, n, a0, tail.rho, tail.tails[i], tail.bounds[i]
                ));
            }
        }
        out
    }

    /// One row per (n, k): `m,n,k,a_k`.
    pub fn spectrum_csv(&self) -> String {
        let mut out = String::from("m,n,k,a_k\n");
        for (spectrum, &n) in self.spectra.iter().zip(&self.ns) {
            for (k, &a) in spectrum.values.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", self.m, n, k, a));
            }
        }
        out
    }
}
