//! The standard target suite: built-in densities used by the tests, the
//! convergence studies and the CLI. Covers the easy case (uniform),
//! self-representable targets (single components and small mixtures) and a
//! density genuinely outside the family (a squared-inner-product
//! exponential, bimodal and antipodally symmetric).

use crate::approximator::TargetDensity;
use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::quadrature::interval_rule;
use crate::special::surface_measure;
use crate::vmf::{MixtureEvaluator, VmfComponent, VmfMixture};

/// Names of the suite targets, in canonical order.
pub const SUITE_NAMES: [&str; 6] = ["uniform", "vmf2", "vmf10", "mix2", "mix3", "bimodal"];

/// The uniform density `1/ω_m`.
pub fn uniform(m: usize) -> Result<TargetDensity> {
    let inv = 1.0 / surface_measure(m);
    TargetDensity::new(m, move |_x| inv, true, true)
}

/// A single vMF density with mean at the pole.
pub fn vmf_single(m: usize, kappa: f64) -> Result<TargetDensity> {
    let mix = VmfMixture::new(
        m,
        vec![VmfComponent::new(UnitVector::pole(m), kappa)?],
        vec![1.0],
    )?;
    mixture_target(&mix)
}

/// Two κ=5 components: pole and an equatorial direction, weights 0.6/0.4.
pub fn vmf_pair(m: usize) -> Result<TargetDensity> {
    let mix = VmfMixture::new(
        m,
        vec![
            VmfComponent::new(UnitVector::pole(m), 5.0)?,
            VmfComponent::new(UnitVector::basis(m, 0), 5.0)?,
        ],
        vec![0.6, 0.4],
    )?;
    mixture_target(&mix)
}

/// Three κ=5 components spread over pole and two equatorial directions.
pub fn vmf_triple(m: usize) -> Result<TargetDensity> {
    let third = if m >= 2 { UnitVector::basis(m, 1) } else { UnitVector::pole(1).antipode() };
    let mix = VmfMixture::new(
        m,
        vec![
            VmfComponent::new(UnitVector::pole(m), 5.0)?,
            VmfComponent::new(UnitVector::basis(m, 0), 5.0)?,
            VmfComponent::new(third, 5.0)?,
        ],
        vec![0.5, 0.3, 0.2],
    )?;
    mixture_target(&mix)
}

/// `f(x) ∝ exp(2 ⟨x, e⟩²)` with `e` the pole: bimodal, antipodally
/// symmetric, and not itself a vMF mixture. Normalized numerically through
/// the zonal reduction.
pub fn squared_exponential(m: usize) -> Result<TargetDensity> {
    let rule = interval_rule(m, 512);
    let mass = surface_measure(m - 1) * rule.integrate(|t| (2.0 * t * t).exp());
    TargetDensity::new(
        m,
        move |x: &UnitVector| {
            let t = *x.coords().last().expect("non-empty coordinates");
            (2.0 * t * t).exp() / mass
        },
        true,
        true,
    )
}

/// Wrap an explicit mixture as a target density.
pub fn mixture_target(mix: &VmfMixture) -> Result<TargetDensity> {
    let evaluator = MixtureEvaluator::new(mix)?;
    TargetDensity::new(mix.m, move |x| evaluator.density(x), true, true)
}

/// Look up a built-in target by suite name.
pub fn by_name(name: &str, m: usize) -> Result<TargetDensity> {
    match name {
        "uniform" => uniform(m),
        "vmf2" => vmf_single(m, 2.0),
        "vmf10" => vmf_single(m, 10.0),
        "mix2" => vmf_pair(m),
        "mix3" => vmf_triple(m),
        "bimodal" => squared_exponential(m),
        other => Err(Error::InvalidInput(format!(
            "unknown target '{other}'; built-ins are {SUITE_NAMES:?}"
        ))),
    }
}

/// The whole suite with canonical names.
pub fn standard_suite(m: usize) -> Result<Vec<(&'static str, TargetDensity)>> {
    SUITE_NAMES.iter().map(|&name| by_name(name, m).map(|t| (name, t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{default_sphere_orders, sphere_rule};

    #[test]
    fn suite_members_are_normalized() {
        for m in [1usize, 2] {
            let rule = sphere_rule(m, &default_sphere_orders(m)).unwrap();
            for (name, target) in standard_suite(m).unwrap() {
                let integral = rule.integrate(|x| target.eval(x));
                assert!(
                    (integral - 1.0).abs() < 1e-6,
                    "target {name} on S^{m}: integral {integral}"
                );
            }
        }
    }

    #[test]
    fn bimodal_is_antipodally_symmetric() {
        let f = squared_exponential(2).unwrap();
        let x = UnitVector::new(vec![0.1, -0.5, 0.85]).unwrap();
        let diff = (f.eval(&x) - f.eval(&x.antipode())).abs();
        assert!(diff < 1e-15);
        // Peaks at the poles, trough on the equator.
        assert!(f.eval(&UnitVector::pole(2)) > f.eval(&UnitVector::basis(2, 0)));
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(by_name("nope", 2).is_err());
    }
}
