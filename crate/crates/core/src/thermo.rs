//! Thermodynamic accounting: the Landauer bound, minimal regularization
//! energy, efficiency with its three-factor decomposition, and the
//! crystallization index.
//!
//! Unit convention: every KL divergence inside the library is in nats; the
//! conversion to bits happens only here, so that one bit of erased
//! information costs exactly one Landauer quantum `k_B T ln 2`.

use crate::error::{Error, Result};
use crate::manifold::Belief;
use crate::numerics::ToleranceConfig;

/// CODATA value of the Boltzmann constant, J/K.
pub const BOLTZMANN_CODATA: f64 = 1.380649e-23;

/// Default crystallization regime boundaries `(low, high)`. The regime
/// names come with no numeric boundaries attached, so these are explicitly
/// arbitrary, overridable configuration values.
pub const DEFAULT_CRYSTALLIZATION_THRESHOLDS: (f64, f64) = (0.1, 10.0);

/// Thermal environment the accounting refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    temperature_kelvin: f64,
    boltzmann_constant: f64,
}

impl Environment {
    pub fn new(temperature_kelvin: f64) -> Result<Self> {
        Self::with_boltzmann(temperature_kelvin, BOLTZMANN_CODATA)
    }

    pub fn with_boltzmann(temperature_kelvin: f64, boltzmann_constant: f64) -> Result<Self> {
        if !(temperature_kelvin > 0.0 && temperature_kelvin.is_finite()) {
            return Err(Error::Domain("temperature must be positive and finite"));
        }
        if !(boltzmann_constant > 0.0 && boltzmann_constant.is_finite()) {
            return Err(Error::Domain("boltzmann constant must be positive"));
        }
        Ok(Self {
            temperature_kelvin,
            boltzmann_constant,
        })
    }

    pub fn temperature_kelvin(&self) -> f64 {
        self.temperature_kelvin
    }

    pub fn boltzmann_constant(&self) -> f64 {
        self.boltzmann_constant
    }
}

/// Landauer bound, realized dissipation and the inefficiency factors.
///
/// Invariants: `eta = landauer_joules / actual_joules` and
/// `hardware · algorithm · dissipation = 1/eta`. When only the total ratio
/// is known, the unattributed overhead is reported as the dissipation
/// factor and the other two default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub landauer_joules: f64,
    pub actual_joules: f64,
    pub eta: f64,
    pub hardware_factor: f64,
    pub algorithm_factor: f64,
    pub dissipation_factor: f64,
}

impl EfficiencyReport {
    /// `|hardware·algorithm·dissipation·eta − 1|`, zero when the factor
    /// product identity holds exactly.
    pub fn factor_product_residual(&self) -> f64 {
        (self.hardware_factor * self.algorithm_factor * self.dissipation_factor * self.eta - 1.0)
            .abs()
    }
}

/// Learning regime indicated by the crystallization index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exploration,
    Critical,
    OverConstrained,
}

/// `C = τ·κ` with its regime classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystallizationIndex {
    pub value: f64,
    pub regime: Regime,
}

/// Minimum energy to erase one bit: `k_B T ln 2`.
pub fn landauer_bound_per_bit(env: &Environment) -> f64 {
    env.boltzmann_constant * env.temperature_kelvin * core::f64::consts::LN_2
}

/// Minimal energy dissipated by a regularization step that erases
/// `kl_nats` of information: `k_B T ln 2 · KL_bits = k_B T · KL_nats`.
pub fn min_regularization_energy(kl_nats: f64, env: &Environment) -> Result<f64> {
    if kl_nats.is_nan() {
        return Err(Error::NonFinite("KL must be a number"));
    }
    if kl_nats < 0.0 {
        return Err(Error::Domain("KL divergence cannot be negative"));
    }
    Ok(env.boltzmann_constant * env.temperature_kelvin * kl_nats)
}

/// Thermodynamic efficiency `η = E_Landauer / E_actual` for a process that
/// erased `info_erased_bits` of information.
///
/// Errors with [`Error::SecondLawViolation`] when the reported energy falls
/// below the bound — such inputs are inconsistent, since `0 < η ≤ 1` by
/// definition.
pub fn efficiency(
    info_erased_bits: f64,
    actual_joules: f64,
    env: &Environment,
) -> Result<EfficiencyReport> {
    if !(info_erased_bits > 0.0 && info_erased_bits.is_finite()) {
        return Err(Error::Domain("erased information must be positive bits"));
    }
    if !(actual_joules > 0.0 && actual_joules.is_finite()) {
        return Err(Error::Domain("actual energy must be positive joules"));
    }
    let bound = landauer_bound_per_bit(env) * info_erased_bits;
    if actual_joules < bound {
        return Err(Error::SecondLawViolation {
            actual_joules,
            bound_joules: bound,
        });
    }
    let eta = bound / actual_joules;
    Ok(EfficiencyReport {
        landauer_joules: bound,
        actual_joules,
        eta,
        hardware_factor: 1.0,
        algorithm_factor: 1.0,
        dissipation_factor: 1.0 / eta,
    })
}

/// Builds a report from the three overhead ratios
/// `E_hw/E_Landauer · E_alg/E_opt · E_diss/E_nec = 1/η`.
///
/// Each ratio is an overhead and must be ≥ 1. Energies are normalized to
/// `E_Landauer = 1` since no absolute joule scale is involved.
pub fn decompose_inefficiency(
    hardware_factor: f64,
    algorithm_factor: f64,
    dissipation_factor: f64,
) -> Result<EfficiencyReport> {
    for factor in [hardware_factor, algorithm_factor, dissipation_factor] {
        if !(factor >= 1.0 && factor.is_finite()) {
            return Err(Error::Domain("inefficiency factors must be finite and >= 1"));
        }
    }
    let product = hardware_factor * algorithm_factor * dissipation_factor;
    Ok(EfficiencyReport {
        landauer_joules: 1.0,
        actual_joules: product,
        eta: 1.0 / product,
        hardware_factor,
        algorithm_factor,
        dissipation_factor,
    })
}

/// Crystallization index `C = τ·κ` classified against `(low, high)`.
pub fn crystallization_index(
    tau: f64,
    kappa: f64,
    thresholds: (f64, f64),
) -> Result<CrystallizationIndex> {
    if !(tau > 0.0 && tau.is_finite() && kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain("tau and kappa must be positive and finite"));
    }
    let (low, high) = thresholds;
    if !(low < high && low.is_finite() && high.is_finite()) {
        return Err(Error::Domain("thresholds must satisfy low < high"));
    }
    let value = tau * kappa;
    let regime = if value < low {
        Regime::Exploration
    } else if value <= high {
        Regime::Critical
    } else {
        Regime::OverConstrained
    };
    Ok(CrystallizationIndex { value, regime })
}

/// Diagnostic ratio `2·KL / d_F²` of the local quadratic expansion
/// `KL(p ‖ p+dp) = d_F²(p, p+dp)/2 + O(‖dp‖³)`; converges to 1 as the
/// perturbation shrinks.
pub fn kl_quadratic_ratio(d_f_sq: f64, kl_nats: f64) -> Result<f64> {
    if !(d_f_sq.is_finite() && kl_nats.is_finite()) {
        return Err(Error::NonFinite("ratio inputs must be finite"));
    }
    if kl_nats < 0.0 {
        return Err(Error::Domain("KL divergence cannot be negative"));
    }
    if d_f_sq <= 0.0 {
        return Err(Error::ZeroDistance(
            "quadratic expansion check needs separated points",
        ));
    }
    Ok(2.0 * kl_nats / d_f_sq)
}

/// Computes both sides of the expansion with the library's own formulas
/// and returns the diagnostic ratio for the pair `(point, perturbed)`.
pub fn local_kl_quadratic_check<B: Belief>(
    point: &B,
    perturbed: &B,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let d = point.fisher_rao_distance(perturbed, cfg)?;
    kl_quadratic_ratio(d * d, point.kl_divergence(perturbed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianBelief;
    use crate::vonmises::VonMisesBelief;
    use approx::assert_abs_diff_eq;

    fn room() -> Environment {
        Environment::new(300.0).unwrap()
    }

    #[test]
    fn landauer_reference_values() {
        assert_abs_diff_eq!(
            landauer_bound_per_bit(&room()),
            2.870978885078724e-21,
            epsilon = 1e-24
        );
        let cold = Environment::new(1.0).unwrap();
        assert_abs_diff_eq!(
            landauer_bound_per_bit(&cold),
            9.569929616929079e-24,
            epsilon = 1e-27
        );
    }

    #[test]
    fn landauer_is_linear_in_temperature() {
        let t = Environment::new(150.0).unwrap();
        let t2 = Environment::new(300.0).unwrap();
        assert_eq!(
            landauer_bound_per_bit(&t2),
            2.0 * landauer_bound_per_bit(&t)
        );
    }

    #[test]
    fn min_energy_examples() {
        assert_eq!(min_regularization_energy(0.0, &room()).unwrap(), 0.0);
        // One bit costs exactly one Landauer quantum.
        assert_eq!(
            min_regularization_energy(core::f64::consts::LN_2, &room()).unwrap(),
            landauer_bound_per_bit(&room())
        );
        assert_abs_diff_eq!(
            min_regularization_energy(0.5, &room()).unwrap(),
            2.0709735e-21,
            epsilon = 1e-24
        );
        assert!(min_regularization_energy(-0.1, &room()).is_err());
    }

    #[test]
    fn efficiency_boundary_behaviour() {
        let env = room();
        let bound = landauer_bound_per_bit(&env) * 3.0;
        let at_bound = efficiency(3.0, bound, &env).unwrap();
        assert_eq!(at_bound.eta, 1.0);
        let half = efficiency(3.0, 2.0 * bound, &env).unwrap();
        assert_eq!(half.eta, 0.5);
        assert!(matches!(
            efficiency(3.0, bound * (1.0 - 1e-12), &env),
            Err(Error::SecondLawViolation { .. })
        ));
    }

    #[test]
    fn efficiency_report_satisfies_factor_identity() {
        let env = room();
        let bound = landauer_bound_per_bit(&env);
        for &mult in &[1.0, 1.7, 10.0, 1e6] {
            let rep = efficiency(1.0, bound * mult, &env).unwrap();
            assert!(rep.factor_product_residual() < 1e-10);
            assert!(rep.eta > 0.0 && rep.eta <= 1.0);
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_inefficiency(1.0, 1.0, 1.0).unwrap().eta, 1.0);
        assert_eq!(decompose_inefficiency(2.0, 2.0, 2.0).unwrap().eta, 0.125);
        let rep = decompose_inefficiency(10.0, 1.5, 3.0).unwrap();
        assert_abs_diff_eq!(rep.eta, 1.0 / 45.0, epsilon = 1e-18);
        assert!(rep.factor_product_residual() < 1e-10);
        assert!(decompose_inefficiency(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn crystallization_examples() {
        let c = crystallization_index(2.0, 3.0, DEFAULT_CRYSTALLIZATION_THRESHOLDS).unwrap();
        assert_eq!(c.value, 6.0);
        assert_eq!(c.regime, Regime::Critical);
        let low = crystallization_index(1e-3, 1e-3, DEFAULT_CRYSTALLIZATION_THRESHOLDS).unwrap();
        assert_eq!(low.regime, Regime::Exploration);
        let high = crystallization_index(10.0, 10.0, DEFAULT_CRYSTALLIZATION_THRESHOLDS).unwrap();
        assert_eq!(high.regime, Regime::OverConstrained);
        assert!(crystallization_index(1.0, 1.0, (5.0, 1.0)).is_err());
        assert!(crystallization_index(-1.0, 1.0, (0.1, 10.0)).is_err());
    }

    #[test]
    fn crystallization_is_bilinear() {
        // Power-of-two scalings commute with rounding, so this is exact.
        let base = crystallization_index(1.25, 3.5, (0.1, 10.0)).unwrap().value;
        let scaled = crystallization_index(4.0 * 1.25, 0.5 * 3.5, (0.1, 10.0))
            .unwrap()
            .value;
        assert_eq!(scaled, 4.0 * 0.5 * base);
    }

    #[test]
    fn quadratic_ratio_guards() {
        assert!(matches!(
            kl_quadratic_ratio(0.0, 0.1),
            Err(Error::ZeroDistance(_))
        ));
        assert!(kl_quadratic_ratio(1.0, -0.5).is_err());
        assert_eq!(kl_quadratic_ratio(0.5, 0.25).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_expansion_ratio_examples() {
        let cfg = ToleranceConfig::default();
        let p = GaussianBelief::new(0.0, 1.0).unwrap();
        let small = GaussianBelief::new(1e-3, 1.0).unwrap();
        let ratio = local_kl_quadratic_check(&p, &small, &cfg).unwrap();
        assert!((ratio - 1.0).abs() < 1e-2, "ratio {ratio}");
        // A larger perturbation sits farther from 1.
        let big = GaussianBelief::new(0.0, 1.1).unwrap();
        let tiny = GaussianBelief::new(0.0, 1.001).unwrap();
        let r_big = local_kl_quadratic_check(&p, &big, &cfg).unwrap();
        let r_tiny = local_kl_quadratic_check(&p, &tiny, &cfg).unwrap();
        assert!((r_big - 1.0).abs() > (r_tiny - 1.0).abs());
    }

    #[test]
    fn vonmises_expansion_ratio_example() {
        let cfg = ToleranceConfig::default();
        let p = VonMisesBelief::new(0.0, 2.0).unwrap();
        let q = VonMisesBelief::new(0.0, 2.0 + 1e-3).unwrap();
        let ratio = local_kl_quadratic_check(&p, &q, &cfg).unwrap();
        assert!((ratio - 1.0).abs() < 1e-2, "ratio {ratio}");
    }
}
