//! Thermal-conductance scaling: how absorbed pump power sets the hot-bath
//! temperature, and how that temperature scales between device geometries.

use crate::error::{Error, Result};
use crate::solve::bisect;

/// Power-law thermal conductance between the absorption region and the cold
/// bath: conducted power `P_th = epsilon * T^(alpha+1)` in the limit where
/// the hot side is much warmer than the base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductanceModel {
    /// Conductance coefficient, W / K^(alpha+1).
    pub epsilon: f64,
    /// Temperature exponent of the conductance, dimensionless.
    pub alpha: f64,
    /// Fraction of the input power absorbed and converted to heat, (0, 1].
    pub eta_abs: f64,
}

impl ConductanceModel {
    /// Build a model, validating positivity.
    pub fn new(epsilon: f64, alpha: f64, eta_abs: f64) -> Result<Self> {
        Error::check_positive("epsilon", epsilon)?;
        Error::check_positive("alpha", alpha)?;
        Error::check_fraction("eta_abs", eta_abs)?;
        Ok(Self {
            epsilon,
            alpha,
            eta_abs,
        })
    }

    /// Conducted power at hot-side temperature `t_p` in the hot limit:
    /// `P_th = epsilon * t_p^(alpha+1)`.
    pub fn thermal_power(&self, t_p: f64) -> Result<f64> {
        Error::check_non_negative("t_p", t_p)?;
        Ok(self.epsilon * t_p.powf(self.alpha + 1.0))
    }

    /// Hot-bath temperature for input power `p_in`, inverting the hot-limit
    /// law: `T_p = (eta_abs * P_in / epsilon)^(1/(alpha+1))`.
    pub fn bath_temperature_from_power(&self, p_in: f64) -> Result<f64> {
        Error::check_non_negative("p_in", p_in)?;
        Ok((self.eta_abs * p_in / self.epsilon).powf(1.0 / (self.alpha + 1.0)))
    }
}

/// Hot-bath temperature keeping the base-temperature offset: solves the
/// exact balance `epsilon * T^alpha * (T - t_0) = eta_abs * p_in`.
///
/// When the hot-limit solution already exceeds `5 * t_0` the offset is
/// negligible and the closed form is returned; otherwise the exact balance
/// is solved by bisection. Zero power returns `t_0` (no heating).
pub fn bath_temperature_from_power_above_base(
    model: &ConductanceModel,
    p_in: f64,
    t_0: f64,
) -> Result<f64> {
    Error::check_non_negative("p_in", p_in)?;
    Error::check_positive("t_0", t_0)?;
    let hot_limit = model.bath_temperature_from_power(p_in)?;
    if hot_limit > 5.0 * t_0 {
        return Ok(hot_limit);
    }
    if p_in == 0.0 {
        return Ok(t_0);
    }
    let target = model.eta_abs * p_in;
    let f = |t: f64| model.epsilon * t.powf(model.alpha) * (t - t_0) - target;
    // f(t_0) < 0 and f grows without bound; bracket generously above t_0.
    let hi = (hot_limit.max(t_0)) * 10.0 + t_0;
    bisect(f, t_0 * (1.0 + 1e-12), hi, 1e-13, 400).ok_or_else(|| {
        Error::DegenerateFit("thermal balance has no root in bracket".into())
    })
}

/// Ratio of effective hot-bath occupancies between two geometries whose
/// conductance coefficients differ by `epsilon_ratio` and whose mode
/// frequencies differ by `omega_ratio = omega_2 / omega_1`:
///
/// `n_1 / n_2 = omega_ratio * epsilon_ratio^(1/(alpha_0+1))`
///
/// In the hot, linearized limit `n ∝ T_p / omega`, so a geometry that
/// conducts heat `epsilon_ratio` times better runs that much cooler, with
/// the temperature advantage compressed by the conductance exponent.
pub fn occupancy_ratio_1d_2d(epsilon_ratio: f64, alpha_0: f64, omega_ratio: f64) -> Result<f64> {
    Error::check_positive("epsilon_ratio", epsilon_ratio)?;
    Error::check_positive("alpha_0", alpha_0)?;
    Error::check_positive("omega_ratio", omega_ratio)?;
    Ok(omega_ratio * epsilon_ratio.powf(1.0 / (alpha_0 + 1.0)))
}
