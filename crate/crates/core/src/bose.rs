//! Bose–Einstein thermometry: converting between bath temperature and mean
//! thermal occupancy of a harmonic mode.

use crate::constants::{HBAR, KB};
use crate::error::{Error, Result};

/// Mean thermal occupancy of a mode at `omega` (rad/s) in equilibrium with a
/// bath at `temperature` (K):
///
/// `n = 1 / (exp(hbar·omega / k_B·T) - 1)`
///
/// Uses `exp_m1` so deep sub-occupancy values (GHz modes at millikelvin)
/// stay accurate.
pub fn bose_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    Error::check_positive("omega", omega)?;
    Error::check_positive("temperature", temperature)?;
    let x = HBAR * omega / (KB * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Bath temperature (K) that produces mean occupancy `n` at `omega` (rad/s):
///
/// `T = hbar·omega / (k_B · ln(1 + 1/n))`
///
/// Exact inverse of [`bose_occupancy`].
pub fn temperature_from_occupancy(omega: f64, n: f64) -> Result<f64> {
    Error::check_positive("omega", omega)?;
    Error::check_positive("n", n)?;
    Ok(HBAR * omega / (KB * (1.0 / n).ln_1p()))
}

/// High-temperature (equipartition) occupancy `n ≈ k_B·T / hbar·omega`.
///
/// This is the linearization valid for `k_B·T >> hbar·omega`; it is exposed
/// separately so axes and thermometry that deliberately use the linearized
/// scale can say so.
pub fn bose_occupancy_linearized(omega: f64, temperature: f64) -> Result<f64> {
    Error::check_positive("omega", omega)?;
    Error::check_positive("temperature", temperature)?;
    Ok(KB * temperature / (HBAR * omega))
}

/// Inverse of [`bose_occupancy_linearized`]: `T ≈ hbar·omega·n / k_B`.
pub fn temperature_from_occupancy_linearized(omega: f64, n: f64) -> Result<f64> {
    Error::check_positive("omega", omega)?;
    Error::check_positive("n", n)?;
    Ok(HBAR * omega * n / KB)
}
