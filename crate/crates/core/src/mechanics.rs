//! Mechanical "breathing" mode of the device and its intrinsic loss channels.

use crate::constants::{angular_to_hz, hz_to_angular};
use crate::error::{Error, Result};

/// A single mechanical mode parametrically coupled to the optical mode.
///
/// All rates are angular (rad/s). `gamma_0` is the intrinsic energy decay
/// rate to the cold phonon bath; `gamma_phi` is pure dephasing, which widens
/// the thermometry linewidth but does not exchange energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalMode {
    /// Mechanical resonance frequency, rad/s.
    pub omega_m: f64,
    /// Intrinsic energy damping rate, rad/s.
    pub gamma_0: f64,
    /// Pure dephasing rate, rad/s.
    pub gamma_phi: f64,
    /// Vacuum optomechanical coupling rate, rad/s.
    pub g_0: f64,
}

impl MechanicalMode {
    /// Build a mode from angular rates.
    pub fn new(omega_m: f64, gamma_0: f64, gamma_phi: f64, g_0: f64) -> Result<Self> {
        Error::check_positive("omega_m", omega_m)?;
        Error::check_non_negative("gamma_0", gamma_0)?;
        Error::check_non_negative("gamma_phi", gamma_phi)?;
        Error::check_non_negative("g_0", g_0)?;
        Ok(Self {
            omega_m,
            gamma_0,
            gamma_phi,
            g_0,
        })
    }

    /// Build a mode from ordinary frequencies in Hz.
    pub fn from_hz(f_m_hz: f64, gamma_0_hz: f64, gamma_phi_hz: f64, g_0_hz: f64) -> Result<Self> {
        Self::new(
            hz_to_angular(f_m_hz),
            hz_to_angular(gamma_0_hz),
            hz_to_angular(gamma_phi_hz),
            hz_to_angular(g_0_hz),
        )
    }

    /// Mechanical quality factor `omega_m / gamma_0`.
    ///
    /// `f64::INFINITY` when the mode is lossless (`gamma_0 == 0`).
    #[inline]
    pub fn q_m(&self) -> f64 {
        self.omega_m / self.gamma_0
    }

    /// Mechanical frequency in Hz, for reporting.
    #[inline]
    pub fn f_m_hz(&self) -> f64 {
        angular_to_hz(self.omega_m)
    }
}
