//! Optical resonance of the device: total and external decay rates and the
//! quantities derived from them.

use crate::constants::{angular_to_hz, hz_to_angular};
use crate::error::{Error, Result};

/// A single optical mode coupled to one feed waveguide.
///
/// All rates are angular (rad/s). The external coupling `kappa_e` is the part
/// of the total energy decay rate `kappa` that goes back into the waveguide;
/// the remainder `kappa - kappa_e` is intrinsic (scattering/absorption) loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalCavity {
    /// Optical resonance frequency, rad/s.
    pub omega_c: f64,
    /// Total (loaded) energy decay rate, rad/s.
    pub kappa: f64,
    /// External (waveguide-coupled) decay rate, rad/s. `0 < kappa_e <= kappa`.
    pub kappa_e: f64,
}

impl OpticalCavity {
    /// Build a cavity from angular rates, validating the decay hierarchy.
    pub fn new(omega_c: f64, kappa: f64, kappa_e: f64) -> Result<Self> {
        Error::check_positive("omega_c", omega_c)?;
        Error::check_positive("kappa", kappa)?;
        Error::check_positive("kappa_e", kappa_e)?;
        if kappa_e > kappa {
            return Err(Error::OvercoupledBeyondTotal { kappa_e, kappa });
        }
        Ok(Self {
            omega_c,
            kappa,
            kappa_e,
        })
    }

    /// Build a cavity from ordinary frequencies in Hz.
    pub fn from_hz(f_c_hz: f64, kappa_hz: f64, kappa_e_hz: f64) -> Result<Self> {
        Self::new(
            hz_to_angular(f_c_hz),
            hz_to_angular(kappa_hz),
            hz_to_angular(kappa_e_hz),
        )
    }

    /// Intrinsic decay rate `kappa_i = kappa - kappa_e`, rad/s.
    #[inline]
    pub fn kappa_i(&self) -> f64 {
        self.kappa - self.kappa_e
    }

    /// Waveguide extraction fraction `eta_kappa = kappa_e / kappa`, in (0, 1].
    #[inline]
    pub fn eta_kappa(&self) -> f64 {
        self.kappa_e / self.kappa
    }

    /// Loaded optical quality factor `omega_c / kappa`.
    #[inline]
    pub fn q_loaded(&self) -> f64 {
        self.omega_c / self.kappa
    }

    /// Intrinsic optical quality factor `omega_c / kappa_i`.
    ///
    /// Returns `f64::INFINITY` for a perfectly overcoupled cavity
    /// (`kappa_i == 0`).
    #[inline]
    pub fn q_intrinsic(&self) -> f64 {
        self.omega_c / self.kappa_i()
    }

    /// A copy of this cavity with the loaded quality factor replaced by `q`,
    /// holding `omega_c` and the extraction fraction `eta_kappa` fixed.
    ///
    /// This is the knob used when sweeping loss at a fixed coupler geometry:
    /// `kappa` is rescaled and `kappa_e` follows proportionally.
    pub fn with_q_loaded(&self, q: f64) -> Result<Self> {
        Error::check_positive("q", q)?;
        let kappa = self.omega_c / q;
        Self::new(self.omega_c, kappa, self.eta_kappa() * kappa)
    }

    /// Resonance frequency in Hz, for reporting.
    #[inline]
    pub fn f_c_hz(&self) -> f64 {
        angular_to_hz(self.omega_c)
    }
}
