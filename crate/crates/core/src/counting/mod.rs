//! Pulsed photon-counting experiments: sideband count rates, Poisson
//! measurement simulation, intra-pulse occupancy dynamics, ringdown
//! thermometry, and the estimators that invert counts back into physical
//! quantities.
//!
//! The measurement model is a single-photon detector watching the cavity's
//! sideband-filtered output while the pump is pulsed. Every detected rate is
//! built from three pieces: a dark-count floor, pump bleed-through past the
//! filters, and the phonon-proportional sideband scattering rate.

mod dynamics;
mod estimators;
mod histogram;
mod rates;
mod ringdown;
mod schedule;
mod sim;

pub use dynamics::{pulse_occupancy_dynamics, OccupancyTrajectory};
pub use estimators::{
    average_occupancy_from_counts, calibrate_sb0, estimate_base_occupancy,
    g0_from_backaction_slope, occupancy_from_counts, BaseOccupancyEstimate, EstimateKind,
    Sb0Calibration,
};
pub use histogram::BinnedCounts;
pub use rates::{detected_rate_per_phonon, resonant_suppression, sideband_count_rate};
pub use ringdown::{fit_ringdown, simulate_ringdown, RingdownPoint, RingdownResult};
pub use schedule::PulseSchedule;
pub use sim::simulate_counts;

use crate::bath::HotBathModel;
use crate::cavity::OpticalCavity;
use crate::error::{Error, Result};
use crate::mechanics::MechanicalMode;

/// The detection path from the chip to the counter: everything multiplicative
/// is folded into one efficiency, everything additive into two background
/// rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain {
    /// Off-chip detection efficiency, including filter transmission and the
    /// detector's quantum efficiency. Dimensionless, in (0, 1].
    pub eta_det: f64,
    /// Detector dark-count rate, counts/s.
    pub dark_rate: f64,
    /// Pump bleed-through rate past the sideband filters, counts/s.
    pub pump_bleed_rate: f64,
}

impl DetectionChain {
    /// Build a detection chain, validating the efficiency and rates.
    pub fn new(eta_det: f64, dark_rate: f64, pump_bleed_rate: f64) -> Result<Self> {
        Error::check_fraction("eta_det", eta_det)?;
        Error::check_non_negative("dark_rate", dark_rate)?;
        Error::check_non_negative("pump_bleed_rate", pump_bleed_rate)?;
        Ok(Self {
            eta_det,
            dark_rate,
            pump_bleed_rate,
        })
    }

    /// Total phonon-independent background rate, counts/s.
    pub fn background_rate(&self) -> f64 {
        self.dark_rate + self.pump_bleed_rate
    }
}

/// Where the pump sits relative to the cavity, in the resolved-sideband
/// picture. The detuning convention is `delta = omega_c - omega_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningCase {
    /// Pump a mechanical frequency below the cavity (`delta = +omega_m`).
    /// Anti-Stokes scattering upconverts phonons into cavity photons, so the
    /// count rate is proportional to the occupancy and the mode is damped.
    RedSideband,
    /// Pump a mechanical frequency above the cavity (`delta = -omega_m`).
    /// Stokes scattering emits a photon per downconversion, so the count
    /// rate is proportional to occupancy plus one and the mode is
    /// anti-damped.
    BlueSideband,
    /// Pump on resonance (`delta = 0`). Both sidebands are suppressed by the
    /// sideband-resolution factor `(kappa / 2 omega_m)^2` and back-action
    /// damping cancels to leading order.
    Resonant,
}

/// One complete pulsed-counting experiment: the optics, the mechanics, the
/// hot-bath response, the detection path, and the fiber-to-chip coupling
/// that connects them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedDevice {
    /// Optical cavity being pumped.
    pub cavity: OpticalCavity,
    /// Mechanical mode being counted.
    pub mode: MechanicalMode,
    /// Optical-absorption bath laws for this device.
    pub bath: HotBathModel,
    /// Detection efficiency and backgrounds.
    pub chain: DetectionChain,
    /// Fiber-to-chip (waveguide) coupling efficiency, in (0, 1].
    pub eta_cpl: f64,
}

impl PulsedDevice {
    /// Bundle a device, validating the coupling efficiency.
    pub fn new(
        cavity: OpticalCavity,
        mode: MechanicalMode,
        bath: HotBathModel,
        chain: DetectionChain,
        eta_cpl: f64,
    ) -> Result<Self> {
        Error::check_fraction("eta_cpl", eta_cpl)?;
        Ok(Self {
            cavity,
            mode,
            bath,
            chain,
            eta_cpl,
        })
    }
}
