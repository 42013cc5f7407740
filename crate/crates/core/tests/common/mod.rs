//! Shared fixtures for the integration suites: the two reference devices
//! (a phonon-shielded resonator with hertz-level intrinsic damping and an
//! unshielded one that decays in microseconds) and their detection chain.
#![allow(dead_code)]

use omc_core::{DetectionChain, HotBathModel, MechanicalMode, OpticalCavity, PulsedDevice};

/// Waveguide-to-detector efficiency of the shielded device.
pub const ETA_CPL_EIGHT: f64 = 0.597;
/// Waveguide-to-detector efficiency of the unshielded device.
pub const ETA_CPL_ZERO: f64 = 0.607;

pub fn eight_shield_cavity() -> OpticalCavity {
    OpticalCavity::from_hz(193.4e12, 1.187e9, 181e6).unwrap()
}

pub fn eight_shield_mode() -> MechanicalMode {
    MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap()
}

pub fn zero_shield_cavity() -> OpticalCavity {
    OpticalCavity::from_hz(193.4e12, 1.11e9, 455e6).unwrap()
}

pub fn zero_shield_mode() -> MechanicalMode {
    MechanicalMode::from_hz(10.238e9, 21.8e3, 14.54e3, 1.18e6).unwrap()
}

/// Single-photon detector: 10% system efficiency, 0.6 counts/s dark rate,
/// no pump bleed-through.
pub fn detection() -> DetectionChain {
    DetectionChain::new(0.1, 0.6, 0.0).unwrap()
}

pub fn eight_shield_device() -> PulsedDevice {
    PulsedDevice::new(
        eight_shield_cavity(),
        eight_shield_mode(),
        HotBathModel::reference_fit(),
        detection(),
        ETA_CPL_EIGHT,
    )
    .unwrap()
}

pub fn zero_shield_device() -> PulsedDevice {
    let mode = zero_shield_mode();
    // The cold-bath occupancy tracks this device's higher mode frequency.
    let bath = HotBathModel {
        n_0: omc_core::bose_occupancy(mode.omega_m, 63e-3).unwrap(),
        ..HotBathModel::reference_fit()
    };
    PulsedDevice::new(zero_shield_cavity(), mode, bath, detection(), ETA_CPL_ZERO).unwrap()
}
