//! Optical drive: pump power, detuning, and the steady-state intracavity
//! photon number it builds up.

use crate::cavity::OpticalCavity;
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// A continuous-wave pump tone applied through the feed waveguide.
///
/// `p_in` is the optical power *in the on-chip waveguide*, i.e. after the
/// single-pass fiber-to-chip efficiency `eta_cpl` has already been paid.
/// `eta_cpl` is carried along because photon-counting detection efficiencies
/// need it; it does not enter the intracavity photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCondition {
    /// Pump power in the coupling waveguide, W.
    pub p_in: f64,
    /// Pump detuning `delta = omega_c - omega_p`, rad/s. Positive values put
    /// the pump below the cavity (red side); `delta = +omega_m` drives the
    /// anti-Stokes cooling process.
    pub detuning: f64,
    /// Single-pass fiber-to-waveguide power efficiency, in (0, 1].
    pub eta_cpl: f64,
}

impl DriveCondition {
    /// Build a drive condition, validating power and efficiency.
    pub fn new(p_in: f64, detuning: f64, eta_cpl: f64) -> Result<Self> {
        Error::check_non_negative("p_in", p_in)?;
        Error::check_finite("detuning", detuning)?;
        Error::check_fraction("eta_cpl", eta_cpl)?;
        Ok(Self {
            p_in,
            detuning,
            eta_cpl,
        })
    }

    /// Absolute pump frequency `omega_p = omega_c - detuning`, rad/s.
    ///
    /// Errors when the requested detuning would put the pump at or below
    /// zero frequency.
    pub fn pump_frequency(&self, cavity: &OpticalCavity) -> Result<f64> {
        let omega_p = cavity.omega_c - self.detuning;
        if omega_p <= 0.0 {
            return Err(Error::PumpFrequencyNotPositive { omega_p });
        }
        Ok(omega_p)
    }
}

/// Steady-state intracavity photon number for a pump of power `drive.p_in`
/// detuned by `drive.detuning` from resonance:
///
/// `n_c = (P_in / hbar·omega_p) · kappa_e / (delta^2 + (kappa/2)^2)`
///
/// Linear in the pump power and maximized at zero detuning.
pub fn intracavity_photons(cavity: &OpticalCavity, drive: &DriveCondition) -> Result<f64> {
    let omega_p = drive.pump_frequency(cavity)?;
    let half_kappa = 0.5 * cavity.kappa;
    let lorentzian = cavity.kappa_e / (drive.detuning * drive.detuning + half_kappa * half_kappa);
    Ok(drive.p_in / (HBAR * omega_p) * lorentzian)
}

/// Pump power (W, in the waveguide) required to hold `n_c` photons in the
/// cavity at the given detuning — the exact inverse of
/// [`intracavity_photons`].
pub fn input_power_for_photons(cavity: &OpticalCavity, detuning: f64, n_c: f64) -> Result<f64> {
    Error::check_finite("detuning", detuning)?;
    Error::check_non_negative("n_c", n_c)?;
    let omega_p = cavity.omega_c - detuning;
    if omega_p <= 0.0 {
        return Err(Error::PumpFrequencyNotPositive { omega_p });
    }
    let half_kappa = 0.5 * cavity.kappa;
    Ok(n_c * HBAR * omega_p * (detuning * detuning + half_kappa * half_kappa) / cavity.kappa_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;

    fn device() -> OpticalCavity {
        OpticalCavity::from_hz(193.4e12, 1.187e9, 181e6).unwrap()
    }

    #[test]
    fn photon_number_is_linear_in_power() {
        let cavity = device();
        let base = intracavity_photons(
            &cavity,
            &DriveCondition::new(1e-9, hz_to_angular(10.02e9), 0.6).unwrap(),
        )
        .unwrap();
        let tenfold = intracavity_photons(
            &cavity,
            &DriveCondition::new(1e-8, hz_to_angular(10.02e9), 0.6).unwrap(),
        )
        .unwrap();
        assert!((tenfold - 10.0 * base).abs() <= 1e-12 * tenfold);
    }

    #[test]
    fn resonant_drive_holds_the_most_photons() {
        let cavity = device();
        let resonant = intracavity_photons(
            &cavity,
            &DriveCondition::new(1e-9, 0.0, 0.6).unwrap(),
        )
        .unwrap();
        for detuning_hz in [-10.02e9, -1e9, 1e6, 1e9, 10.02e9] {
            let detuned = intracavity_photons(
                &cavity,
                &DriveCondition::new(1e-9, hz_to_angular(detuning_hz), 0.6).unwrap(),
            )
            .unwrap();
            assert!(detuned < resonant);
        }
    }

    #[test]
    fn resonant_nanowatt_photon_number() {
        // Frozen from direct evaluation: 1 nW on resonance holds
        // n_c = (1e-9 / 1.2815e-19) * kappa_e / (kappa/2)^2 = 0.638 photons
        // in a 1.187 GHz-wide cavity at 193.4 THz.
        let cavity = device();
        let n_c = intracavity_photons(
            &cavity,
            &DriveCondition::new(1e-9, 0.0, 0.6).unwrap(),
        )
        .unwrap();
        assert!((n_c - 0.6382).abs() < 5e-4, "n_c = {n_c}");
    }

    #[test]
    fn pump_below_zero_frequency_is_rejected() {
        let cavity = device();
        let drive = DriveCondition::new(1e-9, cavity.omega_c * 1.5, 0.6).unwrap();
        assert!(matches!(
            intracavity_photons(&cavity, &drive),
            Err(Error::PumpFrequencyNotPositive { .. })
        ));
        assert!(input_power_for_photons(&cavity, cavity.omega_c * 1.5, 1.0).is_err());
    }

    #[test]
    fn forward_inverse_roundtrip_is_tight() {
        let cavity = device();
        let detuning = hz_to_angular(10.02e9);
        for n_c in [1e-3, 1.0, 60.0, 1e3, 1e6] {
            let p = input_power_for_photons(&cavity, detuning, n_c).unwrap();
            let back = intracavity_photons(
                &cavity,
                &DriveCondition::new(p, detuning, 0.6).unwrap(),
            )
            .unwrap();
            assert!((back - n_c).abs() <= 1e-9 * n_c, "n_c={n_c} back={back}");
        }
    }

    #[test]
    fn sideband_drive_power_for_kilophoton() {
        // Frozen from direct evaluation: holding 1000 photons with the pump
        // parked a mechanical frequency below resonance takes 448 uW.
        let cavity = device();
        let p = input_power_for_photons(&cavity, hz_to_angular(10.02e9), 1000.0).unwrap();
        assert!((p - 4.48e-4).abs() < 0.005e-4, "p = {p}");
    }
}
