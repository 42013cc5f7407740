//! Detected count rates for the three canonical pump placements.

use std::f64::consts::TAU;

use crate::cavity::OpticalCavity;
use crate::counting::{DetectionChain, DetuningCase};
use crate::error::{Error, Result};
use crate::mechanics::MechanicalMode;

/// Detected sideband rate per phonon,
/// `gamma_sb0 = eta_det * eta_cpl * eta_kappa * gamma_om / 2 pi`, counts/s.
///
/// One phonon scatters pump photons into the sideband at the cyclic rate
/// `gamma_om / 2 pi`; each such photon leaves the cavity through the
/// waveguide port with probability `eta_kappa`, reaches the fiber with
/// probability `eta_cpl`, and is detected with probability `eta_det`.
pub fn detected_rate_per_phonon(
    chain: &DetectionChain,
    cavity: &OpticalCavity,
    eta_cpl: f64,
    gamma_om: f64,
) -> Result<f64> {
    Error::check_fraction("eta_cpl", eta_cpl)?;
    Error::check_non_negative("gamma_om", gamma_om)?;
    Ok(chain.eta_det * eta_cpl * cavity.eta_kappa() * gamma_om / TAU)
}

/// Sideband-resolution suppression factor `(kappa / 2 omega_m)^2` that
/// scales the scattered rate when the pump sits on resonance.
pub fn resonant_suppression(cavity: &OpticalCavity, mode: &MechanicalMode) -> f64 {
    let ratio = cavity.kappa / (2.0 * mode.omega_m);
    ratio * ratio
}

/// Total detected count rate at occupancy `n_avg`, counts/s:
///
/// * red sideband: `dark + bleed + gamma_sb0 * n_avg`
/// * blue sideband: `dark + bleed + gamma_sb0 * (n_avg + 1)`
/// * resonant: `dark + bleed + gamma_sb0 * (kappa / 2 omega_m)^2 * n_avg`
///
/// Red-detuned counting is background-free thermometry of `n_avg`; the blue
/// side adds the spontaneous `+1` of vacuum scattering; on resonance both
/// sidebands fall far outside the cavity line and the detected signal is
/// suppressed by the sideband-resolution factor.
pub fn sideband_count_rate(
    chain: &DetectionChain,
    cavity: &OpticalCavity,
    mode: &MechanicalMode,
    eta_cpl: f64,
    gamma_om: f64,
    n_avg: f64,
    case: DetuningCase,
) -> Result<f64> {
    Error::check_non_negative("n_avg", n_avg)?;
    let gamma_sb0 = detected_rate_per_phonon(chain, cavity, eta_cpl, gamma_om)?;
    let signal = match case {
        DetuningCase::RedSideband => gamma_sb0 * n_avg,
        DetuningCase::BlueSideband => gamma_sb0 * (n_avg + 1.0),
        DetuningCase::Resonant => gamma_sb0 * resonant_suppression(cavity, mode) * n_avg,
    };
    Ok(chain.background_rate() + signal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;

    fn eight_shield() -> (OpticalCavity, MechanicalMode) {
        (
            OpticalCavity::from_hz(193.4e12, 1.187e9, 181e6).unwrap(),
            MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap(),
        )
    }

    #[test]
    fn blue_vacuum_rate_is_the_per_phonon_rate() {
        let (cavity, mode) = eight_shield();
        let chain = DetectionChain::new(0.1, 0.6, 2.0).unwrap();
        let gamma_om = hz_to_angular(470.8e3);
        let gamma_sb0 = detected_rate_per_phonon(&chain, &cavity, 0.6, gamma_om).unwrap();
        let blue = sideband_count_rate(
            &chain,
            &cavity,
            &mode,
            0.6,
            gamma_om,
            0.0,
            DetuningCase::BlueSideband,
        )
        .unwrap();
        assert!((blue - chain.background_rate() - gamma_sb0).abs() < 1e-9 * gamma_sb0);
        // Frozen from direct evaluation: 0.1 * 0.6 * (181/1187) * 470.8e3.
        assert!((gamma_sb0 - 4.307e3).abs() < 10.0, "gamma_sb0 = {gamma_sb0}");
    }

    #[test]
    fn red_vacuum_rate_is_background_only() {
        let (cavity, mode) = eight_shield();
        let chain = DetectionChain::new(0.1, 0.0, 0.0).unwrap();
        let rate = sideband_count_rate(
            &chain,
            &cavity,
            &mode,
            0.6,
            hz_to_angular(470.8e3),
            0.0,
            DetuningCase::RedSideband,
        )
        .unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn resonant_suppression_factor_matches_frozen_value() {
        // Frozen from direct evaluation: (1.187 / (2 * 10.02))^2 = 3.51e-3.
        let (cavity, mode) = eight_shield();
        let s = resonant_suppression(&cavity, &mode);
        assert!((s - 3.51e-3).abs() < 2e-5, "suppression = {s}");
    }

    #[test]
    fn blue_exceeds_red_by_exactly_the_per_phonon_rate() {
        let (cavity, mode) = eight_shield();
        let chain = DetectionChain::new(0.08, 0.6, 1.0).unwrap();
        let gamma_om = hz_to_angular(100e3);
        let gamma_sb0 = detected_rate_per_phonon(&chain, &cavity, 0.597, gamma_om).unwrap();
        for n in [0.0, 0.3, 2.0] {
            let red = sideband_count_rate(
                &chain,
                &cavity,
                &mode,
                0.597,
                gamma_om,
                n,
                DetuningCase::RedSideband,
            )
            .unwrap();
            let blue = sideband_count_rate(
                &chain,
                &cavity,
                &mode,
                0.597,
                gamma_om,
                n,
                DetuningCase::BlueSideband,
            )
            .unwrap();
            assert!((blue - red - gamma_sb0).abs() < 1e-12 * blue);
        }
    }

    #[test]
    fn negative_occupancy_is_rejected() {
        let (cavity, mode) = eight_shield();
        let chain = DetectionChain::new(0.1, 0.6, 2.0).unwrap();
        assert!(sideband_count_rate(
            &chain,
            &cavity,
            &mode,
            0.6,
            1.0,
            -0.1,
            DetuningCase::RedSideband
        )
        .is_err());
    }
}
