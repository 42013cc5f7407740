//! Property-based invariants of the physics layer: drive/photon-number
//! inversions, cooling monotonicity, occupancy bookkeeping, thermometry
//! roundtrips, and constraint repair.

mod common;

use omc_core::bath::BathState;
use omc_core::{
    bose_occupancy, cooled_occupancy, cooling_curve, hot_bath, hz_to_angular,
    input_power_for_photons, intracavity_photons, temperature_from_occupancy, DesignBounds,
    DesignVector, DriveCondition, HotBathModel,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// A resonant pump fills the cavity at least as well as any detuned one.
    #[test]
    fn resonant_drive_maximizes_photon_number(
        detuning_mhz in -20e3f64..20e3,
        p_nw in 0.01f64..100.0,
    ) {
        let cavity = common::eight_shield_cavity();
        let p_in = p_nw * 1e-9;
        let resonant = intracavity_photons(
            &cavity,
            &DriveCondition::new(p_in, 0.0, 1.0).unwrap(),
        ).unwrap();
        let detuned = intracavity_photons(
            &cavity,
            &DriveCondition::new(p_in, hz_to_angular(detuning_mhz * 1e6), 1.0).unwrap(),
        ).unwrap();
        prop_assert!(detuned <= resonant * (1.0 + 1e-12));
    }

    /// Power-for-photons inverts photons-for-power to ppb accuracy across
    /// eight decades of drive and the full detuning range used anywhere.
    #[test]
    fn drive_inversion_roundtrip(
        n_c in 1e-3f64..1e5,
        detuning_ghz in -12.0f64..12.0,
    ) {
        let cavity = common::eight_shield_cavity();
        let detuning = hz_to_angular(detuning_ghz * 1e9);
        let p_in = input_power_for_photons(&cavity, detuning, n_c).unwrap();
        let back = intracavity_photons(
            &cavity,
            &DriveCondition::new(p_in, detuning, 1.0).unwrap(),
        ).unwrap();
        prop_assert!((back / n_c - 1.0).abs() < 1e-9);
    }

    /// More back-action always cools further at a fixed bath.
    #[test]
    fn stronger_backaction_cools_further(
        n_c in 0.1f64..1e4,
        boost in 1.0f64..100.0,
    ) {
        let mode = common::eight_shield_mode();
        let model = HotBathModel::reference_fit();
        let bath = hot_bath(&model, &mode, n_c, 0.0).unwrap();
        let gamma_om = hz_to_angular(1e3) * n_c.sqrt();
        let weak = cooled_occupancy(&bath, gamma_om, n_c, 0.0).unwrap();
        let strong = cooled_occupancy(&bath, gamma_om * boost, n_c, 0.0).unwrap();
        prop_assert!(strong.n_avg <= weak.n_avg);
        prop_assert!(strong.c_eff >= weak.c_eff);
    }

    /// Deep in the strong-cooperativity hot regime, occupancy times quantum
    /// cooperativity pins to one: n * C_eff = C (n_b - 1) / (n_b (C + 1)).
    #[test]
    fn occupancy_cooperativity_product_saturates(
        n_b in 20.0f64..1e4,
        c in 20.0f64..1e4,
    ) {
        let bath = BathState { n_p: n_b, gamma_p: 0.0, n_b, gamma_b: 1.0 };
        let cooled = cooled_occupancy(&bath, c, 1.0, 0.0).unwrap();
        let product = cooled.n_avg * cooled.c_eff;
        prop_assert!((0.9..=1.1).contains(&product), "product = {product}");
    }

    /// Occupancy <-> temperature is a clean bijection over the whole
    /// cryogenic range.
    #[test]
    fn bose_roundtrip_is_tight(f_ghz in 0.5f64..50.0, t_mk in 1.0f64..10e3) {
        let omega = hz_to_angular(f_ghz * 1e9);
        let t = t_mk * 1e-3;
        let n = bose_occupancy(omega, t).unwrap();
        let back = temperature_from_occupancy(omega, n).unwrap();
        prop_assert!((back / t - 1.0).abs() < 1e-10);
    }

    /// The fitted hot bath only ever gets hotter with drive.
    #[test]
    fn hot_bath_is_monotone_in_drive(x in 1e-3f64..1e6, step in 1.01f64..10.0) {
        let model = HotBathModel::reference_fit();
        let gamma_phi = common::eight_shield_mode().gamma_phi;
        prop_assert!(model.occupancy(x * step) >= model.occupancy(x));
        prop_assert!(
            model.fitted_linewidth(x * step, gamma_phi) >= model.fitted_linewidth(x, gamma_phi)
        );
    }

    /// Every sweep row satisfies the steady-state rate balance
    /// n (gamma_0 + gamma_p + gamma_om) = gamma_p n_p + gamma_0 n_0.
    #[test]
    fn sweep_rows_balance_rates(n_c in 1e-2f64..1e4) {
        let cavity = common::eight_shield_cavity();
        let mode = common::eight_shield_mode();
        let model = HotBathModel::reference_fit();
        let point = cooling_curve(&cavity, &mode, &model, &[n_c]).unwrap()[0];
        let outflow = point.n_avg * (mode.gamma_0 + point.gamma_p + point.gamma_om);
        let inflow = point.gamma_p * point.n_p + mode.gamma_0 * model.n_0;
        prop_assert!((outflow / inflow - 1.0).abs() < 1e-12);
    }

    /// Constraint repair lands every raw vector in the feasible set, even
    /// from far outside the box.
    #[test]
    fn repair_is_total(raw in prop::array::uniform9(-2e3f64..4e3)) {
        let bounds = DesignBounds::reference();
        let repaired = bounds.repair(&DesignVector::from_array(raw));
        prop_assert!(bounds.is_feasible(&repaired));
    }
}
