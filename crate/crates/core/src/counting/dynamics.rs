//! Intra-pulse occupancy dynamics: single-rate relaxation of the mode
//! against its baths plus optical damping or anti-damping.

use crate::bath::HotBathModel;
use crate::counting::DetuningCase;
use crate::error::{Error, Result};
use crate::mechanics::MechanicalMode;

/// Relative tolerance for the adaptive integrator. Chosen so that cubic
/// dense output between accepted steps stays below 1e-8 relative error,
/// the contract of [`pulse_occupancy_dynamics`].
const RTOL: f64 = 1e-10;
/// Absolute occupancy tolerance; well below any occupancy of interest.
const ATOL: f64 = 1e-16;
/// Hard step budget for one pulse integration.
const MAX_STEPS: usize = 2_000_000;

/// Occupancy of the mode as a function of time within one pulse.
///
/// Constant-coefficient pulses store the closed-form relaxation and evaluate
/// it exactly; time-dependent pulses store the adaptive integration nodes
/// and interpolate with cubic Hermite polynomials between them.
#[derive(Debug, Clone)]
pub struct OccupancyTrajectory {
    kind: Kind,
    duration: f64,
    steady_state: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Analytic {
        n_start: f64,
        n_ss: f64,
        gamma_tot: f64,
    },
    Sampled {
        times: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
    },
}

impl OccupancyTrajectory {
    /// Occupancy at time `t` from the pulse edge; `t` is clamped to the
    /// integrated window `[0, duration]`.
    pub fn occupancy_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration);
        match &self.kind {
            Kind::Analytic {
                n_start,
                n_ss,
                gamma_tot,
            } => n_ss + (n_start - n_ss) * (-gamma_tot * t).exp(),
            Kind::Sampled {
                times,
                values,
                derivs,
            } => {
                // Index of the first node strictly past t, then interpolate
                // on the segment ending there.
                let hi = times.partition_point(|&node| node <= t).min(times.len() - 1);
                if hi == 0 {
                    return values[0];
                }
                let lo = hi - 1;
                let h = times[hi] - times[lo];
                if h <= 0.0 {
                    return values[hi];
                }
                let s = (t - times[lo]) / h;
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * values[lo]
                    + (s3 - 2.0 * s2 + s) * h * derivs[lo]
                    + (-2.0 * s3 + 3.0 * s2) * values[hi]
                    + (s3 - s2) * h * derivs[hi]
            }
        }
    }

    /// Occupancy at the pulse's rising edge.
    pub fn initial_occupancy(&self) -> f64 {
        self.occupancy_at(0.0)
    }

    /// Occupancy at the end of the integrated window.
    pub fn final_occupancy(&self) -> f64 {
        self.occupancy_at(self.duration)
    }

    /// Length of the integrated window, s.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// The occupancy the trajectory relaxes toward if the pulse were held on
    /// indefinitely (with ramped baths, the asymptotic steady state).
    pub fn steady_state(&self) -> f64 {
        self.steady_state
    }

    /// `n` evenly spaced `(t, occupancy)` samples across the window,
    /// endpoints included. `n` is clamped to at least 2.
    pub fn sample_uniform(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let t = self.duration * i as f64 / (n - 1) as f64;
                (t, self.occupancy_at(t))
            })
            .collect()
    }
}

/// Integrate the mode occupancy across one pulse:
///
/// `dn/dt = gamma_0 (n_0 - n) + gamma_p(t) (n_p(t) - n) - gamma_om n`
///
/// on the red sideband, with `-gamma_om n` replaced by `+gamma_om (n + 1)`
/// on the blue sideband and dropped entirely on resonance. The hot bath is
/// evaluated at `x = n_c + beta p_in`.
///
/// With `bath_rise_tau = None` the hot bath is at its steady value for the
/// whole pulse and the closed-form exponential relaxation is returned. With
/// `Some(tau_p)`, `gamma_p(t)` and `n_p(t)` ramp from zero as
/// `1 - exp(-t / tau_p)` — a single-exponential stand-in for the bath's
/// turn-on — and the trajectory is integrated adaptively (embedded 5th/4th
/// order, relative tolerance 1e-10).
///
/// A blue-sideband drive whose anti-damping reaches the total damping has no
/// steady state and is rejected as unstable; with a ramped bath the test is
/// against the asymptotic damping.
#[allow(clippy::too_many_arguments)]
pub fn pulse_occupancy_dynamics(
    mode: &MechanicalMode,
    bath_model: &HotBathModel,
    n_c: f64,
    p_in: f64,
    gamma_om: f64,
    case: DetuningCase,
    n_start: f64,
    duration: f64,
    bath_rise_tau: Option<f64>,
) -> Result<OccupancyTrajectory> {
    Error::check_non_negative("n_c", n_c)?;
    Error::check_non_negative("p_in", p_in)?;
    Error::check_non_negative("gamma_om", gamma_om)?;
    Error::check_non_negative("n_start", n_start)?;
    Error::check_positive("duration", duration)?;

    let x = bath_model.drive_variable(n_c, p_in);
    let n_p = bath_model.occupancy(x);
    let gamma_p = bath_model.damping(x, mode.gamma_phi);
    let (damp, pump_source) = match case {
        DetuningCase::RedSideband => (gamma_om, 0.0),
        DetuningCase::BlueSideband => (-gamma_om, gamma_om),
        DetuningCase::Resonant => (0.0, 0.0),
    };

    // Asymptotic coefficients decide stability for both pulse shapes.
    let gamma_tot = mode.gamma_0 + gamma_p + damp;
    let source = mode.gamma_0 * bath_model.n_0 + gamma_p * n_p + pump_source;
    if gamma_tot <= 0.0 && (source > 0.0 || gamma_tot < 0.0) {
        return Err(Error::UnstableBlueDrive {
            gain: gamma_om,
            loss: mode.gamma_0 + gamma_p,
        });
    }
    let steady_state = if gamma_tot > 0.0 {
        source / gamma_tot
    } else {
        n_start
    };

    match bath_rise_tau {
        None => Ok(OccupancyTrajectory {
            kind: Kind::Analytic {
                n_start,
                n_ss: steady_state,
                gamma_tot,
            },
            duration,
            steady_state,
        }),
        Some(tau_p) => {
            Error::check_positive("bath_rise_tau", tau_p)?;
            let rhs = |t: f64, n: f64| {
                let ramp = 1.0 - (-t / tau_p).exp();
                mode.gamma_0 * (bath_model.n_0 - n)
                    + ramp * gamma_p * (ramp * n_p - n)
                    - damp * n
                    + pump_source
            };
            let (times, values, derivs) = integrate_embedded(rhs, duration, n_start)?;
            Ok(OccupancyTrajectory {
                kind: Kind::Sampled {
                    times,
                    values,
                    derivs,
                },
                duration,
                steady_state,
            })
        }
    }
}

/// Dormand–Prince 5(4) with step control and first-same-as-last reuse.
/// Returns node times, values, and derivatives for dense cubic output.
fn integrate_embedded<F>(f: F, t_end: f64, y0: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, f64) -> f64,
{
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, y);
    let mut times = vec![t];
    let mut values = vec![y];
    let mut derivs = vec![k1];

    // A ceiling on the step keeps dense-output nodes frequent even when the
    // dynamics are much slower than the pulse.
    let h_max = t_end / 16.0;
    let mut h = (t_end * 1e-4).min(h_max);

    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok((times, values, derivs));
        }
        h = h.min(t_end - t);

        let k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
        let k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 * k1 + 9.0 * k2) / 40.0);
        let k4 = f(
            t + 4.0 * h / 5.0,
            y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3),
        );
        let k5 = f(
            t + 8.0 * h / 9.0,
            y + h
                * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3
                    - 212.0 / 729.0 * k4),
        );
        let k6 = f(
            t + h,
            y + h
                * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3
                    + 49.0 / 176.0 * k4
                    - 5103.0 / 18656.0 * k5),
        );
        let y5 = y
            + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4
                - 2187.0 / 6784.0 * k5
                + 11.0 / 84.0 * k6);
        let k7 = f(t + h, y5);
        let err_est = h
            * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4
                - 17253.0 / 339200.0 * k5
                + 22.0 / 525.0 * k6
                - 1.0 / 40.0 * k7);
        let scale = ATOL + RTOL * y.abs().max(y5.abs());
        let err = (err_est / scale).abs();

        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
            times.push(t);
            values.push(y);
            derivs.push(k1);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(h_max);
    }
    Err(Error::IntegrationStalled {
        max_steps: MAX_STEPS,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;

    fn eight_shield_mode() -> MechanicalMode {
        MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap()
    }

    #[test]
    fn undriven_mode_at_base_occupancy_stays_put() {
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let traj = pulse_occupancy_dynamics(
            &mode,
            &bath,
            0.0,
            0.0,
            0.0,
            DetuningCase::Resonant,
            bath.n_0,
            10e-6,
            None,
        )
        .unwrap();
        for (_, n) in traj.sample_uniform(20) {
            assert!((n - bath.n_0).abs() < 1e-18);
        }
    }

    #[test]
    fn adaptive_integration_matches_closed_form() {
        // At x = 0 the hot bath contributes nothing, so the ramped path
        // integrates exactly the same constant-coefficient equation that the
        // analytic path solves in closed form.
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let gamma_om = hz_to_angular(50e3);
        let analytic = pulse_occupancy_dynamics(
            &mode,
            &bath,
            0.0,
            0.0,
            gamma_om,
            DetuningCase::RedSideband,
            1.0,
            10e-6,
            None,
        )
        .unwrap();
        let integrated = pulse_occupancy_dynamics(
            &mode,
            &bath,
            0.0,
            0.0,
            gamma_om,
            DetuningCase::RedSideband,
            1.0,
            10e-6,
            Some(1.0e-6),
        )
        .unwrap();
        let mut worst = 0.0_f64;
        for (t, n_exact) in analytic.sample_uniform(400) {
            let n_num = integrated.occupancy_at(t);
            worst = worst.max((n_num - n_exact).abs());
        }
        assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn heating_pulse_rises_monotonically_toward_steady_state() {
        // Reference red-sideband readout point: n_c = 60 on the 8-shield
        // device. The mode starts cold and heats toward its driven steady
        // state without overshooting.
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let gamma_om = hz_to_angular(470.8e3 * 0.6); // 60 photons
        let traj = pulse_occupancy_dynamics(
            &mode,
            &bath,
            60.0,
            0.0,
            gamma_om,
            DetuningCase::RedSideband,
            bath.n_0,
            10e-6,
            None,
        )
        .unwrap();
        let samples = traj.sample_uniform(200);
        for pair in samples.windows(2) {
            assert!(pair[1].1 >= pair[0].1, "trajectory dipped");
        }
        assert!(traj.final_occupancy() <= traj.steady_state() * (1.0 + 1e-12));
        assert!(traj.final_occupancy() > 0.5 * traj.steady_state());
    }

    #[test]
    fn ramped_bath_slows_the_initial_heating() {
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let gamma_om = hz_to_angular(470.8e3 * 0.6);
        let instant = pulse_occupancy_dynamics(
            &mode,
            &bath,
            60.0,
            0.0,
            gamma_om,
            DetuningCase::RedSideband,
            bath.n_0,
            10e-6,
            None,
        )
        .unwrap();
        let ramped = pulse_occupancy_dynamics(
            &mode,
            &bath,
            60.0,
            0.0,
            gamma_om,
            DetuningCase::RedSideband,
            bath.n_0,
            10e-6,
            Some(2e-6),
        )
        .unwrap();
        // Early on, the ramped bath has not switched on yet.
        assert!(ramped.occupancy_at(0.5e-6) < instant.occupancy_at(0.5e-6));
        // Both approach the same asymptote.
        assert!((ramped.steady_state() - instant.steady_state()).abs() < 1e-12);
    }

    #[test]
    fn runaway_blue_drive_is_rejected() {
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let gamma_om = hz_to_angular(1e3); // far above gamma_0/2pi = 8.28 Hz
        let err = pulse_occupancy_dynamics(
            &mode,
            &bath,
            0.0,
            0.0,
            gamma_om,
            DetuningCase::BlueSideband,
            0.0,
            10e-6,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnstableBlueDrive { .. }));
    }

    #[test]
    fn weak_blue_drive_settles_above_the_bath() {
        let mode = eight_shield_mode();
        let bath = HotBathModel::reference_fit();
        let gamma_om = mode.gamma_0 * 0.5;
        let traj = pulse_occupancy_dynamics(
            &mode,
            &bath,
            0.0,
            0.0,
            gamma_om,
            DetuningCase::BlueSideband,
            0.0,
            1e3,
            None,
        )
        .unwrap();
        // n_ss = (gamma_0 n_0 + gamma_om) / (gamma_0 - gamma_om), dominated
        // by the vacuum term: roughly gamma_om / (gamma_0 - gamma_om) = 1.
        let expected = (mode.gamma_0 * bath.n_0 + gamma_om) / (mode.gamma_0 - gamma_om);
        assert!((traj.steady_state() - expected).abs() < 1e-12 * expected);
    }
}
