//! Pulsed ringdown: heat the mode with a red-detuned readout pulse, let it
//! decay in the dark for a variable delay, and read the surviving occupancy
//! with the next pulse. The decay of the pulse-start occupancy versus delay
//! is a direct, background-free measurement of the intrinsic energy decay
//! rate.

use crate::cooling::parametric_rate;
use crate::counting::{
    detected_rate_per_phonon, pulse_occupancy_dynamics, simulate_counts, DetuningCase,
    PulseSchedule, PulsedDevice,
};
use crate::drive::input_power_for_photons;
use crate::error::{Error, Result};
use crate::fit::fit_exponential_decay;
use crate::rng::derive_seed;

/// One delay point of a ringdown data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingdownPoint {
    /// Inter-pulse delay, s.
    pub tau_off: f64,
    /// Occupancy at the start of the readout pulse, estimated from the
    /// pulse's first counting bin (so it carries that bin's heating bias,
    /// which is common to all delays and drops out of the decay fit).
    pub n_i: f64,
    /// One-sigma counting uncertainty on `n_i`. Zero marks noiseless
    /// synthetic data.
    pub n_i_sigma: f64,
    /// Occupancy at the end of the pulse, estimated from the last bin.
    pub n_f: f64,
}

/// Fitted ringdown: the intrinsic decay rate and the quality factor it
/// implies.
#[derive(Debug, Clone, PartialEq)]
pub struct RingdownResult {
    /// Fitted intrinsic energy decay rate, rad/s.
    pub gamma_0_hat: f64,
    /// One-sigma uncertainty on `gamma_0_hat`, rad/s.
    pub gamma_0_sigma: f64,
    /// Derived mechanical quality factor `omega_m / gamma_0_hat`.
    pub q_m_hat: f64,
    /// Fitted decaying amplitude (occupancy units).
    pub amplitude: f64,
    /// Fitted long-delay floor (occupancy units).
    pub baseline: f64,
    /// The data the fit consumed.
    pub points: Vec<RingdownPoint>,
}

impl RingdownResult {
    /// 95% confidence interval on the decay rate, rad/s.
    pub fn gamma_0_ci95(&self) -> (f64, f64) {
        (
            self.gamma_0_hat - 1.96 * self.gamma_0_sigma,
            self.gamma_0_hat + 1.96 * self.gamma_0_sigma,
        )
    }
}

/// Steady pulse-train cycle at one delay: the pulse maps the start occupancy
/// affinely (`n_f = a + b n_i`, exact for this linear ODE), the dark decay
/// maps it back, and the train settles on the fixed point of the composite.
/// Returns `(n_i, n_f)` at the cycle's fixed point.
fn pulse_train_fixed_point(
    device: &PulsedDevice,
    schedule: &PulseSchedule,
    n_c_peak: f64,
    p_in: f64,
    gamma_om: f64,
) -> Result<(f64, f64)> {
    let traj_from = |n_start: f64| {
        pulse_occupancy_dynamics(
            &device.mode,
            &device.bath,
            n_c_peak,
            p_in,
            gamma_om,
            DetuningCase::RedSideband,
            n_start,
            schedule.tau_pulse,
            None,
        )
    };
    let a = traj_from(0.0)?.final_occupancy();
    let b = traj_from(1.0)?.final_occupancy() - a;
    let n_0 = device.bath.n_0;
    let decay = (-device.mode.gamma_0 * schedule.tau_off).exp();
    let n_i = (a * decay + n_0 * (1.0 - decay)) / (1.0 - b * decay);
    Ok((n_i, a + b * n_i))
}

/// Simulate a complete ringdown experiment: for each delay in `tau_offs`,
/// run the pulse train to its steady cycle, generate Poisson counts for the
/// readout pulse, and re-estimate the start- and end-of-pulse occupancies
/// from the first and last counting bins.
///
/// The readout is red-detuned with `n_c_peak` intracavity photons; the
/// corresponding on-chip power feeds the hot-bath drive variable. Each delay
/// uses an independent seed substream derived from `seed`, so the data set
/// is deterministic and order-independent.
pub fn simulate_ringdown(
    device: &PulsedDevice,
    schedule: &PulseSchedule,
    tau_offs: &[f64],
    n_c_peak: f64,
    seed: u64,
) -> Result<Vec<RingdownPoint>> {
    Error::check_positive("n_c_peak", n_c_peak)?;
    if tau_offs.is_empty() {
        return Err(Error::MissingData("ringdown needs at least one delay".into()));
    }
    let gamma_om = parametric_rate(&device.mode, &device.cavity, n_c_peak)?;
    let p_in = input_power_for_photons(&device.cavity, device.mode.omega_m, n_c_peak)?;
    let gamma_sb0 =
        detected_rate_per_phonon(&device.chain, &device.cavity, device.eta_cpl, gamma_om)?;
    if gamma_sb0 <= 0.0 {
        return Err(Error::NonPositive {
            name: "detected rate per phonon",
            value: gamma_sb0,
        });
    }
    let background = device.chain.background_rate();

    let mut points = Vec::with_capacity(tau_offs.len());
    for (index, &tau_off) in tau_offs.iter().enumerate() {
        let sched = schedule.with_tau_off(tau_off)?;
        let (n_i, _) = pulse_train_fixed_point(device, &sched, n_c_peak, p_in, gamma_om)?;
        let traj = pulse_occupancy_dynamics(
            &device.mode,
            &device.bath,
            n_c_peak,
            p_in,
            gamma_om,
            DetuningCase::RedSideband,
            n_i,
            sched.tau_pulse,
            None,
        )?;
        let rate = |t: f64| background + gamma_sb0 * traj.occupancy_at(t);
        let counts = simulate_counts(rate, &sched, derive_seed(seed, index as u64))?;

        let exposure = sched.tau_bin * sched.n_pulses as f64;
        let estimate = |bin: usize| {
            let c = counts.counts()[bin] as f64;
            let n_hat = (counts.rate(bin) - background) / gamma_sb0;
            // Poisson error on the bin count propagated through the same
            // normalization.
            let sigma = c.max(1.0).sqrt() / (exposure * gamma_sb0);
            (n_hat, sigma)
        };
        let (n_i_hat, n_i_sigma) = estimate(0);
        let (n_f_hat, _) = estimate(counts.n_bins() - 1);
        points.push(RingdownPoint {
            tau_off,
            n_i: n_i_hat,
            n_i_sigma,
            n_f: n_f_hat,
        });
    }
    Ok(points)
}

/// Fit the ringdown decay `n_i(tau_off) = baseline + amplitude *
/// exp(-gamma_0 tau_off)` and derive the quality factor `omega_m /
/// gamma_0_hat`. Points are inverse-variance weighted when every point
/// carries a positive `n_i_sigma`; otherwise the fit is unweighted.
pub fn fit_ringdown(points: &[RingdownPoint], omega_m: f64) -> Result<RingdownResult> {
    Error::check_positive("omega_m", omega_m)?;
    let mut distinct: Vec<f64> = points.iter().map(|p| p.tau_off).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| *a == *b);
    if distinct.len() < 4 {
        return Err(Error::DegenerateFit(
            "ringdown fit needs at least 4 distinct delays".into(),
        ));
    }
    let data: Vec<(f64, f64)> = points.iter().map(|p| (p.tau_off, p.n_i)).collect();
    let weights: Option<Vec<f64>> = if points.iter().all(|p| p.n_i_sigma > 0.0) {
        Some(points.iter().map(|p| 1.0 / p.n_i_sigma).collect())
    } else {
        None
    };
    let fit = fit_exponential_decay(&data, weights.as_deref())?;
    let gamma_0_sigma = fit.std_errors()[1];
    Ok(RingdownResult {
        gamma_0_hat: fit.rate,
        gamma_0_sigma,
        q_m_hat: omega_m / fit.rate,
        amplitude: fit.amplitude,
        baseline: fit.offset,
        points: points.to_vec(),
    })
}
