//! Estimators that invert count histograms back into physical quantities:
//! per-phonon rate calibration, occupancy thermometry, base-temperature
//! extrapolation, and vacuum coupling from the back-action slope.

use crate::bose::temperature_from_occupancy;
use crate::cavity::OpticalCavity;
use crate::counting::{BinnedCounts, DetectionChain, DetuningCase};
use crate::error::{Error, Result};
use crate::fit::fit_exponential_decay;

/// Calibrated detected rate per phonon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sb0Calibration {
    /// Estimated per-phonon detected rate, counts/s.
    pub gamma_sb0_hat: f64,
    /// One-sigma counting uncertainty, counts/s.
    pub sigma: f64,
    /// Set when the backgrounds exceed the extracted signal, i.e. the
    /// calibration is noise-dominated and should not be trusted.
    pub low_snr: bool,
}

/// Calibrate the per-phonon rate from a blue-detuned histogram whose pulses
/// begin with the mode near its base occupancy (`n <= n_0 << 1`): the
/// first-bin rate above backgrounds is the spontaneous vacuum-scattering
/// rate, which is one phonon's worth of signal.
///
/// The estimate inherits the first bin's residual occupancy as a relative
/// bias of order `n_0`, negligible for a millikelvin mode.
pub fn calibrate_sb0(counts: &BinnedCounts, chain: &DetectionChain) -> Result<Sb0Calibration> {
    let background = chain.background_rate();
    let raw = counts.rate(0);
    let signal = raw - background;
    let exposure = counts.tau_bin() * counts.n_pulses() as f64;
    let sigma = (counts.counts()[0] as f64).max(1.0).sqrt() / exposure;
    Ok(Sb0Calibration {
        gamma_sb0_hat: signal,
        sigma,
        low_snr: signal <= background,
    })
}

/// Per-bin occupancy estimates from a histogram:
/// `n_hat = (rate - backgrounds) / gamma_sb0`, minus one on the blue side
/// where vacuum scattering contributes a full phonon's worth of counts.
///
/// For resonant data, pass the resonant rate per phonon (the sideband rate
/// scaled by [`resonant_suppression`](crate::counting::resonant_suppression));
/// the arithmetic is then identical to the red side.
///
/// Estimates are deliberately not clamped at zero: clamping would bias the
/// mean of noisy estimates upward, breaking averaging over repeated runs.
pub fn occupancy_from_counts(
    counts: &BinnedCounts,
    gamma_sb0: f64,
    chain: &DetectionChain,
    case: DetuningCase,
) -> Result<Vec<f64>> {
    Error::check_positive("gamma_sb0", gamma_sb0)?;
    let background = chain.background_rate();
    let vacuum = match case {
        DetuningCase::BlueSideband => 1.0,
        DetuningCase::RedSideband | DetuningCase::Resonant => 0.0,
    };
    Ok((0..counts.n_bins())
        .map(|i| (counts.rate(i) - background) / gamma_sb0 - vacuum)
        .collect())
}

/// Single pooled occupancy estimate over the whole histogram, appropriate
/// when the occupancy is steady across the pulse. Pooling counts first is
/// the minimum-variance way to combine the bins.
pub fn average_occupancy_from_counts(
    counts: &BinnedCounts,
    gamma_sb0: f64,
    chain: &DetectionChain,
    case: DetuningCase,
) -> Result<f64> {
    Error::check_positive("gamma_sb0", gamma_sb0)?;
    let vacuum = match case {
        DetuningCase::BlueSideband => 1.0,
        DetuningCase::RedSideband | DetuningCase::Resonant => 0.0,
    };
    Ok((counts.mean_rate() - chain.background_rate()) / gamma_sb0 - vacuum)
}

/// Whether a base-occupancy result is a fitted estimate or only a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// The intra-pulse model was fitted and extrapolated to the pulse edge.
    Estimate,
    /// Too little early-time information to extrapolate; the earliest
    /// measured occupancy is reported, which can only overestimate the base
    /// occupancy because intra-pulse heating is monotone.
    UpperBound,
}

/// Base occupancy and temperature inferred from a low-power intra-pulse
/// trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseOccupancyEstimate {
    /// Occupancy at the pulse's rising edge.
    pub n_0_hat: f64,
    /// One-sigma uncertainty on `n_0_hat` (zero when unavailable).
    pub n_0_sigma: f64,
    /// Equivalent mode temperature, K.
    pub t_0_hat: f64,
    /// Fitted intra-pulse relaxation rate, 1/s (zero for a bound).
    pub heating_rate: f64,
    /// Estimate or bound.
    pub kind: EstimateKind,
}

/// Fit the saturating intra-pulse heating model
/// `n(t) = n_ss - (n_ss - n_0) exp(-gamma t)` to a measured trajectory at
/// low photon number, extrapolate to `t = 0`, and convert the intercept to a
/// temperature for the given mode frequency (rad/s).
///
/// `points` are `(time from pulse edge, estimated occupancy)`; `sigmas`,
/// when given, weight the fit. If the data carry fewer than three points
/// inside the fitted relaxation time — or cannot support the fit at all —
/// the earliest measured occupancy is returned as an upper bound instead.
pub fn estimate_base_occupancy(
    points: &[(f64, f64)],
    sigmas: Option<&[f64]>,
    omega_m: f64,
) -> Result<BaseOccupancyEstimate> {
    Error::check_positive("omega_m", omega_m)?;
    if points.is_empty() {
        return Err(Error::MissingData(
            "base-occupancy estimation needs at least one trajectory point".into(),
        ));
    }
    if let Some(s) = sigmas {
        if s.len() != points.len() {
            return Err(Error::DegenerateFit(
                "sigma vector length does not match data".into(),
            ));
        }
    }
    let mut sorted: Vec<(usize, (f64, f64))> = points.iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));

    // A rising saturating exponential is a decaying exponential of the
    // negated occupancy, which the shared fitter handles directly.
    let flipped: Vec<(f64, f64)> = sorted.iter().map(|&(_, (t, n))| (t, -n)).collect();
    let weights: Option<Vec<f64>> = sigmas.map(|s| {
        sorted
            .iter()
            .map(|&(i, _)| if s[i] > 0.0 { 1.0 / s[i] } else { 0.0 })
            .collect()
    });

    if let Ok(fit) = fit_exponential_decay(&flipped, weights.as_deref()) {
        let early = sorted
            .iter()
            .filter(|&&(_, (t, _))| t * fit.rate <= 1.0)
            .count();
        if early >= 3 {
            // n(0) = -(offset + amplitude); its variance needs the
            // amplitude-offset covariance (order: amplitude, rate, offset).
            let n_0_hat = -(fit.offset + fit.amplitude);
            let var = fit.covariance[0] + fit.covariance[8] + 2.0 * fit.covariance[2];
            if n_0_hat <= 0.0 {
                return Err(Error::UnphysicalFit {
                    name: "n_0",
                    value: n_0_hat,
                    detail: "extrapolated base occupancy is not positive".into(),
                });
            }
            return Ok(BaseOccupancyEstimate {
                n_0_hat,
                n_0_sigma: var.max(0.0).sqrt(),
                t_0_hat: temperature_from_occupancy(omega_m, n_0_hat)?,
                heating_rate: fit.rate,
                kind: EstimateKind::Estimate,
            });
        }
    }

    // Bound path: no usable extrapolation, so report the earliest point.
    let (first_index, (_, n_first)) = sorted[0];
    if n_first <= 0.0 {
        return Err(Error::UnphysicalFit {
            name: "n_0",
            value: n_first,
            detail: "earliest trajectory point is not positive".into(),
        });
    }
    Ok(BaseOccupancyEstimate {
        n_0_hat: n_first,
        n_0_sigma: sigmas.map_or(0.0, |s| s[first_index]),
        t_0_hat: temperature_from_occupancy(omega_m, n_first)?,
        heating_rate: 0.0,
        kind: EstimateKind::UpperBound,
    })
}

/// Vacuum optomechanical coupling from the slope of total linewidth versus
/// photon number on the red sideband: the back-action contribution is
/// `4 g_0^2 n_c / kappa`, so an ordinary least-squares slope `s` gives
/// `g_0 = sqrt(s kappa / 4)`. Any photon-independent damping lands in the
/// discarded intercept.
pub fn g0_from_backaction_slope(points: &[(f64, f64)], cavity: &OpticalCavity) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(
            "back-action slope needs at least 3 points".into(),
        ));
    }
    for &(n_c, gamma) in points {
        if !n_c.is_finite() || !gamma.is_finite() || n_c < 0.0 {
            return Err(Error::DegenerateFit(
                "back-action slope needs finite points with n_c >= 0".into(),
            ));
        }
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::DegenerateFit(
            "back-action slope needs at least two distinct photon numbers".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    if slope <= 0.0 {
        return Err(Error::UnphysicalFit {
            name: "slope",
            value: slope,
            detail: "linewidth does not grow with photon number".into(),
        });
    }
    Ok((slope * cavity.kappa / 4.0).sqrt())
}
