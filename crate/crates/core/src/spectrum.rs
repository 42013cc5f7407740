//! Thermal displacement noise spectrum of the driven mode: a Lorentzian
//! whose width is the total linewidth and whose area is the occupancy.

use crate::error::{Error, Result};
use crate::mechanics::MechanicalMode;

/// A sampled one-sided noise spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    /// Angular frequencies the spectrum was sampled at, rad/s.
    pub omega: Vec<f64>,
    /// Spectral density at each grid point, quanta per (rad/s).
    pub density: Vec<f64>,
    /// Center frequency, rad/s.
    pub omega_m: f64,
    /// Full width at half maximum, rad/s.
    pub fwhm: f64,
    /// Integrated area over all frequency, quanta.
    pub area: f64,
}

/// Sample the thermal noise spectrum of a mode with total linewidth
/// `linewidth` (FWHM, rad/s) and mean occupancy `n_avg` on the angular
/// frequency grid `grid`:
///
/// `S(omega) = n_avg * (linewidth/2) / pi / ((omega - omega_m)^2 + (linewidth/2)^2)`
///
/// Normalization: the analytic integral of `S` over all `omega` equals
/// `n_avg` exactly, so the peak value is `2 n_avg / (pi * linewidth)`.
pub fn thermal_noise_spectrum(
    mode: &MechanicalMode,
    linewidth: f64,
    n_avg: f64,
    grid: &[f64],
) -> Result<NoiseSpectrum> {
    Error::check_positive("linewidth", linewidth)?;
    Error::check_non_negative("n_avg", n_avg)?;
    if grid.is_empty() {
        return Err(Error::DegenerateFit(
            "spectrum grid must contain at least one frequency".into(),
        ));
    }
    let half = 0.5 * linewidth;
    let density = grid
        .iter()
        .map(|&omega| {
            let detune = omega - mode.omega_m;
            n_avg * half / std::f64::consts::PI / (detune * detune + half * half)
        })
        .collect();
    Ok(NoiseSpectrum {
        omega: grid.to_vec(),
        density,
        omega_m: mode.omega_m,
        fwhm: linewidth,
        area: n_avg,
    })
}

/// Build a symmetric grid of `points` angular frequencies spanning
/// `span_linewidths` full linewidths either side of the mode frequency.
pub fn centered_grid(mode: &MechanicalMode, linewidth: f64, span_linewidths: f64, points: usize) -> Vec<f64> {
    let half_span = span_linewidths * linewidth;
    let n = points.max(2);
    (0..n)
        .map(|i| mode.omega_m - half_span + 2.0 * half_span * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;

    fn mode() -> MechanicalMode {
        MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap()
    }

    #[test]
    fn peak_height_times_half_width_gives_the_area() {
        // For a unit-area Lorentzian, peak * pi * (fwhm/2) = 1, so the
        // sampled peak must satisfy peak * pi * fwhm / 2 = n_avg.
        let m = mode();
        let linewidth = hz_to_angular(32.8e3);
        let n_avg = 0.163;
        let grid = centered_grid(&m, linewidth, 10.0, 4001);
        let spec = thermal_noise_spectrum(&m, linewidth, n_avg, &grid).unwrap();
        let peak = spec
            .density
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let area_from_peak = peak * std::f64::consts::PI * linewidth / 2.0;
        assert!(
            (area_from_peak - n_avg).abs() <= 1e-6 * n_avg,
            "area from peak = {area_from_peak}"
        );
    }

    #[test]
    fn numerical_area_approaches_n_avg() {
        // Trapezoid over +-200 linewidths captures all but ~0.3% of a
        // Lorentzian's area.
        let m = mode();
        let linewidth = hz_to_angular(32.8e3);
        let n_avg = 2.5;
        let grid = centered_grid(&m, linewidth, 200.0, 400_001);
        let spec = thermal_noise_spectrum(&m, linewidth, n_avg, &grid).unwrap();
        let mut area = 0.0;
        for i in 1..grid.len() {
            area += 0.5 * (spec.density[i] + spec.density[i - 1]) * (grid[i] - grid[i - 1]);
        }
        assert!((area - n_avg).abs() < 0.005 * n_avg, "area = {area}");
    }

    #[test]
    fn zero_occupancy_gives_a_flat_zero_spectrum() {
        let m = mode();
        let grid = centered_grid(&m, 1.0, 3.0, 11);
        let spec = thermal_noise_spectrum(&m, 1.0, 0.0, &grid).unwrap();
        assert!(spec.density.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn empty_grid_and_bad_linewidth_are_rejected() {
        let m = mode();
        assert!(thermal_noise_spectrum(&m, 1.0, 1.0, &[]).is_err());
        assert!(thermal_noise_spectrum(&m, 0.0, 1.0, &[m.omega_m]).is_err());
    }
}
