//! Pulse-train timing: pulse length, inter-pulse delay, counting bins.

use crate::error::{Error, Result};

/// Timing of a pulsed counting run. Counts are accumulated in bins of width
/// `tau_bin` inside each pulse and aggregated over `n_pulses` repetitions;
/// the mode relaxes freely for `tau_off` between pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    /// Optical pulse duration, s.
    pub tau_pulse: f64,
    /// Inter-pulse (pump off) delay, s.
    pub tau_off: f64,
    /// Counting bin width, s. Must not exceed the pulse duration.
    pub tau_bin: f64,
    /// Number of pulses aggregated into one histogram.
    pub n_pulses: u64,
}

impl PulseSchedule {
    /// Bin width used by the reference analysis, s.
    pub const DEFAULT_TAU_BIN: f64 = 25.6e-9;

    /// Build a schedule, validating the timing relations.
    pub fn new(tau_pulse: f64, tau_off: f64, tau_bin: f64, n_pulses: u64) -> Result<Self> {
        Error::check_positive("tau_pulse", tau_pulse)?;
        Error::check_non_negative("tau_off", tau_off)?;
        Error::check_positive("tau_bin", tau_bin)?;
        if tau_bin > tau_pulse {
            return Err(Error::NonPositive {
                name: "tau_pulse - tau_bin",
                value: tau_pulse - tau_bin,
            });
        }
        if n_pulses == 0 {
            return Err(Error::NonPositive {
                name: "n_pulses",
                value: 0.0,
            });
        }
        Ok(Self {
            tau_pulse,
            tau_off,
            tau_bin,
            n_pulses,
        })
    }

    /// Full repetition period `tau_pulse + tau_off`, s.
    pub fn tau_per(&self) -> f64 {
        self.tau_pulse + self.tau_off
    }

    /// Number of complete counting bins inside one pulse. A trailing partial
    /// bin is dropped rather than scaled.
    pub fn n_bins(&self) -> usize {
        // The epsilon absorbs representation error when tau_pulse is an
        // intended exact multiple of tau_bin.
        (self.tau_pulse / self.tau_bin + 1e-9).floor() as usize
    }

    /// Start time of bin `i`, measured from the pulse's rising edge, s.
    pub fn bin_start(&self, i: usize) -> f64 {
        i as f64 * self.tau_bin
    }

    /// The same schedule with a different inter-pulse delay.
    pub fn with_tau_off(&self, tau_off: f64) -> Result<Self> {
        Self::new(self.tau_pulse, tau_off, self.tau_bin, self.n_pulses)
    }

    /// The same schedule with a different repetition count.
    pub fn with_n_pulses(&self, n_pulses: u64) -> Result<Self> {
        Self::new(self.tau_pulse, self.tau_off, self.tau_bin, n_pulses)
    }

    /// Total live counting time across all pulses and complete bins, s.
    pub fn total_counting_time(&self) -> f64 {
        self.n_pulses as f64 * self.n_bins() as f64 * self.tau_bin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_count_drops_partial_tail() {
        // 10 us of 25.6 ns bins is 390.625 bins; the partial one is dropped.
        let s = PulseSchedule::new(10e-6, 1e-3, PulseSchedule::DEFAULT_TAU_BIN, 100).unwrap();
        assert_eq!(s.n_bins(), 390);
        assert!((s.tau_per() - 1.01e-3).abs() < 1e-12);
    }

    #[test]
    fn exact_multiple_is_not_truncated() {
        let s = PulseSchedule::new(1e-6, 0.0, 1e-7, 1).unwrap();
        assert_eq!(s.n_bins(), 10);
    }

    #[test]
    fn rejects_bin_wider_than_pulse() {
        assert!(PulseSchedule::new(1e-6, 0.0, 2e-6, 1).is_err());
        assert!(PulseSchedule::new(1e-6, -1.0, 1e-7, 1).is_err());
        assert!(PulseSchedule::new(1e-6, 0.0, 1e-7, 0).is_err());
    }
}
