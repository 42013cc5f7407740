//! Time-binned photon-count histograms aggregated over a pulse train.

use crate::error::{Error, Result};

/// Counts per time bin, summed over every pulse in a run. Bin times are
/// measured from each pulse's rising edge, so the histogram is the
/// pulse-averaged arrival-time distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCounts {
    counts: Vec<u64>,
    bin_starts: Vec<f64>,
    tau_bin: f64,
    n_pulses: u64,
}

impl BinnedCounts {
    /// Assemble a histogram, checking that bins are uniform and ordered.
    pub fn new(counts: Vec<u64>, bin_starts: Vec<f64>, tau_bin: f64, n_pulses: u64) -> Result<Self> {
        Error::check_positive("tau_bin", tau_bin)?;
        if counts.is_empty() || counts.len() != bin_starts.len() {
            return Err(Error::MissingData(
                "histogram needs equal, non-zero numbers of bins and counts".into(),
            ));
        }
        if n_pulses == 0 {
            return Err(Error::NonPositive {
                name: "n_pulses",
                value: 0.0,
            });
        }
        for pair in bin_starts.windows(2) {
            let step = pair[1] - pair[0];
            if !(step > 0.0) || (step - tau_bin).abs() > 1e-6 * tau_bin {
                return Err(Error::MissingData(
                    "histogram bins must be ordered with uniform width".into(),
                ));
            }
        }
        Ok(Self {
            counts,
            bin_starts,
            tau_bin,
            n_pulses,
        })
    }

    /// Per-bin counts, aggregated over all pulses.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Bin start times relative to the pulse edge, s.
    pub fn bin_starts(&self) -> &[f64] {
        &self.bin_starts
    }

    /// Bin width, s.
    pub fn tau_bin(&self) -> f64 {
        self.tau_bin
    }

    /// Number of pulses aggregated.
    pub fn n_pulses(&self) -> u64 {
        self.n_pulses
    }

    /// Number of bins.
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    /// Total counts across all bins.
    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Total live counting time (all bins, all pulses), s.
    pub fn total_time(&self) -> f64 {
        self.n_pulses as f64 * self.counts.len() as f64 * self.tau_bin
    }

    /// Mean detected rate in bin `i`, counts/s.
    pub fn rate(&self, i: usize) -> f64 {
        self.counts[i] as f64 / (self.tau_bin * self.n_pulses as f64)
    }

    /// Mean detected rates for every bin, counts/s.
    pub fn rates(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.rate(i)).collect()
    }

    /// Mean rate over the whole histogram, counts/s.
    pub fn mean_rate(&self) -> f64 {
        self.total_counts() as f64 / self.total_time()
    }

    /// Merge two runs with identical binning into one longer run. Because
    /// Poisson counts are additive, the merge is distributed exactly like a
    /// single run of the combined length.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.bin_starts.len() != other.bin_starts.len()
            || (self.tau_bin - other.tau_bin).abs() > 1e-9 * self.tau_bin
            || self
                .bin_starts
                .iter()
                .zip(&other.bin_starts)
                .any(|(a, b)| (a - b).abs() > 1e-6 * self.tau_bin)
        {
            return Err(Error::MissingData(
                "histograms with different binning cannot be merged".into(),
            ));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            counts,
            bin_starts: self.bin_starts.clone(),
            tau_bin: self.tau_bin,
            n_pulses: self.n_pulses + other.n_pulses,
        })
    }
}
