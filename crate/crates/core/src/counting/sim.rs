//! Poisson sampling of binned counts from a time-dependent rate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::counting::{BinnedCounts, PulseSchedule};
use crate::error::Result;

/// Number of Simpson subintervals used to integrate the rate across one bin.
/// Rates in this model relax on microsecond scales while bins are tens of
/// nanoseconds, so a fixed low-order rule is already far below sampling
/// noise.
const SIMPSON_INTERVALS: usize = 8;

/// Simulate a pulsed counting run: each bin's aggregated count is Poisson
/// with mean `n_pulses * integral of rate_fn over the bin`.
///
/// `rate_fn` is the detected rate (counts/s) as a function of time from the
/// pulse's rising edge; every pulse is statistically identical. Bins draw
/// from independent, seed-derived RNG substreams, so the histogram is
/// deterministic for a fixed seed and independent of evaluation order.
/// Negative excursions of `rate_fn` are treated as zero rate.
pub fn simulate_counts<F>(rate_fn: F, schedule: &PulseSchedule, seed: u64) -> Result<BinnedCounts>
where
    F: Fn(f64) -> f64,
{
    let n_bins = schedule.n_bins();
    let pulses = schedule.n_pulses as f64;
    let mut counts = Vec::with_capacity(n_bins);
    let mut bin_starts = Vec::with_capacity(n_bins);
    for bin in 0..n_bins {
        let start = schedule.bin_start(bin);
        let lambda = pulses * integrate_simpson(&rate_fn, start, start + schedule.tau_bin);
        counts.push(sample_poisson(lambda, seed, bin as u64));
        bin_starts.push(start);
    }
    BinnedCounts::new(counts, bin_starts, schedule.tau_bin, schedule.n_pulses)
}

/// Composite Simpson integral of `max(rate, 0)` over `[a, b]`.
fn integrate_simpson<F: Fn(f64) -> f64>(rate_fn: &F, a: f64, b: f64) -> f64 {
    let h = (b - a) / SIMPSON_INTERVALS as f64;
    let eval = |i: usize| rate_fn(a + i as f64 * h).max(0.0);
    let mut sum = eval(0) + eval(SIMPSON_INTERVALS);
    for i in 1..SIMPSON_INTERVALS {
        sum += eval(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// One Poisson draw with mean `lambda` from the substream `(seed, stream)`.
fn sample_poisson(lambda: f64, seed: u64, stream: u64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let draw: f64 = Poisson::new(lambda)
        .expect("positive finite mean")
        .sample(&mut rng);
    draw as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_gives_empty_histogram() {
        let schedule = PulseSchedule::new(1e-6, 0.0, 1e-7, 1000).unwrap();
        let h = simulate_counts(|_| 0.0, &schedule, 7).unwrap();
        assert_eq!(h.total_counts(), 0);
        assert_eq!(h.n_bins(), 10);
    }

    #[test]
    fn identical_seeds_reproduce_identical_histograms() {
        let schedule = PulseSchedule::new(1e-6, 0.0, 1e-7, 500).unwrap();
        let rate = |t: f64| 5e4 * (1.0 + t / 1e-6);
        let a = simulate_counts(rate, &schedule, 42).unwrap();
        let b = simulate_counts(rate, &schedule, 42).unwrap();
        let c = simulate_counts(rate, &schedule, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn constant_rate_matches_poisson_mean_and_variance() {
        // 200 seeds x 10 bins of lambda = 5e4 * 1e-7 * 2000 = 10 counts.
        // The pooled mean of 2000 draws has sigma = sqrt(10/2000) = 0.07;
        // test at 4 sigma.
        let schedule = PulseSchedule::new(1e-6, 0.0, 1e-7, 2000).unwrap();
        let lambda = 5e4 * 1e-7 * 2000.0;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut n = 0.0;
        for seed in 0..200 {
            let h = simulate_counts(|_| 5e4, &schedule, seed).unwrap();
            for &c in h.counts() {
                sum += c as f64;
                sum_sq += (c as f64) * (c as f64);
                n += 1.0;
            }
        }
        let mean = sum / n;
        let var = sum_sq / n - mean * mean;
        assert!((mean - lambda).abs() < 4.0 * (lambda / n).sqrt(), "mean = {mean}");
        // Poisson variance equals the mean; the variance of a sample variance
        // is roughly 2 lambda^2 / n, so this is a loose 10% check.
        assert!((var - lambda).abs() < 0.1 * lambda, "var = {var}");
    }

    #[test]
    fn merged_half_runs_match_full_run_statistics() {
        // Poisson additivity: two 1000-pulse histograms merged should be
        // distributed like one 2000-pulse histogram. Compare pooled moments
        // over 300 seeds.
        let half = PulseSchedule::new(1e-6, 0.0, 2e-7, 1000).unwrap();
        let full = PulseSchedule::new(1e-6, 0.0, 2e-7, 2000).unwrap();
        let rate = |t: f64| 2e5 * (1.0 - 0.5 * t / 1e-6);
        let (mut m_merge, mut m_full, mut n) = (0.0, 0.0, 0.0);
        for seed in 0..300 {
            let a = simulate_counts(rate, &half, 2 * seed).unwrap();
            let b = simulate_counts(rate, &half, 2 * seed + 1).unwrap();
            let merged = a.merge(&b).unwrap();
            let whole = simulate_counts(rate, &full, seed).unwrap();
            m_merge += merged.total_counts() as f64;
            m_full += whole.total_counts() as f64;
            n += 1.0;
        }
        // Each run totals about 2e5 * 0.75 * 1e-6 * 2000 = 300 counts, so the
        // two 300-seed averages each carry sigma = 1; compare at 5 sigma.
        let diff = (m_merge - m_full) / n;
        assert!(diff.abs() < 5.0 * (2.0 * 300.0 / 300.0_f64).sqrt(), "diff = {diff}");
    }

    #[test]
    fn negative_rate_is_clamped_to_zero() {
        let schedule = PulseSchedule::new(1e-6, 0.0, 1e-6, 100).unwrap();
        let h = simulate_counts(|_| -10.0, &schedule, 1).unwrap();
        assert_eq!(h.total_counts(), 0);
    }
}
