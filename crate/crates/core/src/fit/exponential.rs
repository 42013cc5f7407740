//! Weighted three-parameter exponential-decay fit `y = c + a exp(-rate t)`,
//! the workhorse behind ringdown analysis and intra-pulse extrapolation.

use crate::error::{Error, Result};
use crate::solve::{invert_dense, solve_dense};

/// Result of an exponential-decay fit.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExponentialFit {
    /// Decaying amplitude `a` (> 0).
    pub amplitude: f64,
    /// Decay rate (> 0), in inverse units of the abscissa.
    pub rate: f64,
    /// Long-time floor `c`.
    pub offset: f64,
    /// Unweighted root-sum-square residual.
    pub residual_norm: f64,
    /// Row-major 3x3 covariance in parameter order (amplitude, rate, offset).
    pub covariance: Vec<f64>,
}

impl ExponentialFit {
    /// One-sigma uncertainties in parameter order (amplitude, rate, offset).
    pub fn std_errors(&self) -> [f64; 3] {
        [
            self.covariance[0].max(0.0).sqrt(),
            self.covariance[4].max(0.0).sqrt(),
            self.covariance[8].max(0.0).sqrt(),
        ]
    }
}

/// Fit `y = c + a exp(-rate t)` by damped Gauss–Newton. `weights`, when
/// given, multiply each residual (pass `1/sigma_i` for chi-square fitting).
/// Data that do not decay — zero or inverted amplitude, or a non-positive
/// fitted rate — are rejected rather than reported.
pub(crate) fn fit_exponential_decay(
    points: &[(f64, f64)],
    weights: Option<&[f64]>,
) -> Result<ExponentialFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(
            "exponential fit needs at least 4 points".into(),
        ));
    }
    for &(t, y) in points {
        if !t.is_finite() || !y.is_finite() || t < 0.0 {
            return Err(Error::DegenerateFit(
                "exponential fit needs finite data on t >= 0".into(),
            ));
        }
    }
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::DegenerateFit(
                "weight vector length does not match data".into(),
            ));
        }
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);

    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
    let distinct = sorted.windows(2).filter(|w| w[1].0 > w[0].0).count() + 1;
    if distinct < 4 {
        return Err(Error::DegenerateFit(
            "exponential fit needs at least 4 distinct abscissae".into(),
        ));
    }
    let y_min = sorted.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y_max = sorted.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if y_max - y_min <= 1e-12 * y_max.abs().max(1e-300) {
        return Err(Error::DegenerateFit(
            "constant data: there is no decay to fit".into(),
        ));
    }
    // The model is monotone decreasing for any positive amplitude and rate,
    // so data with a non-negative overall trend cannot be described by it;
    // reject them up front instead of converging to a flat pseudo-fit.
    let trend = ols_slope(&sorted);
    if trend >= 0.0 {
        return Err(Error::UnphysicalFit {
            name: "rate",
            value: trend,
            detail: "data do not decay: overall trend is non-negative".into(),
        });
    }

    // Seed the floor from the late-time tail, the amplitude from the first
    // point, and the rate from a log-linear fit of the floor-subtracted data.
    let tail_len = (sorted.len() / 5).max(1);
    let mut c = sorted[sorted.len() - tail_len..]
        .iter()
        .map(|p| p.1)
        .sum::<f64>()
        / tail_len as f64;
    let mut a = sorted[0].1 - c;
    if a <= 0.0 {
        // Data may rise or be noisy around a shallow decay; seed from the
        // full spread and let the iteration sort it out.
        a = y_max - y_min;
        c = y_min;
    }
    let mut rate = seed_rate(&sorted, c).unwrap_or_else(|| {
        let span = sorted[sorted.len() - 1].0 - sorted[0].0;
        1.0 / span.max(1e-300)
    });

    let ssr_of = |a: f64, rate: f64, c: f64| -> f64 {
        points
            .iter()
            .enumerate()
            .map(|(i, &(t, y))| {
                let r = (c + a * (-rate * t).exp() - y) * weight(i);
                r * r
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut current = ssr_of(a, rate, c);
    let mut history = Vec::new();
    let max_iter = 300;
    let mut converged = false;
    for _ in 0..max_iter {
        history.push(current.sqrt());
        let mut jtj = [0.0f64; 9];
        let mut jtr = [0.0f64; 3];
        for (i, &(t, y)) in points.iter().enumerate() {
            let w = weight(i);
            let e = (-rate * t).exp();
            let r = (c + a * e - y) * w;
            // dr/d(a, rate, c)
            let j = [e * w, -a * t * e * w, w];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[p * 3 + q] += j[p] * j[q];
                }
            }
        }
        let mut step = None;
        for _ in 0..12 {
            let mut m = jtj;
            for d in 0..3 {
                m[d * 3 + d] += lambda * jtj[d * 3 + d].max(1e-30);
            }
            let mut rhs = [-jtr[0], -jtr[1], -jtr[2]];
            if let Some(delta) = solve_dense(&mut m, &mut rhs, 3) {
                let (na, nr, nc) = (a + delta[0], rate + delta[1], c + delta[2]);
                let trial = ssr_of(na, nr, nc);
                // A non-positive rate makes the "decay" explode at large t;
                // treat such trials as failed steps and damp harder.
                if trial.is_finite() && nr > 0.0 && trial <= current {
                    step = Some((na, nr, nc, trial, delta));
                    break;
                }
            }
            lambda *= 10.0;
        }
        let Some((na, nr, nc, trial, delta)) = step else {
            break; // stationary at every damping level
        };
        let rel_step = delta
            .iter()
            .zip([a, rate, c])
            .map(|(d, v)| d.abs() / v.abs().max(1e-12))
            .fold(0.0f64, f64::max);
        let rel_drop = (current - trial) / current.max(1e-300);
        a = na;
        rate = nr;
        c = nc;
        current = trial;
        lambda = (lambda / 3.0).max(1e-12);
        if rel_step < 1e-12 || rel_drop < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && history.len() >= max_iter {
        let tail: Vec<f64> = history.iter().rev().take(5).cloned().collect();
        return Err(Error::FitDidNotConverge {
            iterations: history.len(),
            tail,
        });
    }
    if !(a > 0.0) {
        return Err(Error::UnphysicalFit {
            name: "amplitude",
            value: a,
            detail: "data do not decay: fitted amplitude is not positive".into(),
        });
    }
    if !(rate > 0.0) {
        return Err(Error::UnphysicalFit {
            name: "rate",
            value: rate,
            detail: "data do not decay: fitted rate is not positive".into(),
        });
    }

    // Covariance from the Gauss-Newton approximation at the optimum.
    let mut jtj = [0.0f64; 9];
    for (i, &(t, _)) in points.iter().enumerate() {
        let w = weight(i);
        let e = (-rate * t).exp();
        let j = [e * w, -a * t * e * w, w];
        for p in 0..3 {
            for q in 0..3 {
                jtj[p * 3 + q] += j[p] * j[q];
            }
        }
    }
    let dof = points.len().saturating_sub(3);
    let sigma2 = if dof > 0 { current / dof as f64 } else { 0.0 };
    let covariance = invert_dense(&jtj, 3)
        .map(|inv| inv.iter().map(|v| v * sigma2).collect())
        .unwrap_or_else(|| vec![f64::NAN; 9]);
    let residual_norm = points
        .iter()
        .map(|&(t, y)| {
            let r = c + a * (-rate * t).exp() - y;
            r * r
        })
        .sum::<f64>()
        .sqrt();

    Ok(ExponentialFit {
        amplitude: a,
        rate,
        offset: c,
        residual_norm,
        covariance,
    })
}

/// Ordinary least-squares slope of `(t, y)` pairs.
fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Log-linear rate seed using points sitting clear of the floor estimate.
fn seed_rate(sorted: &[(f64, f64)], floor: f64) -> Option<f64> {
    let usable: Vec<(f64, f64)> = sorted
        .iter()
        .filter(|&&(_, y)| y > floor)
        .map(|&(t, y)| (t, (y - floor).ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    if slope < 0.0 {
        Some(-slope)
    } else {
        None
    }
}
