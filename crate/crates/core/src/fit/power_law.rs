//! Least-squares power-law fitting, with and without a constant offset.

use crate::error::{Error, Result};
use crate::solve::{invert_dense, solve_dense};

/// Result of fitting `y = A x^p` or `y = c + B x^q` to data.
///
/// Parameter order in `covariance` is `(amplitude, exponent)` for the
/// offset-free form and `(amplitude, exponent, offset)` when an offset was
/// fitted; the matrix is row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Multiplier `A` (same units as `y`).
    pub amplitude: f64,
    /// Exponent `p`, dimensionless.
    pub exponent: f64,
    /// Constant offset `c` (same units as `y`), when one was fitted.
    pub offset: Option<f64>,
    /// Euclidean norm of the residuals `model(x_i) - y_i`.
    pub residual_norm: f64,
    /// Row-major covariance matrix of the fitted parameters.
    pub covariance: Vec<f64>,
}

impl PowerLawFit {
    /// Evaluate the fitted law at `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.offset.unwrap_or(0.0) + self.amplitude * x.powf(self.exponent)
    }

    /// Number of fitted parameters (2 without offset, 3 with).
    pub fn n_params(&self) -> usize {
        if self.offset.is_some() {
            3
        } else {
            2
        }
    }

    /// One-sigma standard errors of the fitted parameters, from the
    /// covariance diagonal, in the same order as `covariance`.
    pub fn std_errors(&self) -> Vec<f64> {
        let k = self.n_params();
        (0..k).map(|i| self.covariance[i * k + i].max(0.0).sqrt()).collect()
    }
}

/// Fit a power law to `points`.
///
/// * `with_offset = false`: fits `y = A x^p` by linear least squares in
///   log–log space (requires all `y > 0`).
/// * `with_offset = true`: fits `y = c + B x^q` by damped Gauss–Newton in
///   linear space, seeded from a log–log fit of the large-`x` tail.
pub fn fit_power_law(points: &[(f64, f64)], with_offset: bool) -> Result<PowerLawFit> {
    validate_points(points)?;
    if with_offset {
        fit_offset_power_law_weighted(points, None)
    } else {
        fit_loglog(points)
    }
}

fn validate_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::DegenerateFit(format!(
                "non-finite data point ({x}, {y})"
            )));
        }
        if x <= 0.0 {
            return Err(Error::DegenerateFit(format!("abscissa {x} must be > 0")));
        }
    }
    let x0 = points[0].0;
    if points.iter().all(|&(x, _)| x == x0) {
        return Err(Error::DegenerateFit(
            "all abscissae are equal; exponent is unidentifiable".into(),
        ));
    }
    Ok(())
}

/// Offset-free fit: ordinary least squares on `ln y = ln A + p ln x`.
fn fit_loglog(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    for &(_, y) in points {
        if y <= 0.0 {
            return Err(Error::DegenerateFit(format!(
                "ordinate {y} must be > 0 for an offset-free power-law fit"
            )));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in points {
        sx += x.ln();
        sy += y.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    let exponent = sxy / sxx;
    let ln_a = my - exponent * mx;
    let amplitude = ln_a.exp();

    // Residual variance in log space drives the parameter covariance of the
    // (ln A, p) estimates; transform to (A, p) via dA = A d(ln A).
    let mut ss_log = 0.0;
    let mut residual_sq = 0.0;
    for &(x, y) in points {
        let r_log = ln_a + exponent * x.ln() - y.ln();
        ss_log += r_log * r_log;
        let r_lin = amplitude * x.powf(exponent) - y;
        residual_sq += r_lin * r_lin;
    }
    let dof = points.len().saturating_sub(2);
    let sigma2 = if dof > 0 { ss_log / dof as f64 } else { 0.0 };
    // (X^T X)^-1 for the design [1, ln x]:
    let det = n * (sxx + n * mx * mx) - sx * sx; // = n * sxx
    let var_lna = sigma2 * (sxx + n * mx * mx) / det;
    let var_p = sigma2 * n / det;
    let cov_lna_p = -sigma2 * sx / det;
    let covariance = vec![
        amplitude * amplitude * var_lna,
        amplitude * cov_lna_p,
        amplitude * cov_lna_p,
        var_p,
    ];
    Ok(PowerLawFit {
        amplitude,
        exponent,
        offset: None,
        residual_norm: residual_sq.sqrt(),
        covariance,
    })
}

/// Offset fit `y = c + B x^q` by damped Gauss–Newton (Levenberg-style
/// damping on the normal equations). `weights`, when given, scales each
/// residual; passing `1/y_i` weights turns the objective into relative
/// least squares, appropriate for multiplicative noise.
pub(crate) fn fit_offset_power_law_weighted(
    points: &[(f64, f64)],
    weights: Option<&[f64]>,
) -> Result<PowerLawFit> {
    validate_points(points)?;
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::DegenerateFit(
                "weight vector length does not match data".into(),
            ));
        }
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);

    // Seed from a log-log fit of the large-x tail, where the power term
    // dominates any offset; the offset seed is the residual floor.
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail_start = if sorted.len() >= 6 { sorted.len() / 2 } else { 0 };
    let tail = &sorted[tail_start..];
    let (mut b, mut q) = match fit_loglog(tail) {
        Ok(f) => (f.amplitude, f.exponent),
        Err(_) => (1.0, 0.5),
    };
    let floor = sorted
        .iter()
        .map(|&(x, y)| y - b * x.powf(q))
        .fold(f64::INFINITY, f64::min);
    let mut c = if floor.is_finite() { floor.max(0.0) } else { 0.0 };

    let n = points.len();
    let ssr = |b: f64, q: f64, c: f64| -> f64 {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let r = (c + b * x.powf(q) - y) * weight(i);
                r * r
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut current = ssr(b, q, c);
    let mut history = Vec::new();
    let max_iter = 300;
    let mut converged = false;
    for _ in 0..max_iter {
        history.push(current.sqrt());
        // Normal equations J^T J delta = -J^T r with Marquardt damping.
        let mut jtj = [0.0f64; 9];
        let mut jtr = [0.0f64; 3];
        for (i, &(x, y)) in points.iter().enumerate() {
            let w = weight(i);
            let xq = x.powf(q);
            let r = (c + b * xq - y) * w;
            // dr/d(b, q, c)
            let j = [xq * w, b * xq * x.ln() * w, w];
            for a in 0..3 {
                jtr[a] += j[a] * r;
                for bb in 0..3 {
                    jtj[a * 3 + bb] += j[a] * j[bb];
                }
            }
        }
        let mut step = None;
        for _ in 0..12 {
            let mut a = jtj;
            for d in 0..3 {
                a[d * 3 + d] += lambda * jtj[d * 3 + d].max(1e-30);
            }
            let mut rhs = [-jtr[0], -jtr[1], -jtr[2]];
            if let Some(delta) = solve_dense(&mut a, &mut rhs, 3) {
                let (nb, nq, nc) = (b + delta[0], q + delta[1], c + delta[2]);
                let trial = ssr(nb, nq, nc);
                if trial.is_finite() && trial <= current {
                    step = Some((nb, nq, nc, trial, delta));
                    break;
                }
            }
            lambda *= 10.0;
        }
        let Some((nb, nq, nc, trial, delta)) = step else {
            break; // no productive step at any damping: stationary
        };
        let rel_step = delta
            .iter()
            .zip([b, q, c])
            .map(|(d, v)| d.abs() / v.abs().max(1e-12))
            .fold(0.0f64, f64::max);
        let rel_drop = (current - trial) / current.max(1e-300);
        b = nb;
        q = nq;
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
    if !(b > 0.0) || !q.is_finite() {
        return Err(Error::UnphysicalFit {
            name: "amplitude",
            value: b,
            detail: "offset power-law fit collapsed to a non-positive amplitude".into(),
        });
    }

    // Covariance from the Gauss-Newton approximation at the optimum.
    let mut jtj = [0.0f64; 9];
    for (i, &(x, _)) in points.iter().enumerate() {
        let w = weight(i);
        let xq = x.powf(q);
        let j = [xq * w, b * xq * x.ln() * w, w];
        for a in 0..3 {
            for bb in 0..3 {
                jtj[a * 3 + bb] += j[a] * j[bb];
            }
        }
    }
    let dof = n.saturating_sub(3);
    let sigma2 = if dof > 0 { current / dof as f64 } else { 0.0 };
    let covariance = invert_dense(&jtj, 3)
        .map(|inv| inv.iter().map(|v| v * sigma2).collect())
        .unwrap_or_else(|| vec![0.0; 9]);

    // Residual norm reported unweighted, in data units.
    let residual_sq: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = c + b * x.powf(q) - y;
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        amplitude: b,
        exponent: q,
        offset: Some(c),
        residual_norm: residual_sq.sqrt(),
        covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(law: impl Fn(f64) -> f64, xs: &[f64]) -> Vec<(f64, f64)> {
        xs.iter().map(|&x| (x, law(x))).collect()
    }

    fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
        (0..n).map(|i| lo * ratio.powi(i as i32)).collect()
    }

    #[test]
    fn noiseless_offset_free_recovery_is_exact() {
        let xs = log_spaced(0.5, 2e4, 20);
        let data = sample(|x| 1.1 * x.powf(0.3), &xs);
        let fit = fit_power_law(&data, false).unwrap();
        assert!((fit.amplitude - 1.1).abs() < 1e-6 * 1.1);
        assert!((fit.exponent - 0.3).abs() < 1e-6 * 0.3);
        assert!(fit.residual_norm < 1e-8);
        assert_eq!(fit.offset, None);
    }

    #[test]
    fn noiseless_offset_recovery_is_exact() {
        let xs = log_spaced(1.0, 1e5, 25);
        let data = sample(|x| 23.91e3 + 9.01e3 * x.powf(0.29), &xs);
        let fit = fit_power_law(&data, true).unwrap();
        assert!((fit.amplitude - 9.01e3).abs() < 1e-6 * 9.01e3, "B = {}", fit.amplitude);
        assert!((fit.exponent - 0.29).abs() < 1e-6 * 0.29, "q = {}", fit.exponent);
        assert!((fit.offset.unwrap() - 23.91e3).abs() < 1e-5 * 23.91e3);
    }

    #[test]
    fn rescaling_x_moves_only_the_amplitude() {
        // y = A x^p sampled at x and at s*x: the exponent must match and the
        // amplitude must pick up s^-p, both to 1e-9.
        let xs = log_spaced(2.0, 3e3, 24);
        let data = sample(|x| 0.37 * x.powf(0.61), &xs);
        let fit = fit_power_law(&data, false).unwrap();
        let s = 137.0;
        let scaled: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (s * x, y)).collect();
        let fit_s = fit_power_law(&scaled, false).unwrap();
        assert!((fit_s.exponent - fit.exponent).abs() < 1e-9);
        let expected_amp = fit.amplitude * s.powf(-fit.exponent);
        assert!((fit_s.amplitude - expected_amp).abs() < 1e-9 * expected_amp);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 2.0)], false),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_power_law(&[(3.0, 1.0), (3.0, 2.0), (3.0, 3.0)], false).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)], false).is_err());
        assert!(fit_power_law(&[(0.0, 1.0), (2.0, 2.0), (3.0, 3.0)], true).is_err());
    }

    #[test]
    fn covariance_is_positive_on_noisy_data() {
        // A crude jitter; the point is only that variances come out
        // positive and finite once residuals are non-zero.
        let xs = log_spaced(1.0, 1e3, 30);
        let data: Vec<(f64, f64)> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let bump = 1.0 + 0.04 * ((i as f64 * 2.399).sin());
                (x, 1.1 * x.powf(0.3) * bump)
            })
            .collect();
        let fit = fit_power_law(&data, false).unwrap();
        let se = fit.std_errors();
        assert!(se.iter().all(|s| s.is_finite() && *s > 0.0));
        assert!((fit.exponent - 0.3).abs() < 0.05);
    }
}
