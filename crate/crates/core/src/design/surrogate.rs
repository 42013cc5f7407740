//! Pluggable design evaluators and the canned analytic surrogates used in
//! place of finite-element modal solvers. Each surrogate has a documented
//! optimum so search behavior can be tested exactly, and the multi-well one
//! carries a low-quality filter region and a hard failure region so every
//! branch of the evaluation pipeline is exercisable.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::hz_to_angular;
use crate::design::vector::{DesignBounds, DesignVector, N_DESIGN_PARAMS};
use crate::error::{Error, Result};

/// What a modal solver reports for one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalResponse {
    /// Optical mode frequency, rad/s.
    pub omega_o: f64,
    /// Mechanical mode frequency, rad/s.
    pub omega_m: f64,
    /// Vacuum optomechanical coupling, rad/s.
    pub g0: f64,
    /// Scattering-limited optical quality factor.
    pub q_scat: f64,
}

/// Contract for anything that can judge a geometry: an analytic surrogate
/// here, a finite-element pipeline in production. Implementations must be
/// deterministic when their noise amplitude is zero, and must express
/// evaluation failure through `Err`, which the search maps to a zero-fitness
/// record rather than a crash.
pub trait DesignEvaluator {
    /// Evaluate one feasible design. `rng` feeds only the evaluator's own
    /// noise model and is untouched by noiseless evaluators.
    fn evaluate(&self, design: &DesignVector, rng: &mut dyn RngCore) -> Result<ModalResponse>;

    /// The analytically known constrained optimum `(design, fitness)`, when
    /// the evaluator has one (surrogates do; real solvers return `None`).
    fn known_optimum(&self) -> Option<(DesignVector, f64)> {
        None
    }
}

/// Reference scale for the inverse-length frequency laws: a geometry whose
/// mean feature size is 350 nm resonates at the reference optical and
/// mechanical frequencies.
const REF_LENGTH_NM: f64 = 350.0;
const REF_OPTICAL_HZ: f64 = 193.4e12;
const REF_MECHANICAL_HZ: f64 = 10.02e9;

/// Wavelength-scale-invariant frequency model shared by the surrogates:
/// both mode frequencies scale exactly as one over the mean feature size,
/// so uniform geometric rescaling moves them exactly inversely.
fn inverse_length_frequencies(design: &DesignVector) -> (f64, f64) {
    let mean = design.to_array().iter().sum::<f64>() / N_DESIGN_PARAMS as f64;
    let ratio = REF_LENGTH_NM / mean;
    (
        hz_to_angular(REF_OPTICAL_HZ) * ratio,
        hz_to_angular(REF_MECHANICAL_HZ) * ratio,
    )
}

/// Multiplicative Gaussian disturbance `g0 * (1 + amplitude * N(0, 1))`,
/// i.e. additive noise with a standard deviation of `amplitude * |g0|`.
fn disturb(g0: f64, amplitude: f64, rng: &mut dyn RngCore) -> f64 {
    if amplitude == 0.0 {
        return g0;
    }
    let draw: f64 = StandardNormal.sample(rng);
    g0 * (1.0 + amplitude * draw)
}

/// Strictly concave single-bowl surrogate: `g0` falls off quadratically
/// from a known interior optimum and stays positive over the whole box, so
/// the fitness `-|g0|` is convex with the same unique minimizer.
#[derive(Debug, Clone)]
pub struct QuadraticSurrogate {
    optimum: DesignVector,
    curvature: [f64; N_DESIGN_PARAMS],
    g_max: f64,
    noise: f64,
}

impl QuadraticSurrogate {
    /// Bowl centered at an interior, gap-feasible point of `bounds`, with
    /// curvature scaled so `g0 >= 0.2 * g_max` everywhere in the box.
    pub fn reference(bounds: &DesignBounds) -> Self {
        let mut a = [0.0; N_DESIGN_PARAMS];
        for i in 0..N_DESIGN_PARAMS {
            a[i] = bounds.lower[i] + 0.45 * (bounds.upper[i] - bounds.lower[i]);
        }
        let optimum = bounds.repair(&DesignVector::from_array(a));
        let g_max = hz_to_angular(1.4e6);
        let worst: f64 = optimum
            .to_array()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let d = (c - bounds.lower[i]).max(bounds.upper[i] - c);
                d * d
            })
            .sum();
        Self {
            optimum,
            curvature: [0.8 * g_max / worst; N_DESIGN_PARAMS],
            g_max,
            noise: 0.0,
        }
    }

    /// The same surrogate with relative evaluation noise of `amplitude`.
    pub fn with_noise(mut self, amplitude: f64) -> Self {
        self.noise = amplitude.max(0.0);
        self
    }
}

impl DesignEvaluator for QuadraticSurrogate {
    fn evaluate(&self, design: &DesignVector, rng: &mut dyn RngCore) -> Result<ModalResponse> {
        let d = design.to_array();
        let c = self.optimum.to_array();
        let deficit: f64 = (0..N_DESIGN_PARAMS)
            .map(|i| self.curvature[i] * (d[i] - c[i]) * (d[i] - c[i]))
            .sum();
        let (omega_o, omega_m) = inverse_length_frequencies(design);
        Ok(ModalResponse {
            omega_o,
            omega_m,
            g0: disturb(self.g_max - deficit, self.noise, rng),
            q_scat: 2.1e7,
        })
    }

    fn known_optimum(&self) -> Option<(DesignVector, f64)> {
        Some((self.optimum, -self.g_max))
    }
}

/// Surrogate whose constrained optimum sits exactly on the minimum-gap face
/// `h_oc - h_ic = min_gap`: the coupling improves monotonically as the two
/// edges approach, so the box-and-gap optimum pins the pair to the smallest
/// legal separation.
#[derive(Debug, Clone)]
pub struct BoundarySurrogate {
    /// Bowl centers for the seven parameters without the active constraint.
    centers: [f64; N_DESIGN_PARAMS],
    /// Preferred midpoint of the constrained pair.
    pair_mean: f64,
    k_gap: f64,
    k_mean: f64,
    k_rest: f64,
    g_max: f64,
    min_gap: f64,
    noise: f64,
}

impl BoundarySurrogate {
    /// Constrained optimum on the gap face, centered in `bounds`.
    pub fn reference(bounds: &DesignBounds) -> Self {
        let center = bounds.center().to_array();
        let g_max = hz_to_angular(1.4e6);
        // Worst-case excursions keep g0 positive across the whole box.
        let worst_gap = (bounds.upper[7] - bounds.lower[5]).powi(2);
        let worst_mean = {
            let lo = 0.5 * (bounds.lower[5] + bounds.lower[7]);
            let hi = 0.5 * (bounds.upper[5] + bounds.upper[7]);
            let mid = 0.5 * (lo + hi);
            (hi - mid).powi(2)
        };
        let worst_rest: f64 = (0..N_DESIGN_PARAMS)
            .filter(|&i| i != 5 && i != 7)
            .map(|i| {
                let d = (center[i] - bounds.lower[i]).max(bounds.upper[i] - center[i]);
                d * d
            })
            .sum();
        let pair_mean = 0.5
            * (0.5 * (bounds.lower[5] + bounds.lower[7]) + 0.5 * (bounds.upper[5] + bounds.upper[7]));
        Self {
            centers: center,
            pair_mean,
            k_gap: 0.3 * g_max / worst_gap,
            k_mean: 0.2 * g_max / worst_mean,
            k_rest: 0.3 * g_max / worst_rest,
            g_max,
            min_gap: bounds.min_gap,
            noise: 0.0,
        }
    }

    /// The same surrogate with relative evaluation noise of `amplitude`.
    pub fn with_noise(mut self, amplitude: f64) -> Self {
        self.noise = amplitude.max(0.0);
        self
    }
}

impl DesignEvaluator for BoundarySurrogate {
    fn evaluate(&self, design: &DesignVector, rng: &mut dyn RngCore) -> Result<ModalResponse> {
        let d = design.to_array();
        let gap = d[7] - d[5];
        let mean = 0.5 * (d[7] + d[5]);
        let mut deficit = self.k_gap * gap * gap + self.k_mean * (mean - self.pair_mean).powi(2);
        for i in (0..N_DESIGN_PARAMS).filter(|&i| i != 5 && i != 7) {
            deficit += self.k_rest * (d[i] - self.centers[i]) * (d[i] - self.centers[i]);
        }
        let (omega_o, omega_m) = inverse_length_frequencies(design);
        Ok(ModalResponse {
            omega_o,
            omega_m,
            g0: disturb(self.g_max - deficit, self.noise, rng),
            q_scat: 2.1e7,
        })
    }

    fn known_optimum(&self) -> Option<(DesignVector, f64)> {
        let mut a = self.centers;
        a[5] = self.pair_mean - 0.5 * self.min_gap;
        a[7] = self.pair_mean + 0.5 * self.min_gap;
        let best = self.g_max - self.k_gap * self.min_gap * self.min_gap;
        Some((DesignVector::from_array(a), -best))
    }
}

/// Three-basin surrogate with a low-quality filter region (small pitch `d`
/// scatters badly) and a hard failure region (very wide outer coupling cuts
/// crash the fictitious solver), exercising every status the evaluation
/// pipeline can produce.
#[derive(Debug, Clone)]
pub struct MultiWellSurrogate {
    basins: [(DesignVector, f64, f64); 3],
    q_good: f64,
    q_bad: f64,
    low_q_below_d: f64,
    fail_above_w_oc: f64,
    noise: f64,
}

impl MultiWellSurrogate {
    /// Basins spread across `bounds`, all clear of the filter and failure
    /// regions; the first basin is the global optimum.
    pub fn reference(bounds: &DesignBounds) -> Self {
        let place = |f: [f64; N_DESIGN_PARAMS]| {
            let mut a = [0.0; N_DESIGN_PARAMS];
            for i in 0..N_DESIGN_PARAMS {
                a[i] = bounds.lower[i] + f[i] * (bounds.upper[i] - bounds.lower[i]);
            }
            bounds.repair(&DesignVector::from_array(a))
        };
        let b0 = place([0.55, 0.30, 0.30, 0.45, 0.45, 0.30, 0.40, 0.45, 0.30]);
        let b1 = place([0.80, 0.70, 0.65, 0.75, 0.70, 0.65, 0.70, 0.70, 0.45]);
        let b2 = place([0.45, 0.50, 0.75, 0.60, 0.85, 0.45, 0.25, 0.40, 0.20]);
        Self {
            basins: [
                (b0, hz_to_angular(1.4e6), 90.0),
                (b1, hz_to_angular(1.1e6), 90.0),
                (b2, hz_to_angular(0.9e6), 90.0),
            ],
            q_good: 2.1e7,
            q_bad: 1e6,
            low_q_below_d: bounds.lower[0] + 0.08 * (bounds.upper[0] - bounds.lower[0]),
            fail_above_w_oc: bounds.upper[8] - 0.05 * (bounds.upper[8] - bounds.lower[8]),
            noise: 0.0,
        }
    }

    /// The same surrogate with relative evaluation noise of `amplitude`.
    pub fn with_noise(mut self, amplitude: f64) -> Self {
        self.noise = amplitude.max(0.0);
        self
    }

    /// Basin centers, strongest first — the targets for coverage tests.
    pub fn basin_centers(&self) -> [DesignVector; 3] {
        [self.basins[0].0, self.basins[1].0, self.basins[2].0]
    }

    /// Basin attraction length scale, nm.
    pub fn basin_width(&self) -> f64 {
        self.basins[0].2
    }
}

impl DesignEvaluator for MultiWellSurrogate {
    fn evaluate(&self, design: &DesignVector, rng: &mut dyn RngCore) -> Result<ModalResponse> {
        if design.w_oc > self.fail_above_w_oc {
            return Err(Error::EvaluationFailed(format!(
                "modal solver diverged at w_oc = {:.1} nm",
                design.w_oc
            )));
        }
        let g0: f64 = self
            .basins
            .iter()
            .map(|(center, amplitude, width)| {
                let dist = design.distance(center);
                amplitude * (-0.5 * dist * dist / (width * width)).exp()
            })
            .sum();
        let q_scat = if design.d < self.low_q_below_d {
            self.q_bad
        } else {
            self.q_good
        };
        let (omega_o, omega_m) = inverse_length_frequencies(design);
        Ok(ModalResponse {
            omega_o,
            omega_m,
            g0: disturb(g0, self.noise, rng),
            q_scat,
        })
    }

    fn known_optimum(&self) -> Option<(DesignVector, f64)> {
        // Neighboring basins add a vanishing tail at the global center.
        Some((self.basins[0].0, -self.basins[0].1))
    }
}
