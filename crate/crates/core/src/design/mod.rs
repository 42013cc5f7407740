//! Geometry optimization for the patterned membrane: a nine-parameter
//! design vector with fabrication bounds, pluggable modal-response
//! evaluators, and a bounded Nelder–Mead search that maximizes |g0|
//! subject to a scattering-quality filter.
//!
//! Fitness convention: minimization. A successful evaluation scores
//! `-|g0|` (rad/s, so more coupling is more negative); evaluations that
//! fail or fall below the quality threshold score zero, which keeps them
//! strictly worse than any usable design without aborting the search.

mod simplex;
mod surrogate;
mod vector;

pub use simplex::{
    multi_restart, nelder_mead, NelderMeadOptions, SearchTrace, SimplexSnapshot, TraceRecord,
};
pub use surrogate::{
    BoundarySurrogate, DesignEvaluator, ModalResponse, MultiWellSurrogate, QuadraticSurrogate,
};
pub use vector::{DesignBounds, DesignVector, N_DESIGN_PARAMS};

use rand::RngCore;

use crate::error::{Error, Result};

/// Scattering quality factor below which a design is filtered out of the
/// search (kept in the trace, scored zero).
pub const DEFAULT_Q_THRESHOLD: f64 = 2e6;

/// How an evaluation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStatus {
    /// The evaluator produced a modal response that passed the filter.
    Ok,
    /// The modal response is valid but its scattering quality factor is
    /// below threshold.
    FilteredLowQ,
    /// The evaluator failed on this geometry (or a requested wavelength
    /// rescale left the feasible set).
    EvalFailed,
}

impl EvalStatus {
    /// Stable lower-case token for tabular output.
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalStatus::Ok => "ok",
            EvalStatus::FilteredLowQ => "filtered_low_q",
            EvalStatus::EvalFailed => "eval_failed",
        }
    }
}

/// One scored design: the geometry that was evaluated, its modal
/// response, and the resulting fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessEvaluation {
    /// The geometry the modal response belongs to (post-rescale when a
    /// wavelength target is active).
    pub design: DesignVector,
    /// Vacuum optomechanical coupling, rad/s (NaN when the evaluator failed).
    pub g0: f64,
    /// Scattering-limited optical quality factor (NaN when the evaluator
    /// failed).
    pub q_scat: f64,
    /// Optical mode frequency, rad/s (NaN when the evaluator failed).
    pub omega_o: f64,
    /// Mechanical mode frequency, rad/s (NaN when the evaluator failed).
    pub omega_m: f64,
    /// `-|g0|` for usable designs, zero otherwise.
    pub fitness: f64,
    /// Outcome class for this evaluation.
    pub status: EvalStatus,
}

/// Score one design. Evaluator failures are captured as a zero-fitness
/// record rather than propagated, so a search can step over broken
/// geometries; low-quality responses keep their modal data but also score
/// zero.
pub fn evaluate(
    design: &DesignVector,
    evaluator: &dyn DesignEvaluator,
    q_threshold: f64,
    rng: &mut dyn RngCore,
) -> FitnessEvaluation {
    match evaluator.evaluate(design, rng) {
        Err(_) => FitnessEvaluation {
            design: *design,
            g0: f64::NAN,
            q_scat: f64::NAN,
            omega_o: f64::NAN,
            omega_m: f64::NAN,
            fitness: 0.0,
            status: EvalStatus::EvalFailed,
        },
        Ok(response) => {
            let usable = response.q_scat >= q_threshold;
            FitnessEvaluation {
                design: *design,
                g0: response.g0,
                q_scat: response.q_scat,
                omega_o: response.omega_o,
                omega_m: response.omega_m,
                fitness: if usable { -response.g0.abs() } else { 0.0 },
                status: if usable {
                    EvalStatus::Ok
                } else {
                    EvalStatus::FilteredLowQ
                },
            }
        }
    }
}

/// Rescale a geometry so its optical mode lands on `target_omega` (rad/s).
/// Modal frequencies scale inversely with size, so every length is
/// multiplied by `omega_o / target_omega`; the scaled geometry must still
/// satisfy the fabrication bounds.
pub fn scale_to_target_wavelength(
    design: &DesignVector,
    omega_o: f64,
    target_omega: f64,
    bounds: &DesignBounds,
) -> Result<DesignVector> {
    Error::check_positive("omega_o", omega_o)?;
    Error::check_positive("target_omega", target_omega)?;
    let scaled = design.scaled_by(omega_o / target_omega);
    bounds.check(&scaled).map_err(|e| {
        Error::RescaleInfeasible(format!(
            "scaling by {:.6} leaves the fabrication window: {e}",
            omega_o / target_omega
        ))
    })?;
    Ok(scaled)
}
