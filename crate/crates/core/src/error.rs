//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building models, evaluating them, or
/// fitting data to them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input that must be a finite number was NaN or infinite.
    #[error("`{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// An input that must be strictly positive was zero or negative.
    #[error("`{name}` must be > 0, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// An input that must be non-negative was negative.
    #[error("`{name}` must be >= 0, got {value}")]
    Negative { name: &'static str, value: f64 },

    /// An efficiency or branching fraction left the closed unit interval.
    #[error("`{name}` must lie in (0, 1], got {value}")]
    NotAFraction { name: &'static str, value: f64 },

    /// External decay cannot exceed the total decay rate.
    #[error("external coupling rate {kappa_e} rad/s exceeds total decay rate {kappa} rad/s")]
    OvercoupledBeyondTotal { kappa_e: f64, kappa: f64 },

    /// The pump tone would sit at zero or negative absolute frequency.
    #[error("pump frequency omega_c - detuning = {omega_p} rad/s must be positive")]
    PumpFrequencyNotPositive { omega_p: f64 },

    /// A rate balance put every loss channel at zero, so no steady state exists.
    #[error("all decay channels are zero; steady-state occupancy is undefined")]
    NoDecayChannel,

    /// The anti-damped (blue-detuned) mode has net gain and no steady state.
    #[error(
        "anti-damping {gain} rad/s exceeds total damping {loss} rad/s; \
         the mode is unstable and has no steady state"
    )]
    UnstableBlueDrive { gain: f64, loss: f64 },

    /// A data set was too small or otherwise unusable for the requested fit.
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    /// An iterative fit ran out of iterations. The residual-norm history is
    /// kept so the caller can see whether it was diverging or just slow.
    #[error("fit did not converge after {iterations} iterations (last residual norms: {tail:?})")]
    FitDidNotConverge { iterations: usize, tail: Vec<f64> },

    /// Adaptive integration hit its step budget without reaching the end of
    /// the window.
    #[error("integration exceeded {max_steps} steps at t = {t} s")]
    IntegrationStalled { max_steps: usize, t: f64 },

    /// A fitted parameter landed outside its physically meaningful range.
    #[error("fitted {name} = {value} is outside its physical range: {detail}")]
    UnphysicalFit {
        name: &'static str,
        value: f64,
        detail: String,
    },

    /// A design evaluator (modal solver or surrogate) failed on a candidate.
    #[error("design evaluation failed: {0}")]
    EvaluationFailed(String),

    /// A search was started from a point that violates its own constraints.
    #[error("infeasible start: {0}")]
    InfeasibleStart(String),

    /// Box bounds that cannot contain any feasible design.
    #[error("invalid design bounds: {0}")]
    InvalidBounds(String),

    /// Rescaling a design to the target wavelength pushed it out of bounds.
    #[error("wavelength-rescaled design violates constraints: {0}")]
    RescaleInfeasible(String),

    /// A quantity that is required by a downstream step was missing.
    #[error("{0}")]
    MissingData(String),

    /// Malformed tabular input (CSV and friends).
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    /// An underlying read or write failed. Carries the rendered message so
    /// the error type stays cloneable.
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Check that `value` is finite, tagging the error with the field name.
    pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { name, value })
        }
    }

    /// Check that `value` is finite and strictly positive.
    pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
        Self::check_finite(name, value)?;
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::NonPositive { name, value })
        }
    }

    /// Check that `value` is finite and non-negative.
    pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
        Self::check_finite(name, value)?;
        if value >= 0.0 {
            Ok(value)
        } else {
            Err(Error::Negative { name, value })
        }
    }

    /// Check that `value` is a usable efficiency, i.e. lies in (0, 1].
    pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<f64> {
        Self::check_finite(name, value)?;
        if value > 0.0 && value <= 1.0 {
            Ok(value)
        } else {
            Err(Error::NotAFraction { name, value })
        }
    }
}
