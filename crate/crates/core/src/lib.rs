//! Modeling, inference, and design-search toolkit for sideband-cooled
//! microwave-frequency optomechanical resonators.
//!
//! The crate is organized around one forward model and the machinery that
//! surrounds it in the lab:
//!
//! * **Forward model** ([`cavity`], [`mechanics`], [`drive`], [`bath`],
//!   [`cooling`], [`bose`], [`spectrum`]): pump power to intracavity photons,
//!   photons to back-action damping, absorption heating to an effective hot
//!   bath, and the resulting steady-state occupancy and quantum
//!   cooperativity.
//! * **Inference** ([`fit`]): power-law and piecewise-linewidth fits that
//!   recover the bath model from swept data, plus the thermal-conductance
//!   scaling arguments used to compare device geometries.
//! * **Photon counting** ([`counting`]): sideband count rates, Poisson pulse
//!   simulation, intra-pulse occupancy dynamics, ringdown experiments, and
//!   the estimators that climb back from counts to occupancies.
//! * **Design search** ([`design`]): bounded Nelder–Mead over a
//!   nine-parameter crystal geometry against a pluggable fitness evaluator.
//! * **Sweeps** ([`sweep`], [`contour`]): the cooling curves,
//!   quantum-cooperativity curves, and loss-versus-drive maps assembled from
//!   the forward model.
//!
//! All frequencies and rates inside the crate are angular (rad/s);
//! everything that leaves through [`io`] or a constructor suffixed `_hz`
//! speaks ordinary Hz. Randomized routines take explicit 64-bit seeds and
//! are deterministic for a fixed seed, including under parallel execution.

pub mod bath;
pub mod bose;
pub mod cavity;
pub mod constants;
pub mod contour;
pub mod cooling;
pub mod counting;
pub mod design;
pub mod drive;
pub mod error;
pub mod fit;
pub mod io;
pub mod mechanics;
pub mod spectrum;
pub mod sweep;

mod rng;
mod solve;

pub use bath::{hot_bath, BathState, DephasingTreatment, HotBathModel};
pub use bose::{
    bose_occupancy, bose_occupancy_linearized, temperature_from_occupancy,
    temperature_from_occupancy_linearized,
};
pub use cavity::OpticalCavity;
pub use constants::{angular_to_hz, hz_to_angular, HBAR, KB};
pub use contour::{iso_ceff_contours, ContourLine};
pub use cooling::{cooled_occupancy, parametric_rate, total_linewidth, CoolingResult};
pub use counting::{
    fit_ringdown, simulate_counts, simulate_ringdown, BinnedCounts, DetectionChain, DetuningCase,
    PulseSchedule, PulsedDevice, RingdownResult,
};
pub use design::{
    evaluate, multi_restart, nelder_mead, scale_to_target_wavelength, BoundarySurrogate,
    DesignBounds, DesignEvaluator, DesignVector, EvalStatus, FitnessEvaluation, ModalResponse,
    MultiWellSurrogate, NelderMeadOptions, QuadraticSurrogate, SearchTrace, SimplexSnapshot,
    TraceRecord, DEFAULT_Q_THRESHOLD, N_DESIGN_PARAMS,
};
pub use drive::{input_power_for_photons, intracavity_photons, DriveCondition};
pub use error::{Error, Result};
pub use io::{
    read_curve_csv, read_histogram_csv, read_map_csv, read_points_csv, read_ringdown_csv,
    read_trace_csv, write_curve_csv, write_histogram_csv, write_map_csv, write_points_csv,
    write_ringdown_csv, write_spectrum_csv, write_trace_csv,
};
pub use mechanics::MechanicalMode;
pub use spectrum::{centered_grid, thermal_noise_spectrum, NoiseSpectrum};
pub use sweep::{
    ceff_curve, ceff_map, cooling_curve, linear_grid, log_grid, CeffCurve, CeffMap, CurvePoint,
    MapPoint,
};
