//! Inference: power-law fits for the hot-bath laws, the piecewise linewidth
//! decomposition, exponential ringdown fits, and thermal-conductance
//! scaling relations.

mod conductance;
mod exponential;
mod linewidth;
mod power_law;

pub use conductance::{bath_temperature_from_power_above_base, occupancy_ratio_1d_2d, ConductanceModel};
pub use linewidth::{fit_piecewise_linewidth, PiecewiseLinewidthFit};
pub use power_law::{fit_power_law, PowerLawFit};

pub(crate) use exponential::fit_exponential_decay;
