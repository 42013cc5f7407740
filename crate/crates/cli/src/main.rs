//! `omc`: deterministic command-line front end for the optomechanical
//! cooling toolkit. Each subcommand drives one library operation and emits
//! its table as CSV — to `--out` when given, otherwise to stdout — with a
//! run manifest (version, subcommand, config hash, seed, resolved
//! parameters) embedded as leading `#` comment lines, so every output file
//! records how to reproduce itself. Identical configuration and seed
//! produce byte-identical files regardless of `--threads`.
//!
//! Exit codes: 0 on success, 2 when configuration, flags, or input files
//! are invalid, 3 when the requested computation itself fails (no steady
//! state, divergent fit, stalled integration).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod run;

use config::CONFIG_REFERENCE;

/// A failure, classified by which phase of the run it belongs to: assembling
/// the inputs (exit code 2) or executing the computation (exit code 3).
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flags, input files, or output destination.
    Invalid(String),
    /// The computation itself failed on valid inputs.
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(msg) | CliError::Numeric(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "omc",
    version,
    about = "Simulation, inference, and design-search toolkit for sideband-cooled optomechanical resonators",
    after_long_help = CONFIG_REFERENCE
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, clap::Args)]
pub struct GlobalArgs {
    /// Configuration file; omit to run the built-in reference device.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file for the CSV table (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Master seed, overriding the config `seed` key.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker-pool size (default: hardware parallelism). Results are
    /// identical for every pool size.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Waveguide-heating coefficient in 1/W, overriding `[bath] beta_per_w`.
    #[arg(long, global = true, value_name = "PER_W")]
    pub beta: Option<f64>,
}

/// Pump-detuning cases for the pulsed-counting subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    /// Pump one mechanical frequency below the cavity (cooling).
    Red,
    /// Pump one mechanical frequency above the cavity (amplification).
    Blue,
    /// Pump on cavity resonance (sideband-suppressed readout).
    Resonant,
}

/// Benchmark fitness surfaces for the design-search subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Surrogate {
    /// Convex bowl with one interior optimum.
    Quadratic,
    /// Optimum pinned against the minimum-gap constraint.
    Boundary,
    /// Several competing local optima.
    Multiwell,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intracavity photon number versus pump power at fixed detuning.
    Photons {
        /// Lowest pump power, W (default: config `p_min_w`).
        #[arg(long, value_name = "W")]
        p_min_w: Option<f64>,
        /// Highest pump power, W (default: config `p_max_w`).
        #[arg(long, value_name = "W")]
        p_max_w: Option<f64>,
        /// Number of logarithmic power points (default: config `p_points`).
        #[arg(long, value_name = "N")]
        points: Option<usize>,
        /// Pump detuning below the cavity, Hz (default: the mechanical
        /// frequency, i.e. the red-sideband drive).
        #[arg(long, value_name = "HZ")]
        detuning_hz: Option<f64>,
    },

    /// Steady-state cooling curve over intracavity photon number.
    Cool {
        /// Lowest photon number (default: config `nc_min`).
        #[arg(long, value_name = "N_C")]
        nc_min: Option<f64>,
        /// Highest photon number (default: config `nc_max`).
        #[arg(long, value_name = "N_C")]
        nc_max: Option<f64>,
        /// Number of logarithmic grid points (default: config `nc_points`).
        #[arg(long, value_name = "N")]
        nc_points: Option<usize>,
    },

    /// Quantum-cooperativity curve and its C_eff = 1 crossing.
    Ceff {
        /// Lowest photon number (default: config `nc_min`).
        #[arg(long, value_name = "N_C")]
        nc_min: Option<f64>,
        /// Highest photon number (default: config `nc_max`).
        #[arg(long, value_name = "N_C")]
        nc_max: Option<f64>,
        /// Number of logarithmic grid points (default: config `nc_points`).
        #[arg(long, value_name = "N")]
        nc_points: Option<usize>,
    },

    /// Occupancy and C_eff over a (loaded optical Q, photon number) lattice.
    Map {
        /// Lowest loaded optical Q (default: config `qc_min`).
        #[arg(long, value_name = "Q")]
        qc_min: Option<f64>,
        /// Highest loaded optical Q (default: config `qc_max`).
        #[arg(long, value_name = "Q")]
        qc_max: Option<f64>,
        /// Number of logarithmic Q points (default: config `qc_points`).
        #[arg(long, value_name = "N")]
        qc_points: Option<usize>,
        /// Lowest photon number (default: config `nc_min`).
        #[arg(long, value_name = "N_C")]
        nc_min: Option<f64>,
        /// Highest photon number (default: config `nc_max`).
        #[arg(long, value_name = "N_C")]
        nc_max: Option<f64>,
        /// Number of logarithmic photon points (default: config `nc_points`).
        #[arg(long, value_name = "N")]
        nc_points: Option<usize>,
    },

    /// Fit the two-branch linewidth law to a swept-drive table.
    BathFit {
        /// CSV with drive in column 1 and total linewidth (Hz) in column 2;
        /// any third column is ignored.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },

    /// Simulate a pulsed ringdown and fit the intrinsic decay rate.
    Ringdown {
        /// Fit an existing ringdown table instead of simulating one.
        #[arg(
            long,
            value_name = "PATH",
            conflicts_with_all = ["tau_min_s", "tau_max_s", "delays", "n_pulses", "nc_peak", "tau_pulse_s", "tau_bin_s"]
        )]
        input: Option<PathBuf>,
        /// Shortest pump-off delay, s.
        #[arg(long, value_name = "S", default_value_t = 1e-3)]
        tau_min_s: f64,
        /// Longest pump-off delay, s.
        #[arg(long, value_name = "S", default_value_t = 1e-1)]
        tau_max_s: f64,
        /// Number of logarithmic delay points.
        #[arg(long, value_name = "N", default_value_t = 12)]
        delays: usize,
        /// Pulse pairs averaged per delay.
        #[arg(long, value_name = "N", default_value_t = 20_000_000)]
        n_pulses: u64,
        /// Intracavity photons at the pulse plateau.
        #[arg(long, value_name = "N_C", default_value_t = 60.0)]
        nc_peak: f64,
        /// Optical pulse length, s.
        #[arg(long, value_name = "S", default_value_t = 10e-6)]
        tau_pulse_s: f64,
        /// Counting bin width, s.
        #[arg(long, value_name = "S", default_value_t = 25.6e-9)]
        tau_bin_s: f64,
    },

    /// Simulate binned sideband counts across the optical pulse window.
    Counts {
        /// Intracavity photons at the pulse plateau.
        #[arg(long, value_name = "N_C", default_value_t = 60.0)]
        nc_peak: f64,
        /// Pump detuning case.
        #[arg(long, value_enum, default_value_t = Case::Red)]
        case: Case,
        /// Number of pulses accumulated into the histogram.
        #[arg(long, value_name = "N", default_value_t = 10_000_000)]
        n_pulses: u64,
        /// Optical pulse length, s.
        #[arg(long, value_name = "S", default_value_t = 10e-6)]
        tau_pulse_s: f64,
        /// Counting bin width, s.
        #[arg(long, value_name = "S", default_value_t = 25.6e-9)]
        tau_bin_s: f64,
        /// Occupancy at the pulse edge (default: the cold-bath occupancy).
        #[arg(long, value_name = "N")]
        n_start: Option<f64>,
        /// Exponential hot-bath turn-on time, µs (default: instantaneous).
        #[arg(long, value_name = "US")]
        bath_rise_us: Option<f64>,
    },

    /// Bounded Nelder-Mead design search on a benchmark fitness surface.
    Optimize {
        /// Independent restarts from scattered feasible seeds.
        #[arg(long, value_name = "N", default_value_t = 8)]
        restarts: usize,
        /// Evaluation budget per restart.
        #[arg(long, value_name = "N", default_value_t = 2000)]
        max_evals: usize,
        /// Relative fitness-spread convergence threshold (<= 0 disables).
        #[arg(long, value_name = "TOL", default_value_t = 1e-4)]
        tol_f: f64,
        /// Simplex-diameter convergence threshold, nm (<= 0 disables).
        #[arg(long, value_name = "NM", default_value_t = 0.0)]
        tol_x: f64,
        /// Scattering quality-factor acceptance threshold.
        #[arg(long, value_name = "Q", default_value_t = omc_core::DEFAULT_Q_THRESHOLD)]
        q_threshold: f64,
        /// Initial simplex edge as a fraction of each bound span.
        #[arg(long, value_name = "FRAC", default_value_t = 0.10)]
        initial_step: f64,
        /// Benchmark fitness surface.
        #[arg(long, value_enum, default_value_t = Surrogate::Quadratic)]
        surrogate: Surrogate,
        /// Additive relative evaluation noise (0 = noiseless).
        #[arg(long, value_name = "FRAC", default_value_t = 0.0)]
        noise: f64,
        /// Rescale every candidate to put its optical mode here, Hz.
        #[arg(long, value_name = "HZ")]
        target_omega_hz: Option<f64>,
    },

    /// Thermal sideband noise spectrum at one drive point.
    Spectrum {
        /// Intracavity photon number of the drive.
        #[arg(long, value_name = "N_C", default_value_t = 1.0)]
        nc: f64,
        /// Half-span of the frequency grid, in total linewidths.
        #[arg(long, value_name = "N", default_value_t = 4.0)]
        span: f64,
        /// Number of frequency points.
        #[arg(long, value_name = "N", default_value_t = 401)]
        points: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
