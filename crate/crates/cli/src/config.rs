//! Run configuration: the `[device]`, `[bath]`, and `[sweep]` sections plus
//! the top-level `seed`, loaded from a TOML-style text file and overridden
//! by command-line flags.
//!
//! Every key carries a fixed SI unit baked into its name (`_hz`, `_w`,
//! `_k`, `_cps`); frequencies and rates are ordinary Hz, never angular.
//! Unknown keys are hard errors so a typo cannot silently fall back to a
//! default. Missing keys take the reference eight-shield device values,
//! which also serve as the built-in configuration when no file is given.

use std::fmt::Write as _;
use std::path::Path;

use omc_core::counting::{DetectionChain, PulsedDevice};
use omc_core::{bose_occupancy, HotBathModel, MechanicalMode, OpticalCavity};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Key-by-key reference for the configuration file, shown under `--help`.
pub const CONFIG_REFERENCE: &str = "\
CONFIG FILE (TOML: `[section]` headers, `key = value` lines, UTF-8):
  seed                     integer   master seed for every stochastic step

  [device]                           optical cavity, mechanical mode, detector
  omega_c_hz               Hz        optical resonance frequency
  kappa_hz                 Hz        loaded optical decay rate
  kappa_e_hz               Hz        external (waveguide) decay rate
  omega_m_hz               Hz        mechanical frequency
  gamma_0_hz               Hz        intrinsic mechanical decay rate
  gamma_phi_hz             Hz        pure-dephasing linewidth contribution
  g0_hz                    Hz        vacuum optomechanical coupling rate
  eta_cpl                  (0, 1]    fiber-to-waveguide coupling efficiency
  eta_det                  (0, 1]    off-chip detection efficiency
  dark_cps                 counts/s  detector dark-count rate
  bleed_cps                counts/s  pump bleed-through rate

  [bath]                             optical-absorption heating laws
  occ_amplitude            --        hot-bath occupancy multiplier
  occ_exponent             (0, 1)    hot-bath occupancy exponent
  damp_low_amplitude_hz    Hz        low-drive damping amplitude
  damp_low_exponent        (0, 1)    low-drive damping exponent
  damp_high_offset_hz      Hz        high-drive total-linewidth offset
  damp_high_amplitude_hz   Hz        high-drive damping amplitude
  damp_high_exponent       (0, 1)    high-drive damping exponent
  beta_per_w               1/W       waveguide-heating drive coefficient
  t_0_k                    K         cold-bath temperature
  n_0                      --        cold-bath occupancy (default: Bose
                                     occupancy of omega_m_hz at t_0_k)

  [sweep]                            default grids (all grids logarithmic)
  nc_min, nc_max           photons   intracavity photon-number span
  nc_points                integer   photon-number grid size
  qc_min, qc_max           --        loaded-optical-Q span for maps
  qc_points                integer   loaded-Q grid size
  p_min_w, p_max_w         W         pump-power span
  p_points                 integer   pump-power grid size

Unknown keys are rejected. Flags override their config keys; every key
defaults to the reference eight-shield device, so all subcommands run
without a config file.";

/// Top-level run configuration. Field defaults reproduce the reference
/// eight-shield device, so an empty file (or none at all) is valid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed; every stochastic subcommand derives its streams from it.
    pub seed: u64,
    pub device: DeviceConfig,
    pub bath: BathConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            device: DeviceConfig::default(),
            bath: BathConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

/// `[device]` section: cavity, mechanical mode, and detection chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub omega_c_hz: f64,
    pub kappa_hz: f64,
    pub kappa_e_hz: f64,
    pub omega_m_hz: f64,
    pub gamma_0_hz: f64,
    pub gamma_phi_hz: f64,
    pub g0_hz: f64,
    pub eta_cpl: f64,
    pub eta_det: f64,
    pub dark_cps: f64,
    pub bleed_cps: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            omega_c_hz: 193.4e12,
            kappa_hz: 1.187e9,
            kappa_e_hz: 181e6,
            omega_m_hz: 10.02e9,
            gamma_0_hz: 8.28,
            gamma_phi_hz: 14.54e3,
            g0_hz: 1.182e6,
            eta_cpl: 0.597,
            eta_det: 0.1,
            dark_cps: 0.6,
            bleed_cps: 0.0,
        }
    }
}

/// `[bath]` section: the fitted optical-absorption heating laws.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathConfig {
    pub occ_amplitude: f64,
    pub occ_exponent: f64,
    pub damp_low_amplitude_hz: f64,
    pub damp_low_exponent: f64,
    pub damp_high_offset_hz: f64,
    pub damp_high_amplitude_hz: f64,
    pub damp_high_exponent: f64,
    pub beta_per_w: f64,
    pub t_0_k: f64,
    /// Cold-bath occupancy; `None` derives it from `t_0_k` and the
    /// mechanical frequency.
    pub n_0: Option<f64>,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self {
            occ_amplitude: 1.1,
            occ_exponent: 0.3,
            damp_low_amplitude_hz: 1.1e3,
            damp_low_exponent: 0.61,
            damp_high_offset_hz: 23.91e3,
            damp_high_amplitude_hz: 9.01e3,
            damp_high_exponent: 0.29,
            beta_per_w: 15e6,
            t_0_k: 63e-3,
            n_0: None,
        }
    }
}

/// `[sweep]` section: default grid spans for the sweep subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub nc_min: f64,
    pub nc_max: f64,
    pub nc_points: usize,
    pub qc_min: f64,
    pub qc_max: f64,
    pub qc_points: usize,
    pub p_min_w: f64,
    pub p_max_w: f64,
    pub p_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nc_min: 1.0,
            nc_max: 1e3,
            nc_points: 241,
            qc_min: 1e5,
            qc_max: 1e7,
            qc_points: 41,
            p_min_w: 1e-9,
            p_max_w: 1e-4,
            p_points: 61,
        }
    }
}

impl RunConfig {
    /// Load a configuration file, or the built-in defaults when `path` is
    /// `None`. Unknown keys and type mismatches are validation errors that
    /// name the offending key.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Invalid(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        toml::from_str(&text).map_err(|e| {
            CliError::Invalid(format!("config `{}`: {}", path.display(), e.message()))
        })
    }

    /// SHA-256 of the resolved configuration (defaults and flag overrides
    /// applied), truncated to 16 hex digits for the run manifest.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in &digest[..8] {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }

    /// Optical cavity from the `[device]` section.
    pub fn cavity(&self) -> Result<OpticalCavity, CliError> {
        let d = &self.device;
        OpticalCavity::from_hz(d.omega_c_hz, d.kappa_hz, d.kappa_e_hz).map_err(device_key)
    }

    /// Mechanical mode from the `[device]` section.
    pub fn mode(&self) -> Result<MechanicalMode, CliError> {
        let d = &self.device;
        MechanicalMode::from_hz(d.omega_m_hz, d.gamma_0_hz, d.gamma_phi_hz, d.g0_hz)
            .map_err(device_key)
    }

    /// Detection chain from the `[device]` section.
    pub fn chain(&self) -> Result<DetectionChain, CliError> {
        let d = &self.device;
        DetectionChain::new(d.eta_det, d.dark_cps, d.bleed_cps).map_err(device_key)
    }

    /// Hot-bath model from the `[bath]` section; the cold-bath occupancy
    /// falls back to the Bose occupancy of the device's mechanical mode at
    /// the cryostat temperature.
    pub fn bath_model(&self) -> Result<HotBathModel, CliError> {
        let b = &self.bath;
        let n_0 = match b.n_0 {
            Some(n_0) => n_0,
            None => {
                let mode = self.mode()?;
                bose_occupancy(mode.omega_m, b.t_0_k)
                    .map_err(|e| CliError::Invalid(format!("[bath] t_0_k: {e}")))?
            }
        };
        HotBathModel::from_hz(
            b.occ_amplitude,
            b.occ_exponent,
            b.damp_low_amplitude_hz,
            b.damp_low_exponent,
            b.damp_high_offset_hz,
            b.damp_high_amplitude_hz,
            b.damp_high_exponent,
            b.beta_per_w,
            n_0,
            b.t_0_k,
        )
        .map_err(|e| CliError::Invalid(format!("[bath] {e}")))
    }

    /// Everything the pulsed-counting simulations need, bundled.
    pub fn pulsed_device(&self) -> Result<PulsedDevice, CliError> {
        PulsedDevice::new(
            self.cavity()?,
            self.mode()?,
            self.bath_model()?,
            self.chain()?,
            self.device.eta_cpl,
        )
        .map_err(device_key)
    }
}

fn device_key(e: omc_core::Error) -> CliError {
    CliError::Invalid(format!("[device] {e}"))
}
