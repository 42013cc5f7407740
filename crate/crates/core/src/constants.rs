//! Physical constants and unit conventions.
//!
//! Every frequency-like quantity held by the types in this crate is an
//! *angular* rate in rad/s. Interfaces that face files, CLIs, or plots speak
//! ordinary frequency in Hz and convert at the boundary with
//! [`hz_to_angular`] / [`angular_to_hz`]. Mixing the two conventions is the
//! classic 2π bug in this field, so the conversion points are kept explicit
//! and minimal.

use std::f64::consts::TAU;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact by SI definition).
pub const KB: f64 = 1.380_649e-23;

/// Convert an ordinary frequency in Hz to an angular rate in rad/s.
#[inline]
pub fn hz_to_angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Convert an angular rate in rad/s to an ordinary frequency in Hz.
#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}
