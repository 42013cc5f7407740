//! Drive sweeps: cooling curves over intracavity photon number and the
//! occupancy / quantum-cooperativity map over (loaded Q, photon number).
//!
//! Every sweep point composes the same four steps — drive power for the
//! requested photon number on the lower motional sideband, hot-bath state
//! at that drive, back-action rate, steady-state occupancy — so a grid
//! entry always equals the corresponding standalone calls.

use rayon::prelude::*;

use crate::bath::{hot_bath, HotBathModel};
use crate::cavity::OpticalCavity;
use crate::cooling::{cooled_occupancy, parametric_rate};
use crate::drive::input_power_for_photons;
use crate::error::{Error, Result};
use crate::mechanics::MechanicalMode;

/// One cooling-curve sample: drive point, hot-bath state, and the resulting
/// steady state. Rates are angular (rad/s); `p_in` is the on-chip power in
/// watts (fiber-coupling losses apply upstream of this number).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Intracavity photon number.
    pub n_c: f64,
    /// On-chip drive power on the lower sideband, W.
    pub p_in: f64,
    /// Waveguide-absorption contribution to the heating drive,
    /// `beta * p_in` (photon-number-equivalent units).
    pub n_wg: f64,
    /// Hot-bath occupancy at this drive.
    pub n_p: f64,
    /// Hot-bath damping rate, rad/s.
    pub gamma_p: f64,
    /// Back-action scattering rate, rad/s.
    pub gamma_om: f64,
    /// Steady-state phonon occupancy.
    pub n_avg: f64,
    /// Classical cooperativity `gamma_om / gamma_b`.
    pub c: f64,
    /// Quantum cooperativity `C / n_b`.
    pub c_eff: f64,
}

/// A cooling curve plus the interpolated drive where the quantum
/// cooperativity first exceeds one.
#[derive(Debug, Clone, PartialEq)]
pub struct CeffCurve {
    /// The sweep, ordered by the input grid.
    pub points: Vec<CurvePoint>,
    /// First `n_c` with `C_eff > 1`, linearly interpolated between the
    /// bracketing grid points; `None` when the curve never crosses.
    pub unity_crossing: Option<f64>,
}

/// Occupancy and quantum cooperativity on a (loaded Q, photon number)
/// lattice, stored row-major with the Q axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct CeffMap {
    q_c: Vec<f64>,
    n_c: Vec<f64>,
    n_avg: Vec<f64>,
    c_eff: Vec<f64>,
}

/// One lattice entry of a [`CeffMap`], in tabular order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    /// Loaded optical quality factor.
    pub q_c: f64,
    /// Intracavity photon number.
    pub n_c: f64,
    /// Steady-state phonon occupancy.
    pub n_avg: f64,
    /// Quantum cooperativity.
    pub c_eff: f64,
}

impl CeffMap {
    /// Assemble a map from its axes and row-major values (Q outermost).
    /// Both axes must be strictly increasing and positive; the value
    /// vectors must cover the full lattice.
    pub fn from_grids(
        q_c: Vec<f64>,
        n_c: Vec<f64>,
        n_avg: Vec<f64>,
        c_eff: Vec<f64>,
    ) -> Result<Self> {
        check_grid("q_c grid", &q_c)?;
        check_axis_values("n_c grid", &n_c)?;
        let cells = q_c.len() * n_c.len();
        for (name, values) in [("n_avg", &n_avg), ("c_eff", &c_eff)] {
            if values.len() != cells {
                return Err(Error::MissingData(format!(
                    "{name} holds {} values for a {} x {} lattice",
                    values.len(),
                    q_c.len(),
                    n_c.len()
                )));
            }
            for &v in values.iter() {
                Error::check_finite(name, v)?;
            }
        }
        Ok(Self {
            q_c,
            n_c,
            n_avg,
            c_eff,
        })
    }

    /// Loaded-Q axis.
    pub fn q_c_grid(&self) -> &[f64] {
        &self.q_c
    }

    /// Photon-number axis.
    pub fn n_c_grid(&self) -> &[f64] {
        &self.n_c
    }

    /// Occupancy at lattice indices (Q index, photon index).
    pub fn n_avg_at(&self, i_q: usize, i_n: usize) -> f64 {
        self.n_avg[i_q * self.n_c.len() + i_n]
    }

    /// Quantum cooperativity at lattice indices (Q index, photon index).
    pub fn c_eff_at(&self, i_q: usize, i_n: usize) -> f64 {
        self.c_eff[i_q * self.n_c.len() + i_n]
    }

    /// All lattice entries in row-major order (Q outermost), the order the
    /// tabular output uses.
    pub fn rows(&self) -> impl Iterator<Item = MapPoint> + '_ {
        self.q_c.iter().enumerate().flat_map(move |(i_q, &q)| {
            self.n_c.iter().enumerate().map(move |(i_n, &n)| MapPoint {
                q_c: q,
                n_c: n,
                n_avg: self.n_avg_at(i_q, i_n),
                c_eff: self.c_eff_at(i_q, i_n),
            })
        })
    }
}

/// Validate a strictly increasing grid of positive values.
fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::MissingData(format!("{name} is empty")));
    }
    for &v in grid {
        Error::check_positive(name, v)?;
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidBounds(format!(
                "{name} must be strictly increasing ({} follows {})",
                pair[1], pair[0]
            )));
        }
    }
    Ok(())
}

/// Photon-number axes may start at zero (an undriven column), so they are
/// validated as non-negative rather than positive.
fn check_axis_values(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::MissingData(format!("{name} is empty")));
    }
    for &v in grid {
        Error::check_non_negative(name, v)?;
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidBounds(format!(
                "{name} must be strictly increasing ({} follows {})",
                pair[1], pair[0]
            )));
        }
    }
    Ok(())
}

/// `n` logarithmically spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    Error::check_positive("grid min", min)?;
    Error::check_positive("grid max", max)?;
    if max <= min {
        return Err(Error::InvalidBounds(format!(
            "grid max {max} must exceed min {min}"
        )));
    }
    if n < 2 {
        return Err(Error::MissingData(format!(
            "a grid needs at least 2 points, got {n}"
        )));
    }
    let ratio = max / min;
    Ok((0..n)
        .map(|i| min * ratio.powf(i as f64 / (n - 1) as f64))
        .collect())
}

/// `n` linearly spaced values from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    Error::check_finite("grid min", min)?;
    Error::check_finite("grid max", max)?;
    if max <= min {
        return Err(Error::InvalidBounds(format!(
            "grid max {max} must exceed min {min}"
        )));
    }
    if n < 2 {
        return Err(Error::MissingData(format!(
            "a grid needs at least 2 points, got {n}"
        )));
    }
    let step = (max - min) / (n - 1) as f64;
    Ok((0..n).map(|i| min + step * i as f64).collect())
}

/// Evaluate one cooling-curve point: sideband drive power for `n_c`,
/// hot bath at that drive, back-action rate, steady state.
fn curve_point(
    cavity: &OpticalCavity,
    mode: &MechanicalMode,
    model: &HotBathModel,
    n_c: f64,
) -> Result<CurvePoint> {
    let p_in = input_power_for_photons(cavity, mode.omega_m, n_c)?;
    let bath = hot_bath(model, mode, n_c, p_in)?;
    let gamma_om = parametric_rate(mode, cavity, n_c)?;
    let n_wg = model.beta * p_in;
    let cooled = cooled_occupancy(&bath, gamma_om, n_c, n_wg)?;
    Ok(CurvePoint {
        n_c,
        p_in,
        n_wg,
        n_p: bath.n_p,
        gamma_p: bath.gamma_p,
        gamma_om,
        n_avg: cooled.n_avg,
        c: cooled.c,
        c_eff: cooled.c_eff,
    })
}

/// Sweep the steady-state occupancy over an intracavity photon-number grid
/// with the pump on the lower motional sideband. Points are evaluated in
/// parallel and returned in grid order.
pub fn cooling_curve(
    cavity: &OpticalCavity,
    mode: &MechanicalMode,
    model: &HotBathModel,
    n_c_grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    check_axis_values("n_c grid", n_c_grid)?;
    n_c_grid
        .par_iter()
        .map(|&n_c| curve_point(cavity, mode, model, n_c))
        .collect()
}

/// A [`cooling_curve`] annotated with the first drive where the quantum
/// cooperativity exceeds one (linear interpolation between grid points).
pub fn ceff_curve(
    cavity: &OpticalCavity,
    mode: &MechanicalMode,
    model: &HotBathModel,
    n_c_grid: &[f64],
) -> Result<CeffCurve> {
    let points = cooling_curve(cavity, mode, model, n_c_grid)?;
    let unity_crossing = points.iter().position(|p| p.c_eff > 1.0).map(|i| {
        if i == 0 {
            points[0].n_c
        } else {
            let (a, b) = (&points[i - 1], &points[i]);
            a.n_c + (1.0 - a.c_eff) * (b.n_c - a.n_c) / (b.c_eff - a.c_eff)
        }
    });
    Ok(CeffCurve {
        points,
        unity_crossing,
    })
}

/// Map occupancy and quantum cooperativity over a (loaded Q, photon
/// number) lattice. Each Q rescales the total and external decay rates
/// together (fixed extraction fraction and fixed `g0`); the heating drive
/// is evaluated with the waveguide-absorption channel switched off
/// (`beta = 0`), since the power required for a given photon number would
/// otherwise vary along the Q axis.
pub fn ceff_map(
    cavity: &OpticalCavity,
    mode: &MechanicalMode,
    model: &HotBathModel,
    q_c_grid: &[f64],
    n_c_grid: &[f64],
) -> Result<CeffMap> {
    check_grid("q_c grid", q_c_grid)?;
    check_axis_values("n_c grid", n_c_grid)?;
    let intracavity_only = HotBathModel { beta: 0.0, ..*model };
    let rows: Vec<Vec<(f64, f64)>> = q_c_grid
        .par_iter()
        .map(|&q_c| {
            let rescaled = cavity.with_q_loaded(q_c)?;
            n_c_grid
                .iter()
                .map(|&n_c| {
                    let bath = hot_bath(&intracavity_only, mode, n_c, 0.0)?;
                    let gamma_om = parametric_rate(mode, &rescaled, n_c)?;
                    let cooled = cooled_occupancy(&bath, gamma_om, n_c, 0.0)?;
                    Ok((cooled.n_avg, cooled.c_eff))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut n_avg = Vec::with_capacity(q_c_grid.len() * n_c_grid.len());
    let mut c_eff = Vec::with_capacity(n_avg.capacity());
    for row in rows {
        for (n, c) in row {
            n_avg.push(n);
            c_eff.push(c);
        }
    }
    CeffMap::from_grids(q_c_grid.to_vec(), n_c_grid.to_vec(), n_avg, c_eff)
}
