//! Browser bindings for the cooling toolkit: three interactive operations
//! exported through `wasm-bindgen`, each returning a JSON string so the
//! page needs no shared memory layout.
//!
//! Every export follows the same contract: on success the JSON carries the
//! result object, on failure it carries `{"error": "<message>"}` — the
//! page checks for the `error` key instead of catching exceptions. Numeric
//! inputs arrive as plain JS numbers (counts and seeds included, to avoid
//! BigInt at the boundary); frequencies are ordinary Hz.
//!
//! The same functions compile natively, so the JSON contract is unit
//! tested on the host without a wasm toolchain. Build the browser module
//! with `wasm-pack build crates/demo --target web --out-dir ../../www/pkg`,
//! which drops the module next to the page that loads it (`www/index.html`).

use omc_core::counting::{DetectionChain, PulseSchedule, PulsedDevice};
use omc_core::{
    angular_to_hz, ceff_curve, ceff_map, fit_ringdown, log_grid, simulate_ringdown, HotBathModel,
    MechanicalMode, OpticalCavity,
};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Optical resonance frequency shared by every demo device, Hz.
const OMEGA_C_HZ: f64 = 193.4e12;

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

/// Serialize a result, folding any failure into the `{"error": ...}` shape.
fn to_json<T: Serialize>(result: Result<T, omc_core::Error>) -> String {
    let body = match result {
        Ok(value) => serde_json::to_value(&value),
        Err(e) => serde_json::to_value(ErrorBody {
            error: &e.to_string(),
        }),
    };
    body.and_then(|v| serde_json::to_string(&v))
        .unwrap_or_else(|e| format!(r#"{{"error":"serialization failed: {e}"}}"#))
}

#[derive(Serialize)]
struct CurvePointJson {
    n_c: f64,
    p_in_w: f64,
    n_p: f64,
    gamma_om_hz: f64,
    n_avg: f64,
    c_eff: f64,
}

#[derive(Serialize)]
struct CurveJson {
    points: Vec<CurvePointJson>,
    /// First photon number with quantum cooperativity above one, when the
    /// curve crosses on the requested grid.
    unity_crossing: Option<f64>,
}

fn curve(
    g0_hz: f64,
    kappa_hz: f64,
    kappa_e_hz: f64,
    beta_per_w: f64,
    nc_min: f64,
    nc_max: f64,
    points: usize,
) -> Result<CurveJson, omc_core::Error> {
    let cavity = OpticalCavity::from_hz(OMEGA_C_HZ, kappa_hz, kappa_e_hz)?;
    let mode = MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, g0_hz)?;
    let model = HotBathModel {
        beta: beta_per_w,
        ..HotBathModel::reference_fit()
    };
    let grid = log_grid(nc_min, nc_max, points)?;
    let curve = ceff_curve(&cavity, &mode, &model, &grid)?;
    Ok(CurveJson {
        points: curve
            .points
            .iter()
            .map(|p| CurvePointJson {
                n_c: p.n_c,
                p_in_w: p.p_in,
                n_p: p.n_p,
                gamma_om_hz: angular_to_hz(p.gamma_om),
                n_avg: p.n_avg,
                c_eff: p.c_eff,
            })
            .collect(),
        unity_crossing: curve.unity_crossing,
    })
}

/// Steady-state cooling curve for an eight-shield-style mechanical mode
/// under an adjustable cavity (`kappa_hz`, `kappa_e_hz`), coupling rate
/// (`g0_hz`), and waveguide-heating coefficient (`beta_per_w`), swept over
/// `points` logarithmic photon numbers in `[nc_min, nc_max]`.
#[wasm_bindgen]
pub fn cooling_curve_json(
    g0_hz: f64,
    kappa_hz: f64,
    kappa_e_hz: f64,
    beta_per_w: f64,
    nc_min: f64,
    nc_max: f64,
    points: usize,
) -> String {
    to_json(curve(
        g0_hz, kappa_hz, kappa_e_hz, beta_per_w, nc_min, nc_max, points,
    ))
}

#[derive(Serialize)]
struct MapJson {
    q_c: Vec<f64>,
    n_c: Vec<f64>,
    /// Row-major occupancy, `q_c` axis outermost.
    n_avg: Vec<f64>,
    /// Row-major quantum cooperativity, same layout.
    c_eff: Vec<f64>,
}

fn map(
    qc_min: f64,
    qc_max: f64,
    qc_points: usize,
    nc_min: f64,
    nc_max: f64,
    nc_points: usize,
) -> Result<MapJson, omc_core::Error> {
    // Reference eight-shield device; the map itself rescales the cavity
    // along the loaded-Q axis holding the coupling fraction fixed.
    let cavity = OpticalCavity::from_hz(OMEGA_C_HZ, 1.187e9, 181e6)?;
    let mode = MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6)?;
    let model = HotBathModel::reference_fit();
    let q_c = log_grid(qc_min, qc_max, qc_points)?;
    let n_c = log_grid(nc_min, nc_max, nc_points)?;
    let lattice = ceff_map(&cavity, &mode, &model, &q_c, &n_c)?;
    let mut n_avg = Vec::with_capacity(qc_points * nc_points);
    let mut c_eff = Vec::with_capacity(qc_points * nc_points);
    for i_q in 0..q_c.len() {
        for i_n in 0..n_c.len() {
            n_avg.push(lattice.n_avg_at(i_q, i_n));
            c_eff.push(lattice.c_eff_at(i_q, i_n));
        }
    }
    Ok(MapJson {
        q_c,
        n_c,
        n_avg,
        c_eff,
    })
}

/// Occupancy and quantum cooperativity of the reference device over a
/// (loaded optical Q, photon number) lattice, both axes logarithmic.
#[wasm_bindgen]
pub fn ceff_map_json(
    qc_min: f64,
    qc_max: f64,
    qc_points: usize,
    nc_min: f64,
    nc_max: f64,
    nc_points: usize,
) -> String {
    to_json(map(qc_min, qc_max, qc_points, nc_min, nc_max, nc_points))
}

#[derive(Serialize)]
struct RingdownPointJson {
    tau_off_s: f64,
    n_i: f64,
    n_i_sigma: f64,
    n_f: f64,
}

#[derive(Serialize)]
struct RingdownJson {
    points: Vec<RingdownPointJson>,
    gamma_0_hz: f64,
    gamma_0_sigma_hz: f64,
    q_m: f64,
    amplitude: f64,
    baseline: f64,
}

fn ringdown(
    nc_peak: f64,
    n_pulses: f64,
    delays: usize,
    tau_min_s: f64,
    tau_max_s: f64,
    seed: f64,
) -> Result<RingdownJson, omc_core::Error> {
    let device = PulsedDevice::new(
        OpticalCavity::from_hz(OMEGA_C_HZ, 1.187e9, 181e6)?,
        MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6)?,
        HotBathModel::reference_fit(),
        DetectionChain::new(0.1, 0.6, 0.0)?,
        0.597,
    )?;
    let offs = log_grid(tau_min_s, tau_max_s, delays)?;
    let schedule = PulseSchedule::new(10e-6, 0.0, PulseSchedule::DEFAULT_TAU_BIN, n_pulses as u64)?;
    let points = simulate_ringdown(&device, &schedule, &offs, nc_peak, seed as u64)?;
    let fit = fit_ringdown(&points, device.mode.omega_m)?;
    Ok(RingdownJson {
        points: points
            .iter()
            .map(|p| RingdownPointJson {
                tau_off_s: p.tau_off,
                n_i: p.n_i,
                n_i_sigma: p.n_i_sigma,
                n_f: p.n_f,
            })
            .collect(),
        gamma_0_hz: angular_to_hz(fit.gamma_0_hat),
        gamma_0_sigma_hz: angular_to_hz(fit.gamma_0_sigma),
        q_m: fit.q_m_hat,
        amplitude: fit.amplitude,
        baseline: fit.baseline,
    })
}

/// Simulate a pulsed ringdown of the reference device at `nc_peak` photons
/// (`n_pulses` pulse pairs per delay, `delays` logarithmic delays in
/// `[tau_min_s, tau_max_s]`) and fit the intrinsic decay. `n_pulses` and
/// `seed` are passed as JS numbers and truncated to integers.
#[wasm_bindgen]
pub fn ringdown_json(
    nc_peak: f64,
    n_pulses: f64,
    delays: usize,
    tau_min_s: f64,
    tau_max_s: f64,
    seed: f64,
) -> String {
    to_json(ringdown(
        nc_peak, n_pulses, delays, tau_min_s, tau_max_s, seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(json: &str) -> Value {
        serde_json::from_str(json).expect("export returns valid JSON")
    }

    #[test]
    fn curve_json_carries_points_and_crossing() {
        let json = cooling_curve_json(1.182e6, 1.187e9, 181e6, 15e6, 1.0, 1e3, 31);
        let value = parse(&json);
        assert!(value.get("error").is_none(), "{json}");
        let points = value["points"].as_array().unwrap();
        assert_eq!(points.len(), 31);
        assert!(points[0]["n_avg"].as_f64().unwrap() > 0.0);
        // The reference device crosses quantum cooperativity one within
        // this span, so the crossing must be reported.
        let crossing = value["unity_crossing"].as_f64().unwrap();
        assert!((1.0..=1e3).contains(&crossing));
    }

    #[test]
    fn map_json_is_row_major_with_matching_lengths() {
        let json = ceff_map_json(1e5, 1e7, 4, 0.1, 1e4, 6);
        let value = parse(&json);
        assert!(value.get("error").is_none(), "{json}");
        assert_eq!(value["q_c"].as_array().unwrap().len(), 4);
        assert_eq!(value["n_c"].as_array().unwrap().len(), 6);
        assert_eq!(value["n_avg"].as_array().unwrap().len(), 24);
        assert_eq!(value["c_eff"].as_array().unwrap().len(), 24);
    }

    #[test]
    fn ringdown_json_fits_the_decay() {
        let json = ringdown_json(60.0, 2e7, 8, 1e-3, 1e-1, 42.0);
        let value = parse(&json);
        assert!(value.get("error").is_none(), "{json}");
        assert_eq!(value["points"].as_array().unwrap().len(), 8);
        let q_m = value["q_m"].as_f64().unwrap();
        assert!(
            (q_m - 1.2e9).abs() < 0.15 * 1.2e9,
            "fitted Q_m {q_m:e} far from the device value"
        );
    }

    /// The arguments `www/index.html` passes on first paint must keep
    /// producing well-formed bodies, or the page boots to a blank panel.
    #[test]
    fn page_boot_arguments_produce_well_formed_bodies() {
        let kappa_hz = 1.187e9;
        let json = cooling_curve_json(
            1.182e6,
            kappa_hz,
            0.1525 * kappa_hz,
            10f64.powf(7.176),
            1.0,
            1e4,
            161,
        );
        let curve = parse(&json);
        assert!(curve.get("error").is_none(), "{json}");
        let points = curve["points"].as_array().unwrap();
        assert_eq!(points.len(), 161);
        for point in points {
            for key in ["n_c", "p_in_w", "n_p", "gamma_om_hz", "n_avg", "c_eff"] {
                let v = point[key].as_f64().unwrap();
                assert!(v.is_finite() && v > 0.0, "{key} = {v}");
            }
        }
        let crossing = curve["unity_crossing"].as_f64().unwrap();
        assert!((1.0..=1e4).contains(&crossing));

        let map = parse(&ceff_map_json(1e5, 1e7, 97, 0.1, 1e4, 121));
        assert!(map.get("error").is_none());
        assert_eq!(map["q_c"].as_array().unwrap().len(), 97);
        assert_eq!(map["n_c"].as_array().unwrap().len(), 121);
        let c_eff = map["c_eff"].as_array().unwrap();
        assert_eq!(c_eff.len(), 97 * 121);
        let values: Vec<f64> = c_eff.iter().map(|v| v.as_f64().unwrap()).collect();
        assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
        // The unity contour the page draws must lie inside the lattice.
        assert!(values.iter().any(|v| *v > 1.0));
        assert!(values.iter().any(|v| *v < 1.0));

        let pulses = 10f64.powf(7.3).round();
        let ringdown = parse(&ringdown_json(60.0, pulses, 12, 1e-3, 1e-1, 42.0));
        assert!(ringdown.get("error").is_none());
        assert_eq!(ringdown["points"].as_array().unwrap().len(), 12);
        let q_m = ringdown["q_m"].as_f64().unwrap();
        assert!(
            (q_m - 1.2e9).abs() < 0.2 * 1.2e9,
            "fitted Q_m {q_m:e} far from the device value"
        );
    }

    #[test]
    fn invalid_inputs_come_back_as_error_objects() {
        let json = cooling_curve_json(1.182e6, 1.187e9, 2e9, 15e6, 1.0, 1e3, 31);
        let value = parse(&json);
        let message = value["error"].as_str().unwrap();
        assert!(message.contains("external coupling"), "{message}");

        let json = ringdown_json(60.0, 1e6, 2, 1e-3, 1e-1, 1.0);
        let value = parse(&json);
        assert!(value["error"].as_str().unwrap().contains("delays"));
    }
}
