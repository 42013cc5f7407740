//! Subcommand implementations: resolve flags against the configuration,
//! run exactly one library operation, and emit its table with a run
//! manifest in the leading comment block.
//!
//! Error handling is phased: failures while assembling inputs (config
//! keys, flags, input files, grids, output destination) are validation
//! errors, failures inside the delegated computation are numeric errors.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use omc_core::counting::{
    sideband_count_rate, simulate_counts, simulate_ringdown, DetuningCase, PulseSchedule,
};
use omc_core::fit::{fit_piecewise_linewidth, PowerLawFit};
use omc_core::{
    angular_to_hz, ceff_curve, ceff_map, cooled_occupancy, cooling_curve, fit_ringdown, hot_bath,
    hz_to_angular, input_power_for_photons, intracavity_photons, log_grid, multi_restart,
    parametric_rate, read_points_csv, read_ringdown_csv, thermal_noise_spectrum, total_linewidth,
    write_curve_csv, write_histogram_csv, write_map_csv, write_points_csv, write_ringdown_csv,
    write_spectrum_csv, write_trace_csv, BoundarySurrogate, DesignBounds, DesignVector,
    DriveCondition, FitnessEvaluation, MultiWellSurrogate, NelderMeadOptions, QuadraticSurrogate,
};

use crate::config::RunConfig;
use crate::{Case, Cli, CliError, Command, Surrogate};

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Resolve the configuration, size the worker pool, and run the subcommand.
pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.global.threads {
        Some(0) => Err(CliError::Invalid("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(format!("--threads: {e}")))?
            .install(|| execute(cli)),
        None => execute(cli),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.global.config.as_deref())?;
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(beta) = cli.global.beta {
        if !beta.is_finite() || beta < 0.0 {
            return Err(CliError::Invalid(format!(
                "--beta must be a finite value >= 0, got {beta}"
            )));
        }
        cfg.bath.beta_per_w = beta;
    }
    let out = cli.global.out.as_deref();

    match cli.command {
        Command::Photons {
            p_min_w,
            p_max_w,
            points,
            detuning_hz,
        } => photons(&cfg, out, p_min_w, p_max_w, points, detuning_hz),
        Command::Cool {
            nc_min,
            nc_max,
            nc_points,
        } => cool(&cfg, out, nc_min, nc_max, nc_points),
        Command::Ceff {
            nc_min,
            nc_max,
            nc_points,
        } => ceff(&cfg, out, nc_min, nc_max, nc_points),
        Command::Map {
            qc_min,
            qc_max,
            qc_points,
            nc_min,
            nc_max,
            nc_points,
        } => map(&cfg, out, qc_min, qc_max, qc_points, nc_min, nc_max, nc_points),
        Command::BathFit { input } => bath_fit(&cfg, out, &input),
        Command::Ringdown {
            input,
            tau_min_s,
            tau_max_s,
            delays,
            n_pulses,
            nc_peak,
            tau_pulse_s,
            tau_bin_s,
        } => ringdown(
            &cfg, out, input, tau_min_s, tau_max_s, delays, n_pulses, nc_peak, tau_pulse_s,
            tau_bin_s,
        ),
        Command::Counts {
            nc_peak,
            case,
            n_pulses,
            tau_pulse_s,
            tau_bin_s,
            n_start,
            bath_rise_us,
        } => counts(
            &cfg, out, nc_peak, case, n_pulses, tau_pulse_s, tau_bin_s, n_start, bath_rise_us,
        ),
        Command::Optimize {
            restarts,
            max_evals,
            tol_f,
            tol_x,
            q_threshold,
            initial_step,
            surrogate,
            noise,
            target_omega_hz,
        } => optimize(
            &cfg,
            out,
            restarts,
            max_evals,
            tol_f,
            tol_x,
            q_threshold,
            initial_step,
            surrogate,
            noise,
            target_omega_hz,
        ),
        Command::Spectrum { nc, span, points } => spectrum(&cfg, out, nc, span, points),
    }
}

/// Leading comment block: one manifest line identifying the run, then any
/// subcommand-specific resolved parameters and result summaries.
fn manifest(cfg: &RunConfig, subcommand: &str, extras: &[String]) -> String {
    let mut text = format!(
        "omc {} {subcommand} | config sha256 {} | seed {}",
        env!("CARGO_PKG_VERSION"),
        cfg.hash(),
        cfg.seed
    );
    for line in extras {
        text.push('\n');
        text.push_str(line);
    }
    text
}

/// Render the table in memory, then move it to `--out` or stdout in one
/// write, so a failed run never leaves a truncated file behind.
fn write_output<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> omc_core::Result<()>,
{
    let mut buffer = Vec::new();
    write(&mut buffer).map_err(|e| CliError::Invalid(format!("writing output: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, &buffer)
            .map_err(|e| CliError::Invalid(format!("cannot write `{}`: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&buffer)
            .map_err(|e| CliError::Invalid(format!("writing stdout: {e}"))),
    }
}

fn nc_grid(
    cfg: &RunConfig,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    log_grid(
        min.unwrap_or(cfg.sweep.nc_min),
        max.unwrap_or(cfg.sweep.nc_max),
        points.unwrap_or(cfg.sweep.nc_points),
    )
    .map_err(invalid)
}

fn grid_note(name: &str, grid: &[f64]) -> String {
    format!(
        "{name}: {} points, {:e} .. {:e} (log)",
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    )
}

fn photons(
    cfg: &RunConfig,
    out: Option<&Path>,
    p_min_w: Option<f64>,
    p_max_w: Option<f64>,
    points: Option<usize>,
    detuning_hz: Option<f64>,
) -> Result<(), CliError> {
    let cavity = cfg.cavity()?;
    let detuning_hz = detuning_hz.unwrap_or(cfg.device.omega_m_hz);
    let detuning = hz_to_angular(detuning_hz);
    let grid = log_grid(
        p_min_w.unwrap_or(cfg.sweep.p_min_w),
        p_max_w.unwrap_or(cfg.sweep.p_max_w),
        points.unwrap_or(cfg.sweep.p_points),
    )
    .map_err(invalid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &p_in in &grid {
        let drive = DriveCondition::new(p_in, detuning, cfg.device.eta_cpl).map_err(invalid)?;
        rows.push((p_in, intracavity_photons(&cavity, &drive).map_err(numeric)?));
    }
    let comment = manifest(
        cfg,
        "photons",
        &[
            grid_note("pump power (W)", &grid),
            format!("detuning {detuning_hz:e} Hz below the cavity"),
        ],
    );
    write_output(out, |w| {
        write_points_csv(w, ["p_in_w", "n_c"], &rows, None, Some(&comment))
    })
}

fn cool(
    cfg: &RunConfig,
    out: Option<&Path>,
    nc_min: Option<f64>,
    nc_max: Option<f64>,
    nc_points: Option<usize>,
) -> Result<(), CliError> {
    let cavity = cfg.cavity()?;
    let mode = cfg.mode()?;
    let model = cfg.bath_model()?;
    let grid = nc_grid(cfg, nc_min, nc_max, nc_points)?;
    let curve = cooling_curve(&cavity, &mode, &model, &grid).map_err(numeric)?;
    let comment = manifest(
        cfg,
        "cool",
        &[
            grid_note("photon number", &grid),
            format!("waveguide heating beta {:e} /W", model.beta),
        ],
    );
    write_output(out, |w| write_curve_csv(w, &curve, Some(&comment)))
}

fn ceff(
    cfg: &RunConfig,
    out: Option<&Path>,
    nc_min: Option<f64>,
    nc_max: Option<f64>,
    nc_points: Option<usize>,
) -> Result<(), CliError> {
    let cavity = cfg.cavity()?;
    let mode = cfg.mode()?;
    let model = cfg.bath_model()?;
    let grid = nc_grid(cfg, nc_min, nc_max, nc_points)?;
    let curve = ceff_curve(&cavity, &mode, &model, &grid).map_err(numeric)?;
    let crossing = match curve.unity_crossing {
        Some(n_c) => format!("c_eff = 1 crossing: n_c = {n_c:e}"),
        None => "c_eff = 1 crossing: none on this grid".into(),
    };
    let comment = manifest(
        cfg,
        "ceff",
        &[
            grid_note("photon number", &grid),
            format!("waveguide heating beta {:e} /W", model.beta),
            crossing,
        ],
    );
    write_output(out, |w| write_curve_csv(w, &curve.points, Some(&comment)))
}

#[allow(clippy::too_many_arguments)]
fn map(
    cfg: &RunConfig,
    out: Option<&Path>,
    qc_min: Option<f64>,
    qc_max: Option<f64>,
    qc_points: Option<usize>,
    nc_min: Option<f64>,
    nc_max: Option<f64>,
    nc_points: Option<usize>,
) -> Result<(), CliError> {
    let cavity = cfg.cavity()?;
    let mode = cfg.mode()?;
    let model = cfg.bath_model()?;
    let q_c = log_grid(
        qc_min.unwrap_or(cfg.sweep.qc_min),
        qc_max.unwrap_or(cfg.sweep.qc_max),
        qc_points.unwrap_or(cfg.sweep.qc_points),
    )
    .map_err(invalid)?;
    let n_c = nc_grid(cfg, nc_min, nc_max, nc_points)?;
    let lattice = ceff_map(&cavity, &mode, &model, &q_c, &n_c).map_err(numeric)?;
    let comment = manifest(
        cfg,
        "map",
        &[
            grid_note("loaded optical Q", &q_c),
            grid_note("photon number", &n_c),
            "external coupling fraction and g0 held fixed across the Q axis; \
             waveguide heating disabled (photon number is the drive variable)"
                .into(),
        ],
    );
    write_output(out, |w| write_map_csv(w, &lattice, Some(&comment)))
}

fn branch_note(name: &str, branch: &PowerLawFit) -> String {
    let offset = match branch.offset {
        Some(c) => format!(", offset {:e} Hz", angular_to_hz(c)),
        None => String::new(),
    };
    format!(
        "{name} branch: amplitude {:e} Hz, exponent {:.4}{offset}",
        angular_to_hz(branch.amplitude),
        branch.exponent
    )
}

fn bath_fit(cfg: &RunConfig, out: Option<&Path>, input: &Path) -> Result<(), CliError> {
    let file = File::open(input)
        .map_err(|e| CliError::Invalid(format!("cannot read `{}`: {e}", input.display())))?;
    let (rows, sigma) = read_points_csv(BufReader::new(file))
        .map_err(|e| CliError::Invalid(format!("`{}`: {e}", input.display())))?;
    // Files carry ordinary Hz; the fitter works on angular rates.
    let data: Vec<(f64, f64)> = rows.iter().map(|&(x, y)| (x, hz_to_angular(y))).collect();
    let fit = fit_piecewise_linewidth(&data).map_err(numeric)?;
    let fitted_hz: Vec<f64> = rows
        .iter()
        .map(|&(x, _)| angular_to_hz(fit.evaluate(x)))
        .collect();

    let mut extras = vec![format!(
        "input `{}`: {} points{}",
        input.display(),
        rows.len(),
        if sigma.is_some() {
            "; third column ignored (the fit weights residuals by 1/y)"
        } else {
            ""
        }
    )];
    extras.push(format!(
        "dephasing floor gamma_phi {:e} Hz{}",
        angular_to_hz(fit.gamma_phi),
        if fit.gamma_phi_is_upper_bound {
            " (upper bound: sparse low-drive coverage)"
        } else {
            ""
        }
    ));
    if let Some(low) = &fit.low {
        extras.push(branch_note("low-drive", low));
    }
    if let Some(high) = &fit.high {
        extras.push(branch_note("high-drive", high));
    }
    if let Some(x) = fit.crossover {
        extras.push(format!("branch crossover at drive {x:e}"));
    }

    let comment = manifest(cfg, "bath-fit", &extras);
    write_output(out, |w| {
        write_points_csv(
            w,
            ["x", "gamma_hz"],
            &rows,
            Some(("gamma_fit_hz", &fitted_hz)),
            Some(&comment),
        )
    })?;
    eprintln!(
        "bath-fit: gamma_phi = {:.4e} Hz, exponents {} / {}",
        angular_to_hz(fit.gamma_phi),
        fit.low
            .as_ref()
            .map_or("none".into(), |b| format!("{:.4}", b.exponent)),
        fit.high
            .as_ref()
            .map_or("none".into(), |b| format!("{:.4}", b.exponent)),
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn ringdown(
    cfg: &RunConfig,
    out: Option<&Path>,
    input: Option<PathBuf>,
    tau_min_s: f64,
    tau_max_s: f64,
    delays: usize,
    n_pulses: u64,
    nc_peak: f64,
    tau_pulse_s: f64,
    tau_bin_s: f64,
) -> Result<(), CliError> {
    let device = cfg.pulsed_device()?;
    let (points, source) = match input {
        Some(path) => {
            let file = File::open(&path)
                .map_err(|e| CliError::Invalid(format!("cannot read `{}`: {e}", path.display())))?;
            let points = read_ringdown_csv(BufReader::new(file))
                .map_err(|e| CliError::Invalid(format!("`{}`: {e}", path.display())))?;
            (points, format!("input `{}`", path.display()))
        }
        None => {
            let offs = log_grid(tau_min_s, tau_max_s, delays).map_err(invalid)?;
            let schedule =
                PulseSchedule::new(tau_pulse_s, 0.0, tau_bin_s, n_pulses).map_err(invalid)?;
            let points = simulate_ringdown(&device, &schedule, &offs, nc_peak, cfg.seed)
                .map_err(numeric)?;
            let source = format!(
                "simulated: {} delays {tau_min_s:e} .. {tau_max_s:e} s (log), \
                 n_c {nc_peak:e}, {n_pulses} pulses per delay",
                offs.len()
            );
            (points, source)
        }
    };
    let fit = fit_ringdown(&points, device.mode.omega_m).map_err(numeric)?;
    let comment = manifest(
        cfg,
        "ringdown",
        &[
            source,
            format!(
                "fitted gamma_0 {:e} Hz (one sigma {:e} Hz), q_m {:e}",
                angular_to_hz(fit.gamma_0_hat),
                angular_to_hz(fit.gamma_0_sigma),
                fit.q_m_hat
            ),
            format!(
                "fitted decay amplitude {:e}, long-delay floor {:e} (occupancy)",
                fit.amplitude, fit.baseline
            ),
        ],
    );
    write_output(out, |w| write_ringdown_csv(w, &points, Some(&comment)))?;
    eprintln!(
        "ringdown: gamma_0 = {:.4e} Hz, Q_m = {:.4e}",
        angular_to_hz(fit.gamma_0_hat),
        fit.q_m_hat
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn counts(
    cfg: &RunConfig,
    out: Option<&Path>,
    nc_peak: f64,
    case: Case,
    n_pulses: u64,
    tau_pulse_s: f64,
    tau_bin_s: f64,
    n_start: Option<f64>,
    bath_rise_us: Option<f64>,
) -> Result<(), CliError> {
    let device = cfg.pulsed_device()?;
    let (case_name, detuning, case_core) = match case {
        Case::Red => ("red", device.mode.omega_m, DetuningCase::RedSideband),
        Case::Blue => ("blue", -device.mode.omega_m, DetuningCase::BlueSideband),
        Case::Resonant => ("resonant", 0.0, DetuningCase::Resonant),
    };
    let schedule = PulseSchedule::new(tau_pulse_s, 0.0, tau_bin_s, n_pulses).map_err(invalid)?;
    let n_start = n_start.unwrap_or(device.bath.n_0);
    let rise = bath_rise_us.map(|us| us * 1e-6);

    let p_in = input_power_for_photons(&device.cavity, detuning, nc_peak).map_err(numeric)?;
    let gamma_om = parametric_rate(&device.mode, &device.cavity, nc_peak).map_err(numeric)?;
    let traj = pulse_trajectory(&device, nc_peak, p_in, gamma_om, case_core, n_start, tau_pulse_s, rise)?;
    // Surface any rate-model validation error once, before sampling; the
    // per-bin closure below then cannot fail.
    sideband_count_rate(
        &device.chain,
        &device.cavity,
        &device.mode,
        device.eta_cpl,
        gamma_om,
        n_start.max(0.0),
        case_core,
    )
    .map_err(numeric)?;
    let rate = |t: f64| {
        sideband_count_rate(
            &device.chain,
            &device.cavity,
            &device.mode,
            device.eta_cpl,
            gamma_om,
            traj.occupancy_at(t).max(0.0),
            case_core,
        )
        .expect("rate inputs validated before sampling")
    };
    let histogram = simulate_counts(rate, &schedule, cfg.seed).map_err(numeric)?;

    let comment = manifest(
        cfg,
        "counts",
        &[
            format!(
                "{case_name} drive: n_c {nc_peak:e}, pump power {p_in:e} W, \
                 back-action rate {:e} Hz",
                angular_to_hz(gamma_om)
            ),
            format!(
                "{n_pulses} pulses of {tau_pulse_s:e} s in {tau_bin_s:e} s bins; \
                 start occupancy {n_start:e}, steady state {:e}",
                traj.steady_state()
            ),
        ],
    );
    write_output(out, |w| write_histogram_csv(w, &histogram, Some(&comment)))
}

/// Thin wrapper so the long argument list of the trajectory integrator maps
/// onto the counting subcommand's phased error classification.
#[allow(clippy::too_many_arguments)]
fn pulse_trajectory(
    device: &omc_core::counting::PulsedDevice,
    n_c: f64,
    p_in: f64,
    gamma_om: f64,
    case: DetuningCase,
    n_start: f64,
    duration: f64,
    rise: Option<f64>,
) -> Result<omc_core::counting::OccupancyTrajectory, CliError> {
    omc_core::counting::pulse_occupancy_dynamics(
        &device.mode,
        &device.bath,
        n_c,
        p_in,
        gamma_om,
        case,
        n_start,
        duration,
        rise,
    )
    .map_err(numeric)
}

#[allow(clippy::too_many_arguments)]
fn optimize(
    cfg: &RunConfig,
    out: Option<&Path>,
    restarts: usize,
    max_evals: usize,
    tol_f: f64,
    tol_x: f64,
    q_threshold: f64,
    initial_step: f64,
    surrogate: Surrogate,
    noise: f64,
    target_omega_hz: Option<f64>,
) -> Result<(), CliError> {
    if !noise.is_finite() || noise < 0.0 {
        return Err(CliError::Invalid(format!(
            "--noise must be a finite value >= 0, got {noise}"
        )));
    }
    let bounds = DesignBounds::reference();
    let options = NelderMeadOptions {
        max_evals,
        tol_f,
        tol_x,
        q_threshold,
        initial_step,
        target_omega_o: target_omega_hz.map(hz_to_angular),
    };
    let (surrogate_name, result) = match surrogate {
        Surrogate::Quadratic => {
            let s = QuadraticSurrogate::reference(&bounds).with_noise(noise);
            ("quadratic", multi_restart(&s, &bounds, restarts, &options, cfg.seed))
        }
        Surrogate::Boundary => {
            let s = BoundarySurrogate::reference(&bounds).with_noise(noise);
            ("boundary", multi_restart(&s, &bounds, restarts, &options, cfg.seed))
        }
        Surrogate::Multiwell => {
            let s = MultiWellSurrogate::reference(&bounds).with_noise(noise);
            ("multiwell", multi_restart(&s, &bounds, restarts, &options, cfg.seed))
        }
    };
    let (best, trace) = result.map_err(numeric)?;

    let comment = manifest(
        cfg,
        "optimize",
        &[
            format!(
                "{surrogate_name} surface, noise {noise:e}; {restarts} restarts, \
                 {max_evals} evaluations each; {} total evaluations",
                trace.n_evaluations()
            ),
            best_design_note(&best),
            format!(
                "best fitness {:e} Hz at omega_o {:e} Hz, g0 {:e} Hz, q_scat {:e}",
                angular_to_hz(best.fitness),
                angular_to_hz(best.omega_o),
                angular_to_hz(best.g0),
                best.q_scat
            ),
        ],
    );
    write_output(out, |w: &mut Vec<u8>| {
        write_trace_csv(w, &trace, Some(&comment))
    })?;
    eprintln!(
        "optimize: best fitness {:.4e} Hz after {} evaluations",
        angular_to_hz(best.fitness),
        trace.n_evaluations()
    );
    Ok(())
}

fn best_design_note(best: &FitnessEvaluation) -> String {
    let names = DesignVector::names();
    let values = best.design.to_array();
    let pairs: Vec<String> = names
        .iter()
        .zip(values)
        .map(|(name, value)| format!("{name} {value:.3}"))
        .collect();
    format!("best design (nm): {}", pairs.join(", "))
}

fn spectrum(
    cfg: &RunConfig,
    out: Option<&Path>,
    nc: f64,
    span: f64,
    points: usize,
) -> Result<(), CliError> {
    let cavity = cfg.cavity()?;
    let mode = cfg.mode()?;
    let model = cfg.bath_model()?;
    let p_in = input_power_for_photons(&cavity, mode.omega_m, nc).map_err(numeric)?;
    let bath = hot_bath(&model, &mode, nc, p_in).map_err(numeric)?;
    let gamma_om = parametric_rate(&mode, &cavity, nc).map_err(numeric)?;
    let n_wg = model.beta * p_in;
    let cooled = cooled_occupancy(&bath, gamma_om, nc, n_wg).map_err(numeric)?;
    let linewidth = total_linewidth(&mode, &bath, gamma_om);
    let grid = omc_core::centered_grid(&mode, linewidth, span, points);
    let noise = thermal_noise_spectrum(&mode, linewidth, cooled.n_avg, &grid).map_err(numeric)?;
    let comment = manifest(
        cfg,
        "spectrum",
        &[format!(
            "red-sideband drive at n_c {nc:e}: occupancy {:e}, \
             total linewidth {:e} Hz, {} points over {span:e} linewidths each side",
            cooled.n_avg,
            angular_to_hz(linewidth),
            grid.len()
        )],
    );
    write_output(out, |w| write_spectrum_csv(w, &noise, Some(&comment)))
}
