//! End-to-end tests of the `omc` binary: exit-code contract, determinism
//! of emitted files, flag/config precedence, and re-parseability of every
//! output through the library's own readers.

use std::path::PathBuf;
use std::process::{Command, Output};

use omc_core::{
    angular_to_hz, cooling_curve, log_grid, read_curve_csv, read_map_csv, read_points_csv,
    read_ringdown_csv, read_trace_csv, write_points_csv, HotBathModel, MechanicalMode,
    OpticalCavity,
};

fn omc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    let out = omc(args);
    assert!(
        out.status.success(),
        "`omc {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Unique scratch path for one test; the file is cleaned up by the OS.
fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("omc-cli-{}-{name}", std::process::id()))
}

#[test]
fn reruns_are_byte_identical_and_pool_invariant() {
    let args = ["map", "--qc-points", "4", "--nc-points", "5"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "identical invocations must emit identical bytes");

    let single = stdout_of(&["map", "--qc-points", "4", "--nc-points", "5", "--threads", "1"]);
    let wide = stdout_of(&["map", "--qc-points", "4", "--nc-points", "5", "--threads", "6"]);
    assert_eq!(single, first, "pool size must not change the output");
    assert_eq!(wide, first, "pool size must not change the output");

    let map = read_map_csv(first.as_slice()).expect("emitted map reparses");
    assert_eq!(map.q_c_grid().len(), 4);
    assert_eq!(map.n_c_grid().len(), 5);
}

#[test]
fn emitted_curve_matches_the_library_computation() {
    let bytes = stdout_of(&[
        "cool", "--beta", "0", "--nc-min", "1", "--nc-max", "100", "--nc-points", "7",
    ]);
    let emitted = read_curve_csv(bytes.as_slice()).expect("emitted curve reparses");

    let cavity = OpticalCavity::from_hz(193.4e12, 1.187e9, 181e6).unwrap();
    let mode = MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap();
    let mut model = HotBathModel::reference_fit();
    model.beta = 0.0;
    let grid = log_grid(1.0, 100.0, 7).unwrap();
    let direct = cooling_curve(&cavity, &mode, &model, &grid).unwrap();

    assert_eq!(emitted.len(), direct.len());
    for (e, d) in emitted.iter().zip(&direct) {
        assert_eq!(e.n_c, d.n_c);
        assert_eq!(e.n_avg, d.n_avg);
        assert_eq!(e.c_eff, d.c_eff);
        // Rate columns cross the Hz/angular conversion once on write and
        // once on read, which can cost one ulp.
        assert!((e.gamma_om - d.gamma_om).abs() <= 1e-12 * d.gamma_om.abs());
    }
}

#[test]
fn unknown_config_key_exits_2_and_names_the_key() {
    let path = scratch("bad-key.toml");
    std::fs::write(&path, "seed = 1\n[device]\nkapa_hz = 1.0e9\n").unwrap();
    let out = omc(&["cool", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kapa_hz"), "stderr names the key: {stderr}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn invalid_grid_flag_exits_2() {
    let out = omc(&["cool", "--nc-min", "-5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_blue_drive_exits_3() {
    let out = omc(&["counts", "--case", "blue", "--nc-peak", "60", "--n-pulses", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unstable"), "stderr explains the failure: {stderr}");
}

#[test]
fn seed_flag_overrides_config_and_drives_the_output() {
    let ringdown = |extra: &[&str]| {
        let mut args = vec![
            "ringdown", "--delays", "6", "--tau-max-s", "5e-2", "--n-pulses", "5000000",
        ];
        args.extend_from_slice(extra);
        stdout_of(&args)
    };
    let config = scratch("seeded.toml");
    std::fs::write(&config, "seed = 99\n").unwrap();

    let from_flag = ringdown(&["--seed", "99"]);
    let from_config = ringdown(&["--config", config.to_str().unwrap()]);
    assert_eq!(
        from_flag, from_config,
        "`--seed 99` and `seed = 99` in the config are the same run"
    );

    let default_seed = ringdown(&[]);
    assert_ne!(from_flag, default_seed, "the seed must reach the simulation");

    let points = read_ringdown_csv(from_flag.as_slice()).expect("emitted ringdown reparses");
    assert_eq!(points.len(), 6);
    std::fs::remove_file(&config).ok();
}

#[test]
fn photons_table_feeds_the_generic_ingest() {
    let bytes = stdout_of(&["photons", "--points", "9"]);
    let (rows, sigma) = read_points_csv(bytes.as_slice()).expect("photons table reparses");
    assert!(sigma.is_none());
    assert_eq!(rows.len(), 9);
    // More pump power, more photons: strictly monotone on a log power grid.
    for pair in rows.windows(2) {
        assert!(pair[1].0 > pair[0].0);
        assert!(pair[1].1 > pair[0].1);
    }
}

#[test]
fn bath_fit_recovers_the_generating_law_through_files() {
    let mode = MechanicalMode::from_hz(10.02e9, 8.28, 14.54e3, 1.182e6).unwrap();
    let model = HotBathModel::reference_fit();
    let xs = log_grid(0.1, 1e6, 48).unwrap();
    let rows: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| (x, angular_to_hz(model.fitted_linewidth(x, mode.gamma_phi))))
        .collect();
    let input = scratch("linewidth.csv");
    let mut buffer = Vec::new();
    write_points_csv(&mut buffer, ["x", "gamma_hz"], &rows, None, None).unwrap();
    std::fs::write(&input, &buffer).unwrap();

    let out_path = scratch("linewidth-fit.csv");
    let out = omc(&[
        "bath-fit",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // The third output column is the fitted law; on noiseless data it must
    // sit on the input everywhere.
    let emitted = std::fs::read(&out_path).unwrap();
    let (back, fitted) = read_points_csv(emitted.as_slice()).expect("fit table reparses");
    let fitted = fitted.expect("fit table has a third column");
    for ((x, y), fit) in back.iter().zip(&fitted) {
        assert!(
            (fit - y).abs() <= 0.01 * y,
            "fitted law off at x = {x}: {fit} vs {y}"
        );
    }
    let manifest = String::from_utf8_lossy(&emitted);
    assert!(manifest.contains("dephasing floor gamma_phi 1.45"));
    std::fs::remove_file(&input).ok();
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn optimizer_trace_reparses_with_feasible_best() {
    let out_path = scratch("trace.csv");
    let out = omc(&[
        "optimize",
        "--restarts",
        "2",
        "--max-evals",
        "150",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(&out_path).unwrap();
    let records = read_trace_csv(bytes.as_slice()).expect("trace reparses");
    assert!(records.len() <= 300, "two restarts of 150 evaluations");
    assert!(records.iter().any(|r| r.restart == 1), "both restarts present");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn help_documents_the_config_format() {
    let out = omc(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["CONFIG FILE", "[device]", "[bath]", "[sweep]", "omega_m_hz", "beta_per_w"] {
        assert!(text.contains(needle), "--help documents `{needle}`");
    }
}

#[test]
fn manifest_identifies_the_run() {
    let bytes = stdout_of(&["cool", "--nc-points", "3", "--seed", "11"]);
    let text = String::from_utf8_lossy(&bytes);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# omc "), "manifest line first: {first}");
    assert!(first.contains("cool"), "manifest names the subcommand");
    assert!(first.contains("config sha256"), "manifest carries the config hash");
    assert!(first.ends_with("seed 11"), "manifest carries the seed");
}
