//! CSV serialization for every tabular product: cooling curves,
//! cooperativity maps, count histograms, ringdown tables, search traces,
//! and noise spectra, plus a generic `(x, y[, sigma])` ingest for the
//! fitting routines.
//!
//! Dialect: comma separator, `.` decimal point, LF line endings, mandatory
//! header row. Floats are written in shortest-roundtrip scientific
//! notation, so reading a file back reproduces every stored value bit for
//! bit. External rates are ordinary Hz in files and angular rad/s in
//! memory; the unit conversion can move a re-read in-memory value by one
//! ulp, but a second write reproduces the first file byte for byte.
//! Lines starting with `#` are comments; each writer accepts an optional
//! comment block (typically a run manifest) placed ahead of the header.

use std::io::{Read, Write};

use crate::constants::{angular_to_hz, hz_to_angular};
use crate::counting::{BinnedCounts, RingdownPoint};
use crate::design::{DesignVector, EvalStatus, FitnessEvaluation, SearchTrace, TraceRecord};
use crate::error::{Error, Result};
use crate::spectrum::NoiseSpectrum;
use crate::sweep::{CeffMap, CurvePoint, MapPoint};

const CURVE_HEADER: [&str; 9] = [
    "n_c", "p_in_w", "n_wg", "n_p", "gamma_p_hz", "gamma_om_hz", "n_avg", "c", "c_eff",
];
const MAP_HEADER: [&str; 4] = ["q_c", "n_c", "n_avg", "c_eff"];
const HISTOGRAM_HEADER: [&str; 4] = ["bin_start_s", "bin_width_s", "counts", "pulses"];
const RINGDOWN_HEADER: [&str; 4] = ["tau_off_s", "n_i", "n_i_sigma", "n_f"];
const SPECTRUM_HEADER: [&str; 2] = ["f_hz", "density_per_hz"];
const TRACE_HEADER: [&str; 17] = [
    "restart", "eval_index", "d_nm", "h_i_nm", "w_i_nm", "h_o_nm", "w_o_nm", "h_ic_nm", "w_ic_nm",
    "h_oc_nm", "w_oc_nm", "omega_o_hz", "omega_m_hz", "g0_hz", "q_scat", "fitness_hz", "status",
];

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    if matches!(e.kind(), csv::ErrorKind::Io(_)) {
        Error::Io(e.to_string())
    } else {
        Error::Parse {
            line,
            detail: e.to_string(),
        }
    }
}

/// Shortest decimal representation that parses back to the same bits.
fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn write_comments<W: Write>(w: &mut W, comment: Option<&str>) -> Result<()> {
    if let Some(text) = comment {
        for line in text.lines() {
            writeln!(w, "# {line}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let found = rdr.headers().map_err(csv_err)?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            detail: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let line = record_line(record);
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        line,
        detail: format!("missing column `{name}`"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        detail: format!("column `{name}`: cannot parse `{raw}`"),
    })
}

/// Write a cooling curve (one row per drive point, rates in Hz).
pub fn write_curve_csv<W: Write>(
    mut w: W,
    points: &[CurvePoint],
    comment: Option<&str>,
) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CURVE_HEADER).map_err(csv_err)?;
    for p in points {
        csv.write_record([
            fmt(p.n_c),
            fmt(p.p_in),
            fmt(p.n_wg),
            fmt(p.n_p),
            fmt(angular_to_hz(p.gamma_p)),
            fmt(angular_to_hz(p.gamma_om)),
            fmt(p.n_avg),
            fmt(p.c),
            fmt(p.c_eff),
        ])
        .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Read a cooling curve written by [`write_curve_csv`].
pub fn read_curve_csv<R: Read>(r: R) -> Result<Vec<CurvePoint>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &CURVE_HEADER)?;
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        points.push(CurvePoint {
            n_c: field(&record, 0, "n_c")?,
            p_in: field(&record, 1, "p_in_w")?,
            n_wg: field(&record, 2, "n_wg")?,
            n_p: field(&record, 3, "n_p")?,
            gamma_p: hz_to_angular(field(&record, 4, "gamma_p_hz")?),
            gamma_om: hz_to_angular(field(&record, 5, "gamma_om_hz")?),
            n_avg: field(&record, 6, "n_avg")?,
            c: field(&record, 7, "c")?,
            c_eff: field(&record, 8, "c_eff")?,
        });
    }
    Ok(points)
}

/// Write a cooperativity map in row-major lattice order (Q outermost).
pub fn write_map_csv<W: Write>(mut w: W, map: &CeffMap, comment: Option<&str>) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(MAP_HEADER).map_err(csv_err)?;
    for p in map.rows() {
        csv.write_record([fmt(p.q_c), fmt(p.n_c), fmt(p.n_avg), fmt(p.c_eff)])
            .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Read a cooperativity map written by [`write_map_csv`], reconstructing
/// the lattice. The rows must cover a full grid in row-major order.
pub fn read_map_csv<R: Read>(r: R) -> Result<CeffMap> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &MAP_HEADER)?;
    let mut rows: Vec<MapPoint> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        rows.push(MapPoint {
            q_c: field(&record, 0, "q_c")?,
            n_c: field(&record, 1, "n_c")?,
            n_avg: field(&record, 2, "n_avg")?,
            c_eff: field(&record, 3, "c_eff")?,
        });
    }
    if rows.is_empty() {
        return Err(Error::MissingData("map table holds no rows".into()));
    }
    let n_len = rows.iter().take_while(|p| p.q_c == rows[0].q_c).count();
    if rows.len() % n_len != 0 {
        return Err(Error::Parse {
            line: 0,
            detail: format!(
                "ragged lattice: {} rows do not tile blocks of {}",
                rows.len(),
                n_len
            ),
        });
    }
    let n_axis: Vec<f64> = rows[..n_len].iter().map(|p| p.n_c).collect();
    let q_axis: Vec<f64> = rows.iter().step_by(n_len).map(|p| p.q_c).collect();
    for (i, p) in rows.iter().enumerate() {
        if p.q_c != q_axis[i / n_len] || p.n_c != n_axis[i % n_len] {
            return Err(Error::Parse {
                line: 0,
                detail: format!("row {i} breaks the row-major lattice order"),
            });
        }
    }
    CeffMap::from_grids(
        q_axis,
        n_axis,
        rows.iter().map(|p| p.n_avg).collect(),
        rows.iter().map(|p| p.c_eff).collect(),
    )
}

/// Write a count histogram (one row per time bin).
pub fn write_histogram_csv<W: Write>(
    mut w: W,
    counts: &BinnedCounts,
    comment: Option<&str>,
) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(HISTOGRAM_HEADER).map_err(csv_err)?;
    for (start, count) in counts.bin_starts().iter().zip(counts.counts()) {
        csv.write_record([
            fmt(*start),
            fmt(counts.tau_bin()),
            count.to_string(),
            counts.n_pulses().to_string(),
        ])
        .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Read a count histogram written by [`write_histogram_csv`]. Every row
/// must agree on the bin width and pulse count.
pub fn read_histogram_csv<R: Read>(r: R) -> Result<BinnedCounts> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &HISTOGRAM_HEADER)?;
    let mut starts = Vec::new();
    let mut widths = Vec::new();
    let mut counts = Vec::new();
    let mut pulses: Vec<u64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        starts.push(field(&record, 0, "bin_start_s")?);
        widths.push(field::<f64>(&record, 1, "bin_width_s")?);
        counts.push(field(&record, 2, "counts")?);
        pulses.push(field(&record, 3, "pulses")?);
        let line = record_line(&record);
        if (widths[widths.len() - 1] - widths[0]).abs() > 1e-6 * widths[0] {
            return Err(Error::Parse {
                line,
                detail: "bin widths differ between rows".into(),
            });
        }
        if pulses[pulses.len() - 1] != pulses[0] {
            return Err(Error::Parse {
                line,
                detail: "pulse counts differ between rows".into(),
            });
        }
    }
    if counts.is_empty() {
        return Err(Error::MissingData("histogram table holds no rows".into()));
    }
    BinnedCounts::new(counts, starts, widths[0], pulses[0])
}

/// Write a ringdown table (one row per interrogated free-decay delay).
pub fn write_ringdown_csv<W: Write>(
    mut w: W,
    points: &[RingdownPoint],
    comment: Option<&str>,
) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(RINGDOWN_HEADER).map_err(csv_err)?;
    for p in points {
        csv.write_record([fmt(p.tau_off), fmt(p.n_i), fmt(p.n_i_sigma), fmt(p.n_f)])
            .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Read a ringdown table written by [`write_ringdown_csv`].
pub fn read_ringdown_csv<R: Read>(r: R) -> Result<Vec<RingdownPoint>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &RINGDOWN_HEADER)?;
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        points.push(RingdownPoint {
            tau_off: field(&record, 0, "tau_off_s")?,
            n_i: field(&record, 1, "n_i")?,
            n_i_sigma: field(&record, 2, "n_i_sigma")?,
            n_f: field(&record, 3, "n_f")?,
        });
    }
    Ok(points)
}

/// Write a sampled noise spectrum (frequency in Hz, density in quanta/Hz).
pub fn write_spectrum_csv<W: Write>(
    mut w: W,
    spectrum: &NoiseSpectrum,
    comment: Option<&str>,
) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(SPECTRUM_HEADER).map_err(csv_err)?;
    for (omega, density) in spectrum.omega.iter().zip(&spectrum.density) {
        // Change of variables: S(f) df = S(omega) d omega.
        csv.write_record([fmt(angular_to_hz(*omega)), fmt(hz_to_angular(*density))])
            .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Write a design-search trace (one row per evaluation, lengths in nm,
/// frequencies in Hz; the fitness keeps its sign).
pub fn write_trace_csv<W: Write>(
    mut w: W,
    trace: &SearchTrace,
    comment: Option<&str>,
) -> Result<()> {
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(TRACE_HEADER).map_err(csv_err)?;
    for r in &trace.records {
        let e = &r.evaluation;
        let mut row = vec![r.restart.to_string(), r.eval_index.to_string()];
        row.extend(e.design.to_array().iter().map(|&v| fmt(v)));
        row.extend([
            fmt(angular_to_hz(e.omega_o)),
            fmt(angular_to_hz(e.omega_m)),
            fmt(angular_to_hz(e.g0)),
            fmt(e.q_scat),
            fmt(angular_to_hz(e.fitness)),
            e.status.as_str().to_string(),
        ]);
        csv.write_record(row).map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Read a design-search trace written by [`write_trace_csv`].
pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceRecord>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &TRACE_HEADER)?;
    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let mut lengths = [0.0; 9];
        for (k, slot) in lengths.iter_mut().enumerate() {
            *slot = field(&record, 2 + k, TRACE_HEADER[2 + k])?;
        }
        let status = match record.get(16) {
            Some("ok") => EvalStatus::Ok,
            Some("filtered_low_q") => EvalStatus::FilteredLowQ,
            Some("eval_failed") => EvalStatus::EvalFailed,
            other => {
                return Err(Error::Parse {
                    line: record_line(&record),
                    detail: format!("unknown status `{}`", other.unwrap_or("")),
                })
            }
        };
        records.push(TraceRecord {
            restart: field(&record, 0, "restart")?,
            eval_index: field(&record, 1, "eval_index")?,
            evaluation: FitnessEvaluation {
                design: DesignVector::from_array(lengths),
                omega_o: hz_to_angular(field(&record, 11, "omega_o_hz")?),
                omega_m: hz_to_angular(field(&record, 12, "omega_m_hz")?),
                g0: hz_to_angular(field(&record, 13, "g0_hz")?),
                q_scat: field(&record, 14, "q_scat")?,
                fitness: hz_to_angular(field(&record, 15, "fitness_hz")?),
                status,
            },
        });
    }
    Ok(records)
}

/// Write a generic two- or three-column numeric table under caller-chosen
/// header names, in the shape [`read_points_csv`] ingests. `extra` supplies
/// the optional third column; its length must match `points`.
pub fn write_points_csv<W: Write>(
    mut w: W,
    header: [&str; 2],
    points: &[(f64, f64)],
    extra: Option<(&str, &[f64])>,
    comment: Option<&str>,
) -> Result<()> {
    if let Some((name, values)) = extra {
        if values.len() != points.len() {
            return Err(Error::MissingData(format!(
                "column `{name}` has {} values for {} rows",
                values.len(),
                points.len()
            )));
        }
    }
    write_comments(&mut w, comment)?;
    let mut csv = csv::Writer::from_writer(w);
    match extra {
        Some((name, _)) => csv.write_record([header[0], header[1], name]),
        None => csv.write_record(header),
    }
    .map_err(csv_err)?;
    for (i, (x, y)) in points.iter().enumerate() {
        match extra {
            Some((_, values)) => csv.write_record([fmt(*x), fmt(*y), fmt(values[i])]),
            None => csv.write_record([fmt(*x), fmt(*y)]),
        }
        .map_err(csv_err)?;
    }
    csv.flush().map_err(io_err)
}

/// Generic ingest for fitting: any headed table whose first two columns
/// are numeric `(x, y)`, with an optional third column of one-sigma
/// uncertainties. Header names are not interpreted.
pub fn read_points_csv<R: Read>(r: R) -> Result<(Vec<(f64, f64)>, Option<Vec<f64>>)> {
    let mut rdr = reader(r);
    let n_cols = rdr.headers().map_err(csv_err)?.len();
    if n_cols < 2 {
        return Err(Error::Parse {
            line: 1,
            detail: format!("need at least 2 columns, found {n_cols}"),
        });
    }
    let mut points = Vec::new();
    let mut sigmas = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        points.push((field(&record, 0, "x")?, field(&record, 1, "y")?));
        if n_cols >= 3 {
            sigmas.push(field(&record, 2, "sigma")?);
        }
    }
    Ok((points, (n_cols >= 3).then_some(sigmas)))
}
