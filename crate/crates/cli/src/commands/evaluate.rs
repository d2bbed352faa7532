//! Scores an existing accelerogram against a configuration's target:
//! objective value, spectrum/target grids, per-period mismatch at the end
//! of the record, and optional time/period slice files for plotting.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use etef_core::signal::AccelTimeSeries;
use etef_core::spectra::{objective, running_spectrum, zero_signal_objective, SpectrumGrid};

use crate::commands::{ensure_dir, final_column_mismatch, read_error, write_text};
use crate::config::{Prepared, RunConfig};
use crate::error::CliError;

#[derive(Serialize)]
struct Report {
    input: String,
    objective: f64,
    zero_signal_objective: f64,
    objective_ratio: f64,
    final_rms_mismatch: f64,
    mean_target_ordinate: f64,
    rms_ratio: f64,
}

pub fn run(
    etef_path: &Path,
    config: &RunConfig,
    base_dir: &Path,
    out: &Path,
    slice_times: &[f64],
    slice_periods: &[f64],
) -> Result<(), CliError> {
    let prep = config.prepare(base_dir, None)?;
    let series = AccelTimeSeries::<f64>::read_csv_path(etef_path)
        .map_err(|e| read_error(etef_path, e))?;
    if series.len() != prep.layout.signal_length() {
        return Err(CliError::config(format!(
            "{}: {} samples, the configuration expects {}",
            etef_path.display(),
            series.len(),
            prep.layout.signal_length()
        )));
    }
    if (series.dt() - prep.dt).abs() > 1e-9 * prep.dt {
        return Err(CliError::config(format!(
            "{}: dt {} differs from the configured {}",
            etef_path.display(),
            series.dt(),
            prep.dt
        )));
    }
    ensure_dir(out)?;

    let spectrum = running_spectrum(&series, &prep.periods, &prep.times, prep.damping)
        .map_err(|e| CliError::config(format!("spectra: {e}")))?;
    let value = objective(&series, &prep.target, prep.damping)
        .map_err(|e| CliError::config(format!("spectra: {e}")))?;
    let zero = zero_signal_objective(&prep.target);

    spectrum
        .write_csv_path(&out.join("spectrum.csv"))
        .map_err(|e| CliError::io(format!("spectrum.csv: {e}")))?;
    prep.target
        .write_csv_path(&out.join("target.csv"))
        .map_err(|e| CliError::io(format!("target.csv: {e}")))?;

    write_mismatch(&out.join("mismatch.csv"), &spectrum, &prep.target)?;
    write_slices(out, &prep, &spectrum, slice_times, slice_periods)?;

    let (rms, mean_target) = final_column_mismatch(&spectrum, &prep.target);
    let report = Report {
        input: etef_path.display().to_string(),
        objective: value,
        zero_signal_objective: zero,
        objective_ratio: value / zero,
        final_rms_mismatch: rms,
        mean_target_ordinate: mean_target,
        rms_ratio: rms / mean_target,
    };
    let text = serde_json::to_string_pretty(&report).expect("report");
    write_text(&out.join("report.json"), &format!("{text}\n"))?;

    println!(
        "evaluated {}: objective {:.6} ({:.1}% of zero-signal)",
        etef_path.display(),
        value,
        100.0 * value / zero
    );
    Ok(())
}

/// Final-time mismatch per period: response, target, absolute and relative
/// gaps down the last column.
fn write_mismatch(
    path: &Path,
    spectrum: &SpectrumGrid<f64>,
    target: &SpectrumGrid<f64>,
) -> Result<(), CliError> {
    let last = target.n_times() - 1;
    let mut text = String::from("period_s,response_g,target_g,error_g,rel_error\n");
    for (i, period) in target.period_grid().periods().iter().enumerate() {
        let r = spectrum.value(i, last);
        let t = target.value(i, last);
        let rel = if t != 0.0 { (r - t) / t } else { f64::NAN };
        let _ = writeln!(text, "{period},{r},{t},{}", format_pair(r - t, rel));
    }
    write_text(path, &text)
}

fn format_pair(err: f64, rel: f64) -> String {
    format!("{err},{rel}")
}

/// Fixed-time and fixed-period cuts through the spectrum grid, snapped to
/// the nearest grid line.
fn write_slices(
    out: &Path,
    prep: &Prepared,
    spectrum: &SpectrumGrid<f64>,
    slice_times: &[f64],
    slice_periods: &[f64],
) -> Result<(), CliError> {
    for &t in slice_times {
        let times = prep.times.times();
        let j = nearest(times, t)
            .ok_or_else(|| CliError::config(format!("slice time {t} is not finite")))?;
        let used = times[j];
        let mut text = String::from("period_s,response_g,target_g\n");
        for (i, period) in prep.periods.periods().iter().enumerate() {
            let _ = writeln!(text, "{period},{},{}", spectrum.value(i, j), prep.target.value(i, j));
        }
        write_text(&out.join(format!("slice_time_{used:.4}s.csv")), &text)?;
    }
    for &p in slice_periods {
        let periods = prep.periods.periods();
        let i = nearest(periods, p)
            .ok_or_else(|| CliError::config(format!("slice period {p} is not finite")))?;
        let used = periods[i];
        let mut text = String::from("time_s,response_g,target_g\n");
        for (j, time) in prep.times.times().iter().enumerate() {
            let _ = writeln!(text, "{time},{},{}", spectrum.value(i, j), prep.target.value(i, j));
        }
        write_text(&out.join(format!("slice_period_{used:.4}s.csv")), &text)?;
    }
    Ok(())
}

fn nearest(grid: &[f64], wanted: f64) -> Option<usize> {
    if !wanted.is_finite() {
        return None;
    }
    grid.iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - wanted)
                .abs()
                .partial_cmp(&(b.1 - wanted).abs())
                .expect("finite grid")
        })
        .map(|(i, _)| i)
}
