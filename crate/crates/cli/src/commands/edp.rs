//! Demand study: scale every input to one spectral intensity at the
//! structure's first-mode period, run the nonlinear model, and tabulate
//! peak story drifts and roof displacement. Ground motions define a
//! median; each candidate excitation gets signed percentage errors
//! against that median.

use std::fs;
use std::path::{Path, PathBuf};

use etef_core::signal::AccelTimeSeries;
use etef_core::validation::{
    extract_edps, mdof_simulate, natural_periods, scale_to_intensity, EdpReport, MdofModel,
    SimulationOptions,
};

use crate::commands::{ensure_dir, write_text};
use crate::config::ModelFile;
use crate::error::CliError;

struct Row {
    kind: &'static str,
    name: String,
    status: String,
    scale_factor: Option<f64>,
    drifts_pct: Vec<f64>,
    roof_disp: Option<f64>,
}

pub fn run(
    model_path: &Path,
    inputs_dir: &Path,
    etef_paths: &[PathBuf],
    intensity: f64,
    damping: f64,
    out: &Path,
) -> Result<(), CliError> {
    if !(intensity > 0.0) || !intensity.is_finite() {
        return Err(CliError::config(format!(
            "--intensity must be positive, got {intensity}"
        )));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(CliError::config(format!(
            "--damping must lie in (0, 1), got {damping}"
        )));
    }
    let model = ModelFile::load(model_path)?.build()?;
    let info = natural_periods(&model).map_err(|e| CliError::config(format!("model: {e}")))?;
    let t1 = info.periods[0];
    ensure_dir(out)?;

    let mut motion_paths: Vec<PathBuf> = fs::read_dir(inputs_dir)
        .map_err(|e| CliError::io(format!("{}: {e}", inputs_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    motion_paths.sort();
    if motion_paths.is_empty() {
        return Err(CliError::config(format!(
            "{} holds no .csv ground motions",
            inputs_dir.display()
        )));
    }

    let n_stories = model.n_stories();
    let mut rows = Vec::new();
    let mut gm_reports: Vec<EdpReport<f64>> = Vec::new();

    for path in &motion_paths {
        rows.push(study_one(&model, path, t1, intensity, damping, "gm", |r| {
            gm_reports.push(r)
        }));
    }
    let mut etef_reports: Vec<(String, EdpReport<f64>)> = Vec::new();
    for path in etef_paths {
        let mut keep = |r: EdpReport<f64>| etef_reports.push((r.input_id.clone(), r));
        rows.push(study_one(&model, path, t1, intensity, damping, "etef", &mut keep));
    }

    if gm_reports.is_empty() {
        return Err(CliError::config(
            "no ground motion could be scaled and simulated; nothing to take a median over",
        ));
    }

    // Componentwise median over the usable ground motions.
    let median_drifts: Vec<f64> = (0..n_stories)
        .map(|i| median(gm_reports.iter().map(|r| r.drift_ratios_pct[i])))
        .collect();
    let median_roof = median(gm_reports.iter().map(|r| r.roof_disp));
    rows.push(Row {
        kind: "median_gm",
        name: format!("median of {} motions", gm_reports.len()),
        status: "ok".into(),
        scale_factor: None,
        drifts_pct: median_drifts.clone(),
        roof_disp: Some(median_roof),
    });

    for (name, report) in &etef_reports {
        let errors: Vec<f64> = report
            .drift_ratios_pct
            .iter()
            .zip(&median_drifts)
            .map(|(e, m)| 100.0 * (e - m) / m)
            .collect();
        rows.push(Row {
            kind: "error_pct",
            name: name.clone(),
            status: "ok".into(),
            scale_factor: None,
            drifts_pct: errors,
            roof_disp: Some(100.0 * (report.roof_disp - median_roof) / median_roof),
        });
    }

    write_report(&out.join("edp_report.csv"), &rows, n_stories)?;
    println!(
        "demand study: T1 = {t1:.4} s, intensity {intensity} g, {} motions, {} candidate excitations -> {}",
        gm_reports.len(),
        etef_reports.len(),
        out.join("edp_report.csv").display()
    );
    Ok(())
}

/// Scale, simulate, and extract one input; failures become a skipped row
/// rather than aborting the whole study.
fn study_one(
    model: &MdofModel<f64>,
    path: &Path,
    t1: f64,
    intensity: f64,
    damping: f64,
    kind: &'static str,
    mut keep: impl FnMut(EdpReport<f64>),
) -> Row {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let skipped = |status: String| Row {
        kind,
        name: name.clone(),
        status,
        scale_factor: None,
        drifts_pct: Vec::new(),
        roof_disp: None,
    };

    let series = match AccelTimeSeries::<f64>::read_csv_path(path) {
        Ok(s) => s,
        Err(e) => return skipped(format!("skipped: {e}")),
    };
    let (scaled, factor) = match scale_to_intensity(&series, t1, intensity, damping) {
        Ok(pair) => pair,
        Err(e) => return skipped(format!("skipped: {e}")),
    };
    let response = match mdof_simulate(model, &scaled, &SimulationOptions::default()) {
        Ok(r) => r,
        Err(e) => return skipped(format!("skipped: {e}")),
    };
    let report = match extract_edps(&response.displacements, model.heights(), name.clone()) {
        Ok(r) => r,
        Err(e) => return skipped(format!("skipped: {e}")),
    };
    let row = Row {
        kind,
        name,
        status: "ok".into(),
        scale_factor: Some(factor),
        drifts_pct: report.drift_ratios_pct.clone(),
        roof_disp: Some(report.roof_disp),
    };
    keep(report);
    row
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite demand values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn write_report(path: &Path, rows: &[Row], n_stories: usize) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    // Demand rows carry drift % and roof meters; error_pct rows carry
    // signed percentages in every numeric column.
    let mut header = vec!["row_type".to_string(), "input".into(), "status".into(), "scale_factor".into()];
    for i in 1..=n_stories {
        header.push(format!("drift_ratio_{i}"));
    }
    header.push("roof_disp".into());
    writer
        .write_record(&header)
        .map_err(|e| CliError::io(e.to_string()))?;

    for row in rows {
        let mut record = vec![
            row.kind.to_string(),
            row.name.clone(),
            row.status.clone(),
            row.scale_factor.map(|f| f.to_string()).unwrap_or_default(),
        ];
        for i in 0..n_stories {
            record.push(
                row.drifts_pct
                    .get(i)
                    .map(|d| d.to_string())
                    .unwrap_or_default(),
            );
        }
        record.push(row.roof_disp.map(|r| r.to_string()).unwrap_or_default());
        writer
            .write_record(&record)
            .map_err(|e| CliError::io(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::io(e.to_string()))?;
    write_text(path, &String::from_utf8(bytes).expect("csv output is utf-8"))
}
