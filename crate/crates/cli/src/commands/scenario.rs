//! Parameter-grid sweep: one swarm run per row of a scenario CSV, all
//! sharing the configuration's signal/grid/target sections. Emits a
//! results table plus mean/std/COV of the per-scenario minima.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use etef_core::pso::{self, Mode};

use crate::commands::{ensure_dir, etef_objective, write_text};
use crate::config::RunConfig;
use crate::error::CliError;

/// One grid row: swarm parameters only; everything else comes from the
/// run configuration.
#[derive(Debug, Clone)]
struct Scenario {
    n_pop: usize,
    mode: Mode,
    omega: f64,
    xi: f64,
    c1: f64,
    c2: f64,
}

#[derive(Serialize)]
struct Stats {
    scenarios: usize,
    completed: usize,
    skipped: usize,
    mean: f64,
    std: f64,
    cov_pct: f64,
}

pub fn run(
    grid_path: &Path,
    config: &RunConfig,
    base_dir: &Path,
    seed_override: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    let prep = config.prepare(base_dir, seed_override)?;
    ensure_dir(out)?;

    let rows = read_grid(grid_path)?;
    let base_seed = prep.swarm.seed;
    let objective_fn = etef_objective(&prep);

    let mut table = csv::Writer::from_writer(Vec::new());
    table
        .write_record([
            "scenario",
            "n_pop",
            "mode",
            "omega",
            "xi",
            "c1",
            "c2",
            "status",
            "best_objective",
            "evaluations",
            "elapsed_s",
        ])
        .map_err(|e| CliError::io(e.to_string()))?;
    let mut minima = Vec::new();
    let mut skipped = 0_usize;

    for (index, row) in rows.iter().enumerate() {
        let label = (index + 1).to_string();
        let parsed = match row {
            Ok(s) => s,
            Err(reason) => {
                skipped += 1;
                eprintln!("warning: scenario {label} skipped: {reason}");
                table
                    .write_record([
                        label.as_str(),
                        "",
                        "",
                        "",
                        "",
                        "",
                        "",
                        &format!("skipped: {reason}"),
                        "",
                        "",
                        "",
                    ])
                    .map_err(|e| CliError::io(e.to_string()))?;
                continue;
            }
        };
        // Per-row seed offset so scenarios explore independent streams.
        let mut swarm = prep.swarm.clone();
        swarm.n_pop = parsed.n_pop;
        swarm.mode = parsed.mode;
        swarm.omega = parsed.omega;
        swarm.xi = parsed.xi;
        swarm.c1 = parsed.c1;
        swarm.c2 = parsed.c2;
        swarm.seed = base_seed + index as u64;

        let started = Instant::now();
        match pso::run(&objective_fn, &swarm, &prep.bounds, &prep.seeding) {
            Ok(result) => {
                let evaluations = result.log.records.last().map_or(0, |r| r.evaluations);
                table
                    .write_record([
                        label.as_str(),
                        &parsed.n_pop.to_string(),
                        mode_name(parsed.mode),
                        &parsed.omega.to_string(),
                        &parsed.xi.to_string(),
                        &parsed.c1.to_string(),
                        &parsed.c2.to_string(),
                        "ok",
                        &result.best_value.to_string(),
                        &evaluations.to_string(),
                        &format!("{:.3}", started.elapsed().as_secs_f64()),
                    ])
                    .map_err(|e| CliError::io(e.to_string()))?;
                minima.push(result.best_value);
            }
            Err(e) => {
                skipped += 1;
                eprintln!("warning: scenario {label} skipped: {e}");
                table
                    .write_record([
                        label.as_str(),
                        &parsed.n_pop.to_string(),
                        mode_name(parsed.mode),
                        &parsed.omega.to_string(),
                        &parsed.xi.to_string(),
                        &parsed.c1.to_string(),
                        &parsed.c2.to_string(),
                        &format!("skipped: {e}"),
                        "",
                        "",
                        "",
                    ])
                    .map_err(|e| CliError::io(e.to_string()))?;
            }
        }
    }

    let bytes = table
        .into_inner()
        .map_err(|e| CliError::io(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    write_text(&out.join("results.csv"), &text)?;

    let stats = summarize(rows.len(), skipped, &minima);
    let stats_text = serde_json::to_string_pretty(&stats).expect("stats");
    write_text(&out.join("stats.json"), &format!("{stats_text}\n"))?;

    println!(
        "scenario grid {}: {} of {} completed, mean objective {:.4}, COV {:.1}%",
        grid_path.display(),
        stats.completed,
        stats.scenarios,
        stats.mean,
        stats.cov_pct
    );
    Ok(())
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Plain => "plain",
        Mode::Constriction => "cca",
    }
}

fn summarize(scenarios: usize, skipped: usize, minima: &[f64]) -> Stats {
    let n = minima.len();
    let mean = if n > 0 {
        minima.iter().sum::<f64>() / n as f64
    } else {
        f64::NAN
    };
    let std = if n > 1 {
        (minima.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
    } else {
        f64::NAN
    };
    Stats {
        scenarios,
        completed: n,
        skipped,
        mean,
        std,
        cov_pct: 100.0 * std / mean,
    }
}

/// Parses the grid; a malformed row becomes an Err entry so the sweep can
/// record and skip it instead of aborting.
fn read_grid(path: &Path) -> Result<Vec<Result<Scenario, String>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["n_pop", "mode", "omega", "xi", "c1", "c2"];
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(CliError::config(format!(
            "{}: header must be {}, got {}",
            path.display(),
            expected.join(","),
            got.join(",")
        )));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rows.push(Err(e.to_string()));
                continue;
            }
        };
        rows.push(parse_row(&record));
    }
    if rows.is_empty() {
        return Err(CliError::config(format!(
            "{}: the grid holds no scenarios",
            path.display()
        )));
    }
    Ok(rows)
}

fn parse_row(record: &csv::StringRecord) -> Result<Scenario, String> {
    if record.len() != 6 {
        return Err(format!("expected 6 fields, got {}", record.len()));
    }
    let n_pop: usize = record[0]
        .parse()
        .map_err(|e| format!("n_pop \"{}\": {e}", &record[0]))?;
    let mode = match &record[1] {
        "plain" => Mode::Plain,
        "cca" | "constriction" => Mode::Constriction,
        other => return Err(format!("mode \"{other}\" is not plain/cca")),
    };
    // The omega cell is meaningless under constriction (the multiplier is
    // derived from c1 + c2) and may be left empty there.
    let omega: f64 = match (mode, record[2].is_empty()) {
        (Mode::Constriction, true) => 0.0,
        (Mode::Plain, true) => return Err("omega is required for plain mode".into()),
        _ => record[2]
            .parse()
            .map_err(|e| format!("omega \"{}\": {e}", &record[2]))?,
    };
    let xi: f64 = record[3]
        .parse()
        .map_err(|e| format!("xi \"{}\": {e}", &record[3]))?;
    let c1: f64 = record[4]
        .parse()
        .map_err(|e| format!("c1 \"{}\": {e}", &record[4]))?;
    let c2: f64 = record[5]
        .parse()
        .map_err(|e| format!("c2 \"{}\": {e}", &record[5]))?;
    Ok(Scenario {
        n_pop,
        mode,
        omega,
        xi,
        c1,
        c2,
    })
}
