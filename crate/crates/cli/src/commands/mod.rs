pub mod edp;
pub mod evaluate;
pub mod generate;
pub mod scenario;

use std::fs;
use std::path::Path;

use etef_core::signal::{decode_values, SignalError};
use etef_core::spectra::{objective, SpectrumGrid};

use crate::config::Prepared;
use crate::error::CliError;

/// Maps an accelerogram read failure to an exit class: filesystem trouble is
/// I/O, anything about the file's contents is a configuration problem.
pub fn read_error(origin: &Path, err: SignalError) -> CliError {
    match err {
        SignalError::Io(e) => CliError::io(format!("{}: {e}", origin.display())),
        SignalError::Csv(e) if e.is_io_error() => {
            CliError::io(format!("{}: {e}", origin.display()))
        }
        other => CliError::config(format!("{}: {other}", origin.display())),
    }
}

/// Decision-space objective: decode the coefficients and score the running
/// spectrum against the target. Positions come from inside the validated
/// search box, so decoding cannot fail; any defensive failure scores worst.
pub fn etef_objective(prep: &Prepared) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
    move |x: &[f64]| match decode_values(x, &prep.layout, prep.wavelet, prep.dt) {
        Ok(series) => objective(&series, &prep.target, prep.damping).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Root-mean-square response/target gap down the last time column, and the
/// mean target ordinate there, the pair behind the "rms_ratio" report field.
pub fn final_column_mismatch(response: &SpectrumGrid<f64>, target: &SpectrumGrid<f64>) -> (f64, f64) {
    let last = target.n_times() - 1;
    let n = target.n_periods() as f64;
    let mut sq_sum = 0.0;
    let mut target_sum = 0.0;
    for i in 0..target.n_periods() {
        let gap = response.value(i, last) - target.value(i, last);
        sq_sum += gap * gap;
        target_sum += target.value(i, last);
    }
    ((sq_sum / n).sqrt(), target_sum / n)
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}
