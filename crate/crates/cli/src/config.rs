//! Run and model configuration: TOML schemas, validation, and conversion
//! into the library types. Unknown keys are hard errors so a typo cannot
//! silently fall back to a default.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use etef_core::pso::{bounds_from_seeding, Bounds, Mode, RandomGranularity, Seeding};
use etef_core::signal::{encode, AccelTimeSeries, BandLayout, Wavelet};
use etef_core::spectra::{
    DesignSpectrumParams, IntensifyingProfile, PeriodGrid, SpectrumGrid, TargetShape, TargetSpec,
    TimeGrid,
};
use etef_core::validation::{BoucWenParams, MdofModel};
use etef_core::SwarmConfig64;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub signal: SignalSection,
    pub grid: GridSection,
    pub target: TargetSection,
    pub pso: PsoSection,
    pub seeding: SeedingSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    /// Sample count; must be a power of two.
    pub samples: usize,
    /// Sampling interval, seconds.
    pub dt: f64,
    /// Wavelet family, e.g. "db4".
    pub wavelet: String,
    /// How many of the finest detail bands stay out of the search space.
    pub drop_finest: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Log-spaced period count.
    pub periods: usize,
    pub period_min: f64,
    pub period_max: f64,
    /// Spectrum time columns, spanning the record duration uniformly.
    pub times: usize,
    /// Oscillator damping ratio.
    #[serde(default = "default_damping")]
    pub damping: f64,
}

fn default_damping() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    /// "flat" or "design".
    pub shape: String,
    /// Flat ordinate, g (flat shape only).
    pub level: Option<f64>,
    /// Design-spectrum parameters (design shape only).
    pub s_ds: Option<f64>,
    pub s_d1: Option<f64>,
    pub t_l: Option<f64>,
    /// Intensifying profile; "linear" is the only shape.
    pub profile: String,
    /// Time at which the profile reaches 1, seconds.
    pub target_time: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsoSection {
    pub n_pop: usize,
    /// "plain" or "constriction".
    pub mode: Mode,
    pub omega: f64,
    pub xi: f64,
    pub c1: f64,
    pub c2: f64,
    pub iterations: usize,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    /// "scalar" or "component" random draws.
    #[serde(default = "default_granularity")]
    pub granularity: RandomGranularity,
    pub seed: u64,
}

fn default_retries() -> usize {
    50
}

fn default_granularity() -> RandomGranularity {
    RandomGranularity::Scalar
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedingSection {
    /// "uniform", "gaussian", or "ensemble".
    pub kind: String,
    /// Uniform: half-width of the symmetric search box.
    pub bound: Option<f64>,
    /// Gaussian: covariance matrix CSV (n×n, no header).
    pub covariance: Option<PathBuf>,
    /// Gaussian: optional mean vector CSV (one column, no header).
    pub mean: Option<PathBuf>,
    /// Ensemble: directory of accelerogram CSVs to encode as members.
    pub records_dir: Option<PathBuf>,
    /// Gaussian/ensemble: box half-width in standard deviations.
    #[serde(default = "default_k_sigma")]
    pub k_sigma: f64,
}

fn default_k_sigma() -> f64 {
    3.0
}

/// Everything `prepare` resolved: grids, target, swarm, search box.
pub struct Prepared {
    pub layout: BandLayout,
    pub wavelet: Wavelet,
    pub dt: f64,
    pub damping: f64,
    pub periods: PeriodGrid<f64>,
    pub times: TimeGrid<f64>,
    pub target: SpectrumGrid<f64>,
    pub swarm: SwarmConfig64,
    pub seeding: Seeding<f64>,
    pub bounds: Bounds<f64>,
}

impl RunConfig {
    /// Parses a TOML string; `origin` names the source in error messages.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Validates every section and builds the library-side objects.
    /// Relative paths inside the config resolve against `base_dir`.
    pub fn prepare(
        &self,
        base_dir: &Path,
        seed_override: Option<u64>,
    ) -> Result<Prepared, CliError> {
        let wavelet: Wavelet = self
            .signal
            .wavelet
            .parse()
            .map_err(|e| CliError::config(format!("signal.wavelet: {e}")))?;
        let layout = BandLayout::drop_finest(self.signal.samples, self.signal.drop_finest)
            .map_err(|e| CliError::config(format!("signal: {e}")))?;
        if !(self.signal.dt > 0.0) || !self.signal.dt.is_finite() {
            return Err(CliError::config(format!(
                "signal.dt must be positive, got {}",
                self.signal.dt
            )));
        }
        let duration = self.signal.samples as f64 * self.signal.dt;

        let periods =
            PeriodGrid::log_spaced(self.grid.periods, self.grid.period_min, self.grid.period_max)
                .map_err(|e| CliError::config(format!("grid: {e}")))?;
        let times = TimeGrid::spanning(duration, self.grid.times)
            .map_err(|e| CliError::config(format!("grid: {e}")))?;
        if !(self.grid.damping > 0.0 && self.grid.damping < 1.0) {
            return Err(CliError::config(format!(
                "grid.damping must lie in (0, 1), got {}",
                self.grid.damping
            )));
        }

        let shape = match self.target.shape.as_str() {
            "flat" => {
                let level = self.target.level.ok_or_else(|| {
                    CliError::config("target.level is required for the flat shape")
                })?;
                TargetShape::Flat { level }
            }
            "design" => {
                let (s_ds, s_d1, t_l) = match (self.target.s_ds, self.target.s_d1, self.target.t_l)
                {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Err(CliError::config(
                            "target.s_ds, target.s_d1, target.t_l are required for the design shape",
                        ))
                    }
                };
                TargetShape::Design(
                    DesignSpectrumParams::new(s_ds, s_d1, t_l)
                        .map_err(|e| CliError::config(format!("target: {e}")))?,
                )
            }
            other => {
                return Err(CliError::config(format!(
                    "target.shape must be \"flat\" or \"design\", got \"{other}\""
                )))
            }
        };
        if self.target.profile != "linear" {
            return Err(CliError::config(format!(
                "target.profile must be \"linear\", got \"{}\"",
                self.target.profile
            )));
        }
        let target_spec = TargetSpec::new(shape, IntensifyingProfile::Linear, self.target.target_time)
            .map_err(|e| CliError::config(format!("target: {e}")))?;
        let target = target_spec
            .target_grid(&periods, &times)
            .map_err(|e| CliError::config(format!("target: {e}")))?;

        let swarm = SwarmConfig64 {
            n_pop: self.pso.n_pop,
            omega: self.pso.omega,
            xi: self.pso.xi,
            c1: self.pso.c1,
            c2: self.pso.c2,
            mode: self.pso.mode,
            max_iters: self.pso.iterations,
            max_retries: self.pso.max_retries,
            granularity: self.pso.granularity,
            seed: seed_override.unwrap_or(self.pso.seed),
        };
        swarm
            .validate()
            .map_err(|e| CliError::config(format!("pso: {e}")))?;

        let n_vars = layout.n_vars();
        let (seeding, bounds) = self.build_seeding(base_dir, &layout, wavelet, n_vars)?;

        Ok(Prepared {
            layout,
            wavelet,
            dt: self.signal.dt,
            damping: self.grid.damping,
            periods,
            times,
            target,
            swarm,
            seeding,
            bounds,
        })
    }

    fn build_seeding(
        &self,
        base_dir: &Path,
        layout: &BandLayout,
        wavelet: Wavelet,
        n_vars: usize,
    ) -> Result<(Seeding<f64>, Bounds<f64>), CliError> {
        let section = &self.seeding;
        match section.kind.as_str() {
            "uniform" => {
                let bound = section
                    .bound
                    .ok_or_else(|| CliError::config("seeding.bound is required for uniform"))?;
                if !(bound > 0.0) || !bound.is_finite() {
                    return Err(CliError::config(format!(
                        "seeding.bound must be positive, got {bound}"
                    )));
                }
                let bounds = Bounds::symmetric(n_vars, bound)
                    .map_err(|e| CliError::config(format!("seeding: {e}")))?;
                Ok((Seeding::uniform(), bounds))
            }
            "gaussian" => {
                let cov_path = section.covariance.as_ref().ok_or_else(|| {
                    CliError::config("seeding.covariance is required for gaussian")
                })?;
                let cov = read_matrix_csv(&resolve(base_dir, cov_path))?;
                if cov.len() != n_vars {
                    return Err(CliError::config(format!(
                        "seeding.covariance is {}×{} but the layout has {n_vars} variables",
                        cov.len(),
                        cov.first().map_or(0, Vec::len),
                    )));
                }
                let mean = match &section.mean {
                    Some(path) => {
                        let m = read_vector_csv(&resolve(base_dir, path))?;
                        if m.len() != n_vars {
                            return Err(CliError::config(format!(
                                "seeding.mean has {} entries for {n_vars} variables",
                                m.len()
                            )));
                        }
                        m
                    }
                    None => vec![0.0; n_vars],
                };
                let seeding = Seeding::gaussian(mean, &cov)
                    .map_err(|e| CliError::config(format!("seeding: {e}")))?;
                let bounds = bounds_from_seeding(&seeding, section.k_sigma)
                    .map_err(|e| CliError::config(format!("seeding: {e}")))?;
                Ok((seeding, bounds))
            }
            "ensemble" => {
                let dir = section.records_dir.as_ref().ok_or_else(|| {
                    CliError::config("seeding.records_dir is required for ensemble")
                })?;
                let dir = resolve(base_dir, dir);
                let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                    .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?
                    .filter_map(|entry| entry.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
                    .collect();
                paths.sort();
                if paths.is_empty() {
                    return Err(CliError::config(format!(
                        "seeding.records_dir {} holds no .csv records",
                        dir.display()
                    )));
                }
                let mut members = Vec::with_capacity(paths.len());
                for path in &paths {
                    let series = AccelTimeSeries::<f64>::read_csv_path(path)
                        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                    if series.len() != layout.signal_length() {
                        return Err(CliError::config(format!(
                            "{}: {} samples, the layout needs {}",
                            path.display(),
                            series.len(),
                            layout.signal_length()
                        )));
                    }
                    if (series.dt() - self.signal.dt).abs() > 1e-9 * self.signal.dt {
                        return Err(CliError::config(format!(
                            "{}: dt {} differs from signal.dt {}",
                            path.display(),
                            series.dt(),
                            self.signal.dt
                        )));
                    }
                    let vector = encode(&series, layout, wavelet)
                        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                    members.push(vector.values().to_vec());
                }
                let seeding = Seeding::ensemble(members)
                    .map_err(|e| CliError::config(format!("seeding: {e}")))?;
                let bounds = bounds_from_seeding(&seeding, section.k_sigma)
                    .map_err(|e| CliError::config(format!("seeding: {e}")))?;
                Ok((seeding, bounds))
            }
            other => Err(CliError::config(format!(
                "seeding.kind must be \"uniform\", \"gaussian\", or \"ensemble\", got \"{other}\""
            ))),
        }
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse()).collect();
        rows.push(row.map_err(|e| {
            CliError::config(format!("{} line {}: {e}", path.display(), i + 1))
        })?);
    }
    if rows.is_empty() {
        return Err(CliError::config(format!("{}: empty matrix", path.display())));
    }
    Ok(rows)
}

fn read_vector_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let rows = read_matrix_csv(path)?;
    rows.into_iter()
        .map(|row| {
            if row.len() == 1 {
                Ok(row[0])
            } else {
                Err(CliError::config(format!(
                    "{}: expected one value per line",
                    path.display()
                )))
            }
        })
        .collect()
}

/// Shear-building model file for the demand study.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: ModelSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Story masses, kg, bottom first.
    pub masses: Vec<f64>,
    /// Story lateral stiffnesses, N/m.
    pub stiffnesses: Vec<f64>,
    /// Story heights, m.
    pub heights: Vec<f64>,
    pub rayleigh_a: f64,
    pub rayleigh_b: f64,
    /// Story hysteresis; the degrading example calibration when omitted.
    pub hysteresis: Option<HysteresisSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HysteresisSection {
    pub p: f64,
    pub psi: f64,
    pub lambda: f64,
    pub q: f64,
    pub n: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a_amp: f64,
    pub zeta_s: f64,
    pub delta_psi: f64,
    pub delta_nu: f64,
    pub delta_eta: f64,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn build(&self) -> Result<MdofModel<f64>, CliError> {
        let params = match &self.model.hysteresis {
            Some(h) => BoucWenParams {
                p: h.p,
                psi: h.psi,
                lambda: h.lambda,
                q: h.q,
                n: h.n,
                alpha: h.alpha,
                beta: h.beta,
                gamma: h.gamma,
                a_amp: h.a_amp,
                zeta_s: h.zeta_s,
                delta_psi: h.delta_psi,
                delta_nu: h.delta_nu,
                delta_eta: h.delta_eta,
            },
            None => BoucWenParams::degrading_example(),
        };
        MdofModel::uniform_hysteresis(
            self.model.masses.clone(),
            self.model.stiffnesses.clone(),
            self.model.heights.clone(),
            params,
            self.model.rayleigh_a,
            self.model.rayleigh_b,
        )
        .map_err(|e| CliError::config(format!("model: {e}")))
    }
}
