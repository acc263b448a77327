//! Run configuration: a flat TOML key/value file. Unknown keys are rejected and
//! missing keys fall back to the synthetic notched specimen-B case.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fem::{calibrate_youngs_modulus, MaterialModel, PlateModel, SimpParams};
use crate::mesh::{measurement_grid, BoundarySpec, Edge, PlateGeometry};
use crate::objectives::{MacMode, ObjectiveConfig, ObjectiveKind};
use crate::optimizer::OptimSettings;

use super::synth::{NoiseSpec, NotchSpec};

fn parse_str<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

fn show<S: Serializer, T: Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub length_x: f64,
    pub length_y: f64,
    pub thickness: f64,
    pub element_size: f64,

    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    pub rayleigh_alpha: f64,
    pub rayleigh_beta: f64,
    /// Rescale `E` so the healthy first resonance lands here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_first_frequency_hz: Option<f64>,

    #[serde(deserialize_with = "parse_str", serialize_with = "show")]
    pub clamped_edge: Edge,
    pub excitation_point: [f64; 2],
    /// Columns and rows of a regular grid of measurement points.
    pub measurement_grid: [usize; 2],
    /// Explicit measurement points; replaces the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement_points: Option<Vec<[f64; 2]>>,

    pub frequencies_hz: Vec<f64>,
    #[serde(deserialize_with = "parse_str", serialize_with = "show")]
    pub objective: ObjectiveKind,
    #[serde(deserialize_with = "parse_str", serialize_with = "show")]
    pub mac_mode: MacMode,
    pub lambda: f64,
    pub simp_p: f64,
    pub simp_q: f64,
    pub chi_min: f64,

    pub max_iterations: usize,
    pub q_tolerance: f64,
    pub q_window: usize,
    pub gradient_tolerance: f64,
    pub initial_chi: f64,

    /// FRF CSV to identify from; relative paths resolve against the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// True damage `[x0, y0, width, height]` for synthetic data and reporting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notch: Option<[f64; 4]>,
    pub noise_rel: f64,
    pub noise_abs: f64,
    pub seed: u64,

    /// Design field CSV for `forward`; defaults to the intact plate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
    pub fd_step: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = MaterialModel::specimen_b();
        let settings = OptimSettings::default();
        RunConfig {
            length_x: 0.335,
            length_y: 0.100,
            thickness: 0.005,
            element_size: 0.010,
            youngs_modulus: b.youngs_modulus,
            poisson_ratio: b.poisson_ratio,
            density: b.density,
            rayleigh_alpha: b.rayleigh_alpha,
            rayleigh_beta: b.rayleigh_beta,
            target_first_frequency_hz: None,
            clamped_edge: Edge::Left,
            excitation_point: [0.30, 0.08],
            measurement_grid: [8, 3],
            measurement_points: None,
            frequencies_hz: vec![260.0, 804.0, 900.0],
            objective: ObjectiveKind::J2,
            mac_mode: MacMode::Complex,
            lambda: 0.1,
            simp_p: 3.0,
            simp_q: 1.0,
            chi_min: settings.chi_min,
            max_iterations: settings.max_iterations,
            q_tolerance: settings.q_tolerance,
            q_window: settings.q_window,
            gradient_tolerance: settings.gradient_tolerance,
            initial_chi: settings.initial_value,
            dataset: None,
            notch: Some([0.1475, 0.0, 0.04, 0.02]),
            noise_rel: 0.0,
            noise_abs: 0.0,
            seed: 0,
            field: None,
            fd_step: 2e-3,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative `dataset` and `field` paths are resolved
    /// against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::parse(path, line, e.message())
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.dataset, &mut cfg.field].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequencies_hz.is_empty() {
            return Err(Error::Config("frequencies_hz must not be empty".into()));
        }
        if self.frequencies_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::Config("frequencies must be positive".into()));
        }
        if self.frequencies_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("frequencies must be strictly increasing".into()));
        }
        if !(self.element_size.is_finite() && self.element_size > 0.0) {
            return Err(Error::Config(format!("element_size must be positive, got {}", self.element_size)));
        }
        if self.measurement_points.is_none() && self.measurement_grid.contains(&0) {
            return Err(Error::Config("measurement_grid needs at least one column and row".into()));
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(Error::Config(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if let Some(f) = self.target_first_frequency_hz {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!("target_first_frequency_hz must be positive, got {f}")));
            }
        }
        self.material().validate()?;
        self.objective_config().validate()?;
        self.optim_settings().validate()?;
        self.noise().validate()?;
        if let Some(n) = self.notch {
            NotchSpec::new(n[0], n[1], n[2], n[3])?;
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<PlateGeometry> {
        PlateGeometry::new(self.length_x, self.length_y, self.thickness)
    }

    pub fn material(&self) -> MaterialModel {
        MaterialModel {
            youngs_modulus: self.youngs_modulus,
            poisson_ratio: self.poisson_ratio,
            density: self.density,
            rayleigh_alpha: self.rayleigh_alpha,
            rayleigh_beta: self.rayleigh_beta,
        }
    }

    pub fn simp(&self) -> SimpParams {
        SimpParams {
            p: self.simp_p,
            q: self.simp_q,
        }
    }

    pub fn boundary(&self) -> Result<BoundarySpec> {
        let points = match &self.measurement_points {
            Some(p) => p.clone(),
            None => measurement_grid(&self.geometry()?, self.measurement_grid[0], self.measurement_grid[1]),
        };
        Ok(BoundarySpec::new(self.clamped_edge, self.excitation_point, points))
    }

    /// Builds the plate model, calibrating `E` when a target frequency is set.
    pub fn model(&self) -> Result<PlateModel> {
        let model = PlateModel::new(self.geometry()?, self.material(), self.element_size, self.boundary()?)?;
        match self.target_first_frequency_hz {
            Some(target) => {
                let material = calibrate_youngs_modulus(&model, &self.simp(), self.chi_min, target)?;
                model.with_material(material)
            }
            None => Ok(model),
        }
    }

    pub fn objective_config(&self) -> ObjectiveConfig {
        ObjectiveConfig {
            kind: self.objective,
            lambda: self.lambda,
            simp: self.simp(),
            mac_mode: self.mac_mode,
        }
    }

    pub fn optim_settings(&self) -> OptimSettings {
        OptimSettings {
            max_iterations: self.max_iterations,
            q_tolerance: self.q_tolerance,
            q_window: self.q_window,
            gradient_tolerance: self.gradient_tolerance,
            initial_value: self.initial_chi,
            chi_min: self.chi_min,
            ..OptimSettings::default()
        }
    }

    pub fn notch_spec(&self) -> Result<Option<NotchSpec>> {
        self.notch.map(|n| NotchSpec::new(n[0], n[1], n[2], n[3])).transpose()
    }

    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            relative: self.noise_rel,
            absolute: self.noise_abs,
            seed: self.seed,
        }
    }
}
