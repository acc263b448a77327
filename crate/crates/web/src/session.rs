//! Demo state in plain Rust, so it can be tested off the browser.

use plate_damage::fem::harmonic::respond;
use plate_damage::fem::{angular, assemble, PlateModel};
use plate_damage::io::export::gray_level;
use plate_damage::io::{synth_dataset, NoiseSpec, NotchSpec, RunConfig};
use plate_damage::objectives::{FrfDataset, ObjectiveConfig, ObjectiveKind};
use plate_damage::optimizer::{Identification, Termination};
use plate_damage::sensitivity::InverseProblem;
use plate_damage::{DesignField, Result};

struct Run {
    data: FrfDataset,
    objective: ObjectiveConfig,
    truth: DesignField,
    state: Identification,
}

/// The default notched specimen-B plate plus at most one identification in progress.
pub struct Session {
    config: RunConfig,
    model: PlateModel,
    run: Option<Run>,
}

impl Session {
    pub fn new() -> Result<Self> {
        let config = RunConfig::default();
        let model = config.model()?;
        Ok(Session { config, model, run: None })
    }

    pub fn model(&self) -> &PlateModel {
        &self.model
    }

    pub fn chi_min(&self) -> f64 {
        self.config.chi_min
    }

    pub fn frequencies_hz(&self) -> &[f64] {
        &self.config.frequencies_hz
    }

    /// Inertance magnitude at measurement point `point` for the intact and the
    /// notched plate over `samples` evenly spaced frequencies.
    /// Returns `[freqs, healthy, damaged]` concatenated.
    pub fn frf_sweep(&self, notch: &NotchSpec, f_lo: f64, f_hi: f64, samples: usize, point: usize) -> Result<Vec<f64>> {
        let simp = self.config.simp();
        let healthy = self.model.uniform_field(1.0, self.config.chi_min)?;
        let damaged = notch.field(&self.model, self.config.chi_min)?;
        let freqs: Vec<f64> = (0..samples)
            .map(|k| f_lo + (f_hi - f_lo) * k as f64 / (samples.max(2) - 1) as f64)
            .collect();
        let mut out = freqs.clone();
        for chi in [&healthy, &damaged] {
            let system = assemble(&self.model, chi, &simp)?;
            for &f in &freqs {
                let r = respond(&self.model, &system, angular(f), 1.0.into())?;
                out.push(r.solution.inertance.get(point).map_or(f64::NAN, |h| h.norm()));
            }
        }
        Ok(out)
    }

    /// Synthesizes noisy data for `notch` and starts identifying from the intact plate.
    pub fn start(&mut self, notch: &NotchSpec, noise: &NoiseSpec, lambda: f64) -> Result<()> {
        let simp = self.config.simp();
        let chi_min = self.config.chi_min;
        let data = synth_dataset(&self.model, notch, &self.config.frequencies_hz, noise, &simp, chi_min)?;
        let objective = ObjectiveConfig::new(ObjectiveKind::J2, lambda);
        let settings = self.config.optim_settings();
        let initial = self.model.uniform_field(settings.initial_value, chi_min)?;
        let problem = InverseProblem::new(&self.model, &data, objective)?;
        let state = Identification::start(&problem, settings, initial)?;
        self.run = Some(Run {
            data,
            objective,
            truth: notch.field(&self.model, chi_min)?,
            state,
        });
        Ok(())
    }

    /// Advances the running identification by up to `iterations` steps.
    pub fn step(&mut self, iterations: usize) -> Result<Option<Termination>> {
        let Some(run) = self.run.as_mut() else {
            return Ok(None);
        };
        let problem = InverseProblem::new(&self.model, &run.data, run.objective)?;
        for _ in 0..iterations {
            if run.state.step(&problem)? != Termination::Continue {
                break;
            }
        }
        Ok(Some(run.state.status()))
    }

    pub fn field(&self) -> Option<&[f64]> {
        self.run.as_ref().map(|r| r.state.field().values())
    }

    pub fn truth(&self) -> Option<&[f64]> {
        self.run.as_ref().map(|r| r.truth.values())
    }

    pub fn history_q(&self) -> Vec<f64> {
        self.run
            .as_ref()
            .map_or_else(Vec::new, |r| r.state.history().iter().map(|s| s.q).collect())
    }
}

/// RGBA pixels of a row-major element field, one pixel per element, top row at
/// the largest `y`; void is black.
pub fn field_rgba(values: &[f64], nx: usize, chi_min: f64) -> Vec<u8> {
    if nx == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(4 * values.len());
    for row in values.chunks(nx).rev() {
        for &v in row {
            let g = gray_level(v, chi_min);
            out.extend_from_slice(&[g, g, g, 255]);
        }
    }
    out
}
