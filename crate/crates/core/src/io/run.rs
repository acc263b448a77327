//! Batch drivers behind the command-line subcommands. Each writes its files
//! into the given directory and returns what it computed.

use std::fmt::Write as _;
use std::path::Path;

use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::fem::{first_natural_frequency, PlateModel};
use crate::objectives::FrfDataset;
use crate::optimizer::{identify, IdentificationResult};
use crate::sensitivity::{fd_gradient_extrapolated, grad_q};

use super::config::RunConfig;
use super::dataset::{load_frf_dataset, save_frf_dataset};
use super::export::{export_field, export_identification, load_field};
use super::synth::{model_frfs, synth_dataset, NotchSpec};

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Design field from `cfg.field`, or the intact plate.
pub fn configured_field(cfg: &RunConfig, model: &PlateModel) -> Result<DesignField> {
    match &cfg.field {
        Some(path) => load_field(path)?.into_field(&model.mesh, model.geometry.thickness, cfg.chi_min),
        None => model.uniform_field(1.0, cfg.chi_min),
    }
}

/// Measured data from `cfg.dataset`, or synthetic data from `cfg.notch`.
/// Returns the notch too, when configured, as the reference truth.
pub fn configured_dataset(cfg: &RunConfig, model: &PlateModel) -> Result<(FrfDataset, Option<NotchSpec>)> {
    let notch = cfg.notch_spec()?;
    let data = match (&cfg.dataset, &notch) {
        (Some(path), _) => {
            let data = load_frf_dataset(path)?;
            if data.frequencies_hz() != cfg.frequencies_hz.as_slice() {
                log::warn!(
                    "dataset frequencies {:?} differ from configured {:?}; using the dataset's",
                    data.frequencies_hz(),
                    cfg.frequencies_hz
                );
            }
            data
        }
        (None, Some(n)) => synth_dataset(model, n, &cfg.frequencies_hz, &cfg.noise(), &cfg.simp(), cfg.chi_min)?,
        (None, None) => return Err(Error::Config("either dataset or notch must be set".into())),
    };
    Ok((data, notch))
}

/// FRFs of the configured field; writes `frf.csv`.
pub fn run_forward(cfg: &RunConfig, out: &Path) -> Result<FrfDataset> {
    let model = cfg.model()?;
    let chi = configured_field(cfg, &model)?;
    let data = model_frfs(&model, &chi, &cfg.simp(), &cfg.frequencies_hz)?;
    create_dir(out)?;
    save_frf_dataset(&data, out.join("frf.csv"))?;
    let f1 = first_natural_frequency(&model, &chi, &cfg.simp())?;
    write(
        &out.join("forward.txt"),
        &format!("first natural frequency: {f1} Hz\nyoungs modulus: {} Pa\n", model.material.youngs_modulus),
    )?;
    Ok(data)
}

/// Noisy synthetic data of the notched plate; writes `dataset.csv` and the true field.
pub fn run_synth(cfg: &RunConfig, out: &Path) -> Result<FrfDataset> {
    let model = cfg.model()?;
    let notch = cfg
        .notch_spec()?
        .ok_or_else(|| Error::Config("synth needs a notch".into()))?;
    let data = synth_dataset(&model, &notch, &cfg.frequencies_hz, &cfg.noise(), &cfg.simp(), cfg.chi_min)?;
    let truth_dir = out.join("truth");
    create_dir(&truth_dir)?;
    save_frf_dataset(&data, out.join("dataset.csv"))?;
    export_field(&notch.field(&model, cfg.chi_min)?, &model.mesh, &truth_dir)?;
    Ok(data)
}

/// Runs the identification; writes field, convergence log, summary and the
/// resolved configuration.
pub fn run_identify(cfg: &RunConfig, out: &Path) -> Result<IdentificationResult> {
    let model = cfg.model()?;
    let (data, notch) = configured_dataset(cfg, &model)?;
    let result = identify(&model, &data, &cfg.objective_config(), &cfg.optim_settings())?;
    export_identification(&result, &model.mesh, data.frequencies_hz(), notch.as_ref(), out)?;
    write(&out.join("config.toml"), &cfg.to_toml())?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub adjoint: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub max_relative_error: f64,
}

/// Adjoint against extrapolated central differences at the configured field
/// (or `χ ≡ 0.5` when none is set); writes `gradcheck.csv`.
pub fn run_gradcheck(cfg: &RunConfig, out: &Path) -> Result<GradientCheck> {
    let model = cfg.model()?;
    let chi = match cfg.field {
        Some(_) => configured_field(cfg, &model)?,
        None => model.uniform_field(0.5, cfg.chi_min)?,
    };
    let (data, _) = configured_dataset(cfg, &model)?;
    let objective = cfg.objective_config();
    let adjoint = grad_q(&model, &chi, &objective, &data)?;
    let fd = fd_gradient_extrapolated(&model, &chi, &objective, &data, cfg.fd_step)?;
    let mut csv = String::from("element,adjoint,finite_difference,relative_error\n");
    let mut worst: f64 = 0.0;
    for (e, (a, f)) in adjoint.iter().zip(&fd).enumerate() {
        let scale = a.abs().max(f.abs());
        let rel = if scale > 1e-12 { (a - f).abs() / scale } else { 0.0 };
        worst = worst.max(rel);
        writeln!(csv, "{e},{a},{f},{rel}").unwrap();
    }
    create_dir(out)?;
    write(&out.join("gradcheck.csv"), &csv)?;
    Ok(GradientCheck {
        adjoint,
        finite_difference: fd,
        max_relative_error: worst,
    })
}
