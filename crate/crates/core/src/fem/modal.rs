//! Undamped natural frequencies by shifted inverse iteration.

use num_complex::Complex64;

use crate::design::DesignField;
use crate::error::{Error, Result};

use super::assembly::{assemble, PlateModel, SystemMatrices};
use super::band::ComplexBandLu;
use super::harmonic::angular;
use super::material::{MaterialModel, SimpParams};

const MAX_ITERATIONS: usize = 500;
const TOLERANCE: f64 = 1e-13;

/// Natural frequency (Hz) of `K φ = ω² M φ` closest to `shift_hz`.
pub fn natural_frequency_near(system: &SystemMatrices, shift_hz: f64) -> Result<f64> {
    let n = system.stiffness.dim();
    let sigma = angular(shift_hz).powi(2);
    let (k, m) = (&system.stiffness, &system.mass);
    let bw = k.bandwidth().max(m.bandwidth());
    let lu = ComplexBandLu::factor_symmetric(n, bw, |i, j| {
        Complex64::new(k.get(i, j) - sigma * m.get(i, j), 0.0)
    })
    .map_err(|_| Error::Singular {
        omega: sigma.sqrt(),
    })?;

    // deterministic, non-symmetric start vector
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
    let mut lambda = f64::NAN;
    for _ in 0..MAX_ITERATIONS {
        let mx: Vec<Complex64> = m.mul_vec(&x).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let y: Vec<f64> = lu.solve(&mx).into_iter().map(|v| v.re).collect();
        let my = m.mul_vec(&y);
        let ky = k.mul_vec(&y);
        let ymy: f64 = y.iter().zip(&my).map(|(a, b)| a * b).sum();
        let yky: f64 = y.iter().zip(&ky).map(|(a, b)| a * b).sum();
        let next = yky / ymy;
        let s = ymy.sqrt();
        x = y.into_iter().map(|v| v / s).collect();
        if (next - lambda).abs() <= TOLERANCE * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    Ok(lambda.max(0.0).sqrt() / (2.0 * std::f64::consts::PI))
}

/// Lowest natural frequency (Hz) of the plate for a given design.
pub fn first_natural_frequency(model: &PlateModel, chi: &DesignField, simp: &SimpParams) -> Result<f64> {
    let system = assemble(model, chi, simp)?;
    natural_frequency_near(&system, 0.0)
}

/// Euler–Bernoulli first bending frequency (Hz) of a uniform cantilever strip.
pub fn cantilever_first_frequency(material: &MaterialModel, length: f64, width: f64, thickness: f64) -> f64 {
    let beta_l: f64 = 1.875_104_068_711_961;
    let ei = material.youngs_modulus * width * thickness.powi(3) / 12.0;
    let rho_a = material.density * width * thickness;
    beta_l.powi(2) / (2.0 * std::f64::consts::PI) * (ei / (rho_a * length.powi(4))).sqrt()
}

/// Rescales Young's modulus so the healthy model's first resonance matches `target_hz`.
///
/// Natural frequencies scale with `√E` at fixed Poisson ratio and density.
pub fn calibrate_youngs_modulus(model: &PlateModel, simp: &SimpParams, chi_min: f64, target_hz: f64) -> Result<MaterialModel> {
    if !(target_hz.is_finite() && target_hz > 0.0) {
        return Err(Error::Config(format!("calibration frequency must be positive, got {target_hz}")));
    }
    let healthy = model.uniform_field(1.0, chi_min)?;
    let f = first_natural_frequency(model, &healthy, simp)?;
    Ok(MaterialModel {
        youngs_modulus: model.material.youngs_modulus * (target_hz / f).powi(2),
        ..model.material
    })
}
