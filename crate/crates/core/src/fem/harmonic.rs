//! Steady-state harmonic response `Z(ω) U = F` with
//! `Z(ω) = -ω²M + jω(αM + βK) + K` and inertance extraction `H = -ω² U / F`.

use num_complex::Complex64;

use crate::design::DesignField;
use crate::error::{Error, Result};

use super::assembly::{assemble, PlateModel, SystemMatrices};
use super::band::{ComplexBandLu, SymBandMatrix};
use super::material::{MaterialModel, SimpParams};

/// Componentwise backward error every accepted solve must meet, measured
/// against perturbations of `K`, `M` and the load.
pub const BACKWARD_ERROR_TOLERANCE: f64 = 1e-10;

/// Stiffness and mass coefficients of `Z(ω) = a_K K + a_M M`.
pub fn dynamic_coefficients(material: &MaterialModel, omega: f64) -> (Complex64, Complex64) {
    let stiffness = Complex64::new(1.0, omega * material.rayleigh_beta);
    let mass = Complex64::new(-omega * omega, omega * material.rayleigh_alpha);
    (stiffness, mass)
}

/// Factored dynamic stiffness at one frequency.
///
/// The factorization is of `S Z S` with `S = diag(1/√K_ii)`; deflection and
/// rotation DOF otherwise differ by orders of magnitude.
#[derive(Debug, Clone)]
pub struct DynamicStiffness {
    omega: f64,
    coeff_k: Complex64,
    coeff_m: Complex64,
    scaling: Vec<f64>,
    lu: ComplexBandLu,
}

impl DynamicStiffness {
    pub fn factor(
        stiffness: &SymBandMatrix,
        mass: &SymBandMatrix,
        material: &MaterialModel,
        omega: f64,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::Material(format!("frequency must be non-negative, got {omega}")));
        }
        if stiffness.dim() != mass.dim() {
            return Err(Error::DimensionMismatch {
                expected: stiffness.dim(),
                actual: mass.dim(),
            });
        }
        let (coeff_k, coeff_m) = dynamic_coefficients(material, omega);
        let bw = stiffness.bandwidth().max(mass.bandwidth());
        let scaling: Vec<f64> = stiffness
            .diagonal()
            .iter()
            .zip(mass.diagonal())
            .map(|(&k, m)| {
                let d = if k > 0.0 { k } else { m.abs() };
                if d > 0.0 { 1.0 / d.sqrt() } else { 1.0 }
            })
            .collect();
        let lu = ComplexBandLu::factor_symmetric(stiffness.dim(), bw, |i, j| {
            (coeff_k * stiffness.get(i, j) + coeff_m * mass.get(i, j)) * (scaling[i] * scaling[j])
        })
        .map_err(|_| Error::Singular { omega })?;
        Ok(DynamicStiffness {
            omega,
            coeff_k,
            coeff_m,
            scaling,
            lu,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn coefficients(&self) -> (Complex64, Complex64) {
        (self.coeff_k, self.coeff_m)
    }

    /// `Z x` evaluated from the unfactored matrices.
    pub fn apply(&self, stiffness: &SymBandMatrix, mass: &SymBandMatrix, x: &[Complex64]) -> Vec<Complex64> {
        let kx = stiffness.mul_vec(x);
        let mx = mass.mul_vec(x);
        kx.iter()
            .zip(&mx)
            .map(|(k, m)| self.coeff_k * k + self.coeff_m * m)
            .collect()
    }

    /// Componentwise backward error `max_i |r_i| / (|a_K||K||x| + |a_M||M||x| + |b|)_i`.
    pub fn backward_error(
        &self,
        stiffness: &SymBandMatrix,
        mass: &SymBandMatrix,
        x: &[Complex64],
        rhs: &[Complex64],
        residual: &[Complex64],
    ) -> f64 {
        let ax: Vec<f64> = x.iter().map(|v| v.norm()).collect();
        let kx = stiffness.abs_mul_vec(&ax);
        let mx = mass.abs_mul_vec(&ax);
        let (ck, cm) = (self.coeff_k.norm(), self.coeff_m.norm());
        residual
            .iter()
            .zip(rhs)
            .enumerate()
            .map(|(i, (r, b))| {
                let scale = ck * kx[i] + cm * mx[i] + b.norm();
                if scale > 0.0 { r.norm() / scale } else if r.norm() == 0.0 { 0.0 } else { f64::INFINITY }
            })
            .fold(0.0, f64::max)
    }

    fn solve_unchecked(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = rhs.iter().zip(&self.scaling).map(|(b, s)| b * s).collect();
        self.lu.solve_in_place(&mut y);
        for (v, s) in y.iter_mut().zip(&self.scaling) {
            *v *= s;
        }
        y
    }

    /// Solves `Z x = b`, with one step of iterative refinement if the backward
    /// error is above tolerance. `Z` is complex symmetric, so this also solves `Zᵀ x = b`.
    pub fn solve(
        &self,
        stiffness: &SymBandMatrix,
        mass: &SymBandMatrix,
        rhs: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        if norm(rhs) == 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); rhs.len()]);
        }
        let mut x = self.solve_unchecked(rhs);
        for attempt in 0..2 {
            if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                break;
            }
            let zx = self.apply(stiffness, mass, &x);
            let r: Vec<Complex64> = rhs.iter().zip(&zx).map(|(b, z)| b - z).collect();
            if self.backward_error(stiffness, mass, &x, rhs, &r) <= BACKWARD_ERROR_TOLERANCE {
                return Ok(x);
            }
            if attempt == 0 {
                let dx = self.solve_unchecked(&r);
                for (xi, di) in x.iter_mut().zip(dx) {
                    *xi += di;
                }
            }
        }
        Err(Error::Singular { omega: self.omega })
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex displacement of `Z(ω) U = F`.
pub fn harmonic_solve(
    stiffness: &SymBandMatrix,
    mass: &SymBandMatrix,
    material: &MaterialModel,
    omega: f64,
    load: &[Complex64],
) -> Result<Vec<Complex64>> {
    if load.len() != stiffness.dim() {
        return Err(Error::DimensionMismatch {
            expected: stiffness.dim(),
            actual: load.len(),
        });
    }
    if norm(load) == 0.0 {
        return Err(Error::Boundary("load vector is zero".into()));
    }
    DynamicStiffness::factor(stiffness, mass, material, omega)?.solve(stiffness, mass, load)
}

/// Response of the plate to a unit point force at one frequency.
#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    /// rad/s
    pub omega: f64,
    /// Displacement on the free DOF (equation numbering).
    pub displacement: Vec<Complex64>,
    /// Inertance per measurement point, (m/s²)/N.
    pub inertance: Vec<Complex64>,
}

/// Harmonic solution together with the factorization, for reuse by adjoint solves.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    pub solution: HarmonicSolution,
    pub dynamic_stiffness: DynamicStiffness,
}

/// Inertance at the measurement points from a displacement vector and force amplitude.
pub fn inertance(model: &PlateModel, omega: f64, displacement: &[Complex64], force: Complex64) -> Vec<Complex64> {
    let scale = -omega * omega / force;
    model
        .measurement_equations()
        .iter()
        .map(|eq| match eq {
            Some(i) => displacement[*i] * scale,
            None => Complex64::new(0.0, 0.0),
        })
        .collect()
}

/// Solves for the response to a point force of complex amplitude `force` at the excitation point.
pub fn respond(
    model: &PlateModel,
    system: &SystemMatrices,
    omega: f64,
    force: Complex64,
) -> Result<FrequencyResponse> {
    let mut load = vec![Complex64::new(0.0, 0.0); model.free_dof_count()];
    load[model.excitation_equation()] = force * model.boundary.excitation_direction;
    if force == Complex64::new(0.0, 0.0) {
        return Err(Error::Boundary("force amplitude is zero".into()));
    }
    let dynamic_stiffness = DynamicStiffness::factor(&system.stiffness, &system.mass, &model.material, omega)?;
    let displacement = dynamic_stiffness.solve(&system.stiffness, &system.mass, &load)?;
    let inertance = inertance(model, omega, &displacement, force);
    Ok(FrequencyResponse {
        solution: HarmonicSolution {
            omega,
            displacement,
            inertance,
        },
        dynamic_stiffness,
    })
}

/// Inertance FRF of the plate at `omega` for a unit force.
pub fn compute_frf(
    model: &PlateModel,
    chi: &DesignField,
    simp: &SimpParams,
    omega: f64,
) -> Result<HarmonicSolution> {
    compute_frf_with_force(model, chi, simp, omega, Complex64::new(1.0, 0.0))
}

pub fn compute_frf_with_force(
    model: &PlateModel,
    chi: &DesignField,
    simp: &SimpParams,
    omega: f64,
    force: Complex64,
) -> Result<HarmonicSolution> {
    let system = assemble(model, chi, simp)?;
    Ok(respond(model, &system, omega, force)?.solution)
}

/// Unit-force responses at several frequencies from one assembly.
///
/// Frequencies are solved independently (in parallel with the `parallel`
/// feature); results are returned in input order.
pub fn responses(
    model: &PlateModel,
    system: &SystemMatrices,
    omegas: &[f64],
) -> Result<Vec<FrequencyResponse>> {
    let one = Complex64::new(1.0, 0.0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        omegas
            .par_iter()
            .map(|&w| respond(model, system, w, one))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        omegas.iter().map(|&w| respond(model, system, w, one)).collect()
    }
}

/// Hz to rad/s.
pub fn angular(freq_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * freq_hz
}
