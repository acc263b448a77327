//! Objective evaluation and its adjoint gradient with respect to `χ`.
//!
//! For each frequency the adjoint system `Zᵀ Λ = -(∂g/∂U)ᵀ` is solved with the
//! forward factorization (`Z` is complex symmetric), and
//! `∂g/∂χ_e = 2·Re[Λ_eᵀ (∂Z/∂χ_e) U_e]` with
//! `∂Z/∂χ_e = pχ^{p-1}(1 + jωβ) K_e + qχ^{q-1}(-ω² + jωα) M_e`.

use num_complex::Complex64;

use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::fem::element::ELEMENT_DOFS;
use crate::fem::{assemble, responses, FrequencyResponse, PlateModel, SystemMatrices};
use crate::objectives::{lasso, lasso_gradient, term_with_derivative, total_q, FrfDataset, ObjectiveConfig};

pub type GradientVector = Vec<f64>;

/// Objective components at one design.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub q: f64,
    pub j: f64,
    pub l: f64,
    /// Per-frequency contributions to `J` (`‖E_j‖²/n_f` or `M(ω_j)`).
    pub terms: Vec<f64>,
}

/// Forward state at one design, retained for the adjoint pass.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: ObjectiveValue,
    system: SystemMatrices,
    responses: Vec<FrequencyResponse>,
    term_derivatives: Vec<Vec<Complex64>>,
}

impl Evaluation {
    pub fn responses(&self) -> &[FrequencyResponse] {
        &self.responses
    }
}

/// Model, target data and objective settings of one identification run.
#[derive(Debug, Clone)]
pub struct InverseProblem<'a> {
    pub model: &'a PlateModel,
    pub dataset: &'a FrfDataset,
    pub config: ObjectiveConfig,
    omegas: Vec<f64>,
}

impl<'a> InverseProblem<'a> {
    pub fn new(model: &'a PlateModel, dataset: &'a FrfDataset, config: ObjectiveConfig) -> Result<Self> {
        config.validate()?;
        let n = model.boundary.measurement_points.len();
        if dataset.point_count() != n {
            return Err(Error::Dataset(format!(
                "dataset has {} points per frequency but the model has {n} measurement points",
                dataset.point_count()
            )));
        }
        Ok(InverseProblem {
            model,
            dataset,
            config,
            omegas: dataset.omegas(),
        })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn evaluate(&self, chi: &DesignField) -> Result<Evaluation> {
        let system = assemble(self.model, chi, &self.config.simp)?;
        let responses = responses(self.model, &system, &self.omegas)?;
        let nf = self.dataset.frequency_count();
        let mut terms = Vec::with_capacity(nf);
        let mut term_derivatives = Vec::with_capacity(nf);
        for (r, measured) in responses.iter().zip(self.dataset.responses()) {
            let (value, grad) = term_with_derivative(&self.config, &r.solution.inertance, measured, nf)
                .map_err(|e| match e {
                    Error::DegenerateResponse(msg) => Error::DegenerateResponse(format!(
                        "{msg} at omega = {} rad/s",
                        r.solution.omega
                    )),
                    other => other,
                })?;
            terms.push(value);
            term_derivatives.push(grad);
        }
        let j: f64 = terms.iter().sum();
        let l = lasso(chi);
        let q = total_q(j, l, self.config.lambda);
        Ok(Evaluation {
            value: ObjectiveValue { q, j, l, terms },
            system,
            responses,
            term_derivatives,
        })
    }

    pub fn value(&self, chi: &DesignField) -> Result<ObjectiveValue> {
        Ok(self.evaluate(chi)?.value)
    }

    /// Adjoint gradient of `Q` at the design that produced `eval`.
    pub fn gradient(&self, chi: &DesignField, eval: &Evaluation) -> Result<GradientVector> {
        let per_frequency: Vec<Vec<f64>> = {
            let work = |j: usize| self.frequency_gradient(chi, eval, j);
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..eval.responses.len())
                    .into_par_iter()
                    .map(work)
                    .collect::<Result<_>>()?
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..eval.responses.len()).map(work).collect::<Result<_>>()?
            }
        };
        let mut grad: Vec<f64> = lasso_gradient(chi)
            .into_iter()
            .map(|g| self.config.lambda * g)
            .collect();
        // fixed summation order keeps the result independent of scheduling
        for contribution in &per_frequency {
            for (g, c) in grad.iter_mut().zip(contribution) {
                *g += c;
            }
        }
        Ok(grad)
    }

    fn frequency_gradient(&self, chi: &DesignField, eval: &Evaluation, j: usize) -> Result<Vec<f64>> {
        let response = &eval.responses[j];
        let omega = response.solution.omega;
        let dg_dh = &eval.term_derivatives[j];
        let zero = Complex64::new(0.0, 0.0);

        // H_i = -ω² U_{d_i}, so -(∂g/∂U)ᵀ has ω²·∂g/∂H_i at d_i
        let mut rhs = vec![zero; self.model.free_dof_count()];
        for (eq, d) in self.model.measurement_equations().iter().zip(dg_dh) {
            if let Some(eq) = eq {
                rhs[*eq] += d * (omega * omega);
            }
        }
        let adjoint = response
            .dynamic_stiffness
            .solve(&eval.system.stiffness, &eval.system.mass, &rhs)?;
        let u = &response.solution.displacement;

        let (coeff_k, coeff_m) = response.dynamic_stiffness.coefficients();
        let em = self.model.element_matrices();
        let simp = &self.config.simp;
        let mut grad = vec![0.0; chi.len()];
        for (e, g) in grad.iter_mut().enumerate() {
            let eqs = self.model.element_equations(e);
            let gather = |v: &[Complex64]| -> [Complex64; ELEMENT_DOFS] {
                std::array::from_fn(|a| eqs[a].map_or(zero, |i| v[i]))
            };
            let ue = gather(u);
            let le = gather(&adjoint);
            let mut tk = zero;
            let mut tm = zero;
            for a in 0..ELEMENT_DOFS {
                if le[a] == zero {
                    continue;
                }
                let mut ku = zero;
                let mut mu = zero;
                for b in 0..ELEMENT_DOFS {
                    ku += ue[b] * em.stiffness[a][b];
                    mu += ue[b] * em.mass[a][b];
                }
                tk += le[a] * ku;
                tm += le[a] * mu;
            }
            let c = chi.values()[e];
            let dz = coeff_k * simp.stiffness_scale_derivative(c) * tk
                + coeff_m * simp.mass_scale_derivative(c) * tm;
            *g = 2.0 * dz.re;
        }
        Ok(grad)
    }

    pub fn value_and_gradient(&self, chi: &DesignField) -> Result<(ObjectiveValue, GradientVector)> {
        let eval = self.evaluate(chi)?;
        let grad = self.gradient(chi, &eval)?;
        Ok((eval.value, grad))
    }
}

/// Adjoint gradient of `Q(χ)`.
pub fn grad_q(
    model: &PlateModel,
    chi: &DesignField,
    config: &ObjectiveConfig,
    dataset: &FrfDataset,
) -> Result<GradientVector> {
    let problem = InverseProblem::new(model, dataset, *config)?;
    Ok(problem.value_and_gradient(chi)?.1)
}

/// Finite-difference gradient of `Q(χ)`: central differences, second-order
/// one-sided differences where a step would leave `[χ_min, 1]`.
pub fn fd_gradient(
    model: &PlateModel,
    chi: &DesignField,
    config: &ObjectiveConfig,
    dataset: &FrfDataset,
    step: f64,
) -> Result<GradientVector> {
    finite_differences(model, chi, config, dataset, step, false)
}

/// Like [`fd_gradient`], but central differences at `h` and `h/2` are combined
/// by Richardson extrapolation, removing the `O(h²)` truncation term. This
/// allows steps large enough that solver roundoff in `Q` stays negligible.
pub fn fd_gradient_extrapolated(
    model: &PlateModel,
    chi: &DesignField,
    config: &ObjectiveConfig,
    dataset: &FrfDataset,
    step: f64,
) -> Result<GradientVector> {
    finite_differences(model, chi, config, dataset, step, true)
}

fn finite_differences(
    model: &PlateModel,
    chi: &DesignField,
    config: &ObjectiveConfig,
    dataset: &FrfDataset,
    step: f64,
    extrapolate: bool,
) -> Result<GradientVector> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {step}")));
    }
    let problem = InverseProblem::new(model, dataset, *config)?;
    let base = chi.values();
    let q_at = |e: usize, delta: f64| -> Result<f64> {
        let mut v = base.to_vec();
        v[e] += delta;
        Ok(problem.value(&chi.with_values(v)?)?.q)
    };
    let q0 = problem.value(chi)?.q;
    let mut grad = Vec::with_capacity(base.len());
    for e in 0..base.len() {
        let up_ok = base[e] + 2.0 * step <= 1.0;
        let down_ok = base[e] - 2.0 * step >= chi.chi_min();
        let g = match (up_ok, down_ok) {
            (true, true) => {
                let central = |h: f64| -> Result<f64> { Ok((q_at(e, h)? - q_at(e, -h)?) / (2.0 * h)) };
                let d = central(step)?;
                if extrapolate {
                    (4.0 * central(0.5 * step)? - d) / 3.0
                } else {
                    d
                }
            }
            (false, true) => (3.0 * q0 - 4.0 * q_at(e, -step)? + q_at(e, -2.0 * step)?) / (2.0 * step),
            (true, false) => (-3.0 * q0 + 4.0 * q_at(e, step)? - q_at(e, 2.0 * step)?) / (2.0 * step),
            (false, false) => {
                return Err(Error::Config(format!(
                    "step {step} too large for the design interval"
                )))
            }
        };
        grad.push(g);
    }
    Ok(grad)
}
