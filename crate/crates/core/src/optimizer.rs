//! Box-constrained minimization of `Q(χ)` over `[χ_min, 1]^n`.
//!
//! Each iteration takes a projected limited-memory quasi-Newton step: bound
//! variables whose gradient pushes them outward are frozen, the two-loop
//! recursion runs on the remaining free set, and a backtracking line search
//! along the projected path enforces Armijo decrease of `Q`.

use std::collections::VecDeque;
use std::fmt;

use crate::design::{DesignField, DEFAULT_CHI_MIN};
use crate::error::{Error, Result};
use crate::fem::PlateModel;
use crate::objectives::{FrfDataset, ObjectiveConfig};
use crate::sensitivity::{Evaluation, GradientVector, InverseProblem};

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
// distance from a bound under which a variable counts as sitting on it
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimSettings {
    pub max_iterations: usize,
    /// Relative change of `Q` below which an iteration counts as stalled.
    pub q_tolerance: f64,
    /// Number of consecutive small `Q` changes required to stop.
    pub q_window: usize,
    pub gradient_tolerance: f64,
    /// Uniform starting value `χ₀`.
    pub initial_value: f64,
    pub chi_min: f64,
    /// Number of stored correction pairs.
    pub memory: usize,
    /// Largest change of any `χ_e` on the first (steepest-descent) step.
    pub initial_step: f64,
    /// Largest change of any `χ_e` in a single trial step.
    pub max_step: f64,
}

impl Default for OptimSettings {
    fn default() -> Self {
        OptimSettings {
            max_iterations: 300,
            q_tolerance: 1e-6,
            q_window: 5,
            gradient_tolerance: 1e-6,
            initial_value: 1.0,
            chi_min: DEFAULT_CHI_MIN,
            memory: 8,
            initial_step: 0.2,
            max_step: 0.5,
        }
    }
}

impl OptimSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.q_window == 0 || self.memory == 0 {
            return Err(Error::Config("q_window and memory must be at least 1".into()));
        }
        positive("q_tolerance", self.q_tolerance)?;
        positive("gradient_tolerance", self.gradient_tolerance)?;
        positive("initial_step", self.initial_step)?;
        positive("max_step", self.max_step)?;
        if !(self.chi_min > 0.0 && self.chi_min < 1.0) {
            return Err(Error::Config(format!("chi_min must lie in (0, 1), got {}", self.chi_min)));
        }
        if !(self.initial_value >= self.chi_min && self.initial_value <= 1.0) {
            return Err(Error::Config(format!(
                "initial value {} outside [{}, 1]",
                self.initial_value, self.chi_min
            )));
        }
        Ok(())
    }
}

/// Snapshot recorded after every accepted iterate (iteration 0 is the start).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState {
    pub iteration: usize,
    pub chi: Vec<f64>,
    pub q: f64,
    pub j: f64,
    pub l: f64,
    pub terms: Vec<f64>,
    pub projected_gradient_norm: f64,
    /// Largest change of any `χ_e` in the step that produced this iterate.
    pub step: f64,
    /// Backtracking reductions used in that step.
    pub backtracks: usize,
    /// Objective evaluations since the start, including this one.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Converged,
    MaxIterations,
    /// The line search found no decrease along steepest descent while the
    /// projected gradient is still above tolerance.
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Continue => "continue",
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::Stalled => "stalled",
        })
    }
}

/// Stopping rule: the iteration budget is checked first; convergence needs the
/// last `q_window` relative changes of `Q` below `q_tolerance` and a projected
/// gradient norm below `gradient_tolerance`.
pub fn check_termination(history: &[OptimState], settings: &OptimSettings) -> Termination {
    let Some(last) = history.last() else {
        return Termination::Continue;
    };
    if last.iteration >= settings.max_iterations {
        return Termination::MaxIterations;
    }
    if history.len() <= settings.q_window || last.projected_gradient_norm >= settings.gradient_tolerance {
        return Termination::Continue;
    }
    let recent = &history[history.len() - settings.q_window - 1..];
    let flat = recent.windows(2).all(|w| {
        let scale = w[0].q.abs().max(f64::MIN_POSITIVE);
        (w[1].q - w[0].q).abs() / scale < settings.q_tolerance
    });
    if flat {
        Termination::Converged
    } else {
        Termination::Continue
    }
}

/// `‖P(χ − g) − χ‖₂`, zero exactly at a first-order stationary point.
pub fn projected_gradient_norm(chi: &DesignField, grad: &[f64]) -> f64 {
    chi.values()
        .iter()
        .zip(grad)
        .map(|(&x, &g)| (chi.project(x - g) - x).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
pub struct IdentificationResult {
    pub field: DesignField,
    pub history: Vec<OptimState>,
    pub termination: Termination,
}

/// Resumable optimizer state. The problem is passed to every call so the
/// caller keeps ownership of model and data.
#[derive(Debug, Clone)]
pub struct Identification {
    settings: OptimSettings,
    chi: DesignField,
    eval: Evaluation,
    grad: GradientVector,
    pairs: VecDeque<(Vec<f64>, Vec<f64>)>,
    history: Vec<OptimState>,
    evaluations: usize,
    status: Termination,
}

impl Identification {
    /// Evaluates the starting design and records iteration 0.
    pub fn start(problem: &InverseProblem, settings: OptimSettings, initial: DesignField) -> Result<Self> {
        settings.validate()?;
        if initial.len() != problem.model.mesh.element_count() {
            return Err(Error::DimensionMismatch {
                expected: problem.model.mesh.element_count(),
                actual: initial.len(),
            });
        }
        let at = |source| Error::Optimization {
            iteration: 0,
            source: Box::new(source),
        };
        let eval = problem.evaluate(&initial).map_err(at)?;
        check_finite(&eval, 0)?;
        let grad = problem.gradient(&initial, &eval).map_err(at)?;
        let mut run = Identification {
            settings,
            chi: initial,
            eval,
            grad,
            pairs: VecDeque::new(),
            history: Vec::new(),
            evaluations: 1,
            status: Termination::Continue,
        };
        run.record(0.0, 0);
        run.status = check_termination(&run.history, &run.settings);
        Ok(run)
    }

    pub fn field(&self) -> &DesignField {
        &self.chi
    }

    pub fn history(&self) -> &[OptimState] {
        &self.history
    }

    pub fn status(&self) -> Termination {
        self.status
    }

    pub fn settings(&self) -> &OptimSettings {
        &self.settings
    }

    /// Performs one iteration unless already finished; returns the new status.
    pub fn step(&mut self, problem: &InverseProblem) -> Result<Termination> {
        if self.status != Termination::Continue {
            return Ok(self.status);
        }
        let iteration = self.history.len();
        let at = |source| Error::Optimization {
            iteration,
            source: Box::new(source),
        };
        let free = self.free_set();
        let mut direction = self.quasi_newton_direction(&free);
        let mut steepest = self.pairs.is_empty();
        let accepted = loop {
            match self.line_search(problem, &direction).map_err(at)? {
                Some(found) => break Some(found),
                None if !steepest => {
                    // curvature pairs led astray: retry along -g
                    self.pairs.clear();
                    direction = self.quasi_newton_direction(&free);
                    steepest = true;
                }
                None => break None,
            }
        };
        let Some((chi, eval, backtracks)) = accepted else {
            if projected_gradient_norm(&self.chi, &self.grad) < self.settings.gradient_tolerance {
                // stationary to tolerance: an empty step keeps the trace going
                // so the window rule can confirm convergence
                self.record(0.0, 0);
                self.status = check_termination(&self.history, &self.settings);
            } else {
                self.status = Termination::Stalled;
            }
            return Ok(self.status);
        };
        check_finite(&eval, iteration)?;
        let grad = problem.gradient(&chi, &eval).map_err(at)?;

        let s: Vec<f64> = chi.values().iter().zip(self.chi.values()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad.iter().zip(&self.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * norm(&s) * norm(&y) {
            if self.pairs.len() == self.settings.memory {
                self.pairs.pop_front();
            }
            self.pairs.push_back((s.clone(), y));
        }
        let step = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.chi = chi;
        self.eval = eval;
        self.grad = grad;
        self.record(step, backtracks);
        self.status = check_termination(&self.history, &self.settings);
        Ok(self.status)
    }

    /// Iterates until a stopping rule fires.
    pub fn run(mut self, problem: &InverseProblem) -> Result<IdentificationResult> {
        while self.step(problem)? == Termination::Continue {}
        Ok(self.finish())
    }

    pub fn finish(self) -> IdentificationResult {
        IdentificationResult {
            field: self.chi,
            history: self.history,
            termination: self.status,
        }
    }

    fn record(&mut self, step: f64, backtracks: usize) {
        let v = &self.eval.value;
        self.history.push(OptimState {
            iteration: self.history.len(),
            chi: self.chi.values().to_vec(),
            q: v.q,
            j: v.j,
            l: v.l,
            terms: v.terms.clone(),
            projected_gradient_norm: projected_gradient_norm(&self.chi, &self.grad),
            step,
            backtracks,
            evaluations: self.evaluations,
        });
    }

    fn free_set(&self) -> Vec<bool> {
        let lo = self.chi.chi_min();
        self.chi
            .values()
            .iter()
            .zip(&self.grad)
            .map(|(&x, &g)| !((x <= lo + BOUND_SLACK && g > 0.0) || (x >= 1.0 - BOUND_SLACK && g < 0.0)))
            .collect()
    }

    /// Two-loop recursion restricted to the free variables; falls back to a
    /// scaled steepest descent when no curvature is stored or the result is
    /// not a descent direction.
    fn quasi_newton_direction(&mut self, free: &[bool]) -> Vec<f64> {
        let masked = |v: &[f64]| -> Vec<f64> {
            v.iter().zip(free).map(|(&x, &f)| if f { x } else { 0.0 }).collect()
        };
        let g = masked(&self.grad);
        let steepest = |g: &[f64], settings: &OptimSettings| -> Vec<f64> {
            let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax == 0.0 {
                return vec![0.0; g.len()];
            }
            g.iter().map(|v| -v * settings.initial_step / gmax).collect()
        };
        if self.pairs.is_empty() {
            return steepest(&g, &self.settings);
        }
        let pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = self
            .pairs
            .iter()
            .filter_map(|(s, y)| {
                let (s, y) = (masked(s), masked(y));
                let sy = dot(&s, &y);
                (sy > 1e-10 * norm(&s) * norm(&y)).then(|| (s, y, 1.0 / sy))
            })
            .collect();
        if pairs.is_empty() {
            return steepest(&g, &self.settings);
        }
        let mut q = g.clone();
        let mut alpha = vec![0.0; pairs.len()];
        for (k, (s, y, rho)) in pairs.iter().enumerate().rev() {
            alpha[k] = rho * dot(s, &q);
            axpy(-alpha[k], y, &mut q);
        }
        let (s, y, _) = pairs.last().unwrap();
        let gamma = dot(s, y) / dot(y, y);
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for (k, (s, y, rho)) in pairs.iter().enumerate() {
            let beta = rho * dot(y, &q);
            axpy(alpha[k] - beta, s, &mut q);
        }
        let d: Vec<f64> = masked(&q).into_iter().map(|v| -v).collect();
        if dot(&d, &g) >= 0.0 {
            self.pairs.clear();
            return steepest(&g, &self.settings);
        }
        d
    }

    fn line_search(
        &mut self,
        problem: &InverseProblem,
        direction: &[f64],
    ) -> Result<Option<(DesignField, Evaluation, usize)>> {
        let dmax = direction.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dmax == 0.0 {
            return Ok(None);
        }
        let q0 = self.eval.value.q;
        let x0 = self.chi.values();
        let mut t = (self.settings.max_step / dmax).min(1.0);
        for backtracks in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x0
                .iter()
                .zip(direction)
                .map(|(&x, &d)| self.chi.project(x + t * d))
                .collect();
            let decrease: f64 = trial
                .iter()
                .zip(x0)
                .zip(&self.grad)
                .map(|((a, b), g)| g * (a - b))
                .sum();
            if decrease >= 0.0 || trial.as_slice() == x0 {
                return Ok(None);
            }
            let chi = self.chi.with_values(trial)?;
            let eval = problem.evaluate(&chi)?;
            self.evaluations += 1;
            if eval.value.q.is_finite() && eval.value.q <= q0 + ARMIJO_C1 * decrease {
                return Ok(Some((chi, eval, backtracks)));
            }
            t *= 0.5;
        }
        Ok(None)
    }
}

fn check_finite(eval: &Evaluation, iteration: usize) -> Result<()> {
    if eval.value.q.is_finite() {
        Ok(())
    } else {
        Err(Error::Optimization {
            iteration,
            source: Box::new(Error::Config(format!("objective is not finite: {}", eval.value.q))),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

/// Runs the identification from the uniform start `χ₀ = settings.initial_value`.
pub fn identify(
    model: &PlateModel,
    dataset: &FrfDataset,
    config: &ObjectiveConfig,
    settings: &OptimSettings,
) -> Result<IdentificationResult> {
    settings.validate()?;
    let problem = InverseProblem::new(model, dataset, *config)?;
    let initial = model.uniform_field(settings.initial_value, settings.chi_min)?;
    Identification::start(&problem, settings.clone(), initial)?.run(&problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(iteration: usize, q: f64, pg: f64) -> OptimState {
        OptimState {
            iteration,
            chi: vec![],
            q,
            j: q,
            l: 0.0,
            terms: vec![],
            projected_gradient_norm: pg,
            step: 0.0,
            backtracks: 0,
            evaluations: iteration + 1,
        }
    }

    #[test]
    fn constant_q_with_small_gradient_converges() {
        let s = OptimSettings::default();
        let h: Vec<_> = (0..6).map(|k| state(k, 0.5, 1e-9)).collect();
        assert_eq!(check_termination(&h, &s), Termination::Converged);
        // one change short of the window
        assert_eq!(check_termination(&h[..5], &s), Termination::Continue);
    }

    #[test]
    fn large_gradient_blocks_convergence() {
        let s = OptimSettings::default();
        let h: Vec<_> = (0..8).map(|k| state(k, 0.5, 1e-3)).collect();
        assert_eq!(check_termination(&h, &s), Termination::Continue);
    }

    #[test]
    fn oscillating_q_continues() {
        let s = OptimSettings::default();
        let h: Vec<_> = (0..10)
            .map(|k| state(k, if k % 2 == 0 { 1.0 } else { 0.9 }, 1e-9))
            .collect();
        assert_eq!(check_termination(&h, &s), Termination::Continue);
    }

    #[test]
    fn budget_checked_first() {
        let s = OptimSettings {
            max_iterations: 3,
            ..OptimSettings::default()
        };
        let h: Vec<_> = (0..4).map(|k| state(k, 10.0 - k as f64, 1.0)).collect();
        assert_eq!(check_termination(&h, &s), Termination::MaxIterations);
        assert_eq!(check_termination(&h[..3], &s), Termination::Continue);
    }

    #[test]
    fn settings_validation() {
        assert!(OptimSettings::default().validate().is_ok());
        let bad = OptimSettings {
            max_iterations: 0,
            ..OptimSettings::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimSettings {
            initial_value: 1e-4,
            ..OptimSettings::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn projected_gradient_vanishes_on_active_bounds() {
        let mesh = crate::mesh::Mesh::structured(1.0, 1.0, 2, 1);
        let chi = DesignField::uniform(&mesh, 0.01, 1.0, 1e-3)
            .unwrap()
            .with_values(vec![1.0, 1e-3])
            .unwrap();
        assert_eq!(projected_gradient_norm(&chi, &[-5.0, 3.0]), 0.0);
        let pg = projected_gradient_norm(&chi, &[0.25, 0.0]);
        assert!((pg - 0.25).abs() < 1e-15);
    }
}
