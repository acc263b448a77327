//! Synthetic FRF data: a rectangular notch defines the true field, the exact
//! model response is perturbed by seeded complex Gaussian noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::fem::{angular, assemble, responses, PlateModel, SimpParams};
use crate::mesh::{Mesh, DOMAIN_TOLERANCE};
use crate::objectives::FrfDataset;

/// Axis-aligned rectangle of missing material, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchSpec {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl NotchSpec {
    pub fn new(x0: f64, y0: f64, width: f64, height: f64) -> Result<Self> {
        let n = NotchSpec { x0, y0, width, height };
        if ![x0, y0, width, height].iter().all(|v| v.is_finite()) || width <= 0.0 || height <= 0.0 {
            return Err(Error::Config(format!("invalid notch {n}")));
        }
        Ok(n)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let tol = DOMAIN_TOLERANCE;
        x >= self.x0 - tol && x <= self.x0 + self.width + tol && y >= self.y0 - tol && y <= self.y0 + self.height + tol
    }

    /// Elements whose whole area lies inside the rectangle.
    pub fn elements(&self, mesh: &Mesh) -> Vec<usize> {
        (0..mesh.element_count())
            .filter(|&e| {
                let [cx, cy] = mesh.element_center(e);
                let (hx, hy) = (0.5 * mesh.elem_dx, 0.5 * mesh.elem_dy);
                self.contains(cx - hx, cy - hy) && self.contains(cx + hx, cy + hy)
            })
            .collect()
    }

    /// True field: `χ_min` on notch elements, 1 elsewhere.
    pub fn field(&self, model: &PlateModel, chi_min: f64) -> Result<DesignField> {
        let g = &model.geometry;
        if self.x0 >= g.length_x || self.y0 >= g.length_y || self.x0 + self.width <= 0.0 || self.y0 + self.height <= 0.0 {
            return Err(Error::Config(format!("notch {self} does not intersect the plate")));
        }
        let inside = self.elements(&model.mesh);
        if inside.is_empty() {
            return Err(Error::Config(format!("notch {self} contains no whole element")));
        }
        let covered = |p: [f64; 2]| {
            inside.iter().any(|&e| {
                let [cx, cy] = model.mesh.element_center(e);
                (p[0] - cx).abs() <= 0.5 * model.mesh.elem_dx + DOMAIN_TOLERANCE
                    && (p[1] - cy).abs() <= 0.5 * model.mesh.elem_dy + DOMAIN_TOLERANCE
            })
        };
        if covered(model.boundary.excitation_point) {
            return Err(Error::Config(format!("notch {self} covers the excitation point")));
        }
        if model.boundary.measurement_points.iter().all(|&p| covered(p)) {
            return Err(Error::Config(format!("notch {self} covers every measurement point")));
        }
        let mut values = vec![1.0; model.mesh.element_count()];
        for e in inside {
            values[e] = chi_min;
        }
        model.uniform_field(1.0, chi_min)?.with_values(values)
    }

    /// Centre of the rectangle.
    pub fn centroid(&self) -> [f64; 2] {
        [self.x0 + 0.5 * self.width, self.y0 + 0.5 * self.height]
    }
}

impl std::fmt::Display for NotchSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {} {}", self.x0, self.y0, self.width, self.height)
    }
}

/// `H̃ = H·(1 + σ_rel ε₁) + σ_abs ε₂`, with `ε` complex standard normal
/// (`E|ε|² = 1`), independent per frequency and point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub relative: f64,
    pub absolute: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            relative: 0.0,
            absolute: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.relative >= 0.0 && self.absolute >= 0.0 && self.relative.is_finite() && self.absolute.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "noise levels must be non-negative, got {} and {}",
                self.relative, self.absolute
            )))
        }
    }

    /// Applies the noise in frequency-major, point-minor order.
    pub fn apply(&self, exact: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = || {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
        };
        Ok(exact
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&h| {
                        // both draws always happen so streams align across noise levels
                        let (e1, e2) = (draw(), draw());
                        h * (1.0 + self.relative * e1) + self.absolute * e2
                    })
                    .collect()
            })
            .collect())
    }
}

/// Exact model FRFs of `chi` (unit force).
pub fn model_frfs(model: &PlateModel, chi: &DesignField, simp: &SimpParams, frequencies_hz: &[f64]) -> Result<FrfDataset> {
    let system = assemble(model, chi, simp)?;
    let omegas: Vec<f64> = frequencies_hz.iter().map(|&f| angular(f)).collect();
    let rows = responses(model, &system, &omegas)?
        .into_iter()
        .map(|r| r.solution.inertance)
        .collect();
    FrfDataset::new(frequencies_hz.to_vec(), rows)
}

/// Notched-plate FRFs with noise.
pub fn synth_dataset(
    model: &PlateModel,
    notch: &NotchSpec,
    frequencies_hz: &[f64],
    noise: &NoiseSpec,
    simp: &SimpParams,
    chi_min: f64,
) -> Result<FrfDataset> {
    let truth = notch.field(model, chi_min)?;
    let exact = model_frfs(model, &truth, simp, frequencies_hz)?;
    FrfDataset::new(frequencies_hz.to_vec(), noise.apply(exact.responses())?)
}
