use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Lower bound on the material indicator; stiffness at this value is `χ_min^p`.
pub const DEFAULT_CHI_MIN: f64 = 1e-3;

/// Element-wise material distribution `χ_e ∈ [χ_min, 1]` with element volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignField {
    values: Vec<f64>,
    volumes: Vec<f64>,
    chi_min: f64,
}

impl DesignField {
    pub fn new(values: Vec<f64>, volumes: Vec<f64>, chi_min: f64) -> Result<Self> {
        if !(chi_min > 0.0 && chi_min < 1.0) {
            return Err(Error::Config(format!("chi_min must lie in (0, 1), got {chi_min}")));
        }
        if values.len() != volumes.len() {
            return Err(Error::DimensionMismatch {
                expected: volumes.len(),
                actual: values.len(),
            });
        }
        if let Some(v) = volumes.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Mesh(format!("element volume must be positive, got {v}")));
        }
        check_bounds(&values, chi_min)?;
        Ok(DesignField {
            values,
            volumes,
            chi_min,
        })
    }

    /// Uniform field over a mesh of plate thickness `thickness`.
    pub fn uniform(mesh: &Mesh, thickness: f64, value: f64, chi_min: f64) -> Result<Self> {
        let n = mesh.element_count();
        Self::new(
            vec![value; n],
            vec![mesh.element_area() * thickness; n],
            chi_min,
        )
    }

    /// Same volumes and bounds, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: values.len(),
            });
        }
        check_bounds(&values, self.chi_min)?;
        Ok(DesignField {
            values,
            volumes: self.volumes.clone(),
            chi_min: self.chi_min,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn chi_min(&self) -> f64 {
        self.chi_min
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// Clamps `x` into `[χ_min, 1]`.
    pub fn project(&self, x: f64) -> f64 {
        x.clamp(self.chi_min, 1.0)
    }

    /// Void volume `Σ v_e (1 - χ_e)`.
    pub fn void_volume(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.volumes)
            .map(|(c, v)| v * (1.0 - c))
            .sum()
    }
}

fn check_bounds(values: &[f64], chi_min: f64) -> Result<()> {
    match values
        .iter()
        .position(|&c| !(c >= chi_min && c <= 1.0))
    {
        Some(element) => Err(Error::DesignOutOfBounds {
            element,
            value: values[element],
            lower: chi_min,
        }),
        None => Ok(()),
    }
}
