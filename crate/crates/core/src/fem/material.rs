use crate::error::{Error, Result};

/// Isotropic linear-elastic material with Rayleigh damping `C = αM + βK`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/m³
    pub density: f64,
    /// rad/s
    pub rayleigh_alpha: f64,
    /// s/rad
    pub rayleigh_beta: f64,
}

impl MaterialModel {
    /// A2017 aluminium defaults, undamped.
    pub const ALUMINIUM: MaterialModel = MaterialModel {
        youngs_modulus: 72.5e9,
        poisson_ratio: 0.33,
        density: 2790.0,
        rayleigh_alpha: 0.0,
        rayleigh_beta: 0.0,
    };

    /// Aluminium with the damping identified for the long, narrow specimen.
    pub fn specimen_a() -> Self {
        MaterialModel {
            rayleigh_alpha: 0.421,
            rayleigh_beta: 4.55e-6,
            ..Self::ALUMINIUM
        }
    }

    /// Aluminium with the damping identified for the short, wide specimen.
    pub fn specimen_b() -> Self {
        MaterialModel {
            rayleigh_alpha: 1.94,
            rayleigh_beta: 7.53e-7,
            ..Self::ALUMINIUM
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite();
        if !(ok(self.youngs_modulus) && self.youngs_modulus > 0.0) {
            return Err(Error::Material(format!(
                "Young's modulus must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(ok(self.poisson_ratio) && (0.0..0.5).contains(&self.poisson_ratio)) {
            return Err(Error::Material(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        if !(ok(self.density) && self.density > 0.0) {
            return Err(Error::Material(format!(
                "density must be positive, got {}",
                self.density
            )));
        }
        if !(ok(self.rayleigh_alpha) && self.rayleigh_alpha >= 0.0)
            || !(ok(self.rayleigh_beta) && self.rayleigh_beta >= 0.0)
        {
            return Err(Error::Material("Rayleigh coefficients must be non-negative".into()));
        }
        Ok(())
    }
}

/// SIMP exponents: stiffness scales with `χ^p`, mass with `χ^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpParams {
    pub p: f64,
    pub q: f64,
}

impl Default for SimpParams {
    fn default() -> Self {
        SimpParams { p: 3.0, q: 1.0 }
    }
}

impl SimpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.q >= 1.0 && self.p.is_finite() && self.q.is_finite()) {
            return Err(Error::Material(format!(
                "SIMP exponents must be >= 1, got p = {}, q = {}",
                self.p, self.q
            )));
        }
        Ok(())
    }

    pub fn stiffness_scale(&self, chi: f64) -> f64 {
        chi.powf(self.p)
    }

    pub fn mass_scale(&self, chi: f64) -> f64 {
        chi.powf(self.q)
    }

    pub fn stiffness_scale_derivative(&self, chi: f64) -> f64 {
        self.p * chi.powf(self.p - 1.0)
    }

    pub fn mass_scale_derivative(&self, chi: f64) -> f64 {
        self.q * chi.powf(self.q - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(MaterialModel::ALUMINIUM.validate().is_ok());
        assert!(MaterialModel::specimen_a().validate().is_ok());
        assert!(MaterialModel::specimen_b().validate().is_ok());
        assert_eq!(SimpParams::default(), SimpParams { p: 3.0, q: 1.0 });
    }

    #[test]
    fn invalid_material_rejected() {
        let bad = [
            MaterialModel { youngs_modulus: 0.0, ..MaterialModel::ALUMINIUM },
            MaterialModel { poisson_ratio: 0.5, ..MaterialModel::ALUMINIUM },
            MaterialModel { poisson_ratio: -0.1, ..MaterialModel::ALUMINIUM },
            MaterialModel { density: -1.0, ..MaterialModel::ALUMINIUM },
            MaterialModel { rayleigh_beta: -1e-6, ..MaterialModel::ALUMINIUM },
        ];
        for m in bad {
            assert!(m.validate().is_err(), "{m:?}");
        }
        assert!(SimpParams { p: 0.5, q: 1.0 }.validate().is_err());
    }

    #[test]
    fn simp_scaling() {
        let s = SimpParams::default();
        assert_eq!(s.stiffness_scale(0.5), 0.125);
        assert_eq!(s.mass_scale(0.5), 0.5);
        assert_eq!(s.stiffness_scale_derivative(0.5), 0.75);
        assert_eq!(s.mass_scale_derivative(0.5), 1.0);
    }
}
