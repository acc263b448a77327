//! FRF mismatch objectives, the Lasso penalty and the total objective `Q = J + λL`.
//!
//! Per-frequency terms also come with their Wirtinger derivative `∂g/∂H`
//! (treating `H` and `conj(H)` as independent), which the adjoint gradient
//! chains through `H = -ω² U`. For a real `g`, `dg = 2·Re[Σ ∂g/∂H_i · dH_i]`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::fem::SimpParams;

/// Measured (or synthetic) inertances at `N` points for `n_f` frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrfDataset {
    frequencies_hz: Vec<f64>,
    responses: Vec<Vec<Complex64>>,
}

impl FrfDataset {
    pub fn new(frequencies_hz: Vec<f64>, responses: Vec<Vec<Complex64>>) -> Result<Self> {
        if frequencies_hz.is_empty() {
            return Err(Error::Dataset("at least one frequency required".into()));
        }
        if frequencies_hz.len() != responses.len() {
            return Err(Error::Dataset(format!(
                "{} frequencies but {} response vectors",
                frequencies_hz.len(),
                responses.len()
            )));
        }
        if let Some(f) = frequencies_hz.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::Dataset(format!("frequency {f} is not positive")));
        }
        if frequencies_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Dataset("frequencies must be strictly increasing".into()));
        }
        let n = responses[0].len();
        if n == 0 {
            return Err(Error::Dataset("at least one measurement point required".into()));
        }
        if let Some((j, r)) = responses.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dataset(format!(
                "frequency {} has {} points, expected {n}",
                frequencies_hz[j],
                r.len()
            )));
        }
        Ok(FrfDataset {
            frequencies_hz,
            responses,
        })
    }

    pub fn frequencies_hz(&self) -> &[f64] {
        &self.frequencies_hz
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.frequencies_hz
            .iter()
            .map(|&f| crate::fem::angular(f))
            .collect()
    }

    pub fn responses(&self) -> &[Vec<Complex64>] {
        &self.responses
    }

    pub fn frequency_count(&self) -> usize {
        self.frequencies_hz.len()
    }

    pub fn point_count(&self) -> usize {
        self.responses[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Mean over frequencies of the squared FRF error norm.
    J1,
    /// Sum over frequencies of `1 - MAC`.
    J2,
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "j1" | "mse" => Ok(ObjectiveKind::J1),
            "j2" | "mac" => Ok(ObjectiveKind::J2),
            other => Err(Error::Config(format!("unknown objective '{other}'"))),
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::J1 => "j1",
            ObjectiveKind::J2 => "j2",
        })
    }
}

/// How the MAC compares two complex response vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MacMode {
    /// Hermitian inner product of the complex vectors.
    #[default]
    Complex,
    /// Real inner product of the magnitudes `|H_i|`.
    Magnitude,
}

impl FromStr for MacMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "complex" => Ok(MacMode::Complex),
            "magnitude" => Ok(MacMode::Magnitude),
            other => Err(Error::Config(format!("unknown MAC mode '{other}'"))),
        }
    }
}

impl fmt::Display for MacMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MacMode::Complex => "complex",
            MacMode::Magnitude => "magnitude",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConfig {
    pub kind: ObjectiveKind,
    pub lambda: f64,
    pub simp: SimpParams,
    pub mac_mode: MacMode,
}

impl ObjectiveConfig {
    pub fn new(kind: ObjectiveKind, lambda: f64) -> Self {
        ObjectiveConfig {
            kind,
            lambda,
            simp: SimpParams::default(),
            mac_mode: MacMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        self.simp.validate()
    }
}

fn check_lengths(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            actual: a.len(),
        });
    }
    Ok(())
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `E = H - H̃`.
pub fn error_vector(computed: &[Complex64], measured: &[Complex64]) -> Result<Vec<Complex64>> {
    check_lengths(computed, measured)?;
    Ok(computed.iter().zip(measured).map(|(h, m)| h - m).collect())
}

/// `J₁ = (1/n_f) Σ_j ‖H(ω_j) - H̃(ω_j)‖²`.
pub fn j1(computed: &[Vec<Complex64>], measured: &[Vec<Complex64>]) -> Result<f64> {
    if computed.len() != measured.len() {
        return Err(Error::DimensionMismatch {
            expected: measured.len(),
            actual: computed.len(),
        });
    }
    let nf = measured.len() as f64;
    let mut total = 0.0;
    for (h, m) in computed.iter().zip(measured) {
        total += norm_sqr(&error_vector(h, m)?);
    }
    Ok(total / nf)
}

/// `1 - |⟨H, H̃⟩|² / (‖H‖² ‖H̃‖²)` with the Hermitian inner product.
pub fn mac_term(computed: &[Complex64], measured: &[Complex64]) -> Result<f64> {
    mac_term_with(computed, measured, MacMode::Complex)
}

pub fn mac_term_with(computed: &[Complex64], measured: &[Complex64], mode: MacMode) -> Result<f64> {
    check_lengths(computed, measured)?;
    let (a, b) = (norm_sqr(computed), norm_sqr(measured));
    if a == 0.0 || b == 0.0 {
        return Err(Error::DegenerateResponse(
            "MAC undefined for a zero response vector".into(),
        ));
    }
    let overlap = match mode {
        MacMode::Complex => computed
            .iter()
            .zip(measured)
            .map(|(h, m)| h * m.conj())
            .sum::<Complex64>()
            .norm_sqr(),
        MacMode::Magnitude => computed
            .iter()
            .zip(measured)
            .map(|(h, m)| h.norm() * m.norm())
            .sum::<f64>()
            .powi(2),
    };
    Ok((1.0 - overlap / (a * b)).clamp(0.0, 1.0))
}

/// `J₂ = Σ_j M(ω_j)`.
pub fn j2(computed: &[Vec<Complex64>], measured: &[Vec<Complex64>], mode: MacMode) -> Result<f64> {
    if computed.len() != measured.len() {
        return Err(Error::DimensionMismatch {
            expected: measured.len(),
            actual: computed.len(),
        });
    }
    computed
        .iter()
        .zip(measured)
        .map(|(h, m)| mac_term_with(h, m, mode))
        .sum()
}

/// Volume-weighted mean of `1 - χ`.
pub fn lasso(chi: &DesignField) -> f64 {
    chi.void_volume() / chi.total_volume()
}

/// `∂L/∂χ_e = -v_e / Σv`.
pub fn lasso_gradient(chi: &DesignField) -> Vec<f64> {
    let total = chi.total_volume();
    chi.volumes().iter().map(|v| -v / total).collect()
}

pub fn total_q(j: f64, l: f64, lambda: f64) -> f64 {
    j + lambda * l
}

/// Value of one frequency's objective term and its Wirtinger derivative `∂g/∂H_i`.
pub(crate) fn term_with_derivative(
    config: &ObjectiveConfig,
    computed: &[Complex64],
    measured: &[Complex64],
    frequency_count: usize,
) -> Result<(f64, Vec<Complex64>)> {
    check_lengths(computed, measured)?;
    match config.kind {
        ObjectiveKind::J1 => {
            let nf = frequency_count as f64;
            let e = error_vector(computed, measured)?;
            let value = norm_sqr(&e) / nf;
            let grad = e.iter().map(|z| z.conj() / nf).collect();
            Ok((value, grad))
        }
        ObjectiveKind::J2 => match config.mac_mode {
            MacMode::Complex => complex_mac_derivative(computed, measured),
            MacMode::Magnitude => magnitude_mac_derivative(computed, measured),
        },
    }
}

fn complex_mac_derivative(h: &[Complex64], m: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    let value = mac_term_with(h, m, MacMode::Complex)?;
    let a = norm_sqr(h);
    let b = norm_sqr(m);
    let s: Complex64 = h.iter().zip(m).map(|(h, m)| h * m.conj()).sum();
    let s2 = s.norm_sqr();
    // ∂|s|²/∂H_i = conj(s)·conj(m_i), ∂a/∂H_i = conj(H_i)
    let grad = h
        .iter()
        .zip(m)
        .map(|(hi, mi)| -(s.conj() * mi.conj() * a - hi.conj() * s2) / (a * a * b))
        .collect();
    Ok((value, grad))
}

fn magnitude_mac_derivative(h: &[Complex64], m: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    let value = mac_term_with(h, m, MacMode::Magnitude)?;
    let a = norm_sqr(h);
    let b = norm_sqr(m);
    let s: f64 = h.iter().zip(m).map(|(h, m)| h.norm() * m.norm()).sum();
    let grad = h
        .iter()
        .zip(m)
        .map(|(hi, mi)| {
            let mag = hi.norm();
            if mag == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let dm_dmag = -(2.0 * s * mi.norm() * a - 2.0 * s * s * mag) / (a * a * b);
            // ∂|H|/∂H = conj(H) / (2|H|)
            hi.conj() * (dm_dmag / (2.0 * mag))
        })
        .collect();
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn error_vector_examples() {
        let h = [c(1.0, 1.0), c(0.0, 0.0)];
        let m = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(error_vector(&h, &m).unwrap(), vec![c(1.0, 1.0), c(-1.0, 0.0)]);
        assert!(error_vector(&h, &h).unwrap().iter().all(|z| *z == c(0.0, 0.0)));
        assert!(error_vector(&[c(0.0, 0.0); 3], &[c(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn j1_examples() {
        let h = vec![vec![c(3.0, 0.0), c(0.0, 4.0)]];
        let zero = vec![vec![c(0.0, 0.0); 2]];
        assert_eq!(j1(&h, &zero).unwrap(), 25.0);
        assert_eq!(j1(&h, &h).unwrap(), 0.0);
        let h2 = vec![h[0].clone(), h[0].clone()];
        let z2 = vec![zero[0].clone(), zero[0].clone()];
        assert_eq!(j1(&h2, &z2).unwrap(), 25.0);
    }

    #[test]
    fn mac_examples() {
        let h = [c(1.0, 2.0), c(-0.5, 0.3), c(2.0, 0.0)];
        let scaled: Vec<_> = h.iter().map(|z| z * c(-0.7, 3.1)).collect();
        assert!(mac_term(&h, &scaled).unwrap() < 1e-14);
        assert_eq!(mac_term(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), 1.0);
        assert_eq!(mac_term(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.5);
        assert!(matches!(
            mac_term(&[c(0.0, 0.0); 2], &[c(1.0, 0.0); 2]),
            Err(Error::DegenerateResponse(_))
        ));
    }

    #[test]
    fn j2_examples() {
        let a = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let b = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let p = vec![c(2.0, 1.0), c(1.0, -1.0)];
        let p2: Vec<_> = p.iter().map(|z| z * c(0.0, 2.0)).collect();
        let computed = vec![a.clone(), p.clone(), p.clone()];
        let measured = vec![b, p2.clone(), p2];
        assert!((j2(&computed, &measured, MacMode::Complex).unwrap() - 1.0).abs() < 1e-14);
        assert!(j2(&computed[1..], &measured[1..], MacMode::Complex).unwrap() < 1e-14);
    }

    #[test]
    fn magnitude_mac_ignores_phase() {
        let h = [c(1.0, 0.0), c(0.0, 2.0)];
        let m = [c(0.0, 1.0), c(2.0, 0.0)];
        assert!(mac_term_with(&h, &m, MacMode::Magnitude).unwrap() < 1e-15);
        assert!(mac_term_with(&h, &m, MacMode::Complex).unwrap() > 0.1);
    }

    #[test]
    fn lasso_examples() {
        let mesh = Mesh::structured(1.0, 1.0, 2, 2);
        let ones = DesignField::uniform(&mesh, 0.01, 1.0, 1e-3).unwrap();
        assert_eq!(lasso(&ones), 0.0);
        let void = ones.with_values(vec![1e-3; 4]).unwrap();
        assert!((lasso(&void) - 0.999).abs() < 1e-15);
        let half = ones.with_values(vec![1.0, 1.0, 0.5, 0.5]).unwrap();
        assert!((lasso(&half) - 0.25).abs() < 1e-15);
        assert!(lasso_gradient(&half).iter().all(|&g| (g + 0.25).abs() < 1e-15));
    }

    #[test]
    fn q_examples() {
        assert_eq!(total_q(0.7, 0.3, 0.0), 0.7);
        assert!((total_q(0.2, 0.3, 0.1) - 0.23).abs() < 1e-15);
    }

    #[test]
    fn dataset_validation() {
        let v = vec![c(1.0, 0.0); 3];
        assert!(FrfDataset::new(vec![10.0, 20.0], vec![v.clone(), v.clone()]).is_ok());
        assert!(FrfDataset::new(vec![20.0, 10.0], vec![v.clone(), v.clone()]).is_err());
        assert!(FrfDataset::new(vec![10.0, 20.0], vec![v.clone(), vec![c(0.0, 0.0); 2]]).is_err());
        assert!(FrfDataset::new(vec![], vec![]).is_err());
        let d = FrfDataset::new(vec![10.0], vec![v]).unwrap();
        assert_eq!((d.frequency_count(), d.point_count()), (1, 3));
    }

    fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
    }

    /// Directional derivative check of the Wirtinger gradients: for a real g,
    /// g(H + t·D) ≈ g(H) + t·2·Re[Σ ∂g/∂H_i · D_i].
    fn check_derivative(config: ObjectiveConfig, h: &[Complex64], m: &[Complex64], d: &[Complex64]) -> bool {
        let (g0, grad) = term_with_derivative(&config, h, m, 2).unwrap();
        let t = 1e-6;
        let shift = |s: f64| -> Vec<Complex64> { h.iter().zip(d).map(|(a, b)| a + b * s).collect() };
        let gp = term_with_derivative(&config, &shift(t), m, 2).unwrap().0;
        let gm = term_with_derivative(&config, &shift(-t), m, 2).unwrap().0;
        let fd = (gp - gm) / (2.0 * t);
        let analytic: f64 = 2.0 * grad.iter().zip(d).map(|(g, d)| g * d).sum::<Complex64>().re;
        // the sum may cancel; roundoff then scales with its terms, not its value
        let terms: f64 = 2.0 * grad.iter().zip(d).map(|(g, d)| (g * d).norm()).sum::<f64>();
        let _ = g0;
        (fd - analytic).abs() <= 1e-5 * fd.abs().max(analytic.abs()) + 1e-8 * terms
    }

    proptest! {
        #[test]
        fn mac_bounds_and_scale_invariance(
            h in complex_vec(6), m in complex_vec(6),
            s1 in (0.1f64..3.0, -3.0f64..3.0), s2 in (0.1f64..3.0, -3.0f64..3.0),
        ) {
            prop_assume!(norm_sqr(&h) > 1e-6 && norm_sqr(&m) > 1e-6);
            let v = mac_term(&h, &m).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let hs: Vec<_> = h.iter().map(|z| z * c(s1.0, s1.1)).collect();
            let ms: Vec<_> = m.iter().map(|z| z * c(s2.0, s2.1)).collect();
            prop_assert!((mac_term(&hs, &ms).unwrap() - v).abs() < 1e-10);
        }

        #[test]
        fn j1_zero_iff_equal(h in complex_vec(4), m in complex_vec(4)) {
            let v = j1(std::slice::from_ref(&h), std::slice::from_ref(&m)).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v == 0.0, h == m);
        }

        #[test]
        fn lasso_is_affine(values in proptest::collection::vec(0.001f64..1.0, 6), t in 0.0f64..1.0) {
            let mesh = Mesh::structured(1.0, 1.0, 3, 2);
            let ones = DesignField::uniform(&mesh, 0.01, 1.0, 1e-3).unwrap();
            let a = ones.with_values(values.clone()).unwrap();
            let mix: Vec<f64> = values.iter().map(|v| t * v + (1.0 - t)).collect();
            let b = ones.with_values(mix).unwrap();
            prop_assert!((lasso(&b) - t * lasso(&a)).abs() < 1e-12);
        }

        #[test]
        fn wirtinger_derivatives_match_finite_differences(
            h in complex_vec(5), m in complex_vec(5), d in complex_vec(5),
        ) {
            prop_assume!(h.iter().all(|z| z.norm() > 0.2) && norm_sqr(&m) > 1e-2);
            let mut cfg = ObjectiveConfig::new(ObjectiveKind::J1, 0.0);
            prop_assert!(check_derivative(cfg, &h, &m, &d));
            cfg.kind = ObjectiveKind::J2;
            prop_assert!(check_derivative(cfg, &h, &m, &d));
            cfg.mac_mode = MacMode::Magnitude;
            prop_assert!(check_derivative(cfg, &h, &m, &d));
        }
    }
}
