use plate_damage::fem::{angular, compute_frf, MaterialModel, PlateModel, SimpParams};
use plate_damage::mesh::{BoundarySpec, Edge, Mesh, PlateGeometry};
use plate_damage::objectives::{FrfDataset, MacMode, ObjectiveConfig, ObjectiveKind};
use plate_damage::sensitivity::{fd_gradient, fd_gradient_extrapolated, grad_q};
use plate_damage::{DesignField, DEFAULT_CHI_MIN};

const FD_STEP: f64 = 2e-3;
const REL_TOL: f64 = 1e-5;
const ABS_FLOOR: f64 = 1e-12;

fn model(nx: usize, ny: usize) -> PlateModel {
    let g = PlateGeometry::new(0.16, 0.08, 0.004).unwrap();
    let mesh = Mesh::structured(0.16, 0.08, nx, ny);
    let b = BoundarySpec::new(
        Edge::Left,
        [0.15, 0.07],
        vec![[0.16, 0.0], [0.16, 0.08], [0.08, 0.04], [0.12, 0.02], [0.04, 0.08]],
    );
    PlateModel::with_mesh(g, MaterialModel::specimen_b(), mesh, b).unwrap()
}

fn field(model: &PlateModel, f: impl Fn(usize) -> f64) -> DesignField {
    let n = model.mesh.element_count();
    model
        .uniform_field(1.0, DEFAULT_CHI_MIN)
        .unwrap()
        .with_values((0..n).map(f).collect())
        .unwrap()
}

fn dataset(model: &PlateModel, chi: &DesignField, freqs: &[f64]) -> FrfDataset {
    let simp = SimpParams::default();
    let r = freqs
        .iter()
        .map(|&f| compute_frf(model, chi, &simp, angular(f)).unwrap().inertance)
        .collect();
    FrfDataset::new(freqs.to_vec(), r).unwrap()
}

fn worst_relative_error(adjoint: &[f64], fd: &[f64]) -> f64 {
    adjoint
        .iter()
        .zip(fd)
        .filter(|(a, f)| a.abs().max(f.abs()) > ABS_FLOOR)
        .map(|(a, f)| (a - f).abs() / a.abs().max(f.abs()))
        .fold(0.0, f64::max)
}

fn check(nx: usize, ny: usize, kind: ObjectiveKind, mode: MacMode, lambda: f64) {
    let m = model(nx, ny);
    let n = m.mesh.element_count();
    let truth = field(&m, |e| if e == n / 2 || e == n / 2 + 1 { DEFAULT_CHI_MIN } else { 1.0 });
    let data = dataset(&m, &truth, &[150.0, 700.0]);
    let chi = field(&m, |e| 0.4 + 0.5 * (((e * 7) % 13) as f64) / 12.0);
    let mut cfg = ObjectiveConfig::new(kind, lambda);
    cfg.mac_mode = mode;
    let a = grad_q(&m, &chi, &cfg, &data).unwrap();
    let f = fd_gradient_extrapolated(&m, &chi, &cfg, &data, FD_STEP).unwrap();
    let worst = worst_relative_error(&a, &f);
    assert!(worst < REL_TOL, "{kind} {mode} lambda={lambda}: worst relative error {worst:e}");
}

#[test]
fn j1_gradient_matches_finite_differences() {
    check(8, 4, ObjectiveKind::J1, MacMode::Complex, 0.0);
    check(8, 4, ObjectiveKind::J1, MacMode::Complex, 0.1);
}

#[test]
fn j2_gradient_matches_finite_differences() {
    check(8, 4, ObjectiveKind::J2, MacMode::Complex, 0.0);
    check(8, 4, ObjectiveKind::J2, MacMode::Complex, 0.1);
}

#[test]
fn magnitude_mac_gradient_matches_finite_differences() {
    check(8, 4, ObjectiveKind::J2, MacMode::Magnitude, 0.0);
    check(8, 4, ObjectiveKind::J2, MacMode::Magnitude, 0.1);
}

#[test]
fn coarse_mesh_gradients_match() {
    for kind in [ObjectiveKind::J1, ObjectiveKind::J2] {
        check(4, 2, kind, MacMode::Complex, 0.0);
    }
}

#[test]
fn one_sided_differences_at_bounds() {
    let m = model(8, 4);
    let truth = field(&m, |e| if e == 13 { DEFAULT_CHI_MIN } else { 1.0 });
    let data = dataset(&m, &truth, &[150.0, 700.0]);
    // mix of elements at χ_min, at 1 and interior
    let chi = field(&m, |e| match e % 3 {
        0 => 1.0,
        1 => DEFAULT_CHI_MIN,
        _ => 0.6,
    });
    let cfg = ObjectiveConfig::new(ObjectiveKind::J1, 0.1);
    let a = grad_q(&m, &chi, &cfg, &data).unwrap();
    let f = fd_gradient(&m, &chi, &cfg, &data, 1e-5).unwrap();
    // truncation scales with (h/χ)² on elements at χ_min
    let worst = worst_relative_error(&a, &f);
    assert!(worst < 1e-3, "{worst:e}");
}

#[test]
fn gradient_is_deterministic() {
    let m = model(8, 4);
    let truth = field(&m, |e| if e == 13 { DEFAULT_CHI_MIN } else { 1.0 });
    let data = dataset(&m, &truth, &[150.0, 400.0, 700.0]);
    let chi = field(&m, |e| 0.3 + 0.02 * e as f64);
    let cfg = ObjectiveConfig::new(ObjectiveKind::J2, 0.1);
    let a = grad_q(&m, &chi, &cfg, &data).unwrap();
    let b = grad_q(&m, &chi, &cfg, &data).unwrap();
    assert_eq!(a, b);
}

#[test]
fn plain_central_differences_agree_at_moderate_step() {
    for kind in [ObjectiveKind::J1, ObjectiveKind::J2] {
        let m = model(8, 4);
        let truth = field(&m, |e| if e == 16 || e == 17 { DEFAULT_CHI_MIN } else { 1.0 });
        let data = dataset(&m, &truth, &[150.0, 700.0]);
        let chi = field(&m, |e| 0.4 + 0.5 * (((e * 7) % 13) as f64) / 12.0);
        let cfg = ObjectiveConfig::new(kind, 0.1);
        let a = grad_q(&m, &chi, &cfg, &data).unwrap();
        let f = fd_gradient(&m, &chi, &cfg, &data, 1e-4).unwrap();
        let worst = worst_relative_error(&a, &f);
        assert!(worst < REL_TOL, "{kind}: {worst:e}");
    }
}

#[test]
fn step_halving_shrinks_error_quadratically() {
    let m = model(8, 4);
    let truth = field(&m, |e| if e == 16 || e == 17 { DEFAULT_CHI_MIN } else { 1.0 });
    let data = dataset(&m, &truth, &[150.0, 700.0]);
    let chi = field(&m, |e| 0.4 + 0.5 * (((e * 7) % 13) as f64) / 12.0);
    let cfg = ObjectiveConfig::new(ObjectiveKind::J2, 0.0);
    let a = grad_q(&m, &chi, &cfg, &data).unwrap();
    let coarse = worst_relative_error(&a, &fd_gradient(&m, &chi, &cfg, &data, 2e-3).unwrap());
    let fine = worst_relative_error(&a, &fd_gradient(&m, &chi, &cfg, &data, 1e-3).unwrap());
    let ratio = coarse / fine;
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
}
