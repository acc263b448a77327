//! Four-node rectangular Mindlin plate element.
//!
//! Bending uses 2×2 Gauss integration. Transverse shear uses assumed strains
//! tied at the edge midpoints (MITC4), which removes shear locking without the
//! spurious deflection hourglass mode of one-point shear integration. The mass
//! matrix is consistent and includes rotary inertia.
//!
//! Local DOF order is node-major `(w, θx, θy)` with nodes counterclockwise from
//! the lower-left corner. Sign convention: `u = z·θy`, `v = -z·θx`, so
//! `γxz = ∂w/∂x + θy` and `γyz = ∂w/∂y - θx`.

use super::material::MaterialModel;

pub const ELEMENT_DOFS: usize = 12;

pub type ElementMatrix = [[f64; ELEMENT_DOFS]; ELEMENT_DOFS];

/// Shear correction factor.
pub const SHEAR_CORRECTION: f64 = 5.0 / 6.0;

const NODE_XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const NODE_ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub stiffness: ElementMatrix,
    pub mass: ElementMatrix,
}

fn shape(xi: f64, eta: f64) -> [f64; 4] {
    std::array::from_fn(|a| 0.25 * (1.0 + xi * NODE_XI[a]) * (1.0 + eta * NODE_ETA[a]))
}

/// Shape function derivatives with respect to `(x, y)` for an `a × b` rectangle.
fn shape_gradients(xi: f64, eta: f64, a: f64, b: f64) -> [[f64; 2]; 4] {
    std::array::from_fn(|n| {
        let dxi = 0.25 * NODE_XI[n] * (1.0 + eta * NODE_ETA[n]);
        let deta = 0.25 * NODE_ETA[n] * (1.0 + xi * NODE_XI[n]);
        [dxi * 2.0 / a, deta * 2.0 / b]
    })
}

/// Displacement-based shear strain rows at a point.
fn shear_rows(xi: f64, eta: f64, a: f64, b: f64) -> [[f64; ELEMENT_DOFS]; 2] {
    let n = shape(xi, eta);
    let dn = shape_gradients(xi, eta, a, b);
    let mut rows = [[0.0; ELEMENT_DOFS]; 2];
    for k in 0..4 {
        rows[0][3 * k] = dn[k][0];
        rows[0][3 * k + 2] = n[k];
        rows[1][3 * k] = dn[k][1];
        rows[1][3 * k + 1] = -n[k];
    }
    rows
}

/// Assumed shear strain rows interpolated from the edge-midpoint tying points.
fn assumed_shear_rows(xi: f64, eta: f64, a: f64, b: f64) -> [[f64; ELEMENT_DOFS]; 2] {
    let bottom = shear_rows(0.0, -1.0, a, b)[0];
    let top = shear_rows(0.0, 1.0, a, b)[0];
    let left = shear_rows(-1.0, 0.0, a, b)[1];
    let right = shear_rows(1.0, 0.0, a, b)[1];
    let mut rows = [[0.0; ELEMENT_DOFS]; 2];
    for k in 0..ELEMENT_DOFS {
        rows[0][k] = 0.5 * (1.0 - eta) * bottom[k] + 0.5 * (1.0 + eta) * top[k];
        rows[1][k] = 0.5 * (1.0 - xi) * left[k] + 0.5 * (1.0 + xi) * right[k];
    }
    rows
}

fn curvature_rows(xi: f64, eta: f64, a: f64, b: f64) -> [[f64; ELEMENT_DOFS]; 3] {
    let dn = shape_gradients(xi, eta, a, b);
    let mut rows = [[0.0; ELEMENT_DOFS]; 3];
    for k in 0..4 {
        rows[0][3 * k + 2] = dn[k][0];
        rows[1][3 * k + 1] = -dn[k][1];
        rows[2][3 * k + 1] = -dn[k][0];
        rows[2][3 * k + 2] = dn[k][1];
    }
    rows
}

fn add_btdb<const R: usize>(
    out: &mut ElementMatrix,
    rows: &[[f64; ELEMENT_DOFS]; R],
    d: &[[f64; R]; R],
    weight: f64,
) {
    let mut db = [[0.0; ELEMENT_DOFS]; R];
    for r in 0..R {
        for c in 0..R {
            if d[r][c] != 0.0 {
                for k in 0..ELEMENT_DOFS {
                    db[r][k] += d[r][c] * rows[c][k];
                }
            }
        }
    }
    for i in 0..ELEMENT_DOFS {
        for j in 0..ELEMENT_DOFS {
            let mut s = 0.0;
            for r in 0..R {
                s += rows[r][i] * db[r][j];
            }
            out[i][j] += weight * s;
        }
    }
}

/// Stiffness and consistent mass of an unscaled `elem_dx × elem_dy` plate element.
pub fn element_matrices(
    material: &MaterialModel,
    thickness: f64,
    elem_dx: f64,
    elem_dy: f64,
) -> ElementMatrices {
    let (a, b, t) = (elem_dx, elem_dy, thickness);
    let e = material.youngs_modulus;
    let nu = material.poisson_ratio;
    let db = e * t.powi(3) / (12.0 * (1.0 - nu * nu));
    let bending = [
        [db, db * nu, 0.0],
        [db * nu, db, 0.0],
        [0.0, 0.0, db * (1.0 - nu) / 2.0],
    ];
    let ds = SHEAR_CORRECTION * material.shear_modulus() * t;
    let shear = [[ds, 0.0], [0.0, ds]];

    let g = 1.0 / 3.0_f64.sqrt();
    let detj = a * b / 4.0;
    let mut stiffness = [[0.0; ELEMENT_DOFS]; ELEMENT_DOFS];
    let mut mass = [[0.0; ELEMENT_DOFS]; ELEMENT_DOFS];
    let rho = material.density;
    let inertia = [rho * t, rho * t.powi(3) / 12.0, rho * t.powi(3) / 12.0];

    for xi in [-g, g] {
        for eta in [-g, g] {
            add_btdb(&mut stiffness, &curvature_rows(xi, eta, a, b), &bending, detj);
            add_btdb(&mut stiffness, &assumed_shear_rows(xi, eta, a, b), &shear, detj);

            let n = shape(xi, eta);
            for p in 0..4 {
                for q in 0..4 {
                    let nn = n[p] * n[q] * detj;
                    for (k, &m) in inertia.iter().enumerate() {
                        mass[3 * p + k][3 * q + k] += m * nn;
                    }
                }
            }
        }
    }
    symmetrize(&mut stiffness);
    symmetrize(&mut mass);
    ElementMatrices { stiffness, mass }
}

fn symmetrize(m: &mut ElementMatrix) {
    for i in 0..ELEMENT_DOFS {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
}
