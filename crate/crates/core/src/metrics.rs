//! Damage statistics of an identified field against a known region.

use crate::design::DesignField;
use crate::mesh::Mesh;

/// Default threshold below which an element counts as damaged.
pub const DAMAGE_THRESHOLD: f64 = 0.9;

/// Elements within `radius` element steps (Chebyshev distance on the grid) of `region`.
pub fn dilate(mesh: &Mesh, region: &[usize], radius: usize) -> Vec<usize> {
    let mut mark = vec![false; mesh.element_count()];
    for &e in region {
        let (i, j) = mesh.element_position(e);
        for jj in j.saturating_sub(radius)..=(j + radius).min(mesh.ny - 1) {
            for ii in i.saturating_sub(radius)..=(i + radius).min(mesh.nx - 1) {
                mark[mesh.element_index(ii, jj)] = true;
            }
        }
    }
    (0..mark.len()).filter(|&e| mark[e]).collect()
}

/// Complement of `region`.
pub fn complement(mesh: &Mesh, region: &[usize]) -> Vec<usize> {
    let mut mark = vec![false; mesh.element_count()];
    for &e in region {
        mark[e] = true;
    }
    (0..mark.len()).filter(|&e| !mark[e]).collect()
}

/// Volume-weighted mean of `χ` over `elements`; `NaN` when empty.
pub fn mean_over(chi: &DesignField, elements: &[usize]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &e in elements {
        num += chi.volumes()[e] * chi.values()[e];
        den += chi.volumes()[e];
    }
    num / den
}

/// Volume of elements with `χ < threshold` outside `region`, as a fraction of the plate.
pub fn damaged_fraction_outside(chi: &DesignField, region: &[usize], threshold: f64) -> f64 {
    let mut inside = vec![false; chi.len()];
    for &e in region {
        inside[e] = true;
    }
    let damaged: f64 = (0..chi.len())
        .filter(|&e| !inside[e] && chi.values()[e] < threshold)
        .map(|e| chi.volumes()[e])
        .fold(0.0, |a, v| a + v);
    damaged / chi.total_volume()
}

/// Volume fraction of elements with `χ < threshold`.
pub fn damaged_fraction(chi: &DesignField, threshold: f64) -> f64 {
    damaged_fraction_outside(chi, &[], threshold)
}

/// Centroid of the void weighted by `(1 - χ_e) v_e`; `None` for an intact field.
pub fn void_centroid(chi: &DesignField, mesh: &Mesh) -> Option<[f64; 2]> {
    let (mut w, mut x, mut y) = (0.0, 0.0, 0.0);
    for e in 0..chi.len() {
        let weight = (1.0 - chi.values()[e]) * chi.volumes()[e];
        let [cx, cy] = mesh.element_center(e);
        w += weight;
        x += weight * cx;
        y += weight * cy;
    }
    (w > 0.0).then(|| [x / w, y / w])
}

/// Summary of an identified field, optionally against the true damaged elements.
#[derive(Debug, Clone, PartialEq)]
pub struct DamageReport {
    pub damaged_fraction: f64,
    pub void_volume: f64,
    pub min_chi: f64,
    pub void_centroid: Option<[f64; 2]>,
    pub truth: Option<TruthComparison>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthComparison {
    pub mean_in_notch: f64,
    /// Mean over elements at least two element steps from the notch.
    pub mean_far: f64,
    /// Damaged volume fraction outside the notch dilated by one element.
    pub spurious_fraction: f64,
    pub centroid_distance: Option<f64>,
}

impl DamageReport {
    pub fn new(chi: &DesignField, mesh: &Mesh, truth: Option<(&[usize], [f64; 2])>) -> Self {
        let centroid = void_centroid(chi, mesh);
        DamageReport {
            damaged_fraction: damaged_fraction(chi, DAMAGE_THRESHOLD),
            void_volume: chi.void_volume(),
            min_chi: chi.values().iter().copied().fold(f64::INFINITY, f64::min),
            void_centroid: centroid,
            truth: truth.map(|(notch, true_centroid)| {
                let near = dilate(mesh, notch, 1);
                TruthComparison {
                    mean_in_notch: mean_over(chi, notch),
                    mean_far: mean_over(chi, &complement(mesh, &near)),
                    spurious_fraction: damaged_fraction_outside(chi, &near, DAMAGE_THRESHOLD),
                    centroid_distance: centroid
                        .map(|c| ((c[0] - true_centroid[0]).powi(2) + (c[1] - true_centroid[1]).powi(2)).sqrt()),
                }
            }),
        }
    }
}
