use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, constrained_dofs, locate_dof, BoundarySpec, Mesh, PlateGeometry};

use super::band::SymBandMatrix;
use super::element::{element_matrices, ElementMatrices, ELEMENT_DOFS};
use super::material::{MaterialModel, SimpParams};

/// Maps global DOF to equation numbers of the reduced (clamped) system.
///
/// Free DOF are numbered sweeping nodes across the shorter mesh direction first,
/// which keeps the half bandwidth near `3·(min(nx, ny) + 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationNumbering {
    global_to_eq: Vec<Option<usize>>,
    eq_to_global: Vec<usize>,
    bandwidth: usize,
}

impl EquationNumbering {
    pub fn new(mesh: &Mesh, constrained: &[usize]) -> Self {
        let mut fixed = vec![false; mesh.dof_count()];
        for &d in constrained {
            fixed[d] = true;
        }
        let node_order: Vec<usize> = if mesh.nx >= mesh.ny {
            (0..=mesh.nx)
                .flat_map(|i| (0..=mesh.ny).map(move |j| (i, j)))
                .map(|(i, j)| mesh.node_index(i, j))
                .collect()
        } else {
            (0..mesh.node_count()).collect()
        };
        let mut global_to_eq = vec![None; mesh.dof_count()];
        let mut eq_to_global = Vec::with_capacity(mesh.dof_count() - constrained.len());
        for n in node_order {
            for k in 0..3 {
                let g = 3 * n + k;
                if !fixed[g] {
                    global_to_eq[g] = Some(eq_to_global.len());
                    eq_to_global.push(g);
                }
            }
        }
        let mut bandwidth = 0;
        for e in 0..mesh.element_count() {
            let eqs: Vec<usize> = mesh
                .element_dofs(e)
                .iter()
                .filter_map(|&g| global_to_eq[g])
                .collect();
            if let (Some(lo), Some(hi)) = (eqs.iter().min(), eqs.iter().max()) {
                bandwidth = bandwidth.max(hi - lo);
            }
        }
        EquationNumbering {
            global_to_eq,
            eq_to_global,
            bandwidth,
        }
    }

    pub fn equation(&self, global_dof: usize) -> Option<usize> {
        self.global_to_eq[global_dof]
    }

    pub fn global(&self, eq: usize) -> usize {
        self.eq_to_global[eq]
    }

    pub fn len(&self) -> usize {
        self.eq_to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eq_to_global.is_empty()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }
}

/// Plate geometry, material, mesh and boundary conditions with cached element matrices.
#[derive(Debug, Clone)]
pub struct PlateModel {
    pub geometry: PlateGeometry,
    pub material: MaterialModel,
    pub mesh: Mesh,
    pub boundary: BoundarySpec,
    element: ElementMatrices,
    numbering: EquationNumbering,
    element_eqs: Vec<[Option<usize>; ELEMENT_DOFS]>,
    excitation_eq: usize,
    measurement_eqs: Vec<Option<usize>>,
}

impl PlateModel {
    pub fn new(
        geometry: PlateGeometry,
        material: MaterialModel,
        target_elem_size: f64,
        boundary: BoundarySpec,
    ) -> Result<Self> {
        let mesh = build_mesh(&geometry, target_elem_size)?;
        Self::with_mesh(geometry, material, mesh, boundary)
    }

    pub fn with_mesh(
        geometry: PlateGeometry,
        material: MaterialModel,
        mesh: Mesh,
        boundary: BoundarySpec,
    ) -> Result<Self> {
        material.validate()?;
        boundary.validate(&geometry)?;
        let constrained = constrained_dofs(&mesh, &boundary);
        let numbering = EquationNumbering::new(&mesh, &constrained);
        let excitation_dof = locate_dof(&mesh, boundary.excitation_point)?;
        let excitation_eq = numbering.equation(excitation_dof).ok_or_else(|| {
            Error::Boundary("excitation point lies on the clamped edge".into())
        })?;
        let measurement_eqs = boundary
            .measurement_points
            .iter()
            .map(|&p| locate_dof(&mesh, p).map(|d| numbering.equation(d)))
            .collect::<Result<Vec<_>>>()?;
        if measurement_eqs.iter().all(Option::is_none) {
            return Err(Error::Boundary(
                "every measurement point lies on the clamped edge".into(),
            ));
        }
        let element_eqs = (0..mesh.element_count())
            .map(|e| mesh.element_dofs(e).map(|g| numbering.equation(g)))
            .collect();
        let element = element_matrices(&material, geometry.thickness, mesh.elem_dx, mesh.elem_dy);
        Ok(PlateModel {
            geometry,
            material,
            mesh,
            boundary,
            element,
            numbering,
            element_eqs,
            excitation_eq,
            measurement_eqs,
        })
    }

    pub fn element_matrices(&self) -> &ElementMatrices {
        &self.element
    }

    pub fn numbering(&self) -> &EquationNumbering {
        &self.numbering
    }

    /// Equation numbers of an element's local DOF; `None` where clamped.
    pub fn element_equations(&self, e: usize) -> &[Option<usize>; ELEMENT_DOFS] {
        &self.element_eqs[e]
    }

    pub fn excitation_equation(&self) -> usize {
        self.excitation_eq
    }

    /// Deflection equation per measurement point; `None` for points on the clamp.
    pub fn measurement_equations(&self) -> &[Option<usize>] {
        &self.measurement_eqs
    }

    pub fn free_dof_count(&self) -> usize {
        self.numbering.len()
    }

    pub fn element_volume(&self) -> f64 {
        self.mesh.element_area() * self.geometry.thickness
    }

    /// Uniform design field over this model's mesh.
    pub fn uniform_field(&self, value: f64, chi_min: f64) -> Result<DesignField> {
        DesignField::uniform(&self.mesh, self.geometry.thickness, value, chi_min)
    }

    /// Same model with a different material (element matrices recomputed).
    pub fn with_material(&self, material: MaterialModel) -> Result<Self> {
        Self::with_mesh(self.geometry, material, self.mesh.clone(), self.boundary.clone())
    }
}

/// Reduced global stiffness and mass on the free DOF.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub stiffness: SymBandMatrix,
    pub mass: SymBandMatrix,
}

/// Assembles `K(χ) = Σ χ_e^p K_e` and `M(χ) = Σ χ_e^q M_e` with clamped DOF removed.
pub fn assemble(model: &PlateModel, chi: &DesignField, simp: &SimpParams) -> Result<SystemMatrices> {
    simp.validate()?;
    if chi.len() != model.mesh.element_count() {
        return Err(Error::DimensionMismatch {
            expected: model.mesh.element_count(),
            actual: chi.len(),
        });
    }
    let n = model.free_dof_count();
    let bw = model.numbering.bandwidth();
    let mut stiffness = SymBandMatrix::zeros(n, bw);
    let mut mass = SymBandMatrix::zeros(n, bw);
    let em = &model.element;
    for (e, &c) in chi.values().iter().enumerate() {
        let ks = simp.stiffness_scale(c);
        let ms = simp.mass_scale(c);
        let eqs = &model.element_eqs[e];
        for a in 0..ELEMENT_DOFS {
            let Some(i) = eqs[a] else { continue };
            for b in 0..ELEMENT_DOFS {
                let Some(j) = eqs[b] else { continue };
                if j > i {
                    continue;
                }
                stiffness.add(i, j, ks * em.stiffness[a][b]);
                mass.add(i, j, ms * em.mass[a][b]);
            }
        }
    }
    Ok(SystemMatrices { stiffness, mass })
}
