//! Structured rectangular plate meshes, degree-of-freedom maps and boundary specs.
//!
//! Nodes are numbered row-major (`x` fastest), elements likewise, and every node
//! carries three degrees of freedom in the order `(w, θx, θy)`: transverse
//! deflection and the rotations about the `x` and `y` axes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Degrees of freedom per node.
pub const DOF_PER_NODE: usize = 3;

/// Tolerance used when deciding whether a point lies on the plate.
pub const DOMAIN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateGeometry {
    pub length_x: f64,
    pub length_y: f64,
    pub thickness: f64,
}

impl PlateGeometry {
    pub fn new(length_x: f64, length_y: f64, thickness: f64) -> Result<Self> {
        for (name, v) in [
            ("length_x", length_x),
            ("length_y", length_y),
            ("thickness", thickness),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        let g = PlateGeometry {
            length_x,
            length_y,
            thickness,
        };
        if g.is_thick() {
            log::warn!(
                "plate thickness {thickness} m exceeds a fifth of its width {length_y} m; \
                 plate kinematics may be inaccurate"
            );
        }
        Ok(g)
    }

    pub fn is_thick(&self) -> bool {
        self.thickness > self.length_y.min(self.length_x) / 5.0
    }

    pub fn area(&self) -> f64 {
        self.length_x * self.length_y
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= -DOMAIN_TOLERANCE
            && y >= -DOMAIN_TOLERANCE
            && x <= self.length_x + DOMAIN_TOLERANCE
            && y <= self.length_y + DOMAIN_TOLERANCE
    }
}

/// Local degree of freedom at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeDof {
    Deflection = 0,
    RotationX = 1,
    RotationY = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    pub elem_dx: f64,
    pub elem_dy: f64,
    pub length_x: f64,
    pub length_y: f64,
    nodes: Vec<[f64; 2]>,
    elements: Vec<[usize; 4]>,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn dof_count(&self) -> usize {
        DOF_PER_NODE * self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Element connectivity, counterclockwise starting at the lower-left corner.
    pub fn elements(&self) -> &[[usize; 4]] {
        &self.elements
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn element_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Grid position `(i, j)` of element `e`.
    pub fn element_position(&self, e: usize) -> (usize, usize) {
        (e % self.nx, e / self.nx)
    }

    pub fn dof(&self, node: usize, local: NodeDof) -> usize {
        DOF_PER_NODE * node + local as usize
    }

    pub fn element_center(&self, e: usize) -> [f64; 2] {
        let (i, j) = self.element_position(e);
        [
            (i as f64 + 0.5) * self.elem_dx,
            (j as f64 + 0.5) * self.elem_dy,
        ]
    }

    pub fn element_area(&self) -> f64 {
        self.elem_dx * self.elem_dy
    }

    /// Global DOF indices of an element in local order (node-major, `w, θx, θy`).
    pub fn element_dofs(&self, e: usize) -> [usize; 12] {
        let mut out = [0; 12];
        for (a, &n) in self.elements[e].iter().enumerate() {
            for k in 0..DOF_PER_NODE {
                out[DOF_PER_NODE * a + k] = DOF_PER_NODE * n + k;
            }
        }
        out
    }

    pub fn edge_nodes(&self, edge: Edge) -> Vec<usize> {
        match edge {
            Edge::Left => (0..=self.ny).map(|j| self.node_index(0, j)).collect(),
            Edge::Right => (0..=self.ny).map(|j| self.node_index(self.nx, j)).collect(),
            Edge::Bottom => (0..=self.nx).map(|i| self.node_index(i, 0)).collect(),
            Edge::Top => (0..=self.nx).map(|i| self.node_index(i, self.ny)).collect(),
        }
    }

    /// Nearest node to `(x, y)`; ties go to the lowest node index.
    pub fn nearest_node(&self, x: f64, y: f64) -> Result<usize> {
        if !(x.is_finite() && y.is_finite())
            || x < -DOMAIN_TOLERANCE
            || y < -DOMAIN_TOLERANCE
            || x > self.length_x + DOMAIN_TOLERANCE
            || y > self.length_y + DOMAIN_TOLERANCE
        {
            return Err(Error::OutsideDomain { x, y });
        }
        let dist2 = |n: &[f64; 2]| (n[0] - x).powi(2) + (n[1] - y).powi(2);
        let best = self
            .nodes
            .iter()
            .map(dist2)
            .fold(f64::INFINITY, f64::min);
        let slack = 1e-12 * self.elem_dx.min(self.elem_dy).powi(2);
        let node = self
            .nodes
            .iter()
            .position(|n| dist2(n) <= best + slack)
            .expect("mesh has nodes");
        Ok(node)
    }
}

/// Builds a structured mesh with element counts rounded from `target_elem_size`.
pub fn build_mesh(geometry: &PlateGeometry, target_elem_size: f64) -> Result<Mesh> {
    if !(target_elem_size.is_finite() && target_elem_size > 0.0) {
        return Err(Error::Mesh(format!(
            "element size must be positive, got {target_elem_size}"
        )));
    }
    let limit = geometry.length_x.min(geometry.length_y) / 2.0;
    if target_elem_size > limit {
        return Err(Error::Mesh(format!(
            "element size {target_elem_size} exceeds half the smaller plate side ({limit})"
        )));
    }
    let nx = (geometry.length_x / target_elem_size).round() as usize;
    let ny = (geometry.length_y / target_elem_size).round() as usize;
    if nx < 2 || ny < 2 {
        return Err(Error::Mesh(format!(
            "mesh needs at least 2 elements per side, got {nx} x {ny}"
        )));
    }
    Ok(Mesh::structured(geometry.length_x, geometry.length_y, nx, ny))
}

impl Mesh {
    /// Structured mesh with explicit element counts.
    pub fn structured(length_x: f64, length_y: f64, nx: usize, ny: usize) -> Mesh {
        let elem_dx = length_x / nx as f64;
        let elem_dy = length_y / ny as f64;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // last row/column pinned to the exact plate extents
                let x = if i == nx { length_x } else { i as f64 * elem_dx };
                let y = if j == ny { length_y } else { j as f64 * elem_dy };
                nodes.push([x, y]);
            }
        }
        let row = nx + 1;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let n0 = j * row + i;
                elements.push([n0, n0 + 1, n0 + row + 1, n0 + row]);
            }
        }
        Mesh {
            nx,
            ny,
            elem_dx,
            elem_dy,
            length_x,
            length_y,
            nodes,
            elements,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
    Top,
    Bottom,
}

impl FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Edge::Left),
            "right" => Ok(Edge::Right),
            "top" => Ok(Edge::Top),
            "bottom" => Ok(Edge::Bottom),
            other => Err(Error::Boundary(format!("unknown edge '{other}'"))),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Edge::Left => "left",
            Edge::Right => "right",
            Edge::Top => "top",
            Edge::Bottom => "bottom",
        };
        f.write_str(s)
    }
}

/// Clamped edge, single-point out-of-plane excitation and measurement points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub clamped_edge: Edge,
    pub excitation_point: [f64; 2],
    /// Sign of the out-of-plane unit force direction, `+1` along `+z`.
    pub excitation_direction: f64,
    pub measurement_points: Vec<[f64; 2]>,
}

impl BoundarySpec {
    pub fn new(
        clamped_edge: Edge,
        excitation_point: [f64; 2],
        measurement_points: Vec<[f64; 2]>,
    ) -> Self {
        BoundarySpec {
            clamped_edge,
            excitation_point,
            excitation_direction: 1.0,
            measurement_points,
        }
    }

    pub fn validate(&self, geometry: &PlateGeometry) -> Result<()> {
        if self.measurement_points.is_empty() {
            return Err(Error::Boundary("at least one measurement point required".into()));
        }
        if self.excitation_direction.abs() != 1.0 {
            return Err(Error::Boundary(
                "excitation direction must be +1 or -1 (out of plane)".into(),
            ));
        }
        let [x, y] = self.excitation_point;
        if !geometry.contains(x, y) {
            return Err(Error::OutsideDomain { x, y });
        }
        for &[x, y] in &self.measurement_points {
            if !geometry.contains(x, y) {
                return Err(Error::OutsideDomain { x, y });
            }
        }
        Ok(())
    }
}

/// Equally spaced measurement points at the centres of a `cols x rows` grid of cells.
pub fn measurement_grid(geometry: &PlateGeometry, cols: usize, rows: usize) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            pts.push([
                (c as f64 + 0.5) * geometry.length_x / cols as f64,
                (r as f64 + 0.5) * geometry.length_y / rows as f64,
            ]);
        }
    }
    pts
}

/// All three DOF of every node on the clamped edge, sorted ascending.
pub fn constrained_dofs(mesh: &Mesh, spec: &BoundarySpec) -> Vec<usize> {
    let mut dofs: Vec<usize> = mesh
        .edge_nodes(spec.clamped_edge)
        .into_iter()
        .flat_map(|n| (0..DOF_PER_NODE).map(move |k| DOF_PER_NODE * n + k))
        .collect();
    dofs.sort_unstable();
    dofs
}

/// Deflection DOF of the node nearest to `point`.
pub fn locate_dof(mesh: &Mesh, point: [f64; 2]) -> Result<usize> {
    let node = mesh.nearest_node(point[0], point[1])?;
    Ok(mesh.dof(node, NodeDof::Deflection))
}
