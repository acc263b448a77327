//! Plate finite elements, SIMP assembly and the frequency-domain solver.

pub mod assembly;
pub mod band;
pub mod element;
pub mod harmonic;
pub mod material;
pub mod modal;

pub use assembly::{assemble, EquationNumbering, PlateModel, SystemMatrices};
pub use element::{element_matrices, ElementMatrices};
pub use harmonic::{
    angular, compute_frf, compute_frf_with_force, harmonic_solve, responses, DynamicStiffness,
    FrequencyResponse, HarmonicSolution,
};
pub use material::{MaterialModel, SimpParams};
pub use modal::{calibrate_youngs_modulus, cantilever_first_frequency, first_natural_frequency, natural_frequency_near};
