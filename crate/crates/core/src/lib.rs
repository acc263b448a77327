//! Damage identification in cantilevered plates from frequency response functions.
//!
//! Damage is represented as missing material: an element-wise indicator
//! `χ ∈ [χ_min, 1]` scales stiffness by `χ^p` and mass by `χ^q` (SIMP). The
//! identified field minimizes the mismatch between computed and measured
//! inertance FRFs plus a Lasso penalty on the void volume.

pub mod design;
pub mod error;
pub mod fem;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod objectives;
pub mod optimizer;
pub mod sensitivity;

pub use design::{DesignField, DEFAULT_CHI_MIN};
pub use error::{Error, Result};
