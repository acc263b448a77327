//! Run configuration, file formats and synthetic data.

pub mod config;
pub mod dataset;
pub mod export;
pub mod run;
pub mod synth;

pub use config::RunConfig;
pub use dataset::{format_frf_csv, load_frf_dataset, parse_frf_csv, save_frf_dataset};
pub use export::{export_field, export_identification, load_field, write_convergence_log};
pub use run::{run_forward, run_gradcheck, run_identify, run_synth, GradientCheck};
pub use synth::{model_frfs, synth_dataset, NoiseSpec, NotchSpec};
