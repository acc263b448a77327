//! WebAssembly bindings for the browser demo in `www/`.

pub mod session;

use plate_damage::io::{NoiseSpec, NotchSpec};
use wasm_bindgen::prelude::*;

use session::Session;

fn js(e: plate_damage::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsError> {
        Ok(Demo {
            session: Session::new().map_err(js)?,
        })
    }

    pub fn nx(&self) -> usize {
        self.session.model().mesh.nx
    }

    pub fn ny(&self) -> usize {
        self.session.model().mesh.ny
    }

    pub fn length_x(&self) -> f64 {
        self.session.model().geometry.length_x
    }

    pub fn length_y(&self) -> f64 {
        self.session.model().geometry.length_y
    }

    pub fn chi_min(&self) -> f64 {
        self.session.chi_min()
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.session.frequencies_hz().to_vec()
    }

    /// `[freqs, |H| intact, |H| notched]`, each `samples` long.
    #[allow(clippy::too_many_arguments)]
    pub fn frf_sweep(
        &self,
        x0: f64,
        y0: f64,
        width: f64,
        height: f64,
        f_lo: f64,
        f_hi: f64,
        samples: usize,
        point: usize,
    ) -> Result<Vec<f64>, JsError> {
        let notch = NotchSpec::new(x0, y0, width, height).map_err(js)?;
        self.session.frf_sweep(&notch, f_lo, f_hi, samples, point).map_err(js)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn start(
        &mut self,
        x0: f64,
        y0: f64,
        width: f64,
        height: f64,
        noise_rel: f64,
        seed: u64,
        lambda: f64,
    ) -> Result<(), JsError> {
        let notch = NotchSpec::new(x0, y0, width, height).map_err(js)?;
        let noise = NoiseSpec {
            relative: noise_rel,
            absolute: 0.0,
            seed,
        };
        self.session.start(&notch, &noise, lambda).map_err(js)
    }

    /// Runs up to `iterations` steps; returns the status name.
    pub fn step(&mut self, iterations: usize) -> Result<String, JsError> {
        Ok(match self.session.step(iterations).map_err(js)? {
            Some(status) => status.to_string(),
            None => "idle".into(),
        })
    }

    pub fn field(&self) -> Vec<f64> {
        self.session.field().map_or_else(Vec::new, <[f64]>::to_vec)
    }

    pub fn truth(&self) -> Vec<f64> {
        self.session.truth().map_or_else(Vec::new, <[f64]>::to_vec)
    }

    pub fn history_q(&self) -> Vec<f64> {
        self.session.history_q()
    }
}

/// RGBA bytes for a canvas `ImageData` of an element field.
#[wasm_bindgen]
pub fn field_rgba(values: &[f64], nx: usize, chi_min: f64) -> Vec<u8> {
    session::field_rgba(values, nx, chi_min)
}
