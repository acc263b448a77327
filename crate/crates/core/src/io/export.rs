//! Result files: design field CSV and graymap, convergence log, run summary.

use std::fmt::Write as _;
use std::path::Path;

use crate::design::DesignField;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::metrics::DamageReport;
use crate::optimizer::{IdentificationResult, OptimState};

use super::synth::NotchSpec;

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Field CSV: two comment lines carrying `nx,ny,elem_dx,elem_dy`, then `ny`
/// rows of `nx` values in element order (first row at `y = 0`).
pub fn format_field_csv(chi: &DesignField, mesh: &Mesh) -> String {
    let mut out = format!(
        "# nx,ny,elem_dx,elem_dy\n# {},{},{},{}\n",
        mesh.nx, mesh.ny, mesh.elem_dx, mesh.elem_dy
    );
    for row in chi.values().chunks(mesh.nx) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Grid read back from a field CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub nx: usize,
    pub ny: usize,
    pub elem_dx: f64,
    pub elem_dy: f64,
    pub values: Vec<f64>,
}

impl FieldGrid {
    /// Checks the grid against `mesh` and wraps it as a design field.
    pub fn into_field(self, mesh: &Mesh, thickness: f64, chi_min: f64) -> Result<DesignField> {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
        if self.nx != mesh.nx || self.ny != mesh.ny || !same(self.elem_dx, mesh.elem_dx) || !same(self.elem_dy, mesh.elem_dy) {
            return Err(Error::Config(format!(
                "field grid {}x{} ({} x {}) does not match mesh {}x{} ({} x {})",
                self.nx, self.ny, self.elem_dx, self.elem_dy, mesh.nx, mesh.ny, mesh.elem_dx, mesh.elem_dy
            )));
        }
        DesignField::uniform(mesh, thickness, 1.0, chi_min)?.with_values(self.values)
    }
}

pub fn parse_field_csv(text: &str, source: impl AsRef<Path>) -> Result<FieldGrid> {
    let source = source.as_ref();
    let err = |line: usize, msg: String| Error::parse(source, line, msg);
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let mut header = None;
    let mut rows = Vec::new();
    for (no, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let fields: Vec<&str> = comment.split(',').map(str::trim).collect();
            if fields.len() == 4 && fields[0].parse::<usize>().is_ok() {
                header = Some((no, fields.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
            }
            continue;
        }
        rows.push((no, line));
    }
    let (hline, h) = header.ok_or_else(|| err(1, "missing '# nx,ny,elem_dx,elem_dy' header".into()))?;
    let nx: usize = h[0].parse().map_err(|_| err(hline, "bad nx".into()))?;
    let ny: usize = h[1].parse().map_err(|_| err(hline, "bad ny".into()))?;
    let elem_dx: f64 = h[2].parse().map_err(|_| err(hline, "bad elem_dx".into()))?;
    let elem_dy: f64 = h[3].parse().map_err(|_| err(hline, "bad elem_dy".into()))?;
    if rows.len() != ny {
        return Err(err(hline, format!("expected {ny} rows, found {}", rows.len())));
    }
    let mut values = Vec::with_capacity(nx * ny);
    for (no, line) in rows {
        let row: Vec<&str> = line.split(',').map(str::trim).collect();
        if row.len() != nx {
            return Err(err(no, format!("expected {nx} values, found {}", row.len())));
        }
        for v in row {
            values.push(v.parse::<f64>().map_err(|_| err(no, format!("'{v}' is not a number")))?);
        }
    }
    Ok(FieldGrid {
        nx,
        ny,
        elem_dx,
        elem_dy,
        values,
    })
}

pub fn load_field(path: impl AsRef<Path>) -> Result<FieldGrid> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field_csv(&text, path)
}

/// Gray level of `χ`: `χ_min` maps to 0, 1 to 255, linear in between.
pub fn gray_level(chi: f64, chi_min: f64) -> u8 {
    (255.0 * ((chi - chi_min) / (1.0 - chi_min)).clamp(0.0, 1.0)).round() as u8
}

/// Binary graymap (P5), one pixel per element, top row at the largest `y`.
pub fn format_pgm(chi: &DesignField, mesh: &Mesh) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mesh.nx, mesh.ny).into_bytes();
    for row in chi.values().chunks(mesh.nx).rev() {
        out.extend(row.iter().map(|&v| gray_level(v, chi.chi_min())));
    }
    out
}

/// Writes `field.csv` and `field.pgm` into `dir`.
pub fn export_field(chi: &DesignField, mesh: &Mesh, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    write_file(&dir.join("field.csv"), format_field_csv(chi, mesh))?;
    write_file(&dir.join("field.pgm"), format_pgm(chi, mesh))
}

/// Columns `iter,Q,J,L,term_1..term_nf,proj_grad_norm`.
pub fn format_convergence_log(history: &[OptimState]) -> String {
    let nf = history.first().map_or(0, |s| s.terms.len());
    let mut out = String::from("iter,Q,J,L");
    for k in 1..=nf {
        write!(out, ",term_{k}").unwrap();
    }
    out.push_str(",proj_grad_norm\n");
    for s in history {
        write!(out, "{},{},{},{}", s.iteration, s.q, s.j, s.l).unwrap();
        for t in &s.terms {
            write!(out, ",{t}").unwrap();
        }
        writeln!(out, ",{}", s.projected_gradient_norm).unwrap();
    }
    out
}

pub fn write_convergence_log(history: &[OptimState], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), format_convergence_log(history))
}

/// Human-readable run summary.
pub fn format_summary(
    result: &IdentificationResult,
    mesh: &Mesh,
    frequencies_hz: &[f64],
    notch: Option<&NotchSpec>,
) -> String {
    let last = result.history.last().expect("history holds the initial state");
    let truth_elements = notch.map(|n| n.elements(mesh));
    let report = DamageReport::new(
        &result.field,
        mesh,
        truth_elements.as_deref().zip(notch.map(NotchSpec::centroid)),
    );
    let mut s = String::new();
    writeln!(s, "termination: {}", result.termination).unwrap();
    writeln!(s, "iterations: {}", last.iteration).unwrap();
    writeln!(s, "evaluations: {}", last.evaluations).unwrap();
    writeln!(s, "Q: {}", last.q).unwrap();
    writeln!(s, "J: {}", last.j).unwrap();
    writeln!(s, "L: {}", last.l).unwrap();
    for (f, t) in frequencies_hz.iter().zip(&last.terms) {
        writeln!(s, "term at {f} Hz: {t}").unwrap();
    }
    writeln!(s, "projected gradient norm: {}", last.projected_gradient_norm).unwrap();
    writeln!(s, "mesh: {} x {} elements", mesh.nx, mesh.ny).unwrap();
    writeln!(s, "min chi: {}", report.min_chi).unwrap();
    writeln!(s, "void volume: {} m^3", report.void_volume).unwrap();
    writeln!(s, "damaged area fraction (chi < 0.9): {}", report.damaged_fraction).unwrap();
    match report.void_centroid {
        Some([x, y]) => writeln!(s, "void centroid: {x} {y}").unwrap(),
        None => writeln!(s, "void centroid: none").unwrap(),
    }
    if let (Some(n), Some(t)) = (notch, &report.truth) {
        writeln!(s, "true notch (x0 y0 width height): {n}").unwrap();
        writeln!(s, "true notch elements: {}", truth_elements.as_ref().map_or(0, Vec::len)).unwrap();
        writeln!(s, "mean chi in notch: {}", t.mean_in_notch).unwrap();
        writeln!(s, "mean chi two or more elements away: {}", t.mean_far).unwrap();
        writeln!(s, "spurious area fraction: {}", t.spurious_fraction).unwrap();
        match t.centroid_distance {
            Some(d) => writeln!(s, "centroid distance to notch: {d}").unwrap(),
            None => writeln!(s, "centroid distance to notch: none").unwrap(),
        }
    }
    s
}

/// Writes the field files, `convergence.csv` and `summary.txt` into `dir`.
pub fn export_identification(
    result: &IdentificationResult,
    mesh: &Mesh,
    frequencies_hz: &[f64],
    notch: Option<&NotchSpec>,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    export_field(&result.field, mesh, dir)?;
    write_convergence_log(&result.history, dir.join("convergence.csv"))?;
    write_file(&dir.join("summary.txt"), format_summary(result, mesh, frequencies_hz, notch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Termination;

    fn mesh() -> Mesh {
        Mesh::structured(0.04, 0.03, 4, 3)
    }

    fn field(values: Vec<f64>) -> DesignField {
        DesignField::uniform(&mesh(), 0.005, 1.0, 1e-3)
            .unwrap()
            .with_values(values)
            .unwrap()
    }

    #[test]
    fn intact_field_is_white() {
        let chi = field(vec![1.0; 12]);
        let pgm = format_pgm(&chi, &mesh());
        assert!(pgm.starts_with(b"P5\n4 3\n255\n"));
        assert!(pgm[11..].iter().all(|&p| p == 255));
        assert_eq!(pgm.len(), 11 + 12);
        let csv = format_field_csv(&chi, &mesh());
        assert!(csv.lines().skip(2).all(|l| l == "1,1,1,1"));
    }

    #[test]
    fn checkerboard_alternates() {
        let m = mesh();
        let values: Vec<f64> = (0..12)
            .map(|e| {
                let (i, j) = m.element_position(e);
                if (i + j) % 2 == 0 { 1.0 } else { 1e-3 }
            })
            .collect();
        let pgm = format_pgm(&field(values), &m);
        let px = &pgm[11..];
        // top image row is j = 2, which starts with a white element
        assert_eq!(&px[0..4], &[255, 0, 255, 0]);
        assert_eq!(&px[4..8], &[0, 255, 0, 255]);
        assert_eq!(gray_level(0.6, 1e-3), 153);
        assert_eq!(gray_level(1e-3, 1e-3), 0);
    }

    #[test]
    fn field_csv_round_trip() {
        let m = mesh();
        let values: Vec<f64> = (0..12).map(|e| 0.001 + e as f64 / 11.0 * 0.999 / 3.0).collect();
        let chi = field(values);
        let grid = parse_field_csv(&format_field_csv(&chi, &m), "mem").unwrap();
        assert_eq!((grid.nx, grid.ny), (4, 3));
        let back = grid.into_field(&m, 0.005, 1e-3).unwrap();
        assert_eq!(back, chi);
    }

    #[test]
    fn field_csv_mismatch_and_errors() {
        let chi = field(vec![1.0; 12]);
        let grid = parse_field_csv(&format_field_csv(&chi, &mesh()), "mem").unwrap();
        let other = Mesh::structured(0.04, 0.03, 3, 4);
        assert!(grid.into_field(&other, 0.005, 1e-3).is_err());
        assert!(parse_field_csv("1,1\n", "mem").is_err());
        let bad = "# nx,ny,elem_dx,elem_dy\n# 2,1,0.1,0.1\n1,x\n";
        assert!(matches!(parse_field_csv(bad, "mem"), Err(Error::Parse { line: 3, .. })));
    }

    fn state(k: usize) -> OptimState {
        OptimState {
            iteration: k,
            chi: vec![],
            q: 1.0 / (k as f64 + 3.0),
            j: 0.1 / 7.0,
            l: 0.2,
            terms: vec![0.1 / 3.0, 2e-17],
            projected_gradient_norm: 1e-3 / (k + 1) as f64,
            step: 0.0,
            backtracks: 0,
            evaluations: k + 1,
        }
    }

    #[test]
    fn convergence_log_layout_and_precision() {
        let history: Vec<_> = (0..116).map(state).collect();
        let log = format_convergence_log(&history);
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines.len(), 117);
        assert_eq!(lines[0], "iter,Q,J,L,term_1,term_2,proj_grad_norm");
        let row: Vec<f64> = lines[5].split(',').map(|v| v.parse().unwrap()).collect();
        let s = &history[4];
        assert_eq!(row, vec![4.0, s.q, s.j, s.l, s.terms[0], s.terms[1], s.projected_gradient_norm]);
    }

    #[test]
    fn summary_mentions_notch() {
        let m = mesh();
        let mut values = vec![1.0; 12];
        values[5] = 1e-3;
        let result = IdentificationResult {
            field: field(values),
            history: vec![state(0), state(1)],
            termination: Termination::Converged,
        };
        let notch = NotchSpec::new(0.01, 0.01, 0.01, 0.01).unwrap();
        let s = format_summary(&result, &m, &[100.0, 200.0], Some(&notch));
        assert!(s.contains("termination: converged"));
        assert!(s.contains("true notch elements: 1"));
        assert!(s.contains("mean chi in notch: 0.001"));
        assert!(s.contains("term at 200 Hz"));
    }
}
