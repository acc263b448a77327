//! FRF dataset CSV: header `freq_hz,point_id,re,im`, one row per
//! (frequency, point). Rows of one frequency are contiguous, frequencies
//! increase, and `point_id` is the 0-based index into the measurement points.
//! Values are written in shortest round-trip form, so a save/load cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::objectives::FrfDataset;

pub const FRF_HEADER: [&str; 4] = ["freq_hz", "point_id", "re", "im"];

pub fn format_frf_csv(dataset: &FrfDataset) -> String {
    let mut out = FRF_HEADER.join(",");
    out.push('\n');
    for (f, row) in dataset.frequencies_hz().iter().zip(dataset.responses()) {
        for (i, h) in row.iter().enumerate() {
            writeln!(out, "{f},{i},{},{}", h.re, h.im).unwrap();
        }
    }
    out
}

pub fn save_frf_dataset(dataset: &FrfDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_frf_csv(dataset)).map_err(|e| Error::io(path, e))
}

pub fn load_frf_dataset(path: impl AsRef<Path>) -> Result<FrfDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_frf_csv(&text, path)
}

/// Parses dataset text; `source` only labels error messages.
pub fn parse_frf_csv(text: &str, source: impl AsRef<Path>) -> Result<FrfDataset> {
    let source = source.as_ref();
    let err = |line: u64, msg: String| Error::parse(source, line as usize, msg);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != FRF_HEADER {
        return Err(err(1, format!("expected header '{}'", FRF_HEADER.join(","))));
    }

    let mut frequencies: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<Option<Complex64>>> = Vec::new();
    let mut group_start: Vec<u64> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 4 {
            return Err(err(line, format!("expected 4 columns, found {}", record.len())));
        }
        let number = |k: usize| -> Result<f64> {
            let v: f64 = record[k]
                .parse()
                .map_err(|_| err(line, format!("{} '{}' is not a number", FRF_HEADER[k], &record[k])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(line, format!("{} is not finite", FRF_HEADER[k])))
            }
        };
        let freq = number(0)?;
        let point: usize = record[1]
            .parse()
            .map_err(|_| err(line, format!("point_id '{}' is not a non-negative integer", &record[1])))?;
        let value = Complex64::new(number(2)?, number(3)?);

        if frequencies.last() != Some(&freq) {
            if frequencies.contains(&freq) {
                return Err(err(line, format!("rows of frequency {freq} are not contiguous")));
            }
            frequencies.push(freq);
            groups.push(Vec::new());
            group_start.push(line);
        }
        let group = groups.last_mut().unwrap();
        if group.len() <= point {
            group.resize(point + 1, None);
        }
        if group[point].replace(value).is_some() {
            return Err(err(line, format!("duplicate point {point} at frequency {freq}")));
        }
    }
    if frequencies.is_empty() {
        return Err(err(1, "no data rows".into()));
    }

    let n = groups.iter().map(Vec::len).max().unwrap();
    let mut responses = Vec::with_capacity(groups.len());
    for ((group, f), line) in groups.into_iter().zip(&frequencies).zip(&group_start) {
        let complete: Option<Vec<Complex64>> = group.iter().copied().collect();
        match complete {
            Some(row) if row.len() == n => responses.push(row),
            _ => {
                let have = group.iter().filter(|v| v.is_some()).count();
                return Err(err(*line, format!("frequency {f} has {have} of {n} points")));
            }
        }
    }
    FrfDataset::new(frequencies, responses).map_err(|e| err(1, e.to_string()))
}
