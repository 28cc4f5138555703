//! Width-vector → I training pairs and their CSV form.
//!
//! CSV layout: optional `# key: value` provenance lines, then the header
//! `id,w_01..w_NP,lambda0_nm,fwhm_nm,q,veff_norm,g_over_gamma,kappa_over_gamma,indist`.
//! Rows whose evaluation failed carry `nan` in every figure column.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SurrogateError;
use crate::photonics::{CavityFigures, CavityGeometry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub template: Option<CavityGeometry>,
    pub emitter: String,
    pub bounds: Option<(f64, f64)>,
    /// Rows dropped because their physics evaluation failed.
    pub invalid_rows: usize,
}

impl Default for DatasetMeta {
    fn default() -> Self {
        Self { seed: 0, template: None, emitter: String::new(), bounds: None, invalid_rows: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>, meta: DatasetMeta) -> Result<Self, SurrogateError> {
        let bad = |m: String| Err(SurrogateError::InvalidDataset(m));
        if inputs.len() != targets.len() {
            return bad(format!("{} inputs but {} targets", inputs.len(), targets.len()));
        }
        if let Some(first) = inputs.first() {
            if let Some(i) = inputs.iter().position(|x| x.len() != first.len()) {
                return bad(format!("row {i} has {} widths, row 0 has {}", inputs[i].len(), first.len()));
            }
        }
        if let Some(i) = targets.iter().position(|t| !(0.0..=1.0).contains(t)) {
            return bad(format!("target {} of row {i} is outside [0, 1]", targets[i]));
        }
        if let Some(i) = inputs.iter().position(|x| x.iter().any(|w| !w.is_finite())) {
            return bad(format!("row {i} has a non-finite width"));
        }
        if let Some((lo, hi)) = meta.bounds {
            if let Some(i) = inputs.iter().position(|x| x.iter().any(|w| *w < lo || *w > hi)) {
                return bad(format!("row {i} has a width outside [{lo}, {hi}]"));
            }
        }
        Ok(Self { inputs, targets, meta })
    }

    /// Keeps the rows with a valid I and counts the rest in the metadata.
    pub fn from_rows(rows: &[DatasetRow], meta: DatasetMeta) -> Result<Self, SurrogateError> {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        let mut invalid = 0;
        for row in rows {
            match row.figures.as_ref().map(|f| f.indist).filter(|i| (0.0..=1.0).contains(i)) {
                Some(i) => {
                    inputs.push(row.widths.clone());
                    targets.push(i);
                }
                None => invalid += 1,
            }
        }
        Self::new(inputs, targets, DatasetMeta { invalid_rows: meta.invalid_rows + invalid, ..meta })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn features(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }
}

/// The per-row physics columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowFigures {
    pub lambda0_nm: f64,
    pub fwhm_nm: f64,
    pub q: f64,
    pub veff_norm: f64,
    pub g_over_gamma: f64,
    pub kappa_over_gamma: f64,
    pub indist: f64,
}

impl From<&CavityFigures> for RowFigures {
    fn from(f: &CavityFigures) -> Self {
        Self {
            lambda0_nm: f.lambda0_nm,
            fwhm_nm: f.fwhm_nm,
            q: f.q,
            veff_norm: f.veff_norm,
            g_over_gamma: f.g_over_gamma,
            kappa_over_gamma: f.kappa_over_gamma,
            indist: f.indist,
        }
    }
}

impl RowFigures {
    fn values(&self) -> [f64; 7] {
        [self.lambda0_nm, self.fwhm_nm, self.q, self.veff_norm, self.g_over_gamma, self.kappa_over_gamma, self.indist]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub id: usize,
    pub widths: Vec<f64>,
    /// `None` when the geometry failed to evaluate.
    pub figures: Option<RowFigures>,
}

const FIGURE_COLUMNS: [&str; 7] =
    ["lambda0_nm", "fwhm_nm", "q", "veff_norm", "g_over_gamma", "kappa_over_gamma", "indist"];

/// Shortest round-trip decimal, `nan` for NaN.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "nan" | "NaN" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

pub fn dataset_header(periods: usize) -> Vec<String> {
    std::iter::once("id".to_string())
        .chain((1..=periods).map(|i| format!("w_{i:02}")))
        .chain(FIGURE_COLUMNS.iter().map(|c| c.to_string()))
        .collect()
}

/// Writes `# line` comments followed by the CSV body, LF line endings.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], rows: &[DatasetRow]) -> Result<(), SurrogateError> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let periods = rows.first().map_or(0, |r| r.widths.len());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| SurrogateError::Io(std::io::Error::other(e));
    w.write_record(dataset_header(periods)).map_err(csv_err)?;
    for row in rows {
        if row.widths.len() != periods {
            return Err(SurrogateError::InvalidDataset(format!("row {} has {} widths", row.id, row.widths.len())));
        }
        let figures = row.figures.map_or([f64::NAN; 7], |f| f.values());
        let record = std::iter::once(row.id.to_string())
            .chain(row.widths.iter().chain(&figures).map(|v| format_float(*v)));
        w.write_record(record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows and the `#` comment lines (without the marker).
pub fn read_csv<R: Read>(mut input: R) -> Result<(Vec<String>, Vec<DatasetRow>), SurrogateError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let comments = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let parse_err = |offset: u64, message: String| SurrogateError::Parse { offset: offset as usize, message };
    let header = r.headers().map_err(|e| parse_err(0, e.to_string()))?.clone();
    let n = header.len();
    if n < 1 + FIGURE_COLUMNS.len() + 1
        || &header[0] != "id"
        || header.iter().skip(n - FIGURE_COLUMNS.len()).ne(FIGURE_COLUMNS.iter().copied())
    {
        return Err(parse_err(0, "unexpected dataset header".into()));
    }
    let periods = n - 1 - FIGURE_COLUMNS.len();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| {
            let offset = e.position().map_or(0, |p| p.byte());
            parse_err(offset, e.to_string())
        })?;
        let offset = record.position().map_or(0, |p| p.byte());
        let id = record[0].parse().map_err(|_| parse_err(offset, format!("bad id '{}'", &record[0])))?;
        let values: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|s| parse_float(s).ok_or_else(|| parse_err(offset, format!("bad number '{s}'"))))
            .collect::<Result<_, _>>()?;
        let (widths, f) = values.split_at(periods);
        let figures = (!f[6].is_nan()).then(|| RowFigures {
            lambda0_nm: f[0],
            fwhm_nm: f[1],
            q: f[2],
            veff_norm: f[3],
            g_over_gamma: f[4],
            kappa_over_gamma: f[5],
            indist: f[6],
        });
        rows.push(DatasetRow { id, widths: widths.to_vec(), figures });
    }
    Ok((comments, rows))
}
