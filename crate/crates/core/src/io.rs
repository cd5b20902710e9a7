//! CSV ingestion and fixed-precision output.
//!
//! Floats are written with 17 significant digits so every value read back
//! parses to the identical `f64`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::sample::ObservedSample;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    /// Any finite value.
    #[default]
    Continuous,
    /// Values must be exactly 0 or 1.
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub w_column: String,
    pub y_column: String,
    pub log_transform: bool,
    /// Closed interval applied after the optional log transform.
    pub window: Option<(f64, f64)>,
    pub response: ResponseKind,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            w_column: "w".into(),
            y_column: "y".into(),
            log_transform: false,
            window: None,
            response: ResponseKind::Continuous,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub dropped_outside_window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub sample: ObservedSample,
    pub report: IngestReport,
}

pub fn ingest_path(path: &Path, options: &IngestOptions) -> Result<Ingested> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, options)
}

/// Rows are numbered from 1, counting data rows only.
pub fn ingest_reader<R: Read>(reader: R, options: &IngestOptions) -> Result<Ingested> {
    if let Some((lo, hi)) = options.window {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("window [{lo}, {hi}] is not a proper interval")));
        }
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(0, "<header>", e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse_error(0, name, "column not found in header".into()))
    };
    let (wi, yi) = (column(&options.w_column)?, column(&options.y_column)?);

    let mut report = IngestReport::default();
    let (mut w, mut y) = (Vec::new(), Vec::new());
    for (k, record) in rdr.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| parse_error(row, "<record>", e.to_string()))?;
        report.rows_read += 1;
        let mut wv = field(&record, wi, row, &options.w_column)?;
        let yv = field(&record, yi, row, &options.y_column)?;
        if options.response == ResponseKind::Bernoulli && yv != 0.0 && yv != 1.0 {
            return Err(parse_error(row, &options.y_column, format!("binary response must be 0 or 1, got {yv}")));
        }
        if options.log_transform {
            if wv <= 0.0 {
                return Err(Error::NonPositivePredictor { row, value: wv });
            }
            wv = wv.ln();
        }
        if let Some((lo, hi)) = options.window {
            if !(lo..=hi).contains(&wv) {
                report.dropped_outside_window += 1;
                continue;
            }
        }
        w.push(wv);
        y.push(yv);
    }
    if w.is_empty() {
        return Err(Error::EmptyAfterFilter);
    }
    report.rows_kept = w.len();
    let sample = ObservedSample::new(w, y)?;
    Ok(Ingested { sample, report })
}

fn parse_error(row: usize, column: &str, reason: String) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        reason,
    }
}

fn field(record: &csv::StringRecord, idx: usize, row: usize, name: &str) -> Result<f64> {
    let raw = record
        .get(idx)
        .ok_or_else(|| parse_error(row, name, "missing field".into()))?
        .trim();
    let v: f64 = raw
        .parse()
        .map_err(|_| parse_error(row, name, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(row, name, format!("`{raw}` is not finite")));
    }
    Ok(v)
}

/// 17 significant digits in scientific notation.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Two-column CSV with the given header.
pub fn write_pairs_csv<W: Write>(
    out: W,
    header: [&str; 2],
    rows: impl IntoIterator<Item = (f64, f64)>,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(header).map_err(csv_error)?;
    for (a, b) in rows {
        wtr.write_record([format_f64(a), format_f64(b)]).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `w,y` columns, plus `x` when latent values are given.
pub fn write_sample_csv<W: Write>(out: W, sample: &ObservedSample, latent: Option<&[f64]>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    if latent.is_some() {
        wtr.write_record(["w", "y", "x"]).map_err(csv_error)?;
    } else {
        wtr.write_record(["w", "y"]).map_err(csv_error)?;
    }
    for i in 0..sample.len() {
        let mut row = vec![format_f64(sample.w()[i]), format_f64(sample.y()[i])];
        if let Some(x) = latent {
            row.push(format_f64(x[i]));
        }
        wtr.write_record(&row).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Pretty JSON whose floats carry 17 significant digits.
struct FixedPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FixedPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedPrecision(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(format!("json serialization: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
