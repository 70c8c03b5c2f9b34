//! Flat sweep records and their CSV / JSON encodings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Solved,
    KnownFailure,
    UnexpectedFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::KnownFailure => "known-failure",
            Status::UnexpectedFailure => "unexpected-failure",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "solved" => Some(Status::Solved),
            "known-failure" => Some(Status::KnownFailure),
            "unexpected-failure" => Some(Status::UnexpectedFailure),
            _ => None,
        }
    }
}

/// One row of the sweep report. Plan-dependent fields are empty when no
/// phases were found; `full_rem_prob` is empty above the certification cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "K")]
    pub blocks: usize,
    pub b: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub j_l_real: f64,
    pub j_g_real: f64,
    pub j_l_hat: Option<u64>,
    pub j_g_hat: Option<u64>,
    pub offset: Option<u64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub residual: Option<f64>,
    pub subspace_rem_prob: Option<f64>,
    pub full_rem_prob: Option<f64>,
    pub grk_j_l: u64,
    pub grk_j_g: u64,
    pub grk_success_prob: f64,
    pub oracle_queries: Option<u64>,
    pub status: Status,
}

pub const HEADER: [&str; 18] = [
    "K",
    "b",
    "N",
    "j_l_real",
    "j_g_real",
    "j_l_hat",
    "j_g_hat",
    "offset",
    "theta",
    "phi",
    "residual",
    "subspace_rem_prob",
    "full_rem_prob",
    "grk_j_l",
    "grk_j_g",
    "grk_success_prob",
    "oracle_queries",
    "status",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unexpected CSV header: {0:?}")]
    Header(Vec<String>),
    #[error("row {row}, column {column}: cannot parse {value:?}")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(value: Option<T>, f: impl Fn(T) -> String) -> String {
    value.map(f).unwrap_or_default()
}

impl SweepRecord {
    fn to_row(&self) -> [String; 18] {
        [
            self.blocks.to_string(),
            self.b.to_string(),
            self.size.to_string(),
            format_float(self.j_l_real),
            format_float(self.j_g_real),
            opt(self.j_l_hat, |v| v.to_string()),
            opt(self.j_g_hat, |v| v.to_string()),
            opt(self.offset, |v| v.to_string()),
            opt(self.theta, format_float),
            opt(self.phi, format_float),
            opt(self.residual, format_float),
            opt(self.subspace_rem_prob, format_float),
            opt(self.full_rem_prob, format_float),
            self.grk_j_l.to_string(),
            self.grk_j_g.to_string(),
            format_float(self.grk_success_prob),
            opt(self.oracle_queries, |v| v.to_string()),
            self.status.as_str().to_string(),
        ]
    }

    fn from_row(row: usize, fields: &csv::StringRecord) -> Result<Self, ReportError> {
        let cell = |i: usize| fields.get(i).unwrap_or("");
        let bad = |i: usize| ReportError::Field {
            row,
            column: HEADER[i],
            value: cell(i).to_string(),
        };
        let req = |i: usize| -> Result<f64, ReportError> { cell(i).parse().map_err(|_| bad(i)) };
        let int = |i: usize| -> Result<u64, ReportError> { cell(i).parse().map_err(|_| bad(i)) };
        let opt_f = |i: usize| -> Result<Option<f64>, ReportError> {
            match cell(i) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(i)),
            }
        };
        let opt_i = |i: usize| -> Result<Option<u64>, ReportError> {
            match cell(i) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(i)),
            }
        };
        Ok(SweepRecord {
            blocks: int(0)? as usize,
            b: int(1)? as usize,
            size: int(2)? as usize,
            j_l_real: req(3)?,
            j_g_real: req(4)?,
            j_l_hat: opt_i(5)?,
            j_g_hat: opt_i(6)?,
            offset: opt_i(7)?,
            theta: opt_f(8)?,
            phi: opt_f(9)?,
            residual: opt_f(10)?,
            subspace_rem_prob: opt_f(11)?,
            full_rem_prob: opt_f(12)?,
            grk_j_l: int(13)?,
            grk_j_g: int(14)?,
            grk_success_prob: req(15)?,
            oracle_queries: opt_i(16)?,
            status: Status::parse(cell(17)).ok_or_else(|| bad(17))?,
        })
    }
}

pub fn emit_csv(records: &[SweepRecord]) -> Result<String, ReportError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(HEADER)?;
    for r in records {
        writer.write_record(r.to_row())?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV fields are ASCII"))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>, ReportError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers()?;
    if header.iter().ne(HEADER) {
        return Err(ReportError::Header(
            header.iter().map(String::from).collect(),
        ));
    }
    reader
        .records()
        .enumerate()
        .map(|(row, fields)| SweepRecord::from_row(row + 1, &fields?))
        .collect()
}

pub fn emit_json(records: &[SweepRecord]) -> Result<String, ReportError> {
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    Ok(text)
}

pub fn parse_json(text: &str) -> Result<Vec<SweepRecord>, ReportError> {
    Ok(serde_json::from_str(text)?)
}
