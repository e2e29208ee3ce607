//! Request-length traces and the linear token-count to service-time model.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub id: u64,
    pub token_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_time: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Jsonl,
}

impl TraceFormat {
    /// Guesses the format from a file extension (`.jsonl`/`.ndjson`/`.json` vs anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson" | "json") => Self::Jsonl,
            _ => Self::Csv,
        }
    }
}

impl Trace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn token_counts(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.token_count).collect()
    }

    /// Service time of every entry under `model`, in trace order.
    pub fn service_times<T: Scalar>(&self, model: &LinearTimeModel<T>) -> Result<Vec<T>> {
        self.entries.iter().map(|e| model.tokens_to_time(e.token_count)).collect()
    }
}

pub fn load_trace(path: impl AsRef<Path>, format: TraceFormat) -> Result<Trace> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    match format {
        TraceFormat::Csv => parse_csv_trace(file, path),
        TraceFormat::Jsonl => parse_jsonl_trace(BufReader::new(file), path),
    }
}

fn parse_err(path: &Path, line: usize, column: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, column, message: message.into() }
}

fn check_entry(entry: &TraceEntry, path: &Path, line: usize) -> Result<()> {
    if entry.token_count < 1 {
        return Err(parse_err(path, line, Some(2), "token_count must be at least 1"));
    }
    if let Some(t) = entry.measured_time {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(parse_err(path, line, Some(3), format!("invalid measured_time {t}")));
        }
    }
    Ok(())
}

/// Parses `id,token_count[,measured_time]` rows. A leading header row whose
/// second field is `token_count` is skipped.
pub fn parse_csv_trace<R: Read>(reader: R, origin: &Path) -> Result<Trace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut entries = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if idx == 0 && record.get(1) == Some("token_count") {
            continue;
        }
        if record.len() < 2 || record.len() > 3 {
            return Err(parse_err(origin, line, None, format!("expected 2 or 3 fields, found {}", record.len())));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let id = field(0)
            .parse::<u64>()
            .map_err(|e| parse_err(origin, line, Some(1), format!("bad id `{}`: {e}", field(0))))?;
        let token_count = field(1)
            .parse::<u64>()
            .map_err(|e| parse_err(origin, line, Some(2), format!("bad token_count `{}`: {e}", field(1))))?;
        let measured_time = match record.get(2) {
            None | Some("") => None,
            Some(s) => Some(
                s.parse::<f64>()
                    .map_err(|e| parse_err(origin, line, Some(3), format!("bad measured_time `{s}`: {e}")))?,
            ),
        };
        let entry = TraceEntry { id, token_count, measured_time };
        check_entry(&entry, origin, line)?;
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(parse_err(origin, 1, None, "trace is empty"));
    }
    Ok(Trace { entries })
}

/// Parses one JSON object per line; blank lines are skipped.
pub fn parse_jsonl_trace<R: BufRead>(reader: R, origin: &Path) -> Result<Trace> {
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: TraceEntry =
            serde_json::from_str(&line).map_err(|e| parse_err(origin, idx + 1, Some(e.column()), e.to_string()))?;
        check_entry(&entry, origin, idx + 1)?;
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(parse_err(origin, 1, None, "trace is empty"));
    }
    Ok(Trace { entries })
}

/// `time = slope * tokens + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel<T>")]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct LinearTimeModel<T> {
    pub slope: T,
    pub intercept: T,
}

#[derive(Deserialize)]
struct RawModel<T> {
    slope: T,
    intercept: T,
}

impl<T: Scalar> TryFrom<RawModel<T>> for LinearTimeModel<T> {
    type Error = Error;

    fn try_from(raw: RawModel<T>) -> Result<Self> {
        Self::new(raw.slope, raw.intercept)
    }
}

impl<T: Scalar> LinearTimeModel<T> {
    /// Requires a positive slope and a positive predicted time for one token.
    pub fn new(slope: T, intercept: T) -> Result<Self> {
        if !(slope > T::zero() && slope.is_finite() && intercept.is_finite()) {
            return Err(invalid_arg(format!("slope must be positive and finite, got {slope}")));
        }
        if !(slope + intercept > T::zero()) {
            return Err(invalid_arg(format!(
                "model predicts non-positive time for one token (slope {slope}, intercept {intercept})"
            )));
        }
        Ok(Self { slope, intercept })
    }

    pub fn tokens_to_time(&self, tokens: u64) -> Result<T> {
        if tokens == 0 {
            return Err(invalid_arg("token count must be at least 1"));
        }
        let t = T::from_u64(tokens).ok_or_else(|| invalid_arg("token count not representable"))?;
        Ok(self.slope * t + self.intercept)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()>
    where
        T: Serialize,
    {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Ordinary least squares of `measured_time` on `token_count` over the
/// entries that carry a measured time.
pub fn fit_linear_model<T: Scalar>(trace: &Trace) -> Result<LinearTimeModel<T>> {
    let points: Vec<(f64, f64)> =
        trace.entries.iter().filter_map(|e| e.measured_time.map(|t| (e.token_count as f64, t))).collect();
    if points.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 entries with measured_time, found {}", points.len())));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all token counts are equal".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    LinearTimeModel::new(T::lit(slope), T::lit(intercept))
}
