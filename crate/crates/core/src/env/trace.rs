//! JSON Lines trace files.
//!
//! One record per line:
//!
//! ```text
//! {"sample_id":0,"conf":[0.41,0.62,0.7,0.8],"correct":[false,true,true,true],"gating":[0.7,0.5,0.4,0.3]}
//! ```
//!
//! `latency_ms` and `energy` arrays may follow `gating` to override the
//! environment's per-exit costs for that record. Files written by
//! [`write_trace`] are canonical: keys in the order above, reals in shortest
//! round-trip form, one `\n` after every record.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

use super::profile::ExitCosts;
use super::sample::Sample;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub sample_id: u64,
    pub sample: Sample,
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses trace lines; the exit count is fixed by the first record.
pub fn read_trace(reader: impl BufRead) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    let mut num_exits = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io("<trace>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_line(&line, line_no, num_exits)?;
        num_exits.get_or_insert(record.sample.num_exits());
        records.push(record);
    }
    Ok(records)
}

fn trace_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Trace {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_line(line: &str, line_no: usize, expected: Option<usize>) -> Result<TraceRecord> {
    let value: Value = serde_json::from_str(line)
        .map_err(|e| trace_err(line_no, "<record>", format!("invalid JSON: {e}")))?;
    let Value::Object(obj) = value else {
        return Err(trace_err(line_no, "<record>", "expected a JSON object"));
    };
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "sample_id" | "conf" | "correct" | "gating" | "latency_ms" | "energy"
        ) {
            return Err(trace_err(line_no, key, "unknown field"));
        }
    }
    let sample_id = obj
        .get("sample_id")
        .ok_or_else(|| trace_err(line_no, "sample_id", "missing"))?
        .as_u64()
        .ok_or_else(|| trace_err(line_no, "sample_id", "expected a nonnegative integer"))?;

    let confidence =
        real_array(&obj, "conf", line_no)?.ok_or_else(|| trace_err(line_no, "conf", "missing"))?;
    let l = confidence.len();
    if l == 0 {
        return Err(trace_err(line_no, "conf", "needs at least one exit"));
    }
    if let Some(expected) = expected {
        if l != expected {
            return Err(trace_err(
                line_no,
                "conf",
                format!("has {l} exits but earlier records have {expected}"),
            ));
        }
    }
    check_unit_interval(&confidence, "conf", line_no)?;

    let correct = match obj.get("correct") {
        None => return Err(trace_err(line_no, "correct", "missing")),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_bool()
                    .ok_or_else(|| trace_err(line_no, "correct", "expected booleans"))
            })
            .collect::<Result<Vec<bool>>>()?,
        Some(_) => return Err(trace_err(line_no, "correct", "expected an array")),
    };
    check_len(correct.len(), l, "correct", line_no)?;

    let gating = real_array(&obj, "gating", line_no)?
        .ok_or_else(|| trace_err(line_no, "gating", "missing"))?;
    check_len(gating.len(), l, "gating", line_no)?;
    check_unit_interval(&gating, "gating", line_no)?;

    let latency = real_array(&obj, "latency_ms", line_no)?;
    let energy = real_array(&obj, "energy", line_no)?;
    let costs = match (latency, energy) {
        (None, None) => None,
        (Some(latency_ms), Some(energy_units)) => {
            let costs = ExitCosts {
                latency_ms,
                energy_units,
            };
            check_len(costs.latency_ms.len(), l, "latency_ms", line_no)?;
            check_len(costs.energy_units.len(), l, "energy", line_no)?;
            for (field, v) in [
                ("latency_ms", &costs.latency_ms),
                ("energy", &costs.energy_units),
            ] {
                if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(trace_err(line_no, field, "values must be positive"));
                }
            }
            Some(costs)
        }
        (Some(_), None) => return Err(trace_err(line_no, "energy", "required with latency_ms")),
        (None, Some(_)) => return Err(trace_err(line_no, "latency_ms", "required with energy")),
    };

    Ok(TraceRecord {
        sample_id,
        sample: Sample {
            confidence,
            correct,
            gating,
            costs,
        },
    })
}

fn real_array(obj: &Map<String, Value>, field: &str, line: usize) -> Result<Option<Vec<f64>>> {
    match obj.get(field) {
        None => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| trace_err(line, field, "expected numbers"))
            })
            .collect::<Result<Vec<f64>>>()
            .map(Some),
        Some(_) => Err(trace_err(line, field, "expected an array")),
    }
}

fn check_len(got: usize, expected: usize, field: &str, line: usize) -> Result<()> {
    if got != expected {
        return Err(trace_err(
            line,
            field,
            format!("has {got} entries, expected {expected}"),
        ));
    }
    Ok(())
}

fn check_unit_interval(values: &[f64], field: &str, line: usize) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(trace_err(line, field, format!("value {v} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Serialize)]
struct CanonicalLine<'a> {
    sample_id: u64,
    conf: &'a [f64],
    correct: &'a [bool],
    gating: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    latency_ms: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<&'a [f64]>,
}

/// Canonical serialization of one record, without the trailing newline.
pub fn record_to_line(record: &TraceRecord) -> String {
    let s = &record.sample;
    let line = CanonicalLine {
        sample_id: record.sample_id,
        conf: &s.confidence,
        correct: &s.correct,
        gating: &s.gating,
        latency_ms: s.costs.as_ref().map(|c| c.latency_ms.as_slice()),
        energy: s.costs.as_ref().map(|c| c.energy_units.as_slice()),
    };
    serde_json::to_string(&line).expect("trace records always serialize")
}

pub fn write_trace_to(mut writer: impl Write, records: &[TraceRecord]) -> std::io::Result<()> {
    for record in records {
        writer.write_all(record_to_line(record).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_trace(path: impl AsRef<Path>, records: &[TraceRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace_to(BufWriter::new(file), records).map_err(|e| Error::io(path, e))
}
