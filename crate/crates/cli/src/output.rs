use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Non-finite floats serialize to `null`; optional fields are skipped when
/// absent, so any `null` left in the tree is a NaN or infinity.
fn find_null(value: &Value, path: &mut String) -> bool {
    match value {
        Value::Null => true,
        Value::Array(items) => items.iter().enumerate().any(|(i, v)| {
            let len = path.len();
            path.push_str(&format!("[{i}]"));
            let found = find_null(v, path);
            if !found {
                path.truncate(len);
            }
            found
        }),
        Value::Object(map) => map.iter().any(|(k, v)| {
            let len = path.len();
            if !path.is_empty() {
                path.push('.');
            }
            path.push_str(k);
            let found = find_null(v, path);
            if !found {
                path.truncate(len);
            }
            found
        }),
        _ => false,
    }
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, report: &T) -> Result<()> {
    let value = serde_json::to_value(report).map_err(|e| CliError::Encode(e.to_string()))?;
    let mut path = String::new();
    if find_null(&value, &mut path) {
        return Err(CliError::NonFinite(path));
    }
    serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| CliError::Encode(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Twelve significant digits.
pub fn sci(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(CliError::NonFinite(x.to_string()));
    }
    Ok(format!("{x:.11e}"))
}

pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(&mut *out);
    let encode = |e: csv::Error| CliError::Encode(e.to_string());
    writer.write_record(header).map_err(encode)?;
    for row in rows {
        let fields = row.iter().map(|&x| sci(x)).collect::<Result<Vec<_>>>()?;
        writer.write_record(&fields).map_err(encode)?;
    }
    writer.flush()?;
    drop(writer);
    out.flush()?;
    Ok(())
}
