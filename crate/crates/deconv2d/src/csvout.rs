//! CSV output with a mandatory header and LF line endings.

use std::io::Write;

use crate::error::AppResult;

/// Shortest round-trip text for a float; `NaN` for missing values.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> AppResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None` or `-`.
pub fn emit(path: Option<&std::path::Path>, header: &[&str], rows: &[Vec<String>]) -> AppResult<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            write_table(std::fs::File::create(p)?, header, rows)
        }
        _ => write_table(std::io::stdout().lock(), header, rows),
    }
}
