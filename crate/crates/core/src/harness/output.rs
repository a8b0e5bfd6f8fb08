use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::engine::Trace;
use crate::error::{Error, Result};

use super::{ResultRow, ResultTable};

/// CSV header shared by experiment tables and single traces.
pub const CSV_HEADER: &str =
    "algorithm,p,d,iteration,mean_rel_error,std_rel_error,mean_probe_msgs,mean_exchange_msgs,runs";

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row<W: Write>(w: &mut W, r: &ResultRow) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        r.algorithm,
        format_float(r.p),
        format_float(r.d),
        r.iteration,
        format_float(r.mean_rel_error),
        format_float(r.std_rel_error),
        format_float(r.mean_probe_msgs),
        format_float(r.mean_exchange_msgs),
        r.runs
    )
}

/// Writes the table as CSV.
pub fn write_csv<W: Write>(table: &ResultTable, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &table.rows {
        write_row(&mut w, r)?;
    }
    w.flush()
}

/// Writes a single trace in the table schema (`runs = 1`, zero deviation).
pub fn write_trace_csv<W: Write>(trace: &Trace, d: f64, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for pt in &trace.points {
        let row = ResultRow {
            algorithm: trace.algorithm,
            p: trace.p,
            d,
            iteration: pt.iteration,
            mean_rel_error: pt.rel_error,
            std_rel_error: 0.0,
            mean_probe_msgs: pt.probe_messages as f64,
            mean_exchange_msgs: pt.exchange_messages as f64,
            mean_source_degree: pt.source_degree as f64,
            runs: 1,
        };
        write_row(&mut w, &row)?;
    }
    w.flush()
}

/// Path of the metadata file written next to `csv_path`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes `table` to `path` as CSV and its metadata to `<path>.meta.json`.
pub fn save(table: &ResultTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(table, io::BufWriter::new(file)).map_err(|e| Error::io(path, e))?;
    let meta_path = metadata_path(path);
    let meta = serde_json::to_string_pretty(&table.metadata).map_err(|e| Error::json(&meta_path, e))?;
    std::fs::write(&meta_path, meta).map_err(|e| Error::io(&meta_path, e))
}
