use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::Summary;
use crate::error::{Error, Result};
use crate::trace::{fmt_real, Trace};

pub(crate) fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    write_with(path, |w| trace.write_csv(w))
}

/// Metric files written for every summary.
pub const METRICS: [&str; 3] = ["success", "hit_fraction", "mean_f"];

/// Writes `{metric}.csv` (`n,value`) for each curve, `replications.csv` and
/// `summary.json` into `dir`.
pub fn write_summary(dir: &Path, summary: &Summary) -> Result<()> {
    write_summary_csv(dir, summary)?;
    write_json(&dir.join("summary.json"), summary)
}

/// The CSV half of [`write_summary`].
pub fn write_summary_csv(dir: &Path, summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, curve) in METRICS.iter().zip([&summary.success, &summary.hit_fraction, &summary.mean_f]) {
        write_with(&dir.join(format!("{name}.csv")), |w| {
            writeln!(w, "n,value")?;
            for (n, v) in summary.n_grid.iter().zip(curve) {
                writeln!(w, "{n},{}", fmt_real(*v))?;
            }
            Ok(())
        })?;
    }
    write_with(&dir.join("replications.csv"), |w| {
        writeln!(w, "replication,seed,first_hit,swaps,final_f,final_gap_ok,descent_violations,iterations,error")?;
        for r in &summary.replications {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.index,
                r.seed,
                r.first_hit.map(|h| h.to_string()).unwrap_or_default(),
                r.swaps,
                fmt_real(r.final_f),
                u8::from(r.final_gap_ok),
                r.descent_violations,
                r.iterations,
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            )?;
        }
        Ok(())
    })
}
