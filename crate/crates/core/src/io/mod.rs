//! Tabular and manifest persistence.

mod manifest;
mod series;
mod tables;

pub use manifest::{hash_file, relative_path, Artifact, RunManifest, MANIFEST_NAME};
pub use series::{load_series, load_series_all, save_series, write_series};
pub use tables::{
    read_premeasure, read_report, read_shell_inequality, write_premeasure, write_report,
    write_shell_inequality, PremeasureRow,
};

use crate::error::Error;

/// 17 significant digits: enough to round-trip any `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::format(path, line, format!("{other:?}")),
    }
}
