//! Delimited data files and plot-ready columns.

use std::path::Path;

use zsl_core::equidistribution_bench::WeylReport;
use zsl_core::universality_lab::{DensityReport, TruncationReport};

use crate::CliError;

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Report whose plot columns can be emitted.
#[derive(Debug, Clone, Copy)]
pub enum PlotSource<'a> {
    /// `(tau, D)`
    Density(&'a DensityReport),
    /// `(X, mean_distance)`
    Truncation(&'a TruncationReport),
    /// `(T, abs_gT, bound)`
    Weyl(&'a [WeylReport]),
}

/// Plot columns sorted ascending by the first column.
pub fn plot_table(src: PlotSource<'_>) -> Table {
    let mut rows: Vec<(f64, Vec<String>)> = match src {
        PlotSource::Density(r) => r
            .records
            .iter()
            .map(|rec| (rec.tau, vec![num(rec.tau), num(rec.distance)]))
            .collect(),
        PlotSource::Truncation(r) => r
            .x_values
            .iter()
            .zip(&r.means)
            .map(|(&x, &m)| (x, vec![num(x), num(m)]))
            .collect(),
        PlotSource::Weyl(reps) => reps
            .iter()
            .map(|w| (w.t, vec![num(w.t), num(w.abs), w.bound.map(num).unwrap_or_default()]))
            .collect(),
    };
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let header: &[&str] = match src {
        PlotSource::Density(_) => &["tau", "D"],
        PlotSource::Truncation(_) => &["X", "mean_distance"],
        PlotSource::Weyl(_) => &["T", "abs_gT", "bound"],
    };
    let mut t = Table::new(header.iter().copied());
    for (_, r) in rows {
        t.push(r);
    }
    t
}

/// Writes the plot columns of `src` to `path`, returning the data row count.
pub fn emit_plot_data(src: PlotSource<'_>, path: &Path) -> Result<usize, CliError> {
    let t = plot_table(src);
    t.write(path)?;
    Ok(t.rows.len())
}
