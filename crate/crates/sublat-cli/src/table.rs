//! Result tables: column schema with units, numeric rows, and the full
//! provenance (config echo, library version, seed) needed to reproduce a
//! file bit for bit.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::RunError;

#[derive(Debug, Clone, Serialize)]
pub struct ColumnSpec {
    pub name: &'static str,
    pub unit: &'static str,
    /// Integer-valued columns print without an exponent in CSV.
    pub integer: bool,
}

impl ColumnSpec {
    pub fn real(name: &'static str, unit: &'static str) -> Self {
        Self {
            name,
            unit,
            integer: false,
        }
    }

    pub fn int(name: &'static str) -> Self {
        Self {
            name,
            unit: "count",
            integer: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub library: &'static str,
    pub version: &'static str,
    pub seed: u64,
}

/// Hint for the SVG renderer: which columns to draw, plus an optional
/// analytic overlay drawn as a polyline.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PlotSpec {
    pub x: usize,
    pub y: usize,
    pub overlay: Option<usize>,
    pub line: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
    pub plot: PlotSpec,
}

impl ResultTable {
    pub fn new(
        columns: Vec<ColumnSpec>,
        rows: Vec<Vec<f64>>,
        config: &ExperimentConfig,
        plot: PlotSpec,
    ) -> Result<Self, RunError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(RunError::Numeric(format!(
                    "row {i} has {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(RunError::Numeric(format!(
                    "row {i} contains non-finite value {bad}"
                )));
            }
        }
        Ok(Self {
            columns,
            rows,
            provenance: Provenance {
                config: config.clone(),
                library: "sublat",
                version: env!("CARGO_PKG_VERSION"),
                seed: config.seed,
            },
            plot,
        })
    }
}
