//! Deterministic rendering of result tables.
//!
//! CSV is RFC-4180 with a header row, '.' decimal separator and 17
//! significant digits on real columns (integer columns print plain). JSON
//! carries the schema, the rows and the provenance block. The same config
//! always produces byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::plot;
use crate::table::ResultTable;
use crate::RunError;

/// 17 significant digits, exact round trip for f64.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    let names: Vec<&str> = table.columns.iter().map(|c| c.name).collect();
    out.push_str(&names.join(","));
    out.push_str("\r\n");
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .zip(&table.columns)
            .map(|(v, c)| {
                if c.integer {
                    format!("{}", v.round() as i64)
                } else {
                    format_real(*v)
                }
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push_str("\r\n");
    }
    out
}

pub fn render_json(table: &ResultTable) -> String {
    let mut text = serde_json::to_string_pretty(table).expect("table serializes");
    text.push('\n');
    text
}

pub fn render(table: &ResultTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    }
}

/// Write the rendered table (and the SVG plot when requested) next to
/// `out`. Files are written whole only after rendering succeeds, so a
/// failed run never leaves partial results behind.
pub fn write_files(
    table: &ResultTable,
    format: OutputFormat,
    out: &Path,
    plot_requested: bool,
) -> Result<Vec<PathBuf>, RunError> {
    let data = render(table, format);
    let mut written = Vec::new();
    write_atomic(out, data.as_bytes())?;
    written.push(out.to_path_buf());
    if plot_requested {
        let svg = plot::render_svg(table);
        let svg_path = out.with_extension("svg");
        write_atomic(&svg_path, svg.as_bytes())?;
        written.push(svg_path);
    }
    Ok(written)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let describe = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let mut file = std::fs::File::create(path).map_err(describe)?;
    file.write_all(bytes).map_err(describe)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, ExperimentKind, OutputFormat, SubsetSpec};
    use crate::table::{ColumnSpec, PlotSpec};

    fn sample() -> ResultTable {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::MuSweep,
            n: 4,
            seed: 1,
            boundary: None,
            topology: None,
            grid: Some(vec![0.0]),
            alpha: 1.0,
            subset: SubsetSpec::default(),
            out: None,
            format: OutputFormat::Csv,
            plot: false,
        };
        ResultTable::new(
            vec![ColumnSpec::int("index"), ColumnSpec::real("value", "log2")],
            vec![vec![0.0, 0.5], vec![1.0, 1.0 / 3.0]],
            &cfg,
            PlotSpec {
                x: 0,
                y: 1,
                overlay: None,
                line: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = render_csv(&sample());
        let lines: Vec<&str> = csv.split("\r\n").collect();
        assert_eq!(lines[0], "index,value");
        assert_eq!(lines[1], "0,5.0000000000000000e-1");
        assert!(lines[2].starts_with("1,3.3333333333333331e-1"));
    }

    #[test]
    fn real_format_roundtrips() {
        for v in [0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 123456.789, 1e-300] {
            let s = format_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn json_contains_schema_and_provenance() {
        let json = render_json(&sample());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["columns"][1]["name"], "value");
        assert_eq!(v["provenance"]["config"]["kind"], "mu_sweep");
        assert_eq!(v["provenance"]["seed"], 1);
        assert_eq!(v["rows"][0][1], 0.5);
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(render_csv(&sample()), render_csv(&sample()));
        assert_eq!(render_json(&sample()), render_json(&sample()));
    }
}
