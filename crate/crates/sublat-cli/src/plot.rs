//! Minimal single-file SVG rendering: axes, points, and an optional
//! polyline. Publication styling is out of scope; the point is a quick look
//! at a sweep or scatter without leaving the terminal.

use crate::table::ResultTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    format!("{v:.4}")
}

pub fn render_svg(table: &ResultTable) -> String {
    let xs: Vec<f64> = table.rows.iter().map(|r| r[table.plot.x]).collect();
    let mut ys: Vec<f64> = table.rows.iter().map(|r| r[table.plot.y]).collect();
    if let Some(overlay) = table.plot.overlay {
        ys.extend(table.rows.iter().map(|r| r[overlay]));
    }
    let (x_lo, x_hi) = padded_range(&xs);
    let (y_lo, y_hi) = padded_range(&ys);
    let to_px = |x: f64, y: f64| {
        let px = MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN),
        fmt(WIDTH - MARGIN),
        fmt(HEIGHT - MARGIN)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN)
    ));
    // Tick labels and axis names.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN + 18.0),
        fmt_tick(x_lo)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
        fmt(WIDTH - MARGIN),
        fmt(HEIGHT - MARGIN + 18.0),
        fmt_tick(x_hi)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
        fmt(6.0),
        fmt(HEIGHT - MARGIN),
        fmt_tick(y_lo)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
        fmt(6.0),
        fmt(MARGIN + 4.0),
        fmt_tick(y_hi)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        fmt(WIDTH / 2.0),
        fmt(HEIGHT - 16.0),
        table.columns[table.plot.x].name
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 16 {})\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt(HEIGHT / 2.0),
        fmt(HEIGHT / 2.0),
        table.columns[table.plot.y].name
    ));

    // Analytic overlay polyline first so data points draw on top.
    if let Some(overlay) = table.plot.overlay {
        let pts: Vec<String> = table
            .rows
            .iter()
            .map(|r| {
                let (px, py) = to_px(r[table.plot.x], r[overlay]);
                format!("{},{}", fmt(px), fmt(py))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
    }
    if table.plot.line {
        let pts: Vec<String> = table
            .rows
            .iter()
            .map(|r| {
                let (px, py) = to_px(r[table.plot.x], r[table.plot.y]);
                format!("{},{}", fmt(px), fmt(py))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n",
            pts.join(" ")
        ));
    }
    for row in &table.rows {
        let (px, py) = to_px(row[table.plot.x], row[table.plot.y]);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
            fmt(px),
            fmt(py)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let span = (hi - lo).max(1e-9);
    (lo - 0.05 * span, hi + 0.05 * span)
}
