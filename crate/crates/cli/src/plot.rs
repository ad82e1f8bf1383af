//! Minimal SVG line charts: vertically stacked panels sharing an x axis.
//! No external plotting dependency; output is deterministic.

use std::fs;
use std::path::Path;

use ecocoast_core::IoError;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    /// Panel title, doubling as the y-axis label.
    pub title: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 760.0;
const PANEL_H: f64 = 150.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const VGAP: f64 = 40.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn ranges(series: &[Series]) -> ((f64, f64), (f64, f64)) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
    }
    if xmax - xmin < 1e-12 {
        xmax = xmin + 1.0;
    }
    // Pad y so flat lines do not sit on the frame.
    let pad = ((ymax - ymin) * 0.05).max(1e-9);
    ((xmin, xmax), (ymin - pad, ymax + pad))
}

/// Render stacked panels to an SVG string.
pub fn render(x_label: &str, panels: &[Panel]) -> String {
    let height = TOP + panels.len() as f64 * (PANEL_H + VGAP);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"{WIDTH}\" height=\"{height}\" fill=\"white\"/>\n"
    );
    for (pi, panel) in panels.iter().enumerate() {
        let y0 = TOP + pi as f64 * (PANEL_H + VGAP);
        let ((xmin, xmax), (ymin, ymax)) = ranges(&panel.series);
        let px = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * (WIDTH - LEFT - RIGHT);
        let py = |y: f64| y0 + PANEL_H - (y - ymin) / (ymax - ymin) * PANEL_H;

        svg.push_str(&format!(
            "<rect x=\"{LEFT}\" y=\"{y0}\" width=\"{}\" height=\"{PANEL_H}\" \
             fill=\"none\" stroke=\"#999\"/>\n",
            WIDTH - LEFT - RIGHT
        ));
        svg.push_str(&format!(
            "<text x=\"{LEFT}\" y=\"{}\" font-weight=\"bold\">{}</text>\n",
            y0 - 8.0,
            escape(&panel.title)
        ));
        // y range labels.
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3}</text>\n",
            LEFT - 6.0,
            y0 + 10.0,
            ymax
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3}</text>\n",
            LEFT - 6.0,
            y0 + PANEL_H,
            ymin
        ));
        // x range labels on the last panel only.
        if pi == panels.len() - 1 {
            svg.push_str(&format!(
                "<text x=\"{LEFT}\" y=\"{}\">{:.1}</text>\n",
                y0 + PANEL_H + 16.0,
                xmin
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.1}</text>\n",
                WIDTH - RIGHT,
                y0 + PANEL_H + 16.0,
                xmax
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                (LEFT + WIDTH - RIGHT) / 2.0,
                y0 + PANEL_H + 16.0,
                escape(x_label)
            ));
        }

        for (si, s) in panel.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            if s.points.len() >= 2 {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
                    pts.join(" ")
                ));
            } else {
                for &(x, y) in &s.points {
                    svg.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                        px(x),
                        py(y)
                    ));
                }
            }
            // Legend: colored labels right-aligned above the frame.
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"{color}\">{}</text>\n",
                WIDTH - RIGHT - si as f64 * 110.0,
                y0 - 8.0,
                escape(&s.label)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write(path: impl AsRef<Path>, x_label: &str, panels: &[Panel]) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, render(x_label, panels)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
