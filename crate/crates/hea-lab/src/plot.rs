//! Self-contained SVG rendering of result CSVs: axes, ticks, one polyline
//! per series, a legend, optional log-scale y. Output bytes are a pure
//! function of the input file.

use std::path::Path;

use crate::csvio::{atomic_write, read_csv, CsvTable};
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Numerics,
    GdeSff,
    GdePurity,
    Discriminate,
    Concentration,
    HaarCheck,
}

struct Descriptor {
    x_col: &'static str,
    y_col: &'static str,
    series_cols: &'static [&'static str],
    log_y: bool,
    title: &'static str,
}

impl PlotKind {
    pub fn from_subcommand(name: &str) -> Option<PlotKind> {
        match name {
            "numerics" => Some(PlotKind::Numerics),
            "gde-sff" => Some(PlotKind::GdeSff),
            "gde-purity" => Some(PlotKind::GdePurity),
            "discriminate" => Some(PlotKind::Discriminate),
            "concentration" => Some(PlotKind::Concentration),
            "haar-check" => Some(PlotKind::HaarCheck),
            _ => None,
        }
    }

    fn descriptor(&self) -> Descriptor {
        match self {
            PlotKind::Numerics => Descriptor {
                x_col: "t",
                y_col: "mean_grad_inf_norm",
                series_cols: &["n"],
                log_y: true,
                title: "mean gradient inf-norm vs evolution time",
            },
            PlotKind::GdeSff => Descriptor {
                x_col: "t",
                y_col: "mean_sff",
                series_cols: &["n", "k"],
                log_y: false,
                title: "normalized spectral form factor",
            },
            PlotKind::GdePurity => Descriptor {
                x_col: "t",
                y_col: "mean_purity",
                series_cols: &["n", "lambda_size"],
                log_y: false,
                title: "subsystem purity vs evolution time",
            },
            PlotKind::Discriminate => Descriptor {
                x_col: "iteration",
                y_col: "loss",
                series_cols: &[],
                log_y: false,
                title: "training loss",
            },
            PlotKind::Concentration => Descriptor {
                x_col: "instance",
                y_col: "margin",
                series_cols: &[],
                log_y: false,
                title: "concentration-bound margin per instance",
            },
            PlotKind::HaarCheck => Descriptor {
                x_col: "dim",
                y_col: "empirical",
                series_cols: &["moment"],
                log_y: false,
                title: "Haar moment check",
            },
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Render `csv_path` as an SVG at `out_path`. The CSV schema must match the
/// kind; empty data is an error and no file is written.
pub fn emit_plot(csv_path: &Path, kind: PlotKind, out_path: &Path) -> Result<(), LabError> {
    let table = read_csv(csv_path)?;
    let svg = render(&table, kind)?;
    atomic_write(out_path, svg.as_bytes())
}

fn render(table: &CsvTable, kind: PlotKind) -> Result<String, LabError> {
    let desc = kind.descriptor();
    let xi = table
        .column_index(desc.x_col)
        .ok_or_else(|| LabError::Runtime(format!("schema mismatch: no column {}", desc.x_col)))?;
    let yi = table
        .column_index(desc.y_col)
        .ok_or_else(|| LabError::Runtime(format!("schema mismatch: no column {}", desc.y_col)))?;
    let series_idx: Vec<usize> = desc
        .series_cols
        .iter()
        .map(|c| {
            table
                .column_index(c)
                .ok_or_else(|| LabError::Runtime(format!("schema mismatch: no column {c}")))
        })
        .collect::<Result<_, _>>()?;
    if table.rows.is_empty() {
        return Err(LabError::Runtime("no data rows to plot".into()));
    }

    // group rows into series, preserving first-seen order
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in &table.rows {
        let key = if series_idx.is_empty() {
            String::from(desc.y_col)
        } else {
            series_idx
                .iter()
                .zip(desc.series_cols)
                .map(|(&i, c)| format!("{c}={}", row[i]))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let x: f64 = row[xi]
            .parse()
            .map_err(|_| LabError::Runtime(format!("non-numeric x cell {:?}", row[xi])))?;
        let mut y: f64 = row[yi]
            .parse()
            .map_err(|_| LabError::Runtime(format!("non-numeric y cell {:?}", row[yi])))?;
        if desc.log_y {
            y = y.max(1e-12).log10();
        }
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((x, y)),
            None => series.push((key, vec![(x, y)])),
        }
    }

    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let (x_min, x_max) = padded_range(all.iter().map(|p| p.0));
    let (y_min, y_max) = padded_range(all.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        MARGIN_L,
        desc.title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L, MARGIN_T, MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    // ticks
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let px = sx(fx);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 18.0,
            tick_label(fx)
        ));
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = sy(fy);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        let label = if desc.log_y {
            format!("1e{}", tick_label(fy))
        } else {
            tick_label(fy)
        };
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{label}</text>\n",
            MARGIN_L - 8.0,
            py + 4.0
        ));
    }
    // axis names
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        desc.x_col
    ));
    // series
    for (si, (key, points)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let coords: Vec<String> =
            points.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * si as f64;
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"4\" fill=\"{color}\"/>\n",
            WIDTH - MARGIN_R + 10.0,
            ly
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{key}</text>\n",
            WIDTH - MARGIN_R + 28.0,
            ly + 6.0
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}
