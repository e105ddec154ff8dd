//! Minimal CSV-to-SVG line charts: axes, ticks, legend, one polyline per
//! series. Covers risk-vs-ratio curves without pulling in a plotting stack.

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("csv has no data rows")]
    NoRows,
    #[error("csv has no column named {0:?}")]
    MissingColumn(String),
    #[error("row {row}: cannot parse {column} value {token:?} as a number")]
    BadNumber {
        row: usize,
        column: String,
        token: String,
    },
}

/// A parsed header-plus-rows CSV. Fields are split on bare commas; none of
/// the emitters in this workspace quote fields.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn parse_csv(text: &str) -> Result<Table, PlotError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let headers: Vec<String> = match lines.next() {
        Some(h) => h.split(',').map(|s| s.trim().to_string()).collect(),
        None => return Err(PlotError::NoRows),
    };
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect();
    if rows.is_empty() {
        return Err(PlotError::NoRows);
    }
    Ok(Table { headers, rows })
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Builds an SVG line chart from `table` with `x_col` on the abscissa and
/// one line per `y_col`. When the table carries an `estimator_label` column
/// (long-format simulation output), rows are additionally grouped by label,
/// giving one line per (label, y column) pair.
pub fn render_svg(table: &Table, x_col: &str, y_cols: &[String]) -> Result<String, PlotError> {
    let col = |name: &str| -> Result<usize, PlotError> {
        table
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::MissingColumn(name.to_string()))
    };
    let xi = col(x_col)?;
    let group = table.headers.iter().position(|h| h == "estimator_label");

    let parse = |row_i: usize, ci: usize| -> Result<f64, PlotError> {
        let token = table.rows[row_i].get(ci).map(String::as_str).unwrap_or("");
        token.parse().map_err(|_| PlotError::BadNumber {
            row: row_i + 2,
            column: table.headers[ci].clone(),
            token: token.to_string(),
        })
    };

    let mut series: Vec<Series> = Vec::new();
    for y_name in y_cols {
        let yi = col(y_name)?;
        for row_i in 0..table.rows.len() {
            let key = match group {
                Some(gi) if gi != yi => {
                    let label = table.rows[row_i].get(gi).cloned().unwrap_or_default();
                    if y_cols.len() == 1 {
                        label
                    } else {
                        format!("{label}:{y_name}")
                    }
                }
                _ => y_name.clone(),
            };
            let x = parse(row_i, xi)?;
            let y = parse(row_i, yi)?;
            match series.iter_mut().find(|s| s.name == key) {
                Some(s) => s.points.push((x, y)),
                None => series.push(Series {
                    name: key,
                    points: vec![(x, y)],
                }),
            }
        }
    }

    let (mut x_lo, mut x_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (mut y_lo, mut y_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    pad(&mut x_lo, &mut x_hi);
    pad(&mut y_lo, &mut y_hi);

    let (w, h) = (800.0, 520.0);
    let (ml, mr, mt, mb) = (70.0, 190.0, 20.0, 50.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let px = |x: f64| ml + (x - x_lo) / (x_hi - x_lo) * pw;
    let py = |y: f64| mt + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");

    // axes
    let _ = writeln!(
        s,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb,
        w - mr,
        h - mb
    );
    let _ = writeln!(
        s,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb
    );
    for t in ticks(x_lo, x_hi) {
        let x = px(t);
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>",
            h - mb,
            h - mb + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            h - mb + 18.0,
            tick_label(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = py(t);
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{ml}\" y2=\"{y}\" stroke=\"black\"/>",
            ml - 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            ml - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        ml + pw / 2.0,
        h - 10.0,
        x_col
    );

    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for &(x, y) in &ser.points {
            let _ = write!(path, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
        // legend row
        let ly = mt + 14.0 + 18.0 * i as f64;
        let lx = w - mr + 10.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 20.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            lx + 26.0,
            ly + 4.0,
            escape(&ser.name)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn pad(lo: &mut f64, hi: &mut f64) {
    if !lo.is_finite() || !hi.is_finite() {
        *lo = 0.0;
        *hi = 1.0;
        return;
    }
    let span = *hi - *lo;
    if span <= 0.0 {
        let d = f64::max(lo.abs() * 0.1, 0.5);
        *lo -= d;
        *hi += d;
    } else {
        *lo -= 0.05 * span;
        *hi += 0.05 * span;
    }
}

/// Round-stepped ticks covering [lo, hi] with about five divisions.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 4.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.5 {
            2.0
        } else if norm < 7.5 {
            5.0
        } else {
            10.0
        };
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        // snap -0.0 and accumulated drift
        out.push((t / step).round() * step);
        t += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
