//! Minimal self-contained SVG line plots. Enough for the three sweep panels;
//! not a general plotting library.

use std::fmt::Write as _;

/// How a series is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Dashed,
    Dotted,
    Points,
}

/// One named data series.
#[derive(Clone, Debug)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: SeriesStyle,
}

/// Axis configuration.
#[derive(Clone, Debug)]
pub struct Axes {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub xlog: bool,
    pub ylog: bool,
}

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 42.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn usable(v: f64, log: bool) -> bool {
    v.is_finite() && (!log || v > 0.0)
}

fn transform(v: f64, log: bool) -> f64 {
    if log {
        v.log10()
    } else {
        v
    }
}

/// Render the series into a standalone SVG document.
pub fn render_line_plot(axes: &Axes, series: &[PlotSeries]) -> String {
    // Collect plottable points.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if usable(x, axes.xlog) && usable(y, axes.ylog) {
                xs.push(transform(x, axes.xlog));
                ys.push(transform(y, axes.ylog));
            }
        }
    }
    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    )
    .unwrap();
    writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(&axes.title)
    )
    .unwrap();

    if xs.is_empty() {
        writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">no plottable data</text>",
            WIDTH / 2.0,
            HEIGHT / 2.0
        )
        .unwrap();
        svg.push_str("</svg>\n");
        return svg;
    }

    let (mut x_lo, mut x_hi) = min_max(&xs);
    let (mut y_lo, mut y_hi) = min_max(&ys);
    if x_hi - x_lo < 1e-12 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo < 1e-12 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let x_pad = 0.04 * (x_hi - x_lo);
    let y_pad = 0.06 * (y_hi - y_lo);
    x_lo -= x_pad;
    x_hi += x_pad;
    y_lo -= y_pad;
    y_hi += y_pad;

    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - TOP - BOTTOM);

    // Frame.
    writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>",
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .unwrap();

    // Ticks and grid.
    for (t, label) in ticks(x_lo, x_hi, axes.xlog) {
        let x = px(t);
        writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" \
             stroke-width=\"0.7\"/>",
            TOP,
            HEIGHT - BOTTOM
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{label}</text>",
            HEIGHT - BOTTOM + 16.0
        )
        .unwrap();
    }
    for (t, label) in ticks(y_lo, y_hi, axes.ylog) {
        let y = py(t);
        writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" \
             stroke-width=\"0.7\"/>",
            WIDTH - RIGHT
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\" dominant-baseline=\"middle\">{label}</text>",
            LEFT - 6.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>",
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 14.0,
        escape(&axes.xlabel)
    )
    .unwrap();
    writeln!(
        svg,
        "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        escape(&axes.ylabel)
    )
    .unwrap();

    // Series.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| usable(*x, axes.xlog) && usable(*y, axes.ylog))
            .map(|&(x, y)| (px(transform(x, axes.xlog)), py(transform(y, axes.ylog))))
            .collect();
        if pts.is_empty() {
            continue;
        }
        match s.style {
            SeriesStyle::Points => {
                for (x, y) in &pts {
                    writeln!(
                        svg,
                        "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.4\" fill=\"{color}\"/>"
                    )
                    .unwrap();
                }
            }
            style => {
                let dash = match style {
                    SeriesStyle::Dashed => " stroke-dasharray=\"7 4\"",
                    SeriesStyle::Dotted => " stroke-dasharray=\"2 3\"",
                    _ => "",
                };
                let path: Vec<String> = pts
                    .iter()
                    .map(|(x, y)| format!("{x:.2},{y:.2}"))
                    .collect();
                writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.6\"{dash}/>",
                    path.join(" ")
                )
                .unwrap();
            }
        }
        // Legend entry.
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let lx = LEFT + 10.0;
        writeln!(
            svg,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>",
            lx + 22.0
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             dominant-baseline=\"middle\">{}</text>",
            lx + 28.0,
            ly,
            escape(&s.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Tick positions (in transformed coordinates) with labels.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<(f64, String)> {
    if log {
        let first = lo.ceil() as i64;
        let last = hi.floor() as i64;
        let mut out = Vec::new();
        let step = (((last - first).max(0) as usize / 10) + 1) as i64;
        let mut k = first;
        while k <= last {
            out.push((k as f64, format!("1e{k}")));
            k += step;
        }
        if out.is_empty() {
            out.push((lo, format!("1e{lo:.1}")));
        }
        out
    } else {
        let n = 6usize;
        (0..n)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                (t, trim_num(t))
            })
            .collect()
    }
}

fn trim_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1000.0 || a < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
