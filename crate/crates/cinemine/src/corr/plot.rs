//! Deterministic SVG scatter plots with a fitted trend line.
//!
//! Element vocabulary is deliberately narrow so plots are greppable:
//! markers are the only `<circle>` elements, the trend is the only
//! `<line>`, axes and ticks live in `<path>` data.

use std::path::Path;

use crate::ingest::money::thousands;

use super::{CorrError, PairedSeries, TrendLine};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_X: f64 = 80.0;
const MARGIN_Y: f64 = 60.0;
const TICK_LEN: f64 = 6.0;
const MAX_TICKS: usize = 6;

/// Write `name.svg` and the companion `name.csv` listing the plotted
/// pairs. Identical inputs produce byte-identical files.
pub fn scatter_plot(
    series: &PairedSeries,
    trend: &TrendLine,
    svg_path: &Path,
) -> Result<(), CorrError> {
    let svg = render_svg(series, trend);
    write(svg_path, &svg)?;

    let mut csv = format!("{},{}\n", series.x_label, series.y_label);
    for (&x, &y) in series.x.iter().zip(&series.y) {
        csv.push_str(&format!("{x},{y}\n"));
    }
    write(&svg_path.with_extension("csv"), &csv)
}

fn write(path: &Path, text: &str) -> Result<(), CorrError> {
    std::fs::write(path, text).map_err(|source| CorrError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn render_svg(series: &PairedSeries, trend: &TrendLine) -> String {
    let (x_lo, x_hi, x_step) = nice_axis(min_of(&series.x), max_of(&series.x), MAX_TICKS);
    let (y_lo, y_hi, y_step) = nice_axis(min_of(&series.y), max_of(&series.y), MAX_TICKS);
    let plot_w = WIDTH - 2.0 * MARGIN_X;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |v: f64| MARGIN_X + (v - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |v: f64| HEIGHT - MARGIN_Y - (v - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str(&format!(
        "  <defs><clipPath id=\"plot\"><rect x=\"{MARGIN_X}\" y=\"{MARGIN_Y}\" \
         width=\"{plot_w}\" height=\"{plot_h}\"/></clipPath></defs>\n"
    ));

    // Axis frame plus tick marks, all in one path.
    let mut axis = format!(
        "M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2}",
        MARGIN_X,
        MARGIN_Y,
        MARGIN_X,
        HEIGHT - MARGIN_Y,
        WIDTH - MARGIN_X,
        HEIGHT - MARGIN_Y
    );
    let mut labels = String::new();
    for tick in tick_values(x_lo, x_hi, x_step) {
        let x = px(tick);
        axis.push_str(&format!(
            " M{:.2} {:.2} L{:.2} {:.2}",
            x,
            HEIGHT - MARGIN_Y,
            x,
            HEIGHT - MARGIN_Y + TICK_LEN
        ));
        labels.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            x,
            HEIGHT - MARGIN_Y + 22.0,
            tick_label(tick)
        ));
    }
    for tick in tick_values(y_lo, y_hi, y_step) {
        let y = py(tick);
        axis.push_str(&format!(
            " M{:.2} {:.2} L{:.2} {:.2}",
            MARGIN_X,
            y,
            MARGIN_X - TICK_LEN,
            y
        ));
        labels.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_X - 10.0,
            y + 4.0,
            tick_label(tick)
        ));
    }
    out.push_str(&format!(
        "  <path d=\"{axis}\" fill=\"none\" stroke=\"#333333\"/>\n"
    ));
    out.push_str(&labels);

    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - MARGIN_Y + 45.0,
        series.x_label
    ));
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 {:.2} {:.2})\">{}</text>\n",
        20.0,
        HEIGHT / 2.0,
        20.0,
        HEIGHT / 2.0,
        series.y_label
    ));

    out.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
         stroke=\"#cc3333\" stroke-width=\"1.5\" clip-path=\"url(#plot)\"/>\n",
        px(x_lo),
        py(trend.at(x_lo)),
        px(x_hi),
        py(trend.at(x_hi))
    ));
    for (&x, &y) in series.x.iter().zip(&series.y) {
        out.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#336699\"/>\n",
            px(x),
            py(y)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Loose nice-number axis bounds: (lo, hi, step) with lo ≤ min, hi ≥ max
/// and step from the {1, 2, 5}·10^k ladder.
fn nice_axis(min: f64, max: f64, max_ticks: usize) -> (f64, f64, f64) {
    let (min, max) = if min == max {
        (min - 1.0, max + 1.0)
    } else {
        (min, max)
    };
    let range = nice_num(max - min, false);
    let step = nice_num(range / (max_ticks - 1) as f64, true);
    let lo = (min / step).floor() * step;
    let hi = (max / step).ceil() * step;
    (lo, hi, step)
}

fn nice_num(x: f64, round: bool) -> f64 {
    let exp = x.log10().floor();
    let f = x / 10f64.powf(exp);
    let nf = if round {
        if f < 1.5 {
            1.0
        } else if f < 3.0 {
            2.0
        } else if f < 7.0 {
            5.0
        } else {
            10.0
        }
    } else if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nf * 10f64.powf(exp)
}

fn tick_values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as i64;
    (0..=count).map(|i| lo + i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        let sign = if v < 0.0 { "-" } else { "" };
        format!("{sign}{}", thousands(v.abs() as u64))
    } else {
        format!("{v}")
    }
}
