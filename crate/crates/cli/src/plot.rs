//! Deterministic SVG plots of decay tables: a point cloud of the normalized
//! column on a log₂ vertical axis, with the fitted model drawn through the
//! swept range and annotated.  Output depends only on the table, so a fixed
//! table renders to identical bytes every time.

use modmax_core::decay::{DecayTable, FitModel};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    /// Linear parameter axis (e.g. a scale index j).
    LogLinear,
    /// log₂ parameter axis (e.g. a radius or lattice size).
    LogLog,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `table` as an SVG document.  Rows that are flagged, or whose
/// normalized value (or parameter, in log-log style) is not positive, are
/// not plottable; with no plottable rows the table counts as empty.
pub fn emit_plot(table: &DecayTable, style: PlotStyle) -> Result<String> {
    let mut points: Vec<(f64, f64, f64)> = Vec::new();
    for row in &table.rows {
        if row.flag.is_some() || !(row.normalized > 0.0) {
            continue;
        }
        if style == PlotStyle::LogLog && !(row.param > 0.0) {
            continue;
        }
        let x = match style {
            PlotStyle::LogLinear => row.param,
            PlotStyle::LogLog => row.param.log2(),
        };
        points.push((x, row.normalized.log2(), row.param));
    }
    if points.is_empty() {
        return Err(Error::EmptyTable);
    }

    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for &(x, y, _) in &points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    // Include the fitted curve endpoints so the overlay never clips.
    if let Some(fit) = &table.fit {
        for &&(_, _, param) in [points.first().unwrap(), points.last().unwrap()].iter() {
            let y = fit.predict(param).log2();
            if y.is_finite() {
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
    }
    if x_hi - x_lo < 1e-12 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo < 1e-12 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }

    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let py =
        |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    let x_axis_label = match style {
        PlotStyle::LogLinear => table.param_name.clone(),
        PlotStyle::LogLog => format!("log2({})", table.param_name),
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        MARGIN_LEFT,
        escape(&table.label)
    ));
    // Axes with end-value tick labels.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{x_lo}</text>\n",
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM + 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{x_hi}</text>\n",
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM + 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{y_lo}</text>\n",
        MARGIN_LEFT - 6.0,
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{y_hi}</text>\n",
        MARGIN_LEFT - 6.0,
        MARGIN_TOP + 4.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 16.0,
        escape(&x_axis_label)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
         transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">log2(normalized)</text>\n",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    ));

    if let Some(fit) = &table.fit {
        let (x_first, _, p_first) = *points.first().unwrap();
        let (x_last, _, p_last) = *points.last().unwrap();
        let y_first = fit.predict(p_first).log2();
        let y_last = fit.predict(p_last).log2();
        if y_first.is_finite() && y_last.is_finite() {
            svg.push_str(&format!(
                "<line class=\"fit\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                 stroke=\"#c03020\" stroke-width=\"1.5\"/>\n",
                px(x_first),
                py(y_first),
                px(x_last),
                py(y_last)
            ));
        }
        let model = match fit.model {
            FitModel::PowerLaw => "power law",
            FitModel::ExponentialInParam => "exponential in param",
            FitModel::LogPowerLaw => "log power law",
        };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"40\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#c03020\">fit: {model}, exponent {}, R² {}</text>\n",
            MARGIN_LEFT, fit.exponent, fit.r_squared
        ));
    }

    for &(x, y, _) in &points {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f4e8c\"/>\n",
            px(x),
            py(y)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
