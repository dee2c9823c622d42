//! Minimal deterministic SVG line plots: first column is x, every further
//! numeric column becomes a polyline. Identical envelopes produce identical
//! bytes.

use crate::cli::envelope::{Cell, ResultEnvelope};
use crate::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt(x: f64) -> String {
    // fixed short form, deterministic
    format!("{x:.4}")
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.3e}")
    }
}

/// Renders the envelope to SVG text.
pub fn emit_plot(env: &ResultEnvelope) -> Result<String> {
    if env.columns.len() < 2 {
        return Err(Error::Plot("need an x column and at least one y column".into()));
    }
    if env.rows.is_empty() {
        return Err(Error::Plot("no rows to plot".into()));
    }
    // numeric y columns only
    let y_cols: Vec<usize> = (1..env.columns.len())
        .filter(|&c| env.rows.iter().all(|r| matches!(r[c], Cell::Num(_))))
        .collect();
    if y_cols.is_empty() {
        return Err(Error::Plot("no numeric y columns".into()));
    }
    let xs: Vec<f64> = env
        .rows
        .iter()
        .map(|r| match r[0] {
            Cell::Num(v) => Ok(v),
            _ => Err(Error::Plot("x column must be numeric".into())),
        })
        .collect::<Result<_>>()?;
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &env.rows {
        for &c in &y_cols {
            if let Cell::Num(v) = r[c] {
                ymin = ymin.min(v);
                ymax = ymax.max(v);
            }
        }
    }
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    if !(ymax > ymin) {
        return Err(Error::Plot(format!("empty y-range [{ymin}, {ymax}]")));
    }
    if !(xmax > xmin) {
        return Err(Error::Plot("empty x-range".into()));
    }

    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - ymin) / (ymax - ymin) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"16\">{}</text>\n",
        MARGIN_L, env.command
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B
    ));
    // ticks
    for k in 0..=5 {
        let fx = xmin + (xmax - xmin) * k as f64 / 5.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 5.0;
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n<text x=\"{x}\" y=\"{ty}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{lab}</text>\n",
            x = fmt(px(fx)),
            b = HEIGHT - MARGIN_B,
            b2 = HEIGHT - MARGIN_B + 5.0,
            ty = HEIGHT - MARGIN_B + 18.0,
            lab = fmt_tick(fx)
        ));
        svg.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{y}\" x2=\"{l2}\" y2=\"{y}\" stroke=\"black\"/>\n<text x=\"{tx}\" y=\"{y}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{lab}</text>\n",
            l = MARGIN_L - 5.0,
            l2 = MARGIN_L,
            y = fmt(py(fy)),
            tx = MARGIN_L - 8.0,
            lab = fmt_tick(fy)
        ));
    }
    // axis labels from column metadata
    let xc = &env.columns[0];
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{} ({})</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        xc.name,
        xc.unit
    ));
    // polylines + legend
    for (i, &c) in y_cols.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for (r, &xv) in env.rows.iter().zip(&xs) {
            if let Cell::Num(v) = r[c] {
                pts.push_str(&format!("{},{} ", fmt(px(xv)), fmt(py(v))));
            }
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN_R - 200.0,
            MARGIN_T + 16.0 * i as f64 + 4.0,
            env.columns[c].name
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
