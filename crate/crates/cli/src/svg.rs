//! Standalone SVG emission for the rate study: log-log scatter with error
//! bars and the fitted line, the underlying table embedded as an XML
//! comment so the artifact is diffable and self-describing.

use std::fmt::Write as _;

use sixm_core::datagen::fmt_f64;

pub struct LogLogPlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// `(x, y, y_stderr)` in natural units; plotted on log10 axes.
    pub points: &'a [(f64, f64, f64)],
    /// Fitted line `ln y = intercept + slope ln x`.
    pub slope: f64,
    pub intercept: f64,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 70.0;

pub fn render(plot: &LogLogPlot) -> String {
    let lx: Vec<f64> = plot.points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = plot.points.iter().map(|p| p.1.max(1e-300).ln()).collect();
    let (x_min, x_max) = padded_range(&lx);
    let lo_y: Vec<f64> = plot
        .points
        .iter()
        .map(|p| (p.1 - p.2).max(p.1 * 0.5).max(1e-300).ln())
        .collect();
    let hi_y: Vec<f64> = plot.points.iter().map(|p| (p.1 + p.2).max(1e-300).ln()).collect();
    let mut all_y = ly.clone();
    all_y.extend_from_slice(&lo_y);
    all_y.extend_from_slice(&hi_y);
    let (y_min, y_max) = padded_range(&all_y);

    let to_x = |v: f64| MARGIN + (v - x_min) / (x_max - x_min) * (W - 2.0 * MARGIN);
    let to_y = |v: f64| H - MARGIN - (v - y_min) / (y_max - y_min) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<!-- data table:");
    let _ = writeln!(s, "  x,y,y_stderr");
    for &(x, y, se) in plot.points {
        let _ = writeln!(s, "  {},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(se));
    }
    let _ = writeln!(
        s,
        "  fit: ln y = {} + {} ln x",
        fmt_f64(plot.intercept),
        fmt_f64(plot.slope)
    );
    let _ = writeln!(s, "-->");
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    // Axes.
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        MARGIN,
        H - MARGIN,
        W - MARGIN,
        H - MARGIN
    );
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        MARGIN,
        MARGIN,
        MARGIN,
        H - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        W / 2.0,
        plot.title
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        W / 2.0,
        H - 18.0,
        plot.x_label
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 {})\">{}</text>",
        H / 2.0,
        H / 2.0,
        plot.y_label
    );
    // Tick marks at the data points.
    for (&x, &(xn, _, _)) in lx.iter().zip(plot.points) {
        let px = to_x(x);
        let _ = writeln!(
            s,
            "<line x1=\"{px:.2}\" y1=\"{}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/>",
            H - MARGIN,
            H - MARGIN + 6.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{px:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{xn}</text>",
            H - MARGIN + 20.0
        );
    }
    for &y in &ly {
        let py = to_y(y);
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            MARGIN - 6.0,
            MARGIN
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{py:.2}\" text-anchor=\"end\" font-size=\"11\">{:.3}</text>",
            MARGIN - 9.0,
            y.exp()
        );
    }
    // Fitted line across the x range.
    let fit = |v: f64| plot.intercept + plot.slope * v;
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>",
        to_x(x_min),
        to_y(fit(x_min)),
        to_x(x_max),
        to_y(fit(x_max))
    );
    // Error bars and points.
    for ((&x, &y), (&lo, &hi)) in lx.iter().zip(&ly).zip(lo_y.iter().zip(&hi_y)) {
        let px = to_x(x);
        let _ = writeln!(
            s,
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#336\"/>",
            to_y(lo),
            to_y(hi)
        );
        let _ = writeln!(
            s,
            "<circle cx=\"{px:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#336\"/>",
            to_y(y)
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.08).max(1e-6);
    (lo - pad, hi + pad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_embeds_data() {
        let points = vec![(100.0, 0.5, 0.05), (300.0, 0.2, 0.02), (1000.0, 0.08, 0.01)];
        let plot = LogLogPlot {
            title: "excess risk",
            x_label: "n",
            y_label: "excess",
            points: &points,
            slope: -0.8,
            intercept: 2.0,
        };
        let a = render(&plot);
        let b = render(&plot);
        assert_eq!(a, b);
        assert!(a.contains("<!-- data table:"));
        assert!(a.contains("</svg>"));
        assert!(a.contains("1.0000000000000000e2"));
    }
}
