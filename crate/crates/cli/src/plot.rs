//! Minimal self-contained SVG line and scatter plots.
//!
//! Output depends only on the plotted data: coordinates are printed with a
//! fixed number of decimals and nothing time- or environment-dependent is
//! embedded.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
    Dashed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Symmetric error bars, one per point.
    pub errors: Option<Vec<f64>>,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: &[f64], ys: &[f64], style: Style) -> Self {
        Self {
            label: label.into(),
            points: xs.iter().copied().zip(ys.iter().copied()).collect(),
            style,
            errors: None,
        }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Horizontal reference lines `(y, label)`.
    pub hlines: Vec<(f64, String)>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Self::default()
        }
    }

    pub fn series(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn hline(mut self, y: f64, label: impl Into<String>) -> Self {
        self.hlines.push((y, label.into()));
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
        let widen = |r: &mut (f64, f64), v: f64| {
            if v.is_finite() {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        };
        for s in &self.series {
            for (k, &(x, y)) in s.points.iter().enumerate() {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                widen(&mut xs, x);
                let e = s.errors.as_ref().map_or(0.0, |e| e[k]);
                widen(&mut ys, y - e);
                widen(&mut ys, y + e);
            }
        }
        for &(y, _) in &self.hlines {
            widen(&mut ys, y);
        }
        (pad(xs, 0.0), pad(ys, 0.05))
    }

    pub fn to_svg(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        // axes and ticks
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
        );
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 19.0,
                tick_label(xv)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (y, label) in &self.hlines {
            let py = sy(*y);
            let _ = writeln!(
                svg,
                r#"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="gray" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}" fill="gray" text-anchor="end">{}</text>"#,
                LEFT + pw,
                LEFT + pw - 4.0,
                py - 4.0,
                escape(label)
            );
        }

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let visible = s
                .points
                .iter()
                .enumerate()
                .filter(|(_, (x, y))| x.is_finite() && y.is_finite());
            match s.style {
                Style::Line | Style::Dashed => {
                    let coords: Vec<String> = visible
                        .map(|(_, &(x, y))| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let dash = if s.style == Style::Dashed {
                        r#" stroke-dasharray="4 3""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                        coords.join(" ")
                    );
                }
                Style::Markers => {
                    for (i, &(x, y)) in visible {
                        let (px, py) = (sx(x), sy(y));
                        if let Some(e) = s.errors.as_ref().map(|e| e[i]) {
                            let _ = writeln!(
                                svg,
                                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}"/>"#,
                                sy(y - e),
                                sy(y + e)
                            );
                        }
                        let _ = writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#);
                    }
                }
            }
            // legend entry
            let ly = TOP + 10.0 + 18.0 * k as f64;
            let lx = LEFT + pw + 12.0;
            match s.style {
                Style::Markers => {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{ly:.2}" r="3" fill="{color}"/>"#,
                        lx + 10.0
                    );
                }
                Style::Line | Style::Dashed => {
                    let dash = if s.style == Style::Dashed {
                        r#" stroke-dasharray="4 3""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        svg,
                        r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        lx + 20.0
                    );
                }
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn pad((lo, hi): (f64, f64), frac: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let m = (hi - lo) * frac;
    (lo - m, hi + m)
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Plot {
        Plot::new("D & friends", "theta", "D")
            .series(Series::new(
                "curve",
                &[0.0, 1.0, 2.0],
                &[0.5, -0.2, f64::NAN],
                Style::Line,
            ))
            .series(Series::new("dots", &[0.5], &[0.1], Style::Markers).with_errors(vec![0.05]))
            .hline(0.0, "bound")
    }

    #[test]
    fn renders_deterministically() {
        let a = sample().to_svg();
        assert_eq!(a, sample().to_svg());
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("D &amp; friends"));
        assert!(!a.contains("NaN") && !a.contains("inf"));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert_eq!(a.matches("stroke-dasharray=\"6 4\"").count(), 1);
    }

    #[test]
    fn degenerate_ranges() {
        assert_eq!(pad((1.0, 1.0), 0.05), (0.5, 1.5));
        assert_eq!(pad((f64::INFINITY, f64::NEG_INFINITY), 0.05), (0.0, 1.0));
        let svg = Plot::new("empty", "x", "y").to_svg();
        assert!(svg.contains("</svg>"));
        assert_eq!(tick_label(-0.0001), "0");
    }
}
