//! Minimal standalone SVG charts: lines, histograms and box summaries.
//!
//! Every figure embeds the series it draws as CSV inside `<metadata>` so the
//! plotted numbers can be audited without the accompanying tables.

use std::fmt::Write as _;

use super::table::format_real;

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 380.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;

/// A box-summary glyph: whiskers at the extremes, box at the quartiles.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGlyph {
    pub label: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Line { name: String, points: Vec<(f64, f64)>, dashed: bool },
    /// Bars `(lo, hi, height)`.
    Bars { name: String, bars: Vec<(f64, f64, f64)> },
    Boxes { boxes: Vec<BoxGlyph> },
    /// Horizontal reference line.
    HLine { name: String, y: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub layers: Vec<Layer>,
}

impl Panel {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Panel {
            title: title.to_owned(),
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
            layers: Vec::new(),
        }
    }

    pub fn layer(mut self, layer: Layer) -> Self {
        self.layers.push(layer);
        self
    }

    fn extent(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut categorical = 0usize;
        for l in &self.layers {
            match l {
                Layer::Line { points, .. } => {
                    xs.extend(points.iter().map(|p| p.0));
                    ys.extend(points.iter().map(|p| p.1));
                }
                Layer::Bars { bars, .. } => {
                    for &(lo, hi, h) in bars {
                        xs.extend([lo, hi]);
                        ys.extend([0.0, h]);
                    }
                }
                Layer::Boxes { boxes } => {
                    categorical = categorical.max(boxes.len());
                    ys.extend(boxes.iter().flat_map(|b| [b.min, b.max]));
                }
                Layer::HLine { y, .. } => ys.push(*y),
            }
        }
        if categorical > 0 {
            xs.extend([0.5, categorical as f64 + 0.5]);
        }
        let finite = |v: &[f64]| {
            let lo = v.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
            if !(lo < hi) {
                let c = if lo.is_finite() { lo } else { 0.0 };
                (c - 1.0, c + 1.0)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = finite(&xs);
        let (y0, y1) = finite(&ys);
        let pad = 0.05 * (y1 - y0);
        let y0 = if y0 >= 0.0 && y0 - pad < 0.0 { 0.0 } else { y0 - pad };
        ((x0, x1), (y0, y1 + pad))
    }

    fn render(&self, out: &mut String, ox: f64, oy: f64) {
        let ((x0, x1), (y0, y1)) = self.extent();
        let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
        let sx = |x: f64| ox + MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| oy + MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * plot_h;
        let px = |v: f64| format!("{v:.2}");

        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
            px(ox + MARGIN_L),
            px(oy + MARGIN_T),
            px(plot_w),
            px(plot_h)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="15">{}</text>"#,
            px(ox + PANEL_W / 2.0),
            px(oy + 22.0),
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            px(ox + MARGIN_L + plot_w / 2.0),
            px(oy + PANEL_H - 12.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 {} {})">{}</text>"#,
            px(ox + 16.0),
            px(oy + MARGIN_T + plot_h / 2.0),
            px(ox + 16.0),
            px(oy + MARGIN_T + plot_h / 2.0),
            escape(&self.y_label)
        );
        let is_categorical = self.layers.iter().any(|l| matches!(l, Layer::Boxes { .. }));
        if !is_categorical {
            for t in ticks(x0, x1) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333"/><text x="{0}" y="{3}" text-anchor="middle" font-size="10">{4}</text>"##,
                    px(sx(t)),
                    px(oy + MARGIN_T + plot_h),
                    px(oy + MARGIN_T + plot_h + 5.0),
                    px(oy + MARGIN_T + plot_h + 17.0),
                    tick_label(t)
                );
            }
        }
        for t in ticks(y0, y1) {
            let _ = writeln!(
                out,
                r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#333"/><text x="{3}" y="{4}" text-anchor="end" font-size="10">{5}</text>"##,
                px(ox + MARGIN_L - 5.0),
                px(sy(t)),
                px(ox + MARGIN_L),
                px(ox + MARGIN_L - 7.0),
                px(sy(t) + 3.5),
                tick_label(t)
            );
        }

        for layer in &self.layers {
            match layer {
                Layer::Bars { bars, .. } => {
                    for &(lo, hi, h) in bars {
                        let _ = writeln!(
                            out,
                            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>"##,
                            px(sx(lo)),
                            px(sy(h.max(y0))),
                            px(sx(hi) - sx(lo)),
                            px(sy(y0.max(0.0)) - sy(h.max(y0)))
                        );
                    }
                }
                Layer::Line { points, dashed, .. } => {
                    let pts: Vec<String> = points
                        .iter()
                        .filter(|p| p.1.is_finite())
                        .map(|&(x, y)| format!("{},{}", px(sx(x)), px(sy(y))))
                        .collect();
                    let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
                    let _ = writeln!(
                        out,
                        r##"<polyline fill="none" stroke="#d62728" stroke-width="2"{dash} points="{}"/>"##,
                        pts.join(" ")
                    );
                }
                Layer::HLine { y, .. } => {
                    let _ = writeln!(
                        out,
                        r##"<line x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="#555" stroke-dasharray="3,3"/>"##,
                        px(ox + MARGIN_L),
                        px(ox + MARGIN_L + plot_w),
                        px(sy(*y))
                    );
                }
                Layer::Boxes { boxes } => {
                    for (i, b) in boxes.iter().enumerate() {
                        let c = sx(i as f64 + 1.0);
                        let half = 0.3 * plot_w / (x1 - x0);
                        let _ = writeln!(
                            out,
                            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333"/><line x1="{0}" y1="{3}" x2="{0}" y2="{4}" stroke="#333"/>"##,
                            px(c),
                            px(sy(b.max)),
                            px(sy(b.q3)),
                            px(sy(b.q1)),
                            px(sy(b.min))
                        );
                        let _ = writeln!(
                            out,
                            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#c7e9c0" stroke="#333"/>"##,
                            px(c - half),
                            px(sy(b.q3)),
                            px(2.0 * half),
                            px(sy(b.q1) - sy(b.q3))
                        );
                        let _ = writeln!(
                            out,
                            r##"<line x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="#000" stroke-width="2"/>"##,
                            px(c - half),
                            px(c + half),
                            px(sy(b.median))
                        );
                        let _ = writeln!(
                            out,
                            r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{}</text>"#,
                            px(c),
                            px(oy + MARGIN_T + plot_h + 17.0),
                            escape(&b.label)
                        );
                    }
                }
            }
        }
    }

    fn data_csv(&self, panel_index: usize, out: &mut String) {
        for layer in &self.layers {
            match layer {
                Layer::Line { name, points, .. } => {
                    let _ = writeln!(out, "# panel {panel_index} line {name}: x,y");
                    for &(x, y) in points {
                        let _ = writeln!(out, "{},{}", format_real(x), format_real(y));
                    }
                }
                Layer::Bars { name, bars } => {
                    let _ = writeln!(out, "# panel {panel_index} bars {name}: lo,hi,height");
                    for &(lo, hi, h) in bars {
                        let _ = writeln!(out, "{},{},{}", format_real(lo), format_real(hi), format_real(h));
                    }
                }
                Layer::Boxes { boxes } => {
                    let _ = writeln!(out, "# panel {panel_index} boxes: label,min,q1,median,q3,max");
                    for b in boxes {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            b.label,
                            format_real(b.min),
                            format_real(b.q1),
                            format_real(b.median),
                            format_real(b.q3),
                            format_real(b.max)
                        );
                    }
                }
                Layer::HLine { name, y } => {
                    let _ = writeln!(out, "# panel {panel_index} hline {name}: y\n{}", format_real(*y));
                }
            }
        }
    }
}

/// Lay `panels` out in one row.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len() as f64;
    let mut data = String::new();
    for (i, p) in panels.iter().enumerate() {
        p.data_csv(i, &mut data);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = width,
        h = PANEL_H
    );
    let _ = writeln!(out, "<metadata><![CDATA[\n{data}]]></metadata>");
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        p.render(&mut out, PANEL_W * i as f64, 0.0);
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(t: f64) -> String {
    let r = (t * 1e6).round() / 1e6;
    format_real(if r == 0.0 { 0.0 } else { r })
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_embeds_series() {
        let p = Panel::new("t", "x", "y").layer(Layer::Line {
            name: "curve".into(),
            points: vec![(0.0, 1.0), (1.0, 2.5)],
            dashed: false,
        });
        let svg = render(&[p]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("# panel 0 line curve: x,y\n0,1\n1,2.5\n"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn ticks_cover_range() {
        let t = ticks(2.0, 10.0);
        assert!(t.first().unwrap() >= &2.0 && t.last().unwrap() <= &10.0);
        assert!(t.len() >= 3);
    }
}
