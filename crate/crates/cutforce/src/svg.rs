//! Minimal deterministic SVG writer for region, mesh, field and force
//! plots. Output is plain shapes with fixed formatting so reruns are
//! byte-identical.

use std::path::Path;

use crate::point2::P2;

pub struct SvgCanvas {
    width: f64,
    height: f64,
    // World-to-screen transform: screen = (p - lo) * scale, y flipped.
    lo: P2,
    scale: f64,
    body: String,
}

impl SvgCanvas {
    /// Canvas fitted to the world bounding box [lo, hi] with a margin.
    pub fn fit(lo: P2, hi: P2, width_px: f64) -> Self {
        let span = hi - lo;
        let margin = 0.05 * span.x.max(span.z).max(1e-9);
        let lo = lo - P2::new(margin, margin);
        let span = span + P2::new(2.0 * margin, 2.0 * margin);
        let scale = width_px / span.z.max(1e-12);
        SvgCanvas { width: width_px, height: span.x * scale, lo, scale, body: String::new() }
    }

    /// Map a world point (x depth, z feed) to screen: z runs right, x runs up.
    fn map(&self, p: P2) -> (f64, f64) {
        let sx = (p.z - self.lo.z) * self.scale;
        let sy = self.height - (p.x - self.lo.x) * self.scale;
        (sx, sy)
    }

    pub fn polyline(&mut self, pts: &[P2], stroke: &str, width: f64, close: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            d.push_str(if i == 0 { "M" } else { "L" });
            d.push_str(&format!("{x:.3} {y:.3} "));
        }
        if close {
            d.push('Z');
        }
        self.body.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\"/>\n"
        ));
    }

    pub fn line(&mut self, a: P2, b: P2, stroke: &str, width: f64) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        self.body.push_str(&format!(
            "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\"/>\n"
        ));
    }

    pub fn circle(&mut self, c: P2, r_px: f64, fill: &str) {
        let (x, y) = self.map(c);
        self.body.push_str(&format!(
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r_px:.2}\" fill=\"{fill}\"/>\n"
        ));
    }

    /// Arrow of fixed world length from `p` along the unit direction `d`.
    pub fn arrow(&mut self, p: P2, d: P2, world_len: f64, stroke: &str) {
        let tip = p + d * world_len;
        self.line(p, tip, stroke, 0.8);
        let back = d * (-0.3 * world_len);
        self.line(tip, tip + back + back.perp() * 0.5, stroke, 0.8);
        self.line(tip, tip + back - back.perp() * 0.5, stroke, 0.8);
    }

    pub fn text(&mut self, p: P2, size_px: f64, content: &str) {
        let (x, y) = self.map(p);
        self.body.push_str(&format!(
            "<text x=\"{x:.3}\" y=\"{y:.3}\" font-size=\"{size_px:.1}\" font-family=\"monospace\">{content}</text>\n"
        ));
    }

    pub fn text_at_px(&mut self, x: f64, y: f64, size_px: f64, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{x:.3}\" y=\"{y:.3}\" font-size=\"{size_px:.1}\" font-family=\"monospace\">{content}</text>\n"
        ));
    }

    pub fn to_string(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.3} {:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_string())
    }
}

/// Simple XY chart (e.g. force versus feed) with one polyline per series.
pub struct Chart {
    width: f64,
    height: f64,
    series: Vec<(String, String, Vec<(f64, f64)>)>,
    x_label: String,
    y_label: String,
}

impl Chart {
    pub fn new(x_label: &str, y_label: &str) -> Self {
        Chart {
            width: 640.0,
            height: 420.0,
            series: Vec::new(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
        }
    }

    pub fn add_series(&mut self, name: &str, color: &str, points: Vec<(f64, f64)>) {
        self.series.push((name.to_string(), color.to_string(), points));
    }

    pub fn to_string(&self) -> String {
        let (ml, mr, mt, mb) = (64.0, 16.0, 16.0, 48.0);
        let (pw, ph) = (self.width - ml - mr, self.height - mt - mb);
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (_, _, pts) in &self.series {
            for &(x, y) in pts {
                lo.0 = lo.0.min(x);
                lo.1 = lo.1.min(y);
                hi.0 = hi.0.max(x);
                hi.1 = hi.1.max(y);
            }
        }
        if !lo.0.is_finite() {
            lo = (0.0, 0.0);
            hi = (1.0, 1.0);
        }
        if hi.0 - lo.0 < 1e-12 {
            hi.0 = lo.0 + 1.0;
        }
        if hi.1 - lo.1 < 1e-12 {
            hi.1 = lo.1 + 1.0;
        }
        let map = |x: f64, y: f64| {
            (
                ml + (x - lo.0) / (hi.0 - lo.0) * pw,
                mt + ph - (y - lo.1) / (hi.1 - lo.1) * ph,
            )
        };
        let mut body = String::new();
        body.push_str(&format!(
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n"
        ));
        // Axis ticks.
        for k in 0..=4 {
            let x = lo.0 + (hi.0 - lo.0) * k as f64 / 4.0;
            let y = lo.1 + (hi.1 - lo.1) * k as f64 / 4.0;
            let (px, _) = map(x, lo.1);
            let (_, py) = map(lo.0, y);
            body.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"middle\">{:.3}</text>\n",
                px, mt + ph + 16.0, x
            ));
            body.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">{:.1}</text>\n",
                ml - 6.0, py + 4.0, y
            ));
        }
        body.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\" text-anchor=\"middle\">{}</text>\n",
            ml + pw / 2.0, self.height - 10.0, self.x_label
        ));
        body.push_str(&format!(
            "<text x=\"14\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\" transform=\"rotate(-90 14 {:.1})\" text-anchor=\"middle\">{}</text>\n",
            mt + ph / 2.0, mt + ph / 2.0, self.y_label
        ));
        for (i, (name, color, pts)) in self.series.iter().enumerate() {
            let mut d = String::new();
            for (k, &(x, y)) in pts.iter().enumerate() {
                let (px, py) = map(x, y);
                d.push_str(if k == 0 { "M" } else { "L" });
                d.push_str(&format!("{px:.2} {py:.2} "));
            }
            body.push_str(&format!(
                "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
            ));
            body.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\" fill=\"{color}\">{name}</text>\n",
                ml + 8.0,
                mt + 16.0 + 16.0 * i as f64
            ));
        }
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, body
        )
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_string())
    }
}
