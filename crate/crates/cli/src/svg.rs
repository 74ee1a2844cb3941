//! Just enough SVG to render line charts and bar charts without a plotting
//! dependency.

use std::fmt::Write;

pub struct Chart {
    width: f64,
    height: f64,
    margin: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
}

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

impl Chart {
    pub fn new(title: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Chart {
        let mut c = Chart {
            width: 640.0,
            height: 420.0,
            margin: 55.0,
            x_range: pad_range(x_range),
            y_range: pad_range(y_range),
            body: String::new(),
        };
        let w = c.width;
        write!(
            c.body,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15" font-family="sans-serif">{}</text>"#,
            w / 2.0,
            escape(title)
        )
        .unwrap();
        c
    }

    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin + (v - lo) / (hi - lo) * (self.width - 2.0 * self.margin)
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - self.margin - (v - lo) / (hi - lo) * (self.height - 2.0 * self.margin)
    }

    pub fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let left = self.x(x0);
        let right = self.x(x1);
        let bottom = self.y(y0);
        let top = self.y(y1);
        write!(
            self.body,
            r#"<line x1="{left:.1}" y1="{bottom:.1}" x2="{right:.1}" y2="{bottom:.1}" stroke="black"/><line x1="{left:.1}" y1="{bottom:.1}" x2="{left:.1}" y2="{top:.1}" stroke="black"/>"#
        )
        .unwrap();
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let xv = x0 + frac * (x1 - x0);
            let yv = y0 + frac * (y1 - y0);
            let xp = self.x(xv);
            let yp = self.y(yv);
            write!(
                self.body,
                r#"<line x1="{xp:.1}" y1="{bottom:.1}" x2="{xp:.1}" y2="{:.1}" stroke="black"/><text x="{xp:.1}" y="{:.1}" text-anchor="middle" font-size="11" font-family="sans-serif">{}</text>"#,
                bottom + 4.0,
                bottom + 17.0,
                trim_num(xv)
            )
            .unwrap();
            write!(
                self.body,
                r#"<line x1="{:.1}" y1="{yp:.1}" x2="{left:.1}" y2="{yp:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11" font-family="sans-serif">{}</text>"#,
                left - 4.0,
                left - 7.0,
                yp + 4.0,
                trim_num(yv)
            )
            .unwrap();
        }
        write!(
            self.body,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13" font-family="sans-serif">{}</text>"#,
            (left + right) / 2.0,
            self.height - 12.0,
            escape(x_label)
        )
        .unwrap();
        write!(
            self.body,
            r#"<text x="14" y="{:.1}" text-anchor="middle" font-size="13" font-family="sans-serif" transform="rotate(-90 14 {:.1})">{}</text>"#,
            (top + bottom) / 2.0,
            (top + bottom) / 2.0,
            escape(y_label)
        )
        .unwrap();
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, dashed: bool) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", self.x(x), self.y(y)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        write!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
            coords.join(" ")
        )
        .unwrap();
    }

    /// A bar from y=0 up to `y`, horizontally spanning [x_lo, x_hi].
    pub fn bar(&mut self, x_lo: f64, x_hi: f64, y: f64, color: &str) {
        let x = self.x(x_lo);
        let w = self.x(x_hi) - x;
        let y_top = self.y(y);
        let h = self.y(0.0) - y_top;
        write!(
            self.body,
            r#"<rect x="{x:.1}" y="{y_top:.1}" width="{:.1}" height="{h:.1}" fill="{color}" fill-opacity="0.75"/>"#,
            w * 0.92
        )
        .unwrap();
    }

    pub fn legend(&mut self, entries: &[(String, String)]) {
        for (i, (name, color)) in entries.iter().enumerate() {
            let y = 40.0 + i as f64 * 16.0;
            let x = self.width - self.margin - 150.0;
            write!(
                self.body,
                r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif">{}</text>"#,
                x + 20.0,
                x + 26.0,
                y + 4.0,
                escape(name)
            )
            .unwrap();
        }
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}\n</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

fn pad_range((lo, hi): (f64, f64)) -> (f64, f64) {
    if lo < hi {
        (lo, hi)
    } else {
        // degenerate data still needs a drawable span
        (lo - 0.5, lo + 0.5)
    }
}

fn trim_num(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
