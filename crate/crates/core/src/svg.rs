//! Line plots as standalone SVG: polylines, a frame, and min/max tick labels.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Default)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    log_x: bool,
    log_y: bool,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), ..Self::default() }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn series(mut self, name: &str, points: Vec<(f64, f64)>) -> Self {
        self.series.push((name.into(), points));
        self
    }

    fn tx(&self, x: f64) -> f64 {
        if self.log_x { x.log10() } else { x }
    }

    fn ty(&self, y: f64) -> f64 {
        if self.log_y { y.log10() } else { y }
    }

    /// Points that are non-finite after the axis transform (e.g. zeros on a
    /// log axis) are dropped.
    pub fn render(&self) -> String {
        let mapped: Vec<(&str, Vec<(f64, f64)>)> = self
            .series
            .iter()
            .map(|(n, pts)| {
                let p = pts.iter().map(|&(x, y)| (self.tx(x), self.ty(y))).filter(|(x, y)| x.is_finite() && y.is_finite());
                (n.as_str(), p.collect())
            })
            .collect();
        let all = mapped.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x0.is_finite() && y0.is_finite()) {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let pw = WIDTH - 2.0 * MARGIN;
        let ph = HEIGHT - 2.0 * MARGIN;
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;
        let label = |v: f64, log: bool| if log { format!("{:.3e}", 10f64.powf(v)) } else { format!("{v:.4}") };

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let small = r#"font-family="sans-serif" font-size="11""#;
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" {small}>{}</text>"#, HEIGHT - MARGIN + 16.0, label(x0, self.log_x));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" {small}>{}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, label(x1, self.log_x));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" {small}>{}</text>"#, MARGIN - 4.0, HEIGHT - MARGIN, label(y0, self.log_y));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" {small}>{}</text>"#, MARGIN - 4.0, MARGIN + 10.0, label(y1, self.log_y));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" {small}>{}</text>"#, WIDTH / 2.0, HEIGHT - 14.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})" {small}>{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, (name, pts)) in mapped.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            let ly = MARGIN + 16.0 + 14.0 * i as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{color}" {small}>{}</text>"#, MARGIN + 8.0, escape(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_contained_and_drops_log_zeros() {
        let svg = Plot::new("E <j>", "j", "E").log_log().series("a", vec![(1.0, 1.0), (2.0, 0.0), (4.0, 0.25)]).render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("E &lt;j&gt;"));
        assert!(!svg.contains("href"));
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
    }
}
