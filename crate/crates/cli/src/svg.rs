//! Deterministic SVG scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Tableau 10.
const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

/// Viridis, sampled at five stops.
const RAMP: [(u8, u8, u8); 5] = [
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Coloring {
    Plain,
    Categorical { name: String, labels: Vec<String> },
    Numeric { name: String, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_label: String,
    pub y_label: String,
    pub title: Option<String>,
    pub coloring: Coloring,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn ramp_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(RAMP.len() - 2);
    let f = t - i as f64;
    let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return (lo - 1.0, lo + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Round tick positions covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Categories in natural order: numerically when every label is a number.
pub fn category_order(labels: &[String]) -> Vec<String> {
    let mut uniq: Vec<String> = labels.to_vec();
    uniq.sort();
    uniq.dedup();
    if uniq.iter().all(|l| l.parse::<f64>().is_ok()) {
        uniq.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    uniq
}

pub fn render(s: &Scatter) -> String {
    assert_eq!(s.x.len(), s.y.len(), "coordinate lengths differ");
    let (x0, x1) = range(&s.x);
    let (y0, y1) = range(&s.y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + ph - (v - y0) / (y1 - y0) * ph;

    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(o, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(t) = &s.title {
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(t)
        );
    }
    let _ = writeln!(
        o,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for t in ticks(x0, x1, 6) {
        let px = sx(t);
        let _ = writeln!(
            o,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            tick_label(t)
        );
    }
    for t in ticks(y0, y1, 6) {
        let py = sy(t);
        let _ = writeln!(
            o,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        o,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(&s.x_label)
    );
    let _ = writeln!(
        o,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&s.y_label)
    );

    let colors: Vec<String> = match &s.coloring {
        Coloring::Plain => vec![PALETTE[0].to_string(); s.x.len()],
        Coloring::Categorical { labels, .. } => {
            let order = category_order(labels);
            labels
                .iter()
                .map(|l| {
                    let k = order.iter().position(|o| o == l).expect("label in order");
                    PALETTE[k % PALETTE.len()].to_string()
                })
                .collect()
        }
        Coloring::Numeric { values, .. } => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = if hi > lo { hi - lo } else { 1.0 };
            values.iter().map(|v| ramp_color((v - lo) / span)).collect()
        }
    };
    let _ = writeln!(o, r#"<g fill-opacity="0.8">"#);
    for ((x, y), c) in s.x.iter().zip(&s.y).zip(&colors) {
        let _ = writeln!(o, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, sx(*x), sy(*y));
    }
    let _ = writeln!(o, "</g>");

    let lx = WIDTH - RIGHT + 20.0;
    match &s.coloring {
        Coloring::Plain => {}
        Coloring::Categorical { name, labels } => {
            let _ = writeln!(o, r#"<g class="legend"><text x="{lx}" y="{TOP}">{}</text>"#, escape(name));
            for (k, l) in category_order(labels).iter().enumerate() {
                let y = TOP + 18.0 + 18.0 * k as f64;
                let _ = writeln!(
                    o,
                    r#"<rect x="{lx}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                    y - 9.0,
                    PALETTE[k % PALETTE.len()],
                    lx + 16.0,
                    y,
                    escape(l)
                );
            }
            let _ = writeln!(o, "</g>");
        }
        Coloring::Numeric { name, values } => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(o, r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">"#);
            for k in 0..RAMP.len() {
                let t = k as f64 / (RAMP.len() - 1) as f64;
                let _ = writeln!(o, r#"<stop offset="{t}" stop-color="{}"/>"#, ramp_color(t));
            }
            let _ = writeln!(o, "</linearGradient></defs>");
            let _ = writeln!(
                o,
                r##"<g class="legend"><text x="{lx}" y="{TOP}">{}</text><rect x="{lx}" y="{:.2}" width="16" height="200" fill="url(#ramp)" stroke="#444"/><text x="{:.2}" y="{:.2}">{}</text><text x="{:.2}" y="{:.2}">{}</text></g>"##,
                escape(name),
                TOP + 10.0,
                lx + 22.0,
                TOP + 20.0,
                tick_label(hi),
                lx + 22.0,
                TOP + 210.0,
                tick_label(lo)
            );
        }
    }
    o.push_str("</svg>\n");
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter(coloring: Coloring) -> Scatter {
        Scatter {
            x: vec![0.0, 1.0, 2.0],
            y: vec![1.0, -1.0, 0.5],
            x_label: "dim1".into(),
            y_label: "dim2".into(),
            title: Some("a < b".into()),
            coloring,
        }
    }

    #[test]
    fn three_circles() {
        let svg = render(&scatter(Coloring::Plain));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn numeric_legend_has_a_gradient() {
        let svg = render(&scatter(Coloring::Numeric {
            name: "cycle".into(),
            values: vec![1.0, 50.0, 100.0],
        }));
        assert!(svg.contains("<linearGradient"));
        assert!(svg.contains(&ramp_color(0.0)) && svg.contains(&ramp_color(1.0)));
    }

    #[test]
    fn categories_get_palette_entries() {
        let svg = render(&scatter(Coloring::Categorical {
            name: "rpm".into(),
            labels: vec!["10".into(), "9".into(), "10".into()],
        }));
        assert_eq!(category_order(&["10".into(), "9".into()]), vec!["9", "10"]);
        assert_eq!(svg.matches(PALETTE[1]).count(), 3);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 10.0, 5), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let t = ticks(-0.3, 0.3, 6);
        assert_eq!(t.len(), 7);
        assert!((t[0] + 0.3).abs() < 1e-12 && t[3] == 0.0);
        assert_eq!(tick_label(0.30000000000000004), "0.3");
        assert_eq!(tick_label(-0.0), "0");
    }
}
