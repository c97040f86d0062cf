//! Self-contained SVG renderers for the CSV artifacts. The CSV is the
//! canonical output; these charts are a convenience for quick inspection.

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 180.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

const SERIES_COLORS: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

fn header(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="28" font-size="18" text-anchor="middle">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Horizontal bar chart; one bar per labeled value, in the given order.
pub fn bar_chart(title: &str, rows: &[(String, f64)]) -> String {
    let mut out = header(title);
    if rows.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let max = rows.iter().map(|(_, v)| *v).fold(f64::EPSILON, f64::max);
    let area_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let area_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let band = area_h / rows.len() as f64;
    let bar_h = (band * 0.7).min(26.0);
    for (i, (label, value)) in rows.iter().enumerate() {
        let y = MARGIN_TOP + band * i as f64 + (band - bar_h) / 2.0;
        let w = area_w * (value / max).max(0.0);
        out.push_str(&format!(
            r##"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>
<rect x="{MARGIN_LEFT}" y="{y:.1}" width="{w:.1}" height="{bar_h:.1}" fill="#4878a8"/>
<text x="{:.1}" y="{:.1}" font-size="11">{:.4}</text>
"##,
            MARGIN_LEFT - 6.0,
            y + bar_h * 0.75,
            escape(label),
            MARGIN_LEFT + w + 4.0,
            y + bar_h * 0.75,
            value
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart over (x, y) series sharing one axis pair.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut out = header(title);
    let points: Vec<(f64, f64)> = series.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    if points.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in &points {
        x_min = x_min.min(*x);
        x_max = x_max.max(*x);
        y_min = y_min.min(*y);
        y_max = y_max.max(*y);
    }
    if x_max == x_min {
        x_max += 1.0;
    }
    if y_max == y_min {
        y_max += 1.0;
    }
    let area_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let area_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + area_w * (x - x_min) / (x_max - x_min);
    let py = |y: f64| MARGIN_TOP + area_h * (1.0 - (y - y_min) / (y_max - y_min));

    out.push_str(&format!(
        r##"<line x1="{MARGIN_LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333"/>
<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{:.1}" stroke="#333"/>
<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>
<text x="16" y="{:.1}" font-size="12" transform="rotate(-90 16 {:.1})" text-anchor="middle">{}</text>
<text x="{MARGIN_LEFT}" y="{:.1}" font-size="10" text-anchor="middle">{x_min:.0}</text>
<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{x_max:.0}</text>
<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{y_min:.2}</text>
<text x="{:.1}" y="{MARGIN_TOP}" font-size="10" text-anchor="end">{y_max:.2}</text>
"##,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM,
        HEIGHT - MARGIN_BOTTOM,
        MARGIN_LEFT + area_w / 2.0,
        HEIGHT - 18.0,
        escape(x_label),
        MARGIN_TOP + area_h / 2.0,
        MARGIN_TOP + area_h / 2.0,
        escape(y_label),
        HEIGHT - MARGIN_BOTTOM + 16.0,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM + 16.0,
        MARGIN_LEFT - 4.0,
        HEIGHT - MARGIN_BOTTOM,
        MARGIN_LEFT - 4.0,
    ));

    for (i, (label, data)) in series.iter().enumerate() {
        if data.is_empty() {
            continue;
        }
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let path: Vec<String> = data.iter().map(|(x, y)| format!("{:.1},{:.1}", px(*x), py(*y))).collect();
        out.push_str(&format!(
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>
<text x="{:.1}" y="{:.1}" font-size="11" fill="{color}">{}</text>
"#,
            path.join(" "),
            WIDTH - MARGIN_RIGHT - 160.0,
            MARGIN_TOP + 14.0 * (i + 1) as f64,
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Square heatmap with labeled axes; values are expected in [-1, 1].
pub fn heatmap(title: &str, labels: &[String], matrix: &[Vec<f64>]) -> String {
    let mut out = header(title);
    let n = labels.len();
    if n == 0 {
        out.push_str("</svg>\n");
        return out;
    }
    let area = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM).min(WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let cell = area / n as f64;
    for (i, row) in matrix.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            let x = MARGIN_LEFT + cell * j as f64;
            let y = MARGIN_TOP + cell * i as f64;
            // 0 -> white, 1 -> deep blue.
            let t = value.clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - t)) as u8;
            out.push_str(&format!(
                r##"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="rgb({shade},{shade},255)" stroke="#ccc"/>
<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{value:.3}</text>
"##,
                x + cell / 2.0,
                y + cell / 2.0 + 3.0,
            ));
        }
    }
    for (i, label) in labels.iter().enumerate() {
        out.push_str(&format!(
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>
<text x="{:.1}" y="{:.1}" font-size="10" transform="rotate(-45 {:.1} {:.1})">{}</text>
"#,
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + cell * i as f64 + cell / 2.0 + 3.0,
            escape(label),
            MARGIN_LEFT + cell * i as f64 + cell / 4.0,
            MARGIN_TOP - 8.0,
            MARGIN_LEFT + cell * i as f64 + cell / 4.0,
            MARGIN_TOP - 8.0,
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Density polylines: one normalized histogram trace per labeled sample.
pub fn density_chart(title: &str, samples: &[(String, Vec<f64>)]) -> String {
    const BINS: usize = 40;
    let series: Vec<(String, Vec<(f64, f64)>)> = samples
        .iter()
        .map(|(label, values)| {
            let mut counts = vec![0_usize; BINS];
            for v in values {
                let bin = ((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * (BINS as f64 - 1.0)).round() as usize;
                counts[bin] += 1;
            }
            let total = values.len().max(1) as f64;
            let trace = counts
                .iter()
                .enumerate()
                .map(|(b, c)| (-1.0 + 2.0 * b as f64 / (BINS as f64 - 1.0), *c as f64 / total))
                .collect();
            (label.clone(), trace)
        })
        .collect();
    line_chart(title, "cosine similarity", "density", &series)
}
