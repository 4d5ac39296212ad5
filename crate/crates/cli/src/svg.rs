//! Static SVG growth plot.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 40.0;

type Row = (Option<usize>, Option<usize>);

/// Hitting distance (solid) and `ν` (dashed) against seed index.
pub fn growth_plot(rows: &[Row]) -> String {
    let ymax = rows.iter().flat_map(|(a, b)| [*a, *b]).flatten().max().unwrap_or(1).max(1) as f64;
    let xmax = rows.len().saturating_sub(1).max(1) as f64;
    let px = |k: usize| PAD + k as f64 * (W - 2.0 * PAD) / xmax;
    let py = |v: usize| H - PAD - v as f64 * (H - 2.0 * PAD) / ymax;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{y} H{x}" fill="none" stroke="black"/>"#,
        y = H - PAD,
        x = W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">seed index</text>"#, W / 2.0, H - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">distance</text>"#, H / 2.0, H / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 4.0, ymax);
    let series = |pick: fn(&Row) -> Option<usize>| -> String {
        rows.iter()
            .enumerate()
            .filter_map(|(k, r)| pick(r).map(|v| format!("{:.1},{:.1}", px(k), py(v))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let hits = series(|r| r.0);
    let nus = series(|r| r.1);
    if !nus.is_empty() {
        let _ = writeln!(s, r#"<polyline points="{nus}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#);
    }
    if !hits.is_empty() {
        let _ = writeln!(s, r#"<polyline points="{hits}" fill="none" stroke="steelblue" stroke-width="2"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
