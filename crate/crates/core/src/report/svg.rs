//! Hand-written SVG. Every plotted number is also written as a
//! `data-value`-style attribute in the same text form the CSV tables use.

use std::fmt::Write;

use super::fmt_num;
use crate::antonym::{AlignmentRanking, StripPoint};
use crate::lexicon::Polarity;
use crate::screening::{BiasMatrix, CellStatus};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#d62728",
];
const POSITIVE: &str = "#1f4fd6";
const NEGATIVE: &str = "#d62728";
const UNLABELED: &str = "#888888";

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn polarity_color(p: Option<Polarity>) -> &'static str {
    match p {
        Some(Polarity::Positive) => POSITIVE,
        Some(Polarity::Negative) => NEGATIVE,
        None => UNLABELED,
    }
}

/// Symmetric plot range: the largest magnitude rounded up to 0.05.
fn extent(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
    ((m / 0.05).ceil() * 0.05).max(0.05)
}

fn open(w: f64, h: f64, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, "<title>{}</title>", esc(title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    s
}

/// Grouped horizontal bars, one group per axis and one bar per model.
/// Cells with `p_adjusted < alpha` get an asterisk; cells without a
/// correlation get a numbered footnote.
pub fn bias_bars_svg(m: &BiasMatrix, alpha: f64) -> String {
    let bar_h = 14.0;
    let group_gap = 22.0;
    let left = 180.0;
    let plot_w = 420.0;
    let top = 50.0;
    let range = extent(m.cells.iter().filter_map(|c| c.r()));
    let scale = plot_w / 2.0 / range;
    let cx = left + plot_w / 2.0;

    let n_foot = m.cells.iter().filter(|c| c.status != CellStatus::Ok).count();
    let groups_h = m.axes.len() as f64 * (m.models.len() as f64 * bar_h + group_gap);
    let legend_h = 16.0 * m.models.len() as f64;
    let height = top + groups_h + 30.0 + legend_h + 16.0 * n_foot as f64 + 20.0;
    let width = left + plot_w + 80.0;
    let mut s = open(width, height, &format!("bias matrix: {}", m.lexicon));
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" font-size="13" text-anchor="middle">{} (family size {})</text>"#,
        width / 2.0,
        esc(&m.lexicon),
        m.family_size
    );

    let bottom = top + groups_h;
    let _ = writeln!(
        s,
        r##"<line class="zero" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{bottom:.2}" stroke="#333" stroke-width="1"/>"##,
        top - 6.0
    );
    for t in [-range, 0.0, range] {
        let x = cx + t * scale;
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{x:.2}" y="{:.2}" text-anchor="middle" data-value="{}">{}</text>"#,
            bottom + 14.0,
            fmt_num(t),
            fmt_num(t)
        );
    }

    let mut foot = Vec::new();
    let mut y = top;
    for (a, axis) in m.axes.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text class="axis-label" x="10" y="{:.2}" font-weight="bold">{}</text>"#,
            y + bar_h * 0.8,
            esc(axis)
        );
        for (mi, model) in m.models.iter().enumerate() {
            let c = m.cell(mi, a);
            let color = PALETTE[mi % PALETTE.len()];
            let yb = y + mi as f64 * bar_h;
            match c.r() {
                Some(r) if c.status == CellStatus::Ok => {
                    let x0 = cx.min(cx + r * scale);
                    let wbar = (r * scale).abs();
                    let _ = writeln!(
                        s,
                        r#"<rect class="bar" x="{x0:.2}" y="{:.2}" width="{wbar:.2}" height="{:.2}" fill="{color}" data-model="{}" data-axis="{}" data-value="{}"/>"#,
                        yb + 1.0,
                        bar_h - 2.0,
                        esc(model),
                        esc(axis),
                        fmt_num(r)
                    );
                    if c.is_significant(alpha) {
                        let (xs, anchor) = if r >= 0.0 {
                            (cx + r * scale + 3.0, "start")
                        } else {
                            (cx + r * scale - 3.0, "end")
                        };
                        let _ = writeln!(
                            s,
                            r#"<text class="significant" x="{xs:.2}" y="{:.2}" text-anchor="{anchor}" data-p-adjusted="{}">*</text>"#,
                            yb + bar_h - 2.0,
                            fmt_num(c.p_adjusted.unwrap_or(f64::NAN))
                        );
                    }
                }
                _ => {
                    foot.push((model, axis, c.flags(alpha)));
                    let _ = writeln!(
                        s,
                        r#"<text class="skipped" x="{:.2}" y="{:.2}" data-model="{}" data-axis="{}">[{}]</text>"#,
                        cx + 3.0,
                        yb + bar_h - 3.0,
                        esc(model),
                        esc(axis),
                        foot.len()
                    );
                }
            }
        }
        y += m.models.len() as f64 * bar_h + group_gap;
    }

    let mut ly = bottom + 34.0;
    for (mi, model) in m.models.iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="10" y="{:.2}" width="10" height="10" fill="{color}"/><text x="26" y="{:.2}">{}</text>"#,
            ly - 9.0,
            ly,
            esc(model)
        );
        ly += 16.0;
    }
    let _ = writeln!(
        s,
        r#"<text class="note" x="10" y="{ly:.2}">* p_adjusted &lt; {}</text>"#,
        fmt_num(alpha)
    );
    for (i, (model, axis, flag)) in foot.iter().enumerate() {
        ly += 16.0;
        let _ = writeln!(
            s,
            r#"<text class="footnote" x="10" y="{ly:.2}">[{}] {} / {}: {}</text>"#,
            i + 1,
            esc(model),
            esc(axis),
            esc(flag)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterPoint {
    pub word: String,
    pub x: f64,
    pub y: f64,
    pub polarity: Option<Polarity>,
}

/// Two-axis scatter with quadrant gridlines at zero.
pub fn scatter_svg(points: &[ScatterPoint], x_label: &str, y_label: &str, title: &str) -> String {
    let margin = 60.0;
    let size = 480.0;
    let w = size + 2.0 * margin;
    let h = size + 2.0 * margin;
    let rx = extent(points.iter().map(|p| p.x));
    let ry = extent(points.iter().map(|p| p.y));
    let px = |x: f64| margin + (x + rx) / (2.0 * rx) * size;
    let py = |y: f64| margin + (ry - y) / (2.0 * ry) * size;
    let mut s = open(w, h, title);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" font-size="13" text-anchor="middle">{}</text>"#,
        w / 2.0,
        esc(title)
    );
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{margin:.2}" y="{margin:.2}" width="{size:.2}" height="{size:.2}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line class="grid-zero" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        px(0.0),
        margin,
        px(0.0),
        margin + size
    );
    let _ = writeln!(
        s,
        r##"<line class="grid-zero" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        margin,
        py(0.0),
        margin + size,
        py(0.0)
    );
    for t in [-rx, 0.0, rx] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(t),
            margin + size + 14.0,
            fmt_num(t)
        );
    }
    for t in [-ry, 0.0, ry] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            margin - 4.0,
            py(t) + 4.0,
            fmt_num(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 16.0,
        esc(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        esc(y_label)
    );
    for p in points {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" fill-opacity="0.6" data-word="{}" data-x="{}" data-y="{}"/>"#,
            px(p.x),
            py(p.y),
            polarity_color(p.polarity),
            esc(&p.word),
            fmt_num(p.x),
            fmt_num(p.y)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Antonym words along the cultural axis, colored by polarity. Words in
/// `exclude` are left out of the drawing only.
pub fn alignment_strip_svg(ranking: &AlignmentRanking, pole1: &str, pole2: &str, exclude: &[String]) -> String {
    let mut pts: Vec<StripPoint> = ranking
        .strip_points()
        .into_iter()
        .filter(|p| !exclude.iter().any(|e| e == &p.word))
        .collect();
    pts.sort_by(|a, b| a.position.total_cmp(&b.position).then_with(|| a.word.cmp(&b.word)));
    let margin = 70.0;
    let len = 760.0;
    let w = len + 2.0 * margin;
    let h = 300.0;
    let mid = 170.0;
    let r = extent(pts.iter().map(|p| p.position));
    let px = |x: f64| margin + (x + r) / (2.0 * r) * len;
    let mut s = open(w, h, &format!("antonym alignment: {}", ranking.axis));
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" font-size="13" text-anchor="middle">{} ({})</text>"#,
        w / 2.0,
        esc(&ranking.axis),
        esc(&ranking.model)
    );
    let _ = writeln!(
        s,
        r##"<line class="axis-line" x1="{margin:.2}" y1="{mid:.2}" x2="{:.2}" y2="{mid:.2}" stroke="#333"/>"##,
        margin + len
    );
    let _ = writeln!(
        s,
        r##"<line class="grid-zero" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        px(0.0),
        mid - 120.0,
        px(0.0),
        mid + 20.0
    );
    let _ = writeln!(
        s,
        r#"<text class="pole" x="{:.2}" y="{:.2}" text-anchor="start" font-weight="bold">{}</text>"#,
        margin,
        mid + 40.0,
        esc(pole1)
    );
    let _ = writeln!(
        s,
        r#"<text class="pole" x="{:.2}" y="{:.2}" text-anchor="end" font-weight="bold">{}</text>"#,
        margin + len,
        mid + 40.0,
        esc(pole2)
    );
    for t in [-r, 0.0, r] {
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(t),
            mid + 16.0,
            fmt_num(t)
        );
    }
    for (i, p) in pts.iter().enumerate() {
        let x = px(p.position);
        let color = polarity_color(p.polarity);
        // four label levels keep neighbouring words apart
        let ly = mid - 12.0 - (i % 4) as f64 * 26.0;
        let _ = writeln!(
            s,
            r#"<circle class="word" cx="{x:.2}" cy="{mid:.2}" r="3" fill="{color}" data-word="{}" data-value="{}"/>"#,
            esc(&p.word),
            fmt_num(p.position)
        );
        let _ = writeln!(
            s,
            r#"<text class="word-label" x="{x:.2}" y="{ly:.2}" fill="{color}" transform="rotate(-45 {x:.2} {ly:.2})">{}</text>"#,
            esc(&p.word)
        );
    }
    s.push_str("</svg>\n");
    s
}
