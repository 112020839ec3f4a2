//! Static SVG figures: pairwise heatmap, cluster scatter, contrast box plots.

use std::fmt::Write;

use mtese_core::classify::HeatmapGrid;
use mtese_core::cluster::ClusteringReport;
use mtese_core::stats::ContrastResult;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];
const FONT: &str = "font-family=\"sans-serif\"";

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn text(out: &mut String, x: f64, y: f64, size: u32, anchor: &str, s: &str) {
    writeln!(
        out,
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"{size}\" text-anchor=\"{anchor}\" {FONT}>{}</text>",
        escape(s)
    )
    .unwrap();
}

/// White at chance (0.5) to dark blue at 1.0.
fn heat_color(v: f64) -> String {
    let t = ((v - 0.5) / 0.5).clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

/// Source × source grid of averaged pairwise accuracy.
pub fn heatmap(grid: &HeatmapGrid) -> String {
    let n = grid.codes.len() as f64;
    let cell = 48.0;
    let (left, top) = (70.0, 60.0);
    let (w, h) = (left + n * cell + 90.0, top + n * cell + 40.0);
    let mut s = open(w, h);
    text(&mut s, w / 2.0, 24.0, 15, "middle", "Pairwise classification accuracy (ACC_avg)");
    for (i, code) in grid.codes.iter().enumerate() {
        let c = i as f64;
        text(&mut s, left - 8.0, top + (c + 0.5) * cell + 4.0, 12, "end", code);
        text(&mut s, left + (c + 0.5) * cell, top - 8.0, 12, "middle", code);
        for (j, v) in grid.acc[i].iter().enumerate() {
            let (x, y) = (left + j as f64 * cell, top + c * cell);
            let (fill, label) = match v {
                Some(v) => (heat_color(*v), format!("{v:.2}")),
                None => ("#dddddd".to_string(), String::new()),
            };
            writeln!(
                s,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell}\" height=\"{cell}\" fill=\"{fill}\" stroke=\"white\"/>"
            )
            .unwrap();
            if let Some(v) = v {
                let ink = if *v > 0.8 { "white" } else { "black" };
                writeln!(
                    s,
                    "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{ink}\" {FONT}>{label}</text>",
                    x + cell / 2.0,
                    y + cell / 2.0 + 4.0
                )
                .unwrap();
            }
        }
    }
    // colour bar
    let bx = left + n * cell + 25.0;
    for k in 0..=10 {
        let v = 1.0 - k as f64 * 0.05;
        let y = top + k as f64 * (n * cell / 11.0);
        writeln!(
            s,
            "<rect x=\"{bx:.1}\" y=\"{y:.1}\" width=\"16\" height=\"{:.1}\" fill=\"{}\"/>",
            n * cell / 11.0,
            heat_color(v)
        )
        .unwrap();
    }
    text(&mut s, bx + 20.0, top + 10.0, 10, "start", "1.0");
    text(&mut s, bx + 20.0, top + n * cell, 10, "start", "0.5");
    s.push_str("</svg>\n");
    s
}

fn marker(s: &mut String, shape: usize, x: f64, y: f64, color: &str) {
    match shape % 3 {
        0 => writeln!(s, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"4\" fill=\"{color}\" fill-opacity=\"0.8\"/>"),
        1 => writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"7\" height=\"7\" fill=\"{color}\" fill-opacity=\"0.8\"/>",
            x - 3.5,
            y - 3.5
        ),
        _ => writeln!(
            s,
            "<path d=\"M{x:.1} {:.1} L{:.1} {:.1} L{:.1} {:.1} Z\" fill=\"{color}\" fill-opacity=\"0.8\"/>",
            y - 4.5,
            x + 4.5,
            y + 3.5,
            x - 4.5,
            y + 3.5
        ),
    }
    .unwrap();
}

/// Documents on the first two principal components; colour is the k-means
/// cluster, marker shape the true class. The projection is for display only.
pub fn scatter(report: &ClusteringReport) -> String {
    let (w, h) = (640.0, 520.0);
    let (left, top, pw, ph) = (60.0, 50.0, 420.0, 420.0);
    let mut s = open(w, h);
    text(
        &mut s,
        w / 2.0,
        22.0,
        14,
        "middle",
        &format!("k-means clusters (k = {}), ARI = {:.3}", report.config.k, report.ari),
    );
    text(&mut s, left + pw / 2.0, top + ph + 36.0, 11, "middle", "PC1 (PCA projection, display only)");
    writeln!(
        s,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#999\"/>"
    )
    .unwrap();
    let pts = &report.projection;
    let range = |k: usize| {
        let lo = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        if pts.is_empty() || hi <= lo {
            (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0)
        } else {
            (lo, hi)
        }
    };
    let ((x0, x1), (y0, y1)) = (range(0), range(1));
    for ((p, &c), &t) in pts.iter().zip(&report.assignments).zip(&report.truth) {
        let x = left + 10.0 + (p[0] - x0) / (x1 - x0) * (pw - 20.0);
        let y = top + ph - 10.0 - (p[1] - y0) / (y1 - y0) * (ph - 20.0);
        marker(&mut s, t, x, y, PALETTE[c % PALETTE.len()]);
    }
    let lx = left + pw + 20.0;
    text(&mut s, lx, top + 10.0, 12, "start", "true class");
    for (i, name) in report.class_names.iter().enumerate() {
        let y = top + 30.0 + i as f64 * 20.0;
        marker(&mut s, i, lx + 6.0, y - 4.0, "#444444");
        text(&mut s, lx + 18.0, y, 11, "start", name);
    }
    let base = top + 50.0 + report.class_names.len() as f64 * 20.0;
    text(&mut s, lx, base, 12, "start", "cluster");
    for c in 0..report.config.k {
        let y = base + 20.0 + c as f64 * 20.0;
        marker(&mut s, 0, lx + 6.0, y - 4.0, PALETTE[c % PALETTE.len()]);
        text(&mut s, lx + 18.0, y, 11, "start", &format!("cluster {c}"));
    }
    s.push_str("</svg>\n");
    s
}

/// Box plot of one feature per group: whiskers at min/max, box at the
/// quartiles, line at the median.
pub fn boxplot(r: &ContrastResult) -> String {
    let n = r.groups.len() as f64;
    let slot = 110.0;
    let (left, top, ph) = (70.0, 60.0, 300.0);
    let (w, h) = (left + n * slot + 30.0, top + ph + 60.0);
    let mut s = open(w, h);
    text(&mut s, w / 2.0, 22.0, 14, "middle", &r.feature);
    text(
        &mut s,
        w / 2.0,
        42.0,
        11,
        "middle",
        &format!("{}: {} = {:.3}, p = {:.3e}", r.test.as_str(), r.test.statistic_name(), r.statistic, r.p_value),
    );
    let lo = r.groups.iter().map(|g| g.min).fold(f64::INFINITY, f64::min);
    let hi = r.groups.iter().map(|g| g.max).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    let y = |v: f64| top + ph - (v - lo) / (hi - lo) * ph;
    writeln!(s, "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{}\" stroke=\"#999\"/>", top + ph).unwrap();
    for v in [hi, (hi + lo) / 2.0, lo] {
        text(&mut s, left - 6.0, y(v) + 4.0, 10, "end", &format!("{v:.3}"));
    }
    for (i, g) in r.groups.iter().enumerate() {
        let cx = left + (i as f64 + 0.5) * slot;
        let color = PALETTE[i % PALETTE.len()];
        writeln!(
            s,
            "<line x1=\"{cx:.1}\" y1=\"{:.1}\" x2=\"{cx:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>",
            y(g.max),
            y(g.min)
        )
        .unwrap();
        for v in [g.min, g.max] {
            writeln!(
                s,
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>",
                cx - 12.0,
                y(v),
                cx + 12.0,
                y(v)
            )
            .unwrap();
        }
        writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"50\" height=\"{:.1}\" fill=\"{color}\" fill-opacity=\"0.35\" stroke=\"{color}\"/>",
            cx - 25.0,
            y(g.q3),
            (y(g.q1) - y(g.q3)).max(0.5)
        )
        .unwrap();
        writeln!(
            s,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            cx - 25.0,
            y(g.median),
            cx + 25.0,
            y(g.median)
        )
        .unwrap();
        text(&mut s, cx, top + ph + 20.0, 12, "middle", &format!("{} (n={})", g.group, g.n));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
    }

    #[test]
    fn heat_scale_ends() {
        assert_eq!(heat_color(0.5), "#ffffff");
        assert_eq!(heat_color(0.2), "#ffffff");
        assert_eq!(heat_color(1.0), "#08306b");
    }

    #[test]
    fn heatmap_has_one_cell_per_pair() {
        let grid = HeatmapGrid {
            codes: vec!["A".into(), "B".into()],
            acc: vec![vec![None, Some(0.9)], vec![Some(0.9), None]],
        };
        let svg = heatmap(&grid);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches(">0.90<").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
