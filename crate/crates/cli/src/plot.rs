//! Static SVG renderings of a diagram, its barcode and its staircase.

use std::fmt::Write;

use hoctop::analytics::{barcode, staircase};

use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Diagram,
    Barcode,
    Staircase,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::Diagram, PlotKind::Barcode, PlotKind::Staircase];

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::Diagram => "diagram",
            PlotKind::Barcode => "barcode",
            PlotKind::Staircase => "staircase",
        }
    }
}

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// One SVG document per requested kind, in the order given.
pub fn render_plots(report: &RunReport, kinds: &[PlotKind]) -> Vec<(PlotKind, String)> {
    kinds
        .iter()
        .map(|&kind| {
            let svg = match kind {
                PlotKind::Diagram => render_diagram(report),
                PlotKind::Barcode => render_barcode(report),
                PlotKind::Staircase => render_staircase(report),
            };
            (kind, svg)
        })
        .collect()
}

/// Maps data coordinates into the plot area, with ranges padded by 5%.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Frame { x: pad(x), y: pad(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn pad((lo, hi): (f64, f64)) -> (f64, f64) {
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn open(title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#, WIDTH / 2.0)
        .unwrap();
    s
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

fn no_holes(title: &str) -> String {
    let mut s = open(title);
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">no holes</text>"#,
        WIDTH / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    close(s)
}

fn axes(s: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (f.px(f.x.0), f.px(f.x.1), f.py(f.y.0), f.py(f.y.1));
    writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#).unwrap();
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{text}</text>"#)
            .unwrap();
    };
    label(s, x0, y0 + 14.0, "start", format!("{:.3}", f.x.0));
    label(s, x1, y0 + 14.0, "end", format!("{:.3}", f.x.1));
    label(s, x0 - 4.0, y0, "end", format!("{:.3}", f.y.0));
    label(s, x0 - 4.0, y1 + 8.0, "end", format!("{:.3}", f.y.1));
    label(s, (x0 + x1) / 2.0, y0 + 30.0, "middle", x_label.to_string());
    label(s, 12.0, (y0 + y1) / 2.0, "start", y_label.to_string());
}

fn render_diagram(report: &RunReport) -> String {
    let d = report.diagram();
    if d.off_diagonal().is_empty() {
        return no_holes("persistence diagram");
    }
    let lo = d.pairs().iter().map(|p| p.birth).fold(f64::INFINITY, f64::min).min(0.0);
    let hi = d.pairs().iter().map(|p| p.death).fold(0.0, f64::max);
    let f = Frame::new((lo, hi), (lo, hi));
    let mut s = open("persistence diagram");
    axes(&mut s, &f, "birth", "death");
    writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        f.px(f.x.0),
        f.py(f.x.0),
        f.px(f.x.1),
        f.py(f.x.1)
    )
    .unwrap();
    for p in d.pairs() {
        writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f5fa8"/>"##, f.px(p.birth), f.py(p.death)).unwrap();
    }
    close(s)
}

fn render_barcode(report: &RunReport) -> String {
    let bars = barcode(&report.diagram().off_diagonal()).bars;
    if bars.is_empty() {
        return no_holes("persistence barcode");
    }
    let longest = bars[0];
    let f = Frame::new((0.0, longest), (0.0, bars.len() as f64));
    let mut s = open("persistence barcode");
    axes(&mut s, &f, "death - birth", "bar");
    let slot = (f.py(0.0) - f.py(1.0)).abs();
    for (i, &len) in bars.iter().enumerate() {
        // longest bar on top
        let y = f.py((bars.len() - i) as f64) + 0.15 * slot;
        writeln!(
            s,
            r##"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#1f5fa8"/>"##,
            f.px(0.0),
            f.px(len) - f.px(0.0),
            0.7 * slot
        )
        .unwrap();
    }
    close(s)
}

fn render_staircase(report: &RunReport) -> String {
    let stairs = staircase(&report.diagram());
    let Some((lo, hi)) = stairs.range() else {
        return no_holes("persistence staircase");
    };
    let top = stairs.counts.iter().copied().max().unwrap_or(0) as f64;
    let f = Frame::new((lo, hi), (0.0, top.max(1.0)));
    let mut s = open("persistence staircase");
    axes(&mut s, &f, "alpha", "holes");
    let mut path = format!("M {:.2} {:.2}", f.px(lo), f.py(0.0));
    for (a, b, count) in stairs.intervals() {
        let y = f.py(count as f64);
        write!(path, " L {:.2} {y:.2} L {:.2} {y:.2}", f.px(a), f.px(b)).unwrap();
    }
    write!(path, " L {:.2} {:.2}", f.px(hi), f.py(0.0)).unwrap();
    writeln!(s, r##"<path d="{path}" fill="none" stroke="#1f5fa8" stroke-width="2"/>"##).unwrap();
    close(s)
}
