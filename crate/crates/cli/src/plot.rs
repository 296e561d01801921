//! Static log-log line chart of a [`CurveTable`].

use crate::config::Curve;
use crate::curves::CurveTable;
use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;

fn color(c: Curve) -> &'static str {
    match c {
        Curve::QcbTmsv => "#1f77b4",
        Curve::QcbCoherent => "#7f7f7f",
        Curve::OpaExact => "#d62728",
        Curve::OpaGauss => "#ff9896",
        Curve::PcGauss => "#2ca02c",
        Curve::Hom => "#000000",
    }
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Decade-aligned range of `log10` of the positive values.
    fn decades(values: impl Iterator<Item = f64>) -> Axis {
        let (lo, hi) = values
            .filter(|v| *v > 0.0 && v.is_finite())
            .map(f64::log10)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            return Axis { lo: -1.0, hi: 0.0 };
        }
        let (lo, hi) = (lo.floor(), hi.ceil());
        Axis {
            lo,
            hi: if hi > lo { hi } else { lo + 1.0 },
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }
}

pub fn curves_svg(table: &CurveTable) -> String {
    let x_axis = Axis::decades(table.m.iter().map(|&m| m as f64));
    let y_axis = Axis::decades(table.rows.iter().flatten().copied());
    let px = |m: f64| MARGIN + x_axis.frac(m) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - y_axis.frac(v) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    writeln!(s, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#).unwrap();
    for d in x_axis.lo as i32..=x_axis.hi as i32 {
        let x = px(10f64.powi(d));
        writeln!(s, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, y0 + 20.0).unwrap();
    }
    for d in y_axis.lo as i32..=y_axis.hi as i32 {
        let y = py(10f64.powi(d));
        writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, x0 - 8.0, y + 4.0).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">M</text>"#, WIDTH / 2.0, HEIGHT - 16.0).unwrap();
    writeln!(s, r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">P_e</text>"#, HEIGHT / 2.0, HEIGHT / 2.0).unwrap();

    for (j, &c) in table.columns.iter().enumerate() {
        let points: Vec<String> = table
            .m
            .iter()
            .zip(&table.rows)
            .filter(|(_, row)| row[j] > 0.0)
            .map(|(&m, row)| format!("{:.2},{:.2}", px(m as f64), py(row[j])))
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.join(" "),
            color(c)
        )
        .unwrap();
        let ly = MARGIN + 16.0 * j as f64;
        writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"/>"#, x1 - 150.0, x1 - 126.0, color(c)).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x1 - 120.0, ly + 4.0, c.column()).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
