//! Log-log SVG plot of an inflation curve: the bracket of r(ε) − r(0) as a
//! shaded band, with the fitted power law when available.

use std::fmt::Write;

use jsr_core::inflation::{HolderFit, InflationCurve};

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Decade-aligned log10 range covering the data.
    fn covering(values: impl Iterator<Item = f64>) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
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

pub fn inflation_plot(curve: &InflationCurve, fit: Option<&HolderFit>) -> String {
    // lower side against the largest r(0), upper side against the smallest
    let base = &curve.base_bracket;
    let rows: Vec<(f64, f64, f64)> = curve
        .grid
        .iter()
        .zip(&curve.values)
        .filter(|(&e, _)| e > 0.0)
        .map(|(&e, b)| (e, b.lower - base.upper, b.upper - base.lower))
        .filter(|r| r.2 > 0.0)
        .collect();
    let floor = rows
        .iter()
        .flat_map(|r| [r.1, r.2])
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let clamp = |v: f64| if v > 0.0 { v } else { floor };

    let xa = Axis::covering(rows.iter().map(|r| r.0));
    let ya = Axis::covering(rows.iter().flat_map(|r| [clamp(r.1), r.2]));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + pw * xa.frac(x);
    let py = |y: f64| TOP + ph * (1.0 - ya.frac(y));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    for d in (xa.lo as i32)..=(xa.hi as i32) {
        let x = px(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"##,
            TOP + ph,
            TOP + ph + 18.0
        );
    }
    for d in (ya.lo as i32)..=(ya.hi as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">ε</text>"#,
        LEFT + pw / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">r(ε) − r(0)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    if !rows.is_empty() {
        let mut band = String::new();
        for r in &rows {
            let _ = write!(band, "{:.2},{:.2} ", px(r.0), py(r.2));
        }
        for r in rows.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", px(r.0), py(clamp(r.1)));
        }
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#4a7ebb" fill-opacity="0.25" stroke="none"/>"##,
            band.trim_end()
        );
        for (pick, colour) in [(0usize, "#1f4e89"), (1, "#4a7ebb")] {
            let pts: Vec<String> = rows
                .iter()
                .map(|r| {
                    let y = if pick == 0 { r.2 } else { clamp(r.1) };
                    format!("{:.2},{:.2}", px(r.0), py(y))
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
    }
    if let Some(f) = fit {
        let (a, b) = f.fit_window;
        let y = |e: f64| f.c_hat * e.powf(f.alpha_hat);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5" stroke-dasharray="5,3"/>"##,
            px(a),
            py(y(a)),
            px(b),
            py(y(b))
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">α̂ = {:.3}</text>"##,
            LEFT + 10.0,
            TOP + 16.0,
            f.alpha_hat
        );
    }
    s.push_str("</svg>\n");
    s
}
