//! Noise threshold as a function of the round budget.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{q_from_alpha, Row};
use crate::bounds::{lmko_threshold, threshold_report, ThresholdInputs};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: u64,
    pub a: f64,
    pub f: f64,
    pub g: f64,
    pub w: f64,
    pub noise_threshold: f64,
    /// Comparison thresholds `(1/k) alpha` for `k = 2` and `k = 1`.
    pub lmko_k2: f64,
    pub lmko_k1: f64,
    pub feasible: bool,
}

/// `per_decade` log-spaced integers from `lo` to `hi`, both included.
pub fn log_grid(lo: u64, hi: u64, per_decade: u32) -> Result<Vec<u64>> {
    if lo == 0 || hi < lo || per_decade == 0 {
        return Err(invalid(
            "grid",
            format!("need 0 < lo <= hi and per_decade > 0, got ({lo}, {hi}, {per_decade})"),
        ));
    }
    let (l, h) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((h - l) * per_decade as f64).round().max(1.0) as u32;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(l + (h - l) * i as f64 / steps as f64).round() as u64)
        .collect();
    out.dedup();
    Ok(out)
}

/// One row per `N`, in the given order.
pub fn threshold_curve(alpha: f64, delta: f64, epsilon: f64, ns: &[u64]) -> Result<Vec<CurveRow>> {
    let q = q_from_alpha(alpha)?;
    let (k2, k1) = (lmko_threshold(2, q)?, lmko_threshold(1, q)?);
    ns.iter()
        .map(|&n| {
            let r = threshold_report(ThresholdInputs::new(n, alpha, delta, epsilon)?)?;
            Ok(CurveRow {
                n,
                a: r.a,
                f: r.f,
                g: r.g,
                w: r.w,
                noise_threshold: r.noise_threshold,
                lmko_k2: k2,
                lmko_k1: k1,
                feasible: r.feasible(),
            })
        })
        .collect()
}

/// Standard rows: a row passes when its threshold is below `alpha` and
/// above that of the preceding row.
pub(crate) fn curve_rows(rows: &[CurveRow], alpha: f64, delta: f64, epsilon: f64) -> Vec<Row> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let rising = i == 0 || r.noise_threshold > rows[i - 1].noise_threshold;
            Row {
                experiment: "threshold-curve".into(),
                n_rounds: Some(r.n),
                alpha: Some(alpha),
                delta: Some(delta),
                epsilon: Some(epsilon),
                w: Some(r.w),
                p_noise: Some(r.noise_threshold),
                strategy: "closed-form".into(),
                trials: 0,
                successes: 0,
                estimate: r.noise_threshold,
                ci_low: None,
                ci_high: None,
                pass: Some(rising && r.noise_threshold < alpha),
            }
        })
        .collect()
}

/// Static line plot of the noise threshold and the comparison levels
/// against `log10 N`.
pub fn curve_svg(rows: &[CurveRow], alpha: f64) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if rows.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
    let (x0, x1) = (xs[0].min(xs[xs.len() - 1]), xs[0].max(xs[xs.len() - 1]));
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let y_lo = rows
        .iter()
        .map(|r| r.noise_threshold)
        .fold(alpha, f64::min)
        .min(rows[0].lmko_k2)
        .max(0.0);
    let y_hi = alpha * 1.05;
    let px = |x: f64| PAD + (x - x0) / span * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * PAD);

    let _ = writeln!(
        svg,
        r##"<path d="M{PAD} {PAD}V{b}H{r}" fill="none" stroke="#444"/>"##,
        b = H - PAD,
        r = W - PAD
    );
    let mut series = |label: &str, colour: &str, ys: Vec<f64>, dash: bool| {
        let points: Vec<String> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y.max(y_lo))))
            .collect();
        let dash = if dash {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"{dash}><title>{label}</title></polyline>"#,
            points.join(" ")
        );
    };
    series(
        "noise threshold",
        "#1f77b4",
        rows.iter().map(|r| r.noise_threshold).collect(),
        false,
    );
    series("alpha", "#000000", vec![alpha; rows.len()], true);
    series(
        "alpha/2",
        "#d62728",
        rows.iter().map(|r| r.lmko_k2).collect(),
        true,
    );

    for (i, r) in rows
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 0 || *i == rows.len() - 1)
    {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{:.1e}</text>"#,
            px(xs[i]),
            H - PAD + 15.0,
            r.n as f64
        );
    }
    for y in [y_lo, (y_lo + alpha) / 2.0, alpha] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{y:.4}</text>"#,
            PAD - 5.0,
            py(y) + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">rounds N (log scale)</text>"#,
        W / 2.0,
        H - 10.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = log_grid(100_000, 100_000_000, 4).unwrap();
        assert_eq!(
            (g[0], *g.last().unwrap(), g.len()),
            (100_000, 100_000_000, 13)
        );
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(0, 10, 1).is_err());
    }

    #[test]
    fn converges_to_alpha_from_below() {
        let ns = log_grid(100_000, 100_000_000, 4).unwrap();
        let rows = threshold_curve(0.25, 0.05, 0.0, &ns).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[0].noise_threshold < w[1].noise_threshold));
        assert!(rows.iter().all(|r| r.noise_threshold < 0.25));
        let at_1e7 = threshold_curve(0.25, 0.05, 0.0, &[10_000_000]).unwrap()[0];
        assert!(at_1e7.noise_threshold >= 0.24);
        assert!((at_1e7.noise_threshold - 0.242_988_507_842_611_37).abs() < 1e-12);
        assert!((rows[0].lmko_k2 - 0.125).abs() < 1e-15 && (rows[0].lmko_k1 - 0.25).abs() < 1e-15);
        assert!(curve_rows(&rows, 0.25, 0.05, 0.0)
            .iter()
            .all(|r| r.pass == Some(true)));
    }

    #[test]
    fn svg_is_well_formed() {
        let rows = threshold_curve(0.25, 0.05, 0.0, &[100_000, 1_000_000, 10_000_000]).unwrap();
        let svg = curve_svg(&rows, 0.25);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg, curve_svg(&rows, 0.25));
    }
}
