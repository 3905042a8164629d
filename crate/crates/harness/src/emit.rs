//! Result emission: the per-block CSV and the three-line SVG profit
//! chart with percentile bands for multi-seed cells. Both outputs are
//! byte-stable for fixed inputs.

use std::io::{self, Write};
use std::path::Path;

use crate::scenario::RunResult;

/// Significant digits in emitted decimals.
const SIG_DIGITS: i32 = 12;

/// Round to 12 significant digits and print the shortest decimal that
/// round-trips, so output is compact and byte-stable.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let shift = SIG_DIGITS - 1 - magnitude;
    let rounded = if (-300..=300).contains(&shift) {
        let factor = 10f64.powi(shift);
        (x * factor).round() / factor
    } else {
        x
    };
    format!("{rounded}")
}

/// CSV header for run results.
pub const CSV_HEADER: &str =
    "block,spot,coinalg_profit,adversary_profit,baseline_profit,coinalg_traded,adversary_action";

/// Serialize a run to CSV.
pub fn render_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(result.rows.len() * 64 + 80);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.block,
            format_sig(row.spot),
            format_sig(row.coinalg_profit),
            format_sig(row.adversary_profit),
            format_sig(row.baseline_profit),
            u8::from(row.coinalg_traded),
            row.adversary_action,
        ));
    }
    out
}

/// Write the CSV to a file.
pub fn write_csv(result: &RunResult, path: &Path) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_csv(result).as_bytes())
}

// ---------------------------------------------------------------------
// SVG profit chart
// ---------------------------------------------------------------------

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 48.0;

const COLOR_COINALG: &str = "#1f77b4";
const COLOR_ADVERSARY: &str = "#d62728";
const COLOR_BASELINE: &str = "#2ca02c";

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    mean: Vec<f64>,
    band: Option<(Vec<f64>, Vec<f64>)>, // (p10, p90)
}

/// Render the three-line profit chart. With several results (seeds), the
/// lines are per-block means and shaded bands span the 10th to 90th
/// percentile across seeds.
pub fn render_plot(results: &[RunResult]) -> String {
    assert!(!results.is_empty(), "need at least one result to plot");
    let n_blocks = results.iter().map(|r| r.rows.len()).min().unwrap_or(0);
    let blocks: Vec<u64> = results[0].rows[..n_blocks]
        .iter()
        .map(|r| r.block)
        .collect();

    let collect = |f: &dyn Fn(&RunResult, usize) -> f64| -> Vec<Vec<f64>> {
        (0..n_blocks)
            .map(|i| results.iter().map(|r| f(r, i)).collect())
            .collect()
    };
    let coinalg = collect(&|r, i| r.rows[i].coinalg_profit);
    let adversary = collect(&|r, i| r.rows[i].adversary_profit);
    let baseline = collect(&|r, i| r.rows[i].baseline_profit);

    let banded = results.len() > 1;
    let series = [
        make_series("coinalg", COLOR_COINALG, &coinalg, banded),
        make_series("adversary", COLOR_ADVERSARY, &adversary, banded),
        make_series("baseline", COLOR_BASELINE, &baseline, banded),
    ];

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in &series {
        for &v in &s.mean {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
        if let Some((lo, hi)) = &s.band {
            for &v in lo.iter().chain(hi) {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min).abs() < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let x_min = *blocks.first().unwrap_or(&0) as f64;
    let x_max = *blocks.last().unwrap_or(&1) as f64;
    let x_span = (x_max - x_min).max(1.0);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |b: f64| MARGIN_LEFT + (b - x_min) / x_span * plot_w;
    let to_y = |v: f64| MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes and ticks.
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    ));
    for i in 0..=5 {
        let v = y_min + (y_max - y_min) * i as f64 / 5.0;
        let y = to_y(v);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n",
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            y + 4.0,
            format_tick(v)
        ));
        let b = x_min + x_span * i as f64 / 5.0;
        let x = to_x(b);
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 18.0,
            format_tick(b)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">block</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">profit (USD)</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // Bands first, lines on top.
    for s in &series {
        if let Some((lo, hi)) = &s.band {
            let mut points = String::new();
            for (i, &b) in blocks.iter().enumerate() {
                points.push_str(&format!("{:.2},{:.2} ", to_x(b as f64), to_y(hi[i])));
            }
            for (i, &b) in blocks.iter().enumerate().rev() {
                points.push_str(&format!("{:.2},{:.2} ", to_x(b as f64), to_y(lo[i])));
            }
            svg.push_str(&format!(
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                points.trim_end(),
                s.color
            ));
        }
    }
    for s in &series {
        let mut points = String::new();
        for (i, &b) in blocks.iter().enumerate() {
            points.push_str(&format!("{:.2},{:.2} ", to_x(b as f64), to_y(s.mean[i])));
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            points.trim_end(),
            s.color
        ));
    }

    // Legend.
    for (i, s) in series.iter().enumerate() {
        let x = MARGIN_LEFT + 12.0 + i as f64 * 150.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"22\" x2=\"{:.2}\" y2=\"22\" stroke=\"{}\" stroke-width=\"3\"/>\n",
            x + 22.0,
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"26\" font-size=\"13\">{}</text>\n",
            x + 28.0,
            s.label
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

/// Write the SVG chart to a file.
pub fn write_plot(results: &[RunResult], path: &Path) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_plot(results).as_bytes())
}

fn make_series<'a>(
    label: &'a str,
    color: &'a str,
    per_block: &[Vec<f64>],
    banded: bool,
) -> Series<'a> {
    let mean = per_block
        .iter()
        .map(|vals| vals.iter().sum::<f64>() / vals.len().max(1) as f64)
        .collect();
    let band = banded.then(|| {
        let lo = per_block.iter().map(|v| percentile(v, 0.10)).collect();
        let hi = per_block.iter().map(|v| percentile(v, 0.90)).collect();
        (lo, hi)
    });
    Series {
        label,
        color,
        mean,
        band,
    }
}

fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite profit values"));
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((q * sorted.len() as f64).ceil() as usize).saturating_sub(1);
    sorted[idx.min(sorted.len() - 1)]
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1e6 || a < 1e-3 {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{AdversaryAction, BlockRow, RunSummary};

    fn result(profit_scale: f64) -> RunResult {
        let rows = (0..5u64)
            .map(|block| BlockRow {
                block,
                spot: 100.0 + block as f64,
                coinalg_profit: profit_scale * block as f64,
                adversary_profit: 0.5 * block as f64,
                baseline_profit: 1.5 * block as f64,
                coinalg_traded: block % 2 == 0,
                adversary_action: AdversaryAction::None,
            })
            .collect::<Vec<_>>();
        let last = rows.last().unwrap().clone();
        RunResult {
            summary: RunSummary {
                final_coinalg_profit: last.coinalg_profit,
                final_adversary_profit: last.adversary_profit,
                final_baseline_profit: last.baseline_profit,
                profit_reduction: last.baseline_profit - last.coinalg_profit,
                coinalg_trades: 3,
                adversary_trades: 0,
                abstentions: 0,
            },
            rows,
            wrapper_audit: None,
        }
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(100.0), "100");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-12345.678901234567), "-12345.6789012");
        assert_eq!(format_sig(1.23456789012345e-7), "0.000000123456789012");
    }

    #[test]
    fn csv_has_header_and_one_row_per_block() {
        let csv = render_csv(&result(1.0));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,100,0,0,0,1,none"));
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut r = result(1.0);
        r.rows.clear();
        let csv = render_csv(&r);
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_is_byte_stable() {
        assert_eq!(render_csv(&result(1.0)), render_csv(&result(1.0)));
    }

    #[test]
    fn single_run_plot_has_three_lines_no_band() {
        let svg = render_plot(&[result(1.0)]);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 0);
        assert!(svg.contains("coinalg"));
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn multi_seed_plot_is_banded() {
        let results = vec![result(1.0), result(1.2), result(0.8)];
        let svg = render_plot(&results);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
    }

    #[test]
    fn percentile_bounds() {
        let v = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        assert_eq!(percentile(&v, 0.10), 1.0);
        assert_eq!(percentile(&v, 0.90), 9.0);
        assert_eq!(percentile(&v, 1.0), 10.0);
    }
}
