//! Output formatting: test reports in human, CSV and JSON-lines form,
//! plot-data tables for simulation studies, and the scenario listing.

use netchisq::{ProbabilityPlotTable, ScenarioParams, StudySummary, TestOutcome};
use serde::Serialize;
use std::io::Write;

/// Report format for the `test` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Aligned table with 4-decimal p-values.
    Human,
    /// One CSV row per result, full-precision numbers.
    Csv,
    /// One JSON object per line, full-precision numbers.
    JsonLines,
}

/// One line of a test report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub method: &'static str,
    /// What the row refers to: `pair` for uplift comparisons,
    /// `subgroup1`/`subgroup2` for the per-campaign homogeneity test.
    pub scope: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub dof: u32,
    pub applicable: bool,
    pub significant: bool,
    pub notes: Vec<String>,
}

impl ReportRow {
    pub fn from_outcome(outcome: &TestOutcome, scope: &'static str, alpha: f64) -> Self {
        ReportRow {
            method: outcome.method.id(),
            scope,
            statistic: outcome.statistic,
            p_value: outcome.p_value,
            dof: outcome.dof,
            applicable: outcome.applicable,
            significant: outcome.p_value < alpha,
            notes: outcome.notes.clone(),
        }
    }
}

/// Formats `x` with at least six significant digits, preferring plain
/// decimal notation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&magnitude) {
        return format!("{x:.6e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Renders rows in the requested format.
pub fn render_rows<W: Write>(
    mut w: W,
    rows: &[ReportRow],
    format: OutputFormat,
    alpha: f64,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Human => {
            writeln!(
                w,
                "{:<11} {:<9} {:>14} {:>9} {:>4} {:>10}  verdict (alpha={alpha})",
                "method", "scope", "statistic", "p-value", "dof", "applicable"
            )?;
            for row in rows {
                writeln!(
                    w,
                    "{:<11} {:<9} {:>14} {:>9.4} {:>4} {:>10}  {}",
                    row.method,
                    row.scope,
                    format_sig6(row.statistic),
                    row.p_value,
                    row.dof,
                    if row.applicable { "yes" } else { "no" },
                    if row.significant {
                        "significant"
                    } else {
                        "not significant"
                    },
                )?;
                for note in &row.notes {
                    writeln!(w, "{:<11} note: {note}", "")?;
                }
            }
            Ok(())
        }
        OutputFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record([
                "method",
                "scope",
                "statistic",
                "p_value",
                "dof",
                "applicable",
                "significant",
                "notes",
            ])
            .map_err(io_from_csv)?;
            for row in rows {
                out.write_record([
                    row.method,
                    row.scope,
                    &row.statistic.to_string(),
                    &row.p_value.to_string(),
                    &row.dof.to_string(),
                    &row.applicable.to_string(),
                    &row.significant.to_string(),
                    &row.notes.join("; "),
                ])
                .map_err(io_from_csv)?;
            }
            out.flush()
        }
        OutputFormat::JsonLines => {
            for row in rows {
                let line = serde_json::to_string(row)?;
                writeln!(w, "{line}")?;
            }
            Ok(())
        }
    }
}

fn io_from_csv(err: csv::Error) -> std::io::Error {
    std::io::Error::other(err)
}

fn opt_p(p: Option<f64>) -> String {
    match p {
        Some(v) => v.to_string(),
        None => "NA".to_string(),
    }
}

/// Writes the probability-plot table as CSV, sorted by the net
/// chi-square p-value, followed by a summary block in `#` comment lines.
pub fn render_plot_csv<W: Write>(
    mut w: W,
    table: &ProbabilityPlotTable,
    summary: &StudySummary,
    scenario_label: &str,
) -> std::io::Result<()> {
    writeln!(
        w,
        "rank,frac,p_netchisq,p_netchisq1,p_netchisq2,p_contrast,p_tnetsq"
    )?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.rank,
            row.frac,
            opt_p(row.p_values.net_chi_sq),
            opt_p(row.p_values.net_chi_sq_1),
            opt_p(row.p_values.net_chi_sq_2),
            opt_p(row.p_values.contrast),
            opt_p(row.p_values.t_net_sq),
        )?;
    }
    writeln!(
        w,
        "# scenario={scenario_label} replicates={} seed={} alpha={}",
        table.replicates, table.seed, summary.alpha
    )?;
    writeln!(w, "# method,rejection_rate,evaluated,missing,ks_distance")?;
    for m in &summary.methods {
        writeln!(
            w,
            "# {},{},{},{},{}",
            m.method, m.rejection_rate, m.evaluated, m.missing, m.ks_distance
        )?;
    }
    Ok(())
}

/// Lists scenarios as `label<two spaces>n1,n2,k1,k2,pT1,pT2,pC1,pC2`;
/// the second column is valid `--scenario` input.
pub fn render_scenarios<W: Write>(mut w: W, scenarios: &[ScenarioParams]) -> std::io::Result<()> {
    for sc in scenarios {
        let [n1, n2] = sc.target_sizes();
        let [k1, k2] = sc.control_sizes();
        let [pt1, pt2] = sc.target_rates();
        let [pc1, pc2] = sc.control_rates();
        writeln!(
            w,
            "{}  {n1},{n2},{k1},{k2},{pt1},{pt2},{pc1},{pc2}",
            sc.label()
        )?;
    }
    Ok(())
}

/// Human-format study summary printed to stderr by `simulate`.
pub fn summary_sketch(summary: &StudySummary) -> String {
    let mut s = format!("rejection rates at alpha={}, KS distance:\n", summary.alpha);
    for m in &summary.methods {
        s.push_str(&format!(
            "  {:<10} rate={:.4} ks={:.4} missing={}\n",
            m.method.id(),
            m.rejection_rate,
            m.ks_distance,
            m.missing
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(0.0), "0.000000");
        assert_eq!(format_sig6(0.7643001), "0.764300");
        assert_eq!(format_sig6(3.8661), "3.86610");
        assert_eq!(format_sig6(0.001234567), "0.00123457");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1.25e-7), "1.250000e-7");
    }

    #[test]
    fn csv_report_escapes_nothing_unexpected() {
        let rows = [ReportRow {
            method: "netchisq",
            scope: "pair",
            statistic: 0.5,
            p_value: 0.25,
            dof: 1,
            applicable: true,
            significant: false,
            notes: vec![],
        }];
        let mut buf = Vec::new();
        render_rows(&mut buf, &rows, OutputFormat::Csv, 0.05).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("method,scope,statistic,"));
        assert!(text.contains("netchisq,pair,0.5,0.25,1,true,false,"));
    }

    #[test]
    fn json_lines_parse_back() {
        let rows = [ReportRow {
            method: "tnetsq",
            scope: "pair",
            statistic: 3.4672,
            p_value: 0.0626,
            dof: 1,
            applicable: true,
            significant: false,
            notes: vec!["a note".into()],
        }];
        let mut buf = Vec::new();
        render_rows(&mut buf, &rows, OutputFormat::JsonLines, 0.05).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(value["method"], "tnetsq");
        assert_eq!(value["statistic"], 3.4672);
    }
}
