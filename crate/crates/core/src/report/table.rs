use serde::{Deserialize, Serialize};

use crate::curve::AcceptabilityTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

impl TableFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Markdown => "md",
            TableFormat::Json => "json",
        }
    }
}

/// Shortest decimal form of a threshold, with `-0` printed as `0`.
pub(crate) fn fmt_threshold(t: f64) -> String {
    if t == 0.0 {
        "0".into()
    } else {
        t.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Render a table. CSV uses CRLF line endings; probabilities are printed
/// with six decimals in CSV and Markdown and at full precision in JSON.
pub fn render_table(table: &AcceptabilityTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut out = String::from("acceptability_threshold,probability,formatted\r\n");
            for row in &table.rows {
                out.push_str(&format!(
                    "{},{:.6},{}\r\n",
                    csv_field(&fmt_threshold(row.threshold_pp)),
                    row.probability,
                    csv_field(&row.formatted)
                ));
            }
            out
        }
        TableFormat::Markdown => {
            let mut out = String::from(
                "| Acceptability threshold (pp) | Probability | Acceptability value |\n\
                 |---:|---:|---:|\n",
            );
            for row in &table.rows {
                out.push_str(&format!(
                    "| {} | {:.6} | {} |\n",
                    fmt_threshold(row.threshold_pp),
                    row.probability,
                    row.formatted
                ));
            }
            out
        }
        TableFormat::Json => {
            let mut out = serde_json::to_string_pretty(&table.rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// Parse the JSON rendering back into a table.
pub fn parse_json_table(s: &str) -> serde_json::Result<AcceptabilityTable> {
    Ok(AcceptabilityTable {
        rows: serde_json::from_str(s)?,
    })
}
