//! Rendering of command results with their provenance header.

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const TOOL: &str = concat!("copreli ", env!("CARGO_PKG_VERSION"));

/// What produced an output: enough to rerun it.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub spec: String,
    pub marginals: Vec<String>,
    pub grid: String,
    pub seed: Option<u64>,
}

impl Provenance {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("tool", TOOL.to_string()),
            ("command", self.command.clone()),
            ("spec", self.spec.clone()),
            ("marginals", self.marginals.join(" ")),
            ("grid", self.grid.clone()),
            ("seed", self.seed.map_or_else(|| "none".into(), |s| s.to_string())),
        ]
    }

    fn to_json(&self) -> Value {
        json!({
            "tool": TOOL,
            "command": self.command,
            "spec": self.spec,
            "marginals": self.marginals,
            "grid": self.grid,
            "seed": self.seed,
        })
    }
}

/// One command result in every format; markdown defaults to a table built from the CSV.
#[derive(Debug, Clone)]
pub struct Output {
    pub csv: String,
    pub markdown: Option<String>,
    pub json: Value,
    /// Lines for stderr.
    pub diagnostics: Vec<String>,
    /// Set when the result is complete but signals failure (exit 3 or 4).
    pub failure: Option<CliError>,
}

impl Output {
    pub fn new(csv: String, json: Value) -> Self {
        Output {
            csv,
            markdown: None,
            json,
            diagnostics: Vec::new(),
            failure: None,
        }
    }
}

fn csv_to_markdown(text: &str) -> CliResult<String> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::config(format!("internal CSV error: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut out = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for record in reader.records() {
        let record = record.map_err(|e| CliError::config(format!("internal CSV error: {e}")))?;
        let cells: Vec<&str> = record.iter().collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    Ok(out)
}

pub fn render(format: Format, provenance: &Provenance, out: &Output) -> CliResult<String> {
    Ok(match format {
        Format::Csv => {
            let mut s: String = provenance
                .fields()
                .into_iter()
                .map(|(k, v)| format!("# {k}: {v}\n"))
                .collect();
            s.push_str(&out.csv);
            s
        }
        Format::Json => {
            let doc = json!({
                "provenance": provenance.to_json(),
                "result": out.json,
                "diagnostics": out.diagnostics,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
            s.push('\n');
            s
        }
        Format::Md => {
            let mut s: String = provenance
                .fields()
                .into_iter()
                .map(|(k, v)| format!("> {k}: `{v}`  \n"))
                .collect();
            s.push('\n');
            match &out.markdown {
                Some(md) => s.push_str(md),
                None => s.push_str(&csv_to_markdown(&out.csv)?),
            }
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markdown_from_csv() {
        let md = csv_to_markdown("a,b\n1,2\n").unwrap();
        assert_eq!(md, "| a | b |\n|---|---|\n| 1 | 2 |\n");
    }
}
