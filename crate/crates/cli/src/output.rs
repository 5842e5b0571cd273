//! Report rendering: JSON (default), RFC 4180 CSV, and aligned tables.

use serde::Serialize;

use heisgb_core::ErrorCategory;

use crate::Format;

/// A command report that can render itself in every output format. The
/// JSON document and the table are generated from the same fields.
pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn table(&self) -> String;
}

pub fn emit<R: Render>(report: &R, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("reports serialize")
        ),
        Format::Csv => print!("{}", report.csv()),
        Format::Table => print!("{}", report.table()),
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    schema_version: u32,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    category: &'a str,
    message: String,
}

pub fn emit_error(err: &anyhow::Error, category: ErrorCategory, format: Format) {
    let category_name = match category {
        ErrorCategory::Input => "input",
        ErrorCategory::NumericContract => "numeric-contract",
    };
    eprintln!("error: {:#}", err);
    let record = ErrorRecord {
        schema_version: 1,
        error: ErrorBody {
            category: category_name,
            message: format!("{:#}", err),
        },
    };
    match format {
        Format::Json | Format::Table => println!(
            "{}",
            serde_json::to_string_pretty(&record).expect("error records serialize")
        ),
        Format::Csv => {
            println!("error_category,message");
            println!(
                "{},{}",
                csv_field(category_name),
                csv_field(&format!("{:#}", err))
            );
        }
    }
}

/// Quote a CSV field per RFC 4180 when it contains a comma, quote or
/// newline.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

/// Render rows under headers with aligned columns.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let mut line = String::new();
    for (i, h) in headers.iter().enumerate() {
        line.push_str(&format!("{:<width$}  ", h, width = widths[i]));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            line.push_str(&format!("{:<width$}  ", cell, width = widths[i]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn fnum(v: f64) -> String {
    format!("{:.12e}", v)
}
