//! CSV and JSON-lines serialization of reports.

use std::io::Write;

use serde::Serialize;

use semitent_core::CheckReport;

use crate::config::Format;

pub const COLUMNS: [&str; 9] = ["checkId", "fixture", "sweepKey", "lhs", "rhs", "ratio", "budget", "pass", "seed"];

/// Twelve significant digits in scientific notation; `nan`, `inf`, `-inf` otherwise.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_csv<W: Write>(reports: &[CheckReport], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in reports {
        w.write_record([
            r.check_id.clone(),
            r.fixture.clone(),
            r.sweep_key.clone(),
            format_float(r.lhs),
            format_float(r.rhs),
            format_float(r.ratio),
            format_float(r.budget),
            r.pass.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonReport<'a> {
    check_id: &'a str,
    fixture: &'a str,
    sweep_key: &'a str,
    lhs: Option<f64>,
    rhs: Option<f64>,
    ratio: Option<f64>,
    budget: Option<f64>,
    pass: bool,
    seed: u64,
    errored: bool,
    notes: &'a str,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// One JSON object per line; non-finite numbers become `null`.
pub fn write_jsonl<W: Write>(reports: &[CheckReport], mut out: W) -> std::io::Result<()> {
    for r in reports {
        let j = JsonReport {
            check_id: &r.check_id,
            fixture: &r.fixture,
            sweep_key: &r.sweep_key,
            lhs: finite(r.lhs),
            rhs: finite(r.rhs),
            ratio: finite(r.ratio),
            budget: finite(r.budget),
            pass: r.pass,
            seed: r.seed,
            errored: r.errored,
            notes: &r.notes,
        };
        serde_json::to_writer(&mut out, &j)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write<W: Write>(reports: &[CheckReport], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(reports, out).map_err(std::io::Error::other),
        Format::Jsonl => write_jsonl(reports, out),
    }
}

pub fn file_name(format: Format) -> &'static str {
    match format {
        Format::Csv => "reports.csv",
        Format::Jsonl => "reports.jsonl",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reports() -> Vec<CheckReport> {
        vec![
            CheckReport::residual("a", 1.0 / 3.0, 1e-6).with_fixture("TP"),
            CheckReport::bound("b", 2.0, 1.0, 4.0, 0.0).with_fixture("TP").with_seed(7),
            CheckReport::errored("c", "x"),
        ]
    }

    #[test]
    fn csv_has_header_and_one_line_per_report() {
        let mut buf = Vec::new();
        write_csv(&reports(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "checkId,fixture,sweepKey,lhs,rhs,ratio,budget,pass,seed");
        assert!(lines[1].starts_with("a,TP,,3.33333333333e-1,"));
        assert!(lines[3].contains("nan"));
    }

    #[test]
    fn jsonl_maps_non_finite_to_null() {
        let mut buf = Vec::new();
        write_jsonl(&reports(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1]["seed"], 7);
        assert!(lines[2]["lhs"].is_null());
    }
}
