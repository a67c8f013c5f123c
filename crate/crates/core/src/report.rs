//! Machine-readable verification records.
//!
//! Reports are newline-delimited JSON, one object per check, with all
//! numbers printed at 17 significant digits so regression diffs are exact.
//! Merging re-sorts records by their stable key, so combined reports are
//! deterministic regardless of input order.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::invariants::InvariantReport;

/// One typed field of a record; insertion order is preserved in the output.
#[derive(Clone, Debug)]
pub enum Field {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    FloatList(Vec<f64>),
}

#[derive(Clone, Debug, Default)]
pub struct Record {
    fields: Vec<(String, Field)>,
}

fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no infinities; encode as strings
        format!("\"{x}\"")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl Record {
    pub fn new() -> Record {
        Record { fields: Vec::new() }
    }

    pub fn str(mut self, key: &str, v: impl Into<String>) -> Record {
        self.fields.push((key.to_string(), Field::Str(v.into())));
        self
    }

    pub fn float(mut self, key: &str, v: f64) -> Record {
        self.fields.push((key.to_string(), Field::Float(v)));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Record {
        self.fields.push((key.to_string(), Field::Int(v)));
        self
    }

    pub fn bool(mut self, key: &str, v: bool) -> Record {
        self.fields.push((key.to_string(), Field::Bool(v)));
        self
    }

    pub fn floats(mut self, key: &str, v: Vec<f64>) -> Record {
        self.fields.push((key.to_string(), Field::FloatList(v)));
        self
    }

    pub fn to_json_line(&self) -> String {
        let mut out = String::from("{");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('"');
            out.push_str(&escape(k));
            out.push_str("\":");
            match v {
                Field::Str(s) => {
                    out.push('"');
                    out.push_str(&escape(s));
                    out.push('"');
                }
                Field::Float(x) => out.push_str(&fmt_float(*x)),
                Field::Int(n) => out.push_str(&n.to_string()),
                Field::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
                Field::FloatList(xs) => {
                    out.push('[');
                    for (j, x) in xs.iter().enumerate() {
                        if j > 0 {
                            out.push(',');
                        }
                        out.push_str(&fmt_float(*x));
                    }
                    out.push(']');
                }
            }
        }
        out.push('}');
        out
    }
}

/// Record for one pointwise identity evaluation.
pub fn invariant_record(suite: &str, seq: usize, r: &InvariantReport<f64>) -> Record {
    Record::new()
        .str("suite", suite)
        .int("seq", seq as i64)
        .str("identity", r.identity.clone())
        .str("case", r.case.clone())
        .int("point_index", r.point_index as i64)
        .floats("point", r.point.clone())
        .float("lhs", r.lhs)
        .float("rhs", r.rhs)
        .float("residual", r.residual)
        .float("tolerance", r.tolerance)
        .bool("pass", r.pass)
}

pub fn write_ndjson(mut w: impl Write, records: &[Record]) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.to_json_line())
            .map_err(|e| Error::Config(format!("report write failed: {e}")))?;
    }
    Ok(())
}

pub fn write_ndjson_file(path: &Path, records: &[Record]) -> Result<()> {
    let f = std::fs::File::create(path)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
    write_ndjson(std::io::BufWriter::new(f), records)
}

/// Merge NDJSON report files: lines are re-sorted by
/// `(suite, identity, case, seq)` and written verbatim, so merging is
/// deterministic and idempotent.
pub fn merge_ndjson(inputs: &[std::path::PathBuf], mut out: impl Write) -> Result<usize> {
    let mut keyed: Vec<((String, String, String, i64), String)> = Vec::new();
    for path in inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(line)
                .map_err(|e| Error::Config(format!("bad record in {}: {e}", path.display())))?;
            let key = (
                v.get("suite").and_then(|x| x.as_str()).unwrap_or("").to_string(),
                v.get("identity").and_then(|x| x.as_str()).unwrap_or("").to_string(),
                v.get("case").and_then(|x| x.as_str()).unwrap_or("").to_string(),
                v.get("seq").and_then(|x| x.as_i64()).unwrap_or(0),
            );
            keyed.push((key, line.to_string()));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let n = keyed.len();
    for (_, line) in keyed {
        writeln!(out, "{line}").map_err(|e| Error::Config(format!("merge write failed: {e}")))?;
    }
    Ok(n)
}

/// Energy-table CSV with header `eps,E_quad,E_closed,rel_err`.
pub fn write_energy_csv(
    mut w: impl Write,
    rows: &[(f64, f64, f64, f64)],
) -> Result<()> {
    writeln!(w, "eps,E_quad,E_closed,rel_err")
        .map_err(|e| Error::Config(format!("csv write failed: {e}")))?;
    for (eps, quad, closed, rel) in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_float(*eps),
            fmt_float(*quad),
            fmt_float(*closed),
            fmt_float(*rel)
        )
        .map_err(|e| Error::Config(format!("csv write failed: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_formatting_is_stable() {
        let r = Record::new()
            .str("suite", "verify")
            .int("seq", 3)
            .float("residual", 1.25e-9)
            .bool("pass", true)
            .floats("point", vec![0.5, -0.25]);
        let line = r.to_json_line();
        assert_eq!(
            line,
            "{\"suite\":\"verify\",\"seq\":3,\"residual\":1.2500000000000000e-9,\"pass\":true,\"point\":[5.0000000000000000e-1,-2.5000000000000000e-1]}"
        );
        // valid JSON
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["seq"], 3);
    }

    #[test]
    fn merge_sorts_and_keeps_lines() {
        let dir = std::env::temp_dir().join(format!("ymren-merge-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let a = dir.join("a.ndjson");
        let b = dir.join("b.ndjson");
        std::fs::write(&a, "{\"suite\":\"z\",\"identity\":\"w\",\"case\":\"c\",\"seq\":1}\n").unwrap();
        std::fs::write(&b, "{\"suite\":\"a\",\"identity\":\"w\",\"case\":\"c\",\"seq\":0}\n").unwrap();
        let mut out = Vec::new();
        let n = merge_ndjson(&[a.clone(), b.clone()], &mut out).unwrap();
        assert_eq!(n, 2);
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].contains("\"suite\":\"a\""));
        assert!(lines[1].contains("\"suite\":\"z\""));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_header_and_rows() {
        let mut out = Vec::new();
        write_energy_csv(&mut out, &[(0.1, -24.9, -24.9, 1e-12)]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("eps,E_quad,E_closed,rel_err\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
