//! Records, reports and their JSON, text and CSV renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Flagged,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Flagged => "flagged",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub inputs: Value,
    pub values: Value,
    pub bounds: Value,
    pub verdict: Verdict,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub budget_exceeded: bool,
}

impl Record {
    pub fn new(name: impl Into<String>, inputs: Value) -> Self {
        Record {
            name: name.into(),
            inputs,
            values: Value::Null,
            bounds: Value::Null,
            verdict: Verdict::Inconclusive,
            runtime_ms: 0.0,
            note: None,
            budget_exceeded: false,
        }
    }

    pub fn with(mut self, values: Value, bounds: Value, verdict: Verdict) -> Self {
        self.values = values;
        self.bounds = bounds;
        self.verdict = verdict;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A record for a check that raised an error.
    pub fn from_error(name: impl Into<String>, inputs: Value, err: &Error) -> Self {
        let mut r = Record::new(name, inputs).note(err.to_string());
        match err {
            Error::Budget(_) => {
                r.verdict = Verdict::Inconclusive;
                r.budget_exceeded = true;
            }
            Error::Divergent(_) => r.verdict = Verdict::Flagged,
            _ => r.verdict = Verdict::Fail,
        }
        r
    }
}

/// A named table of numbers, written as CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub tolerance_scale: f64,
    pub records: Vec<Record>,
    pub series: Vec<Series>,
    pub summary: Summary,
    pub runtime_ms: f64,
    #[serde(skip)]
    pub budget_exceeded: bool,
}

impl Report {
    pub fn new(
        command: &str,
        seed: Option<u64>,
        tolerance_scale: f64,
        records: Vec<Record>,
        series: Vec<Series>,
    ) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
                Verdict::Flagged => summary.flagged += 1,
            }
        }
        let budget_exceeded = records.iter().any(|r| r.budget_exceeded);
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            tolerance_scale,
            records,
            series,
            summary,
            runtime_ms: 0.0,
            budget_exceeded,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn text_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .records
            .iter()
            .map(|r| {
                let mut v = compact(&r.values);
                if let Some(n) = &r.note {
                    v = if v == "null" {
                        n.clone()
                    } else {
                        format!("{v} ({n})")
                    };
                }
                [
                    r.name.clone(),
                    r.verdict.as_str().to_string(),
                    truncate(&v, 72),
                    format!("{:.1}", r.runtime_ms),
                ]
            })
            .collect();
        let header = ["record", "verdict", "values", "ms"];
        let mut width = header.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &header.map(String::from));
        line(&mut out, &width.map(|w| "-".repeat(w)));
        for row in &rows {
            line(&mut out, row);
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\n{}: {} pass, {} fail, {} inconclusive, {} flagged ({:.1} ms)",
            self.command, s.pass, s.fail, s.inconclusive, s.flagged, self.runtime_ms
        );
        out
    }

    /// report.json, report.txt and one CSV per series.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write report: {e}"));
        std::fs::create_dir_all(dir).map_err(io)?;
        let json = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        std::fs::write(dir.join("report.json"), json).map_err(io)?;
        std::fs::write(dir.join("report.txt"), self.text_table()).map_err(io)?;
        for s in &self.series {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", s.name)))
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            w.write_record(&s.columns)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for row in &s.rows {
                w.write_record(row.iter().map(|v| format!("{v:e}")))
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        Ok(())
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::Array(a) => format!("[{}]", a.iter().map(compact).collect::<Vec<_>>().join(",")),
        Value::Object(m) => {
            format!(
                "{{{}}}",
                m.iter()
                    .map(|(k, v)| format!("{k}:{}", compact(v)))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
        other => other.to_string(),
    }
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let mut t: String = s.chars().take(n - 1).collect();
        t.push('…');
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let a = Record::new("a", json!({"x": 1})).with(
            json!({"err": 1e-12}),
            json!({"tol": 1e-10}),
            Verdict::Pass,
        );
        let b = Record::from_error("b", json!(null), &Error::Budget("too big".into()));
        let s = Series {
            name: "s".into(),
            columns: vec!["n".into(), "v".into()],
            rows: vec![vec![1.0, 0.5]],
        };
        Report::new("demo", Some(3), 1.0, vec![a, b], vec![s])
    }

    #[test]
    fn summary_and_flags() {
        let r = sample();
        assert_eq!(r.summary.pass, 1);
        assert_eq!(r.summary.inconclusive, 1);
        assert!(r.budget_exceeded);
        assert!(!r.has_failures());
        assert_eq!(r.to_json()["schema"], json!(1));
    }

    #[test]
    fn text_and_json_verdicts_agree() {
        let r = sample();
        let text = r.text_table();
        let j = r.to_json();
        for rec in j["records"].as_array().unwrap() {
            let line = text
                .lines()
                .find(|l| l.starts_with(rec["name"].as_str().unwrap()))
                .unwrap();
            assert!(line.contains(rec["verdict"].as_str().unwrap()));
        }
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        sample().write(dir.path()).unwrap();
        for f in ["report.json", "report.txt", "s.csv"] {
            assert!(dir.path().join(f).exists());
        }
        let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
        assert!(csv.starts_with("n,v"));
    }
}
