//! Machine-readable output: verdict records as JSON lines for the CLI,
//! and suite rows as CSV for the reproduction harness. Wall times are
//! reported in the JSON stream but never in the CSV, so reproduction
//! output is byte-stable across runs.

use std::io::Write;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::detectors::Verdict;
use crate::error::Error;

/// One emitted line of the CLI's check/entropy output.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictRecord {
    pub property: String,
    pub params: Value,
    pub status: String,
    pub exact: bool,
    pub horizon: u64,
    pub witness: Value,
    pub wall_time_ms: u64,
}

impl VerdictRecord {
    pub fn from_verdict(verdict: &Verdict, params: Value, elapsed: Duration) -> Self {
        VerdictRecord {
            property: verdict.property.clone(),
            params,
            status: verdict.status.to_string(),
            exact: verdict.exact,
            horizon: verdict.horizon,
            witness: verdict.witness.clone(),
            wall_time_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn write_jsonl(&self, out: &mut dyn Write) -> Result<(), Error> {
        let line = serde_json::to_string(self).expect("record serialization cannot fail");
        writeln!(out, "{line}")?;
        Ok(())
    }
}

/// One row of a reproduction suite: an instance, the base and lifted
/// verdicts, the relation between them the proposition predicts, and
/// what was observed. Deterministic content only (no wall times).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub proposition: String,
    pub instance: String,
    pub base_verdict: String,
    pub lifted_verdict: String,
    pub relation_expected: String,
    pub relation_observed: String,
    pub pass: bool,
}

impl SuiteRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        proposition: &str,
        instance: impl Into<String>,
        base_verdict: impl Into<String>,
        lifted_verdict: impl Into<String>,
        relation_expected: impl Into<String>,
        relation_observed: impl Into<String>,
        pass: bool,
    ) -> Self {
        SuiteRow {
            proposition: proposition.to_string(),
            instance: instance.into(),
            base_verdict: base_verdict.into(),
            lifted_verdict: lifted_verdict.into(),
            relation_expected: relation_expected.into(),
            relation_observed: relation_observed.into(),
            pass,
        }
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_suite_csv(rows: &[SuiteRow], out: &mut dyn Write) -> Result<(), Error> {
    writeln!(
        out,
        "proposition,instance,base_verdict,lifted_verdict,relation_expected,relation_observed,pass"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_escape(&r.proposition),
            csv_escape(&r.instance),
            csv_escape(&r.base_verdict),
            csv_escape(&r.lifted_verdict),
            csv_escape(&r.relation_expected),
            csv_escape(&r.relation_observed),
            r.pass
        )?;
    }
    Ok(())
}

pub fn suite_csv_string(rows: &[SuiteRow]) -> String {
    let mut buf = Vec::new();
    write_suite_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_stable_and_escaped() {
        let rows = vec![
            SuiteRow::new("p", "inst", "Holds", "Holds", "agree", "agree", true),
            SuiteRow::new("p", "a,b", "x\"y\"", "-", "agree", "differ", false),
        ];
        let text = suite_csv_string(&rows);
        assert_eq!(text, suite_csv_string(&rows));
        assert!(text.contains("\"a,b\""));
        assert!(text.contains("\"x\"\"y\"\"\""));
        assert!(text.lines().next().unwrap().starts_with("proposition,"));
        assert!(text.contains(",false"));
    }

    #[test]
    fn record_serializes_to_single_line() {
        let v = crate::detectors::Verdict {
            property: "p".into(),
            status: crate::detectors::Status::Holds,
            exact: true,
            horizon: 3,
            witness: serde_json::json!({"k": 1}),
        };
        let rec = VerdictRecord::from_verdict(&v, serde_json::json!({}), Duration::from_millis(5));
        let mut buf = Vec::new();
        rec.write_jsonl(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.matches('\n').count(), 1);
        assert!(s.contains("\"status\":\"Holds\""));
    }
}
