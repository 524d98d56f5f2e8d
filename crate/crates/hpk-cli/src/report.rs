//! Deterministic report documents: one entry per requested check, pass or
//! fail, with the offending word and exact defect vector on failure. The
//! rendered output is byte-identical across runs and thread schedules.

use hpk_core::linf::Report;
use hpk_core::Error;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Document {
    pub command: String,
    pub status: String,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<hpk_core::Violation>,
}

/// Accumulates named check results into a document.
pub struct Builder {
    command: String,
    checks: Vec<CheckLine>,
    notes: Vec<String>,
}

impl Builder {
    pub fn new(command: &str) -> Self {
        Builder {
            command: command.to_string(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, report: Report) {
        self.checks.push(CheckLine {
            check: name.to_string(),
            passed: report.passed(),
            violations: report.violations,
        });
    }

    pub fn pass(&mut self, name: &str) {
        self.checks.push(CheckLine {
            check: name.to_string(),
            passed: true,
            violations: Vec::new(),
        });
    }

    pub fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub fn finish(self) -> Document {
        let ok = self.checks.iter().all(|c| c.passed);
        Document {
            command: self.command,
            status: if ok { "pass" } else { "fail" }.to_string(),
            checks: self.checks,
            notes: self.notes,
            error: None,
        }
    }
}

/// Exit-code mapping: parse and argument problems are usage errors (1),
/// structural defects in input data are check failures (2), everything else
/// internal (3). A finished document exits 0 iff every check passed.
pub fn finalize(outcome: Result<Document, Error>) -> (Document, u8) {
    match outcome {
        Ok(doc) => {
            let code = if doc.status == "pass" { 0 } else { 2 };
            (doc, code)
        }
        Err(e) => {
            let code = match &e {
                Error::Parse(_) | Error::Argument(_) => 1,
                Error::Structural(_) => 2,
                _ => 3,
            };
            (
                Document {
                    command: String::new(),
                    status: "error".to_string(),
                    checks: Vec::new(),
                    notes: Vec::new(),
                    error: Some(e.to_string()),
                },
                code,
            )
        }
    }
}

pub fn render_text(doc: &Document) -> String {
    let mut out = String::new();
    if let Some(err) = &doc.error {
        out.push_str(&format!("error: {err}\n"));
        return out;
    }
    for line in &doc.checks {
        out.push_str(&format!(
            "{}: {}\n",
            line.check,
            if line.passed { "pass" } else { "FAIL" }
        ));
        for v in &line.violations {
            let defect: Vec<String> = v
                .defect
                .iter()
                .map(|(name, c)| format!("{c}·{name}"))
                .collect();
            out.push_str(&format!(
                "  {} arity {} on ({}) -> {}\n",
                v.check,
                v.arity,
                v.word.join(", "),
                defect.join(" + ")
            ));
        }
    }
    for n in &doc.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out.push_str(&format!("status: {}\n", doc.status));
    out
}
