use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestEcho {
    pub subcommand: String,
    pub ring: String,
    pub module: String,
    pub max: usize,
    pub window: usize,
    pub degree_bound: usize,
    pub field: Option<String>,
    pub assume_depth2: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cells: Vec<String>,
    pub incomplete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>, incomplete: bool) {
        self.rows.push(Row { cells, incomplete });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub side: String,
    pub actor: String,
    pub element: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub verdict: String,
    pub witness: Option<Value>,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub request: RequestEcho,
    pub classification: Option<Value>,
    pub tables: Vec<Table>,
    pub actions: Vec<ActionEntry>,
    pub verdicts: Vec<Verdict>,
    /// Human-readable descriptions of everything flagged incomplete.
    pub incomplete: Vec<String>,
    pub notes: Vec<String>,
    pub error: Option<Diagnostic>,
    /// Only filled with `--timing`, so that default output is byte-stable.
    pub timing_ms: Option<u64>,
}

impl ReportDocument {
    pub fn new(request: RequestEcho) -> Self {
        ReportDocument {
            schema: SCHEMA,
            request,
            classification: None,
            tables: Vec::new(),
            actions: Vec::new(),
            verdicts: Vec::new(),
            incomplete: Vec::new(),
            notes: Vec::new(),
            error: None,
            timing_ms: None,
        }
    }

    pub fn has_incomplete(&self) -> bool {
        !self.incomplete.is_empty() || self.tables.iter().any(|t| t.rows.iter().any(|r| r.incomplete))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let r = &self.request;
        let _ = writeln!(out, "stabcoh {} — {}", r.subcommand, r.ring);
        if let Some(c) = &self.classification {
            let get = |k: &str| c.get(k).map(|v| v.to_string()).unwrap_or_else(|| "?".into());
            let _ = writeln!(
                out,
                "e = {}, codim = {}, dim = {}, CI = {}, Gorenstein = {}, m²=0 = {}",
                get("embedding_dimension"),
                get("codimension"),
                get("krull_dimension"),
                get("is_complete_intersection"),
                get("is_gorenstein"),
                get("is_m2_zero")
            );
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n== {} ==", t.name);
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for row in &t.rows {
                for (w, c) in widths.iter_mut().zip(&row.cells) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String], mark: &str| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                format!("{}{mark}", parts.join("  ").trim_end())
            };
            let _ = writeln!(out, "{}", line(&t.columns, ""));
            for row in &t.rows {
                let _ = writeln!(out, "{}", line(&row.cells, if row.incomplete { "  *" } else { "" }));
            }
        }
        if !self.actions.is_empty() {
            let _ = writeln!(out, "\n== actions ==");
            for a in &self.actions {
                let lhs = if a.side == "left" {
                    format!("{} · {}", a.actor, a.element)
                } else {
                    format!("{} · {}", a.element, a.actor)
                };
                let _ = writeln!(out, "{lhs} = {}", a.value);
            }
        }
        for v in &self.verdicts {
            let _ = writeln!(out, "\n{}: {}", v.check, v.verdict);
            if let Some(d) = &v.detail {
                let _ = writeln!(out, "  {d}");
            }
            if let Some(w) = &v.witness {
                let _ = writeln!(out, "  witness: {w}");
            }
        }
        if self.has_incomplete() {
            let _ = writeln!(out, "\n* incomplete (truncated by the degree bound or window):");
            for i in &self.incomplete {
                let _ = writeln!(out, "  {i}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(e) = &self.error {
            let _ = match e.position {
                Some(p) => writeln!(out, "\nerror ({}) at position {p}: {}", e.kind, e.message),
                None => writeln!(out, "\nerror ({}): {}", e.kind, e.message),
            };
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "time: {ms} ms");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo() -> RequestEcho {
        RequestEcho {
            subcommand: "betti".into(),
            ring: "F101[x]/(x^2)".into(),
            module: "k".into(),
            max: 1,
            window: 1,
            degree_bound: 14,
            field: None,
            assume_depth2: false,
        }
    }

    #[test]
    fn round_trip() {
        let mut doc = ReportDocument::new(echo());
        let mut t = Table::new("betti", &["n", "b_n"]);
        t.push(vec!["0".into(), "1".into()], false);
        t.push(vec!["1".into(), "1".into()], true);
        doc.tables.push(t);
        doc.verdicts.push(Verdict {
            check: "c".into(),
            verdict: "v".into(),
            witness: Some(serde_json::json!({"a": 1})),
            detail: None,
        });
        let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(doc.to_table().contains("1  1  *"));
    }

    #[test]
    fn empty_document() {
        let doc = ReportDocument::new(echo());
        let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(!doc.has_incomplete());
    }
}
