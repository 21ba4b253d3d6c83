//! Line-delimited JSON ingestion.
//!
//! Two layouts are understood: flat one-context-per-line objects whose keys
//! are named by a [`FieldMap`], and unarXive-style full-paper objects where
//! citation contexts are paragraphs carrying `cite_spans` that resolve through
//! `bib_entries`. Bad lines never abort a parse; they land in the
//! [`SkipReport`].

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use serde_json::Value;

use super::{CitationRecord, LabelSchema};
use crate::error::{Error, Result};

/// Names the JSON keys holding each record field. Keys may be dotted paths
/// (`metadata.id`) into nested objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMap {
    /// When absent, record ids are synthesized as `line<N>`.
    pub record_id: Option<String>,
    pub citing_id: String,
    pub cited_id: String,
    pub context: String,
    pub section: Option<String>,
    pub label: Option<String>,
}

impl Default for FieldMap {
    fn default() -> Self {
        Self {
            record_id: Some("record_id".into()),
            citing_id: "citing_id".into(),
            cited_id: "cited_id".into(),
            context: "context".into(),
            section: Some("section".into()),
            label: Some("label".into()),
        }
    }
}

impl FieldMap {
    /// Applies `field=key` overrides, comma separated. An empty key unsets an
    /// optional field.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for pair in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (field, key) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("field map entry {pair:?} lacks '='")))?;
            let key = key.trim().to_owned();
            let opt = (!key.is_empty()).then(|| key.clone());
            match field.trim() {
                "record_id" => self.record_id = opt,
                "citing_id" => self.citing_id = key,
                "cited_id" => self.cited_id = key,
                "context" => self.context = key,
                "section" => self.section = opt,
                "label" => self.label = opt,
                other => {
                    return Err(Error::Parameter(format!("unknown field map entry {other:?}")))
                }
            }
        }
        for (name, key) in [
            ("citing_id", &self.citing_id),
            ("cited_id", &self.cited_id),
            ("context", &self.context),
        ] {
            if key.is_empty() {
                return Err(Error::Parameter(format!("field map: {name} is required")));
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    MalformedJson(String),
    InvalidUtf8,
    MissingField(String),
    UnknownLabel(String),
    DuplicateId(String),
    /// A citation whose cited paper could not be resolved to an identifier.
    UnresolvedCitation(String),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::MalformedJson(e) => write!(f, "malformed json: {e}"),
            SkipReason::InvalidUtf8 => f.write_str("invalid utf-8"),
            SkipReason::MissingField(k) => write!(f, "missing field {k}"),
            SkipReason::UnknownLabel(l) => write!(f, "unknown label {l}"),
            SkipReason::DuplicateId(id) => write!(f, "duplicate record id {id}"),
            SkipReason::UnresolvedCitation(r) => write!(f, "unresolved citation {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skip {
    /// 1-based line number.
    pub line: usize,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipReport {
    pub entries: Vec<Skip>,
}

impl SkipReport {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lines(&self) -> Vec<usize> {
        self.entries.iter().map(|s| s.line).collect()
    }

    fn push(&mut self, line: usize, reason: SkipReason) {
        self.entries.push(Skip { line, reason });
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<CitationRecord>,
    pub skips: SkipReport,
    /// Lines read, including blank ones.
    pub lines_read: usize,
}

fn lookup<'a>(obj: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(obj, |v, key| v.get(key))
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) if !s.is_empty() => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn resolve_label(v: &Value, schema: Option<&LabelSchema>) -> std::result::Result<usize, String> {
    match (v, schema) {
        (Value::String(s), Some(schema)) => schema.index_of(s).ok_or_else(|| s.clone()),
        (Value::Number(n), _) => {
            let idx = n.as_u64().ok_or_else(|| n.to_string())? as usize;
            match schema {
                Some(schema) if idx >= schema.k() => Err(n.to_string()),
                _ => Ok(idx),
            }
        }
        (other, _) => Err(other.to_string()),
    }
}

/// Iterates `(line_number, line)` and records UTF-8 failures as skips.
fn for_each_line(
    mut reader: impl BufRead,
    out: &mut ParseOutcome,
    mut f: impl FnMut(usize, &str, &mut ParseOutcome),
) -> Result<()> {
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io("<jsonl stream>", e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        out.lines_read = line_no;
        let Ok(text) = std::str::from_utf8(&buf) else {
            out.skips.push(line_no, SkipReason::InvalidUtf8);
            continue;
        };
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        f(line_no, text, out);
    }
    Ok(())
}

/// Parses flat one-context-per-line JSONL.
pub fn parse_jsonl(
    reader: impl BufRead,
    fields: &FieldMap,
    schema: Option<&LabelSchema>,
) -> Result<ParseOutcome> {
    let mut out = ParseOutcome::default();
    let mut seen = HashSet::new();
    for_each_line(reader, &mut out, |line_no, text, out| {
        let obj: Value = match serde_json::from_str(text) {
            Ok(v @ Value::Object(_)) => v,
            Ok(_) => {
                out.skips
                    .push(line_no, SkipReason::MalformedJson("not an object".into()));
                return;
            }
            Err(e) => {
                out.skips.push(line_no, SkipReason::MalformedJson(e.to_string()));
                return;
            }
        };
        let get = |key: &str| lookup(&obj, key).and_then(scalar_text);
        let required = |key: &str| get(key).ok_or_else(|| SkipReason::MissingField(key.into()));
        let parsed = (|| {
            let record_id = match &fields.record_id {
                Some(key) => required(key)?,
                None => format!("line{line_no}"),
            };
            let citing_id = required(&fields.citing_id)?;
            let cited_id = required(&fields.cited_id)?;
            let context = lookup(&obj, &fields.context)
                .and_then(|v| v.as_str().map(str::to_owned))
                .ok_or_else(|| SkipReason::MissingField(fields.context.clone()))?;
            let section = fields.section.as_deref().and_then(get);
            let gold_intent = match fields.label.as_deref().and_then(|k| lookup(&obj, k)) {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) if s.is_empty() => None,
                Some(v) => Some(resolve_label(v, schema).map_err(SkipReason::UnknownLabel)?),
            };
            Ok(CitationRecord {
                record_id,
                citing_id,
                cited_id,
                context,
                section,
                gold_intent,
            })
        })();
        match parsed {
            Ok(rec) if !seen.insert(rec.record_id.clone()) => {
                out.skips
                    .push(line_no, SkipReason::DuplicateId(rec.record_id));
            }
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.skips.push(line_no, reason),
        }
    })?;
    Ok(out)
}

/// Parses unarXive-style full-paper JSONL: one record per citation span,
/// context = enclosing paragraph, cited id = the bibliography entry's arXiv id.
///
/// Record ids are `<paper_id>#<paragraph>.<span>`. Citations whose
/// bibliography entry has no arXiv id are skipped and reported.
pub fn parse_unarxive(reader: impl BufRead) -> Result<ParseOutcome> {
    let mut out = ParseOutcome::default();
    for_each_line(reader, &mut out, |line_no, text, out| {
        let obj: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                out.skips.push(line_no, SkipReason::MalformedJson(e.to_string()));
                return;
            }
        };
        let Some(paper_id) = obj.get("paper_id").and_then(scalar_text) else {
            out.skips
                .push(line_no, SkipReason::MissingField("paper_id".into()));
            return;
        };
        let Some(paragraphs) = obj.get("body_text").and_then(Value::as_array) else {
            out.skips
                .push(line_no, SkipReason::MissingField("body_text".into()));
            return;
        };
        let bib = obj.get("bib_entries");
        for (p_idx, para) in paragraphs.iter().enumerate() {
            let Some(context) = para.get("text").and_then(Value::as_str) else {
                continue;
            };
            let section = para.get("section").and_then(scalar_text);
            let spans = para
                .get("cite_spans")
                .and_then(Value::as_array)
                .map(Vec::as_slice)
                .unwrap_or_default();
            for (s_idx, span) in spans.iter().enumerate() {
                let ref_id = span.get("ref_id").and_then(scalar_text).unwrap_or_default();
                let cited = bib
                    .and_then(|b| b.get(&ref_id))
                    .and_then(|e| lookup(e, "ids.arxiv_id"))
                    .and_then(scalar_text);
                let Some(cited_id) = cited else {
                    out.skips.push(
                        line_no,
                        SkipReason::UnresolvedCitation(format!("{paper_id}:{ref_id}")),
                    );
                    continue;
                };
                out.records.push(CitationRecord {
                    record_id: format!("{paper_id}#{p_idx}.{s_idx}"),
                    citing_id: paper_id.clone(),
                    cited_id,
                    context: context.to_owned(),
                    section: section.clone(),
                    gold_intent: None,
                });
            }
        }
    })?;
    Ok(out)
}
