use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Label reserved for the discriminator's synthetic class.
pub const FAKE_LABEL: &str = "fake";

/// Ordered set of intent names. The index of a label is its class id; the
/// discriminator's synthetic class sits at index `k` just past the real ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSchema {
    labels: Vec<String>,
}

impl LabelSchema {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::Validation(format!(
                "label schema needs at least 2 labels, got {}",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if label.trim().is_empty() {
                return Err(Error::Validation("empty label in schema".into()));
            }
            if label.eq_ignore_ascii_case(FAKE_LABEL) {
                return Err(Error::Validation(format!(
                    "label {label:?} is reserved for the synthetic class"
                )));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::Validation(format!("duplicate label {label:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Parses the schema file format: one label per line, blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned),
        )
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.labels.join("\n");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Number of real classes `k`.
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn fake_index(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// SciCite intents.
    pub fn scicite() -> Self {
        Self::new(["background", "method", "result"]).expect("static schema")
    }

    /// ACL-ARC intents (also used by the 3C shared task).
    pub fn acl_arc() -> Self {
        Self::new([
            "background",
            "uses",
            "compares_contrasts",
            "motivation",
            "extension",
            "future",
        ])
        .expect("static schema")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_one_label_per_line() {
        let s = LabelSchema::parse("background\nmethod\nresult\n").unwrap();
        assert_eq!(s.k(), 3);
        assert_eq!(s.fake_index(), 3);
        assert_eq!(s.index_of("method"), Some(1));
        assert_eq!(s.name(2), Some("result"));
        assert_eq!(s, LabelSchema::scicite());
    }

    #[test]
    fn rejects_bad_schemas() {
        assert!(LabelSchema::parse("only\n").is_err());
        assert!(LabelSchema::parse("a\na\n").is_err());
        assert!(LabelSchema::parse("a\nfake\n").is_err());
        assert!(LabelSchema::new(["a", " "]).is_err());
    }

    #[test]
    fn acl_schema_has_six_classes() {
        assert_eq!(LabelSchema::acl_arc().k(), 6);
    }
}
