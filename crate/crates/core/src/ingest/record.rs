/// A single citation context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationRecord {
    pub record_id: String,
    pub citing_id: String,
    pub cited_id: String,
    /// Verbatim context text; never tokenized here.
    pub context: String,
    pub section: Option<String>,
    /// Index into the [`LabelSchema`](super::LabelSchema) in use.
    pub gold_intent: Option<usize>,
}
