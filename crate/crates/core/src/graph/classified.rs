use std::collections::HashMap;

use super::CitationEdge;
use crate::ingest::CitationRecord;
use crate::ssgan::Prediction;
use crate::{Error, Result};

/// Joins records with predictions by record id, producing one classified
/// edge per record in record order.
pub fn classified_edges(records: &[CitationRecord], predictions: &[Prediction]) -> Result<Vec<CitationEdge>> {
    let by_id: HashMap<&str, &Prediction> = predictions.iter().map(|p| (p.record_id.as_str(), p)).collect();
    records
        .iter()
        .map(|r| {
            let p = by_id.get(r.record_id.as_str()).ok_or_else(|| {
                Error::Validation(format!("record {:?} has no prediction", r.record_id))
            })?;
            Ok(CitationEdge {
                citing_id: r.citing_id.clone(),
                cited_id: r.cited_id.clone(),
                intent: Some(p.intent),
                confidence: Some(p.confidence),
            })
        })
        .collect()
}
