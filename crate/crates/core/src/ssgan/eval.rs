use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use super::mlp::Dropout;
use super::nets::Discriminator;
use crate::error::{Error, Result};
use crate::ingest::{EmbeddingSet, LabelSchema};
use crate::scalar::{softmax, Scalar};

/// Predicted intent for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub record_id: String,
    pub intent: usize,
    /// Probability of `intent` renormalized over the real classes.
    pub confidence: f64,
}

/// Argmax over the `k` real classes (lowest index wins ties) and its
/// renormalized probability. The synthetic-class logit plays no part.
pub fn predict_one<T: Scalar>(d: &Discriminator<T>, x: &[T]) -> Result<(usize, T)> {
    let out = d.forward(x, &mut Dropout::Off)?;
    let real = softmax(&out.logits[..d.k]);
    let mut best = 0;
    for (c, &p) in real.iter().enumerate().skip(1) {
        if p > real[best] {
            best = c;
        }
    }
    Ok((best, real[best]))
}

/// Classifies every embedding, in file order. Dropout is off, so results
/// are deterministic.
pub fn classify<T: Scalar>(d: &Discriminator<T>, embeddings: &EmbeddingSet) -> Result<Vec<Prediction>> {
    if embeddings.dim() != d.input_dim() {
        return Err(Error::Validation(format!(
            "embeddings have dim {}, model expects {}",
            embeddings.dim(),
            d.input_dim()
        )));
    }
    (0..embeddings.len())
        .into_par_iter()
        .map(|i| {
            let x: Vec<T> = embeddings.row(i).iter().map(|&v| T::lit(v as f64)).collect();
            let (intent, conf) = predict_one(d, &x)?;
            Ok(Prediction {
                record_id: embeddings.ids()[i].clone(),
                intent,
                confidence: conf.as_f64(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Average {
    Macro,
    Micro,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub support: Vec<usize>,
    /// Unweighted mean of per-class F1, in `[0, 1]`.
    pub macro_f1: f64,
    /// Equals accuracy for single-label predictions.
    pub micro_f1: f64,
    /// Rows are gold classes, columns predictions.
    pub confusion: Vec<Vec<usize>>,
    pub n_examples: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn list_missing<'a>(ids: impl Iterator<Item = &'a String>) -> String {
    let ids: Vec<_> = ids.collect();
    let shown: Vec<_> = ids.iter().take(10).map(|s| s.as_str()).collect();
    let more = ids.len().saturating_sub(shown.len());
    if more > 0 {
        format!("{} (+{more} more)", shown.join(", "))
    } else {
        shown.join(", ")
    }
}

/// Scores predictions against gold labels keyed by the same record ids.
pub fn evaluate(
    predictions: &BTreeMap<String, usize>,
    gold: &BTreeMap<String, usize>,
    schema: &LabelSchema,
) -> Result<EvalReport> {
    let k = schema.k();
    let missing_pred: Vec<_> = gold.keys().filter(|id| !predictions.contains_key(*id)).collect();
    let missing_gold: Vec<_> = predictions.keys().filter(|id| !gold.contains_key(*id)).collect();
    if !missing_pred.is_empty() || !missing_gold.is_empty() {
        return Err(Error::Validation(format!(
            "prediction/gold id mismatch; without prediction: [{}]; without gold: [{}]",
            list_missing(missing_pred.into_iter()),
            list_missing(missing_gold.into_iter())
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (id, &g) in gold {
        let p = predictions[id];
        if g >= k || p >= k {
            return Err(Error::Validation(format!(
                "record {id:?}: class index out of range for k = {k}"
            )));
        }
        confusion[g][p] += 1;
    }
    Ok(EvalReport::from_confusion(schema, confusion))
}

impl EvalReport {
    pub fn from_confusion(schema: &LabelSchema, confusion: Vec<Vec<usize>>) -> Self {
        let k = schema.k();
        let mut precision = Vec::with_capacity(k);
        let mut recall = Vec::with_capacity(k);
        let mut f1 = Vec::with_capacity(k);
        let mut support = Vec::with_capacity(k);
        let mut correct = 0;
        for c in 0..k {
            let tp = confusion[c][c];
            let gold_c: usize = confusion[c].iter().sum();
            let pred_c: usize = confusion.iter().map(|row| row[c]).sum();
            let p = ratio(tp, pred_c);
            let r = ratio(tp, gold_c);
            precision.push(p);
            recall.push(r);
            f1.push(if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 });
            support.push(gold_c);
            correct += tp;
        }
        let n_examples = support.iter().sum();
        Self {
            labels: schema.labels().to_vec(),
            macro_f1: f1.iter().sum::<f64>() / k as f64,
            micro_f1: ratio(correct, n_examples),
            precision,
            recall,
            f1,
            support,
            confusion,
            n_examples,
        }
    }

    pub fn f1_score(&self, average: Average) -> f64 {
        match average {
            Average::Macro => self.macro_f1,
            Average::Micro => self.micro_f1,
        }
    }

    pub fn errors(&self) -> usize {
        self.n_examples - (0..self.labels.len()).map(|c| self.confusion[c][c]).sum::<usize>()
    }

    /// Largest off-diagonal cell as `(gold, predicted, count)`.
    pub fn dominant_error(&self) -> Option<(usize, usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (g, row) in self.confusion.iter().enumerate() {
            for (p, &n) in row.iter().enumerate() {
                if g != p && n > 0 && best.is_none_or(|(_, _, m)| n > m) {
                    best = Some((g, p, n));
                }
            }
        }
        best
    }

    /// Human-readable report; scores shown as percentages.
    pub fn to_text(&self, average: Average) -> String {
        let width = self.labels.iter().map(String::len).max().unwrap_or(0).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:width$}  precision  recall     f1  support", "class");
        for c in 0..self.labels.len() {
            let _ = writeln!(
                s,
                "{:width$}  {:>9.2}  {:>6.2}  {:>5.2}  {:>7}",
                self.labels[c],
                100.0 * self.precision[c],
                100.0 * self.recall[c],
                100.0 * self.f1[c],
                self.support[c]
            );
        }
        let name = match average {
            Average::Macro => "macro",
            Average::Micro => "micro",
        };
        let _ = writeln!(s, "{name}-F1: {:.2}", 100.0 * self.f1_score(average));
        let _ = writeln!(s, "examples: {}  errors: {}", self.n_examples, self.errors());
        let _ = writeln!(s, "confusion (rows gold, columns predicted):");
        let _ = writeln!(s, "{:width$}  {}", "", self.labels.iter().map(|l| format!("{l:>width$}")).collect::<Vec<_>>().join("  "));
        for (label, row) in self.labels.iter().zip(&self.confusion) {
            let cells: Vec<_> = row.iter().map(|n| format!("{n:>width$}")).collect();
            let _ = writeln!(s, "{label:width$}  {}", cells.join("  "));
        }
        s
    }

    pub fn to_json(&self, average: Average) -> serde_json::Value {
        let per_class: Vec<_> = (0..self.labels.len())
            .map(|c| {
                json!({
                    "label": self.labels[c],
                    "precision": self.precision[c],
                    "recall": self.recall[c],
                    "f1": self.f1[c],
                    "support": self.support[c],
                })
            })
            .collect();
        json!({
            "average": match average { Average::Macro => "macro", Average::Micro => "micro" },
            "f1": self.f1_score(average),
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "n_examples": self.n_examples,
            "errors": self.errors(),
            "per_class": per_class,
            "confusion": self.confusion,
        })
    }
}
