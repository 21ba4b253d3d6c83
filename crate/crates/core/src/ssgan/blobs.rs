//! Synthetic Gaussian-blob benchmark for the semi-supervised classifier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use super::{ModelConfig, Objective, TrainConfig};
use crate::ingest::{make_split, stratified_holdout, CitationRecord, DatasetSplit, EmbeddingSet, LabelSchema};

#[derive(Debug, Clone, PartialEq)]
pub struct BlobSpec {
    pub classes: usize,
    pub dim: usize,
    pub points: usize,
    /// Distance of each class mean from the origin.
    pub separation: f64,
    pub noise: f64,
    pub dev_fraction: f64,
    pub labeled_fraction: f64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self {
            classes: 3,
            dim: 16,
            points: 600,
            separation: 2.5,
            noise: 1.0,
            dev_fraction: 0.5,
            labeled_fraction: 0.05,
        }
    }
}

impl BlobSpec {
    /// Network shapes used on the blobs: width 16, a linear generator.
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            k: self.classes,
            hidden_dim: self.dim,
            z_dim: self.dim,
            generator_hidden_layers: 0,
            discriminator_hidden_layers: 1,
            dropout: 0.1,
            leaky_slope: 0.2,
        }
    }

    /// Training schedule used on the blobs.
    pub fn train_config(&self, seed: u64, objective: Objective) -> TrainConfig {
        TrainConfig {
            max_seq_len: 0,
            batch_size: 32,
            lr_discriminator: 5e-3,
            lr_generator: 5e-3,
            adam_epsilon: 1e-8,
            epochs: 30,
            warmup_proportion: 0.1,
            seed,
            objective,
        }
    }
}

/// Draws the blobs and splits them: a stratified dev holdout, then a
/// stratified labeled subset of the remaining training pool.
pub fn blob_dataset(spec: &BlobSpec, seed: u64) -> Result<(LabelSchema, EmbeddingSet, DatasetSplit)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| {
            let dir: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            dir.iter().map(|v| v / norm * spec.separation).collect()
        })
        .collect();
    let schema = LabelSchema::new((0..spec.classes).map(|c| format!("class{c}")))?;
    let mut set = EmbeddingSet::new(spec.dim)?;
    let mut records = Vec::with_capacity(spec.points);
    for i in 0..spec.points {
        let class = i % spec.classes;
        let v: Vec<f32> = means[class]
            .iter()
            .map(|&m| (m + spec.noise * rng.sample::<f64, _>(StandardNormal)) as f32)
            .collect();
        let id = format!("blob{i}");
        set.push(id.clone(), &v)?;
        records.push(CitationRecord {
            record_id: id,
            citing_id: String::new(),
            cited_id: String::new(),
            context: String::new(),
            section: None,
            gold_intent: Some(class),
        });
    }
    let (train, dev) = stratified_holdout(&records, spec.dev_fraction, seed ^ 0x5eed)?;
    let split = make_split(&train, &schema, spec.labeled_fraction, seed)?.with_dev(&dev)?;
    Ok((schema, set, split))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_benchmark_shape() {
        let (schema, set, split) = blob_dataset(&BlobSpec::default(), 1).unwrap();
        assert_eq!(schema.k(), 3);
        assert_eq!(set.len(), 600);
        assert_eq!(split.dev.len(), 300);
        assert_eq!(split.labeled_train.len(), 15);
        assert_eq!(split.unlabeled_train.len(), 285);
    }
}
