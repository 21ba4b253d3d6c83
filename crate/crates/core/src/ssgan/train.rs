use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::adam::{warmup_linear, Adam};
use super::eval::{predict_one, EvalReport};
use super::loss::{loss_discriminator, loss_generator, Objective};
use super::mlp::Dropout;
use super::nets::{init_networks, Discriminator, Generator, ModelConfig};
use crate::error::{Error, Result};
use crate::ingest::{DatasetSplit, EmbeddingSet, LabelSchema};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Encoder truncation length; recorded for the embedding exporter only.
    pub max_seq_len: usize,
    pub batch_size: usize,
    pub lr_discriminator: f64,
    pub lr_generator: f64,
    pub adam_epsilon: f64,
    pub epochs: usize,
    pub warmup_proportion: f64,
    pub seed: u64,
    pub objective: Objective,
}

impl TrainConfig {
    pub fn scicite() -> Self {
        Self {
            max_seq_len: 160,
            batch_size: 32,
            lr_discriminator: 2e-7,
            lr_generator: 2e-7,
            adam_epsilon: 2e-7,
            epochs: 20,
            warmup_proportion: 0.1,
            seed: 42,
            objective: Objective::SemiSupervised,
        }
    }

    pub fn acl_arc() -> Self {
        Self {
            max_seq_len: 64,
            batch_size: 16,
            lr_discriminator: 5e-5,
            lr_generator: 5e-4,
            adam_epsilon: 2e-7,
            epochs: 30,
            warmup_proportion: 0.1,
            seed: 42,
            objective: Objective::SemiSupervised,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr_discriminator", self.lr_discriminator),
            ("lr_generator", self.lr_generator),
            ("adam_epsilon", self.adam_epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::Parameter("batch_size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.warmup_proportion) {
            return Err(Error::Parameter(format!(
                "warmup_proportion {} not in [0, 1)",
                self.warmup_proportion
            )));
        }
        Ok(())
    }
}

/// Discriminator, optional generator and their optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct GanModel<T> {
    pub config: ModelConfig,
    pub discriminator: Discriminator<T>,
    pub generator: Option<Generator<T>>,
    pub adam_discriminator: Option<Adam<T>>,
    pub adam_generator: Option<Adam<T>>,
}

impl<T: Scalar> GanModel<T> {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        let (g, d) = init_networks(&config, seed)?;
        Ok(Self {
            config,
            discriminator: d,
            generator: Some(g),
            adam_discriminator: None,
            adam_generator: None,
        })
    }

    /// Drops the generator and optimizer state, keeping only what
    /// classification needs.
    pub fn into_classifier(self) -> Self {
        Self {
            generator: None,
            adam_discriminator: None,
            adam_generator: None,
            ..self
        }
    }
}

/// Per-epoch training summary. Losses are means over the epoch's batches.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    /// 1-based.
    pub epoch: usize,
    pub sup: f64,
    pub unsup: f64,
    pub generator: f64,
    /// `None` when the split has no dev records.
    pub dev_macro_f1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Checkpoint from the epoch with the best dev macro-F1 (the last epoch
    /// when there is no dev set).
    pub model: GanModel<T>,
    pub log: Vec<EpochLog>,
    pub best_epoch: Option<usize>,
}

fn lookup<T: Scalar>(embeddings: &EmbeddingSet, id: &str) -> Result<Vec<T>> {
    embeddings
        .get(id)
        .map(|row| row.iter().map(|&v| T::lit(v as f64)).collect())
        .ok_or_else(|| Error::Validation(format!("no embedding for record {id:?}")))
}

fn gold_of(split: &DatasetSplit, id: &str, k: usize) -> Result<usize> {
    match split.gold.get(id) {
        Some(&g) if g < k => Ok(g),
        Some(&g) => Err(Error::Validation(format!(
            "record {id:?} has label {g} outside k = {k}"
        ))),
        None => Err(Error::Validation(format!("record {id:?} has no gold label"))),
    }
}

/// Macro-F1 of `d` on labeled rows, with dropout off.
pub fn macro_f1_on<T: Scalar>(d: &Discriminator<T>, rows: &[(Vec<T>, usize)]) -> Result<f64> {
    let k = d.k;
    let mut confusion = vec![vec![0; k]; k];
    for (x, y) in rows {
        let (p, _) = predict_one(d, x)?;
        confusion[*y][p] += 1;
    }
    let schema = LabelSchema::new((0..k).map(|c| format!("c{c}")))?;
    Ok(EvalReport::from_confusion(&schema, confusion).macro_f1)
}

fn check_finite(epoch: usize, what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Convergence(format!("{what} became {v} in epoch {epoch}")))
    }
}

/// Adversarial training: per batch, one discriminator step then one
/// generator step, both with Adam under a linear warm-up/decay schedule.
pub fn train<T: Scalar>(
    mut model: GanModel<T>,
    split: &DatasetSplit,
    embeddings: &EmbeddingSet,
    config: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    split.validate()?;
    let k = model.config.k;
    let semi = config.objective == Objective::SemiSupervised;
    if embeddings.dim() != model.discriminator.input_dim() {
        return Err(Error::Validation(format!(
            "embeddings have dim {}, model expects {}",
            embeddings.dim(),
            model.discriminator.input_dim()
        )));
    }
    if semi && model.generator.is_none() {
        return Err(Error::Validation(
            "semi-supervised training needs a generator".into(),
        ));
    }

    let mut pool: Vec<(Vec<T>, Option<usize>)> = Vec::new();
    for id in &split.labeled_train {
        pool.push((lookup(embeddings, id)?, Some(gold_of(split, id, k)?)));
    }
    for id in &split.unlabeled_train {
        pool.push((lookup(embeddings, id)?, None));
    }
    let dev = split
        .dev
        .iter()
        .map(|id| Ok((lookup(embeddings, id)?, gold_of(split, id, k)?)))
        .collect::<Result<Vec<_>>>()?;
    for id in &split.test {
        lookup::<T>(embeddings, id)?;
    }

    if config.epochs == 0 || pool.is_empty() {
        return Ok(TrainOutcome {
            model,
            log: Vec::new(),
            best_epoch: None,
        });
    }

    let eps = T::lit(config.adam_epsilon);
    let mut adam_d = model
        .adam_discriminator
        .take()
        .unwrap_or_else(|| Adam::new(&model.discriminator.mlp, eps));
    let mut adam_g = model
        .generator
        .as_ref()
        .map(|g| model.adam_generator.take().unwrap_or_else(|| Adam::new(&g.mlp, eps)));

    let batches_per_epoch = pool.len().div_ceil(config.batch_size);
    let total_steps = batches_per_epoch * config.epochs;
    let warmup_steps = (config.warmup_proportion * total_steps as f64) as usize;
    let lr_d = T::lit(config.lr_discriminator);
    let lr_g = T::lit(config.lr_generator);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    let mut step = 0;
    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, GanModel<T>)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let (mut sum_sup, mut sum_unsup, mut sum_g) = (0.0, 0.0, 0.0);
        for batch in order.chunks(config.batch_size) {
            let mult = T::lit(warmup_linear(step, warmup_steps, total_steps));
            step += 1;
            let labeled: Vec<(&[T], usize)> = batch
                .iter()
                .filter_map(|&i| pool[i].1.map(|y| (pool[i].0.as_slice(), y)))
                .collect();
            let unlabeled: Vec<&[T]> = batch
                .iter()
                .filter(|&&i| pool[i].1.is_none())
                .map(|&i| pool[i].0.as_slice())
                .collect();

            if !semi {
                if labeled.is_empty() {
                    continue;
                }
                let loss = loss_discriminator(
                    &model.discriminator,
                    &labeled,
                    &[],
                    &[],
                    Objective::SupervisedOnly,
                    &mut Dropout::Sample(&mut rng),
                )?;
                sum_sup += loss.sup.as_f64();
                adam_d.update(&mut model.discriminator.mlp, &loss.grads, lr_d * mult);
                continue;
            }

            let generator = model.generator.as_ref().expect("checked above");
            let z_dim = generator.z_dim;
            let classes: Vec<usize> = (0..batch.len()).map(|_| rng.random_range(0..k)).collect();
            let noise: Vec<Vec<T>> = (0..batch.len())
                .map(|_| {
                    (0..z_dim)
                        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                        .collect()
                })
                .collect();
            let fakes = noise
                .iter()
                .zip(&classes)
                .map(|(z, &c)| generator.forward(z, c, &mut Dropout::Sample(&mut rng)))
                .collect::<Result<Vec<_>>>()?;
            let fake_refs: Vec<&[T]> = fakes.iter().map(Vec::as_slice).collect();
            let d_loss = loss_discriminator(
                &model.discriminator,
                &labeled,
                &unlabeled,
                &fake_refs,
                Objective::SemiSupervised,
                &mut Dropout::Sample(&mut rng),
            )?;
            adam_d.update(&mut model.discriminator.mlp, &d_loss.grads, lr_d * mult);

            let real: Vec<&[T]> = batch.iter().map(|&i| pool[i].0.as_slice()).collect();
            let g_loss = loss_generator(
                generator,
                &noise,
                &classes,
                &model.discriminator,
                &real,
                &mut Dropout::Sample(&mut rng),
            )?;
            let generator = model.generator.as_mut().expect("checked above");
            adam_g
                .as_mut()
                .expect("generator present")
                .update(&mut generator.mlp, &g_loss.grads, lr_g * mult);

            sum_sup += d_loss.sup.as_f64();
            sum_unsup += d_loss.unsup.as_f64();
            sum_g += g_loss.total().as_f64();
        }
        let n = batches_per_epoch as f64;
        let entry = EpochLog {
            epoch,
            sup: sum_sup / n,
            unsup: sum_unsup / n,
            generator: sum_g / n,
            dev_macro_f1: if dev.is_empty() {
                None
            } else {
                Some(macro_f1_on(&model.discriminator, &dev)?)
            },
        };
        check_finite(epoch, "L_sup", entry.sup)?;
        check_finite(epoch, "L_unsup", entry.unsup)?;
        check_finite(epoch, "L_G", entry.generator)?;

        let score = entry.dev_macro_f1.unwrap_or(f64::NEG_INFINITY);
        let improves = match &best {
            None => true,
            Some((b, _, _)) => score > *b || entry.dev_macro_f1.is_none(),
        };
        if improves {
            let mut snapshot = model.clone();
            snapshot.adam_discriminator = Some(adam_d.clone());
            snapshot.adam_generator = adam_g.clone();
            best = Some((score, epoch, snapshot));
        }
        log.push(entry);
    }
    let (_, best_epoch, model) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        model,
        log,
        best_epoch: Some(best_epoch),
    })
}

/// Writes the training log CSV: `epoch,L_sup,L_unsup,L_G,dev_macro_f1`.
pub fn write_train_log<W: std::io::Write>(log: &[EpochLog], out: W) -> csv::Result<()> {
    use crate::scalar::fmt_float;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["epoch", "L_sup", "L_unsup", "L_G", "dev_macro_f1"])?;
    for e in log {
        w.write_record([
            e.epoch.to_string(),
            fmt_float(e.sup),
            fmt_float(e.unsup),
            fmt_float(e.generator),
            e.dev_macro_f1.map(fmt_float).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
