//! Semi-supervised conditional GAN intent classifier.
//!
//! A conditional generator maps Gaussian noise plus a one-hot class vector
//! to synthetic embeddings; a `k + 1`-way discriminator labels real
//! embeddings with one of `k` intents and flags synthetic ones as class `k`.
//! After training only the discriminator is needed for classification.

mod adam;
mod blobs;
mod checkpoint;
mod eval;
mod loss;
mod mlp;
mod nets;
mod predictions;
mod train;

pub use adam::{warmup_linear, Adam, BETA1, BETA2};
pub use blobs::{blob_dataset, BlobSpec};
pub use checkpoint::{read_model, read_model_from, write_model, write_model_to, CGAN_MAGIC, CGAN_VERSION};
pub use eval::{classify, evaluate, predict_one, Average, EvalReport, Prediction};
pub use loss::{
    generator_objective, loss_discriminator, loss_generator, DiscriminatorLoss, GeneratorLoss,
    Objective,
};
pub use mlp::{Dense, Dropout, Mlp, ParamBuffers, Trace};
pub use nets::{
    discriminator_forward, generator_forward, init_networks, Discriminator, DiscriminatorOutput,
    Generator, ModelConfig,
};
pub use predictions::{
    read_predictions, read_predictions_file, write_predictions, write_predictions_file, PREDICTION_HEADER,
};
pub use train::{macro_f1_on, train, write_train_log, EpochLog, GanModel, TrainConfig, TrainOutcome};
