use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::{Dropout, Mlp, Trace};
use crate::error::{Error, Result};
use crate::scalar::{softmax, Scalar};

/// Architecture of the generator/discriminator pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Number of real intent classes.
    pub k: usize,
    /// Embedding width `H`; also the width of every hidden layer.
    pub hidden_dim: usize,
    pub z_dim: usize,
    pub generator_hidden_layers: usize,
    pub discriminator_hidden_layers: usize,
    pub dropout: f64,
    pub leaky_slope: f64,
}

impl ModelConfig {
    /// SciCite setup: 768-wide embeddings, 768-dim noise, one hidden layer
    /// each, dropout 0.2.
    pub fn scicite() -> Self {
        Self {
            k: 3,
            hidden_dim: 768,
            z_dim: 768,
            generator_hidden_layers: 1,
            discriminator_hidden_layers: 1,
            dropout: 0.2,
            leaky_slope: 0.2,
        }
    }

    /// ACL-ARC / 3C setup: 100-dim noise, two generator hidden layers,
    /// dropout 0.1.
    pub fn acl_arc() -> Self {
        Self {
            k: 6,
            hidden_dim: 768,
            z_dim: 100,
            generator_hidden_layers: 2,
            discriminator_hidden_layers: 1,
            dropout: 0.1,
            leaky_slope: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Parameter(format!("k = {} must be at least 2", self.k)));
        }
        if self.hidden_dim == 0 || self.z_dim == 0 {
            return Err(Error::Parameter("hidden_dim and z_dim must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Parameter(format!("dropout {} not in [0, 1)", self.dropout)));
        }
        if !(self.leaky_slope >= 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::Parameter(format!(
                "leaky slope {} not in [0, 1)",
                self.leaky_slope
            )));
        }
        Ok(())
    }
}

fn widths(input: usize, hidden: usize, layers: usize, output: usize) -> Vec<usize> {
    let mut w = vec![input];
    w.extend(std::iter::repeat_n(hidden, layers));
    w.push(output);
    w
}

/// Conditional generator: `[noise ; one-hot(class)] -> R^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator<T> {
    pub mlp: Mlp<T>,
    pub z_dim: usize,
    pub k: usize,
}

impl<T: Scalar> Generator<T> {
    pub fn init(cfg: &ModelConfig, rng: &mut ChaCha8Rng) -> Self {
        let mlp = Mlp::init(
            &widths(cfg.z_dim + cfg.k, cfg.hidden_dim, cfg.generator_hidden_layers, cfg.hidden_dim),
            T::lit(cfg.leaky_slope),
            T::zero(),
            T::lit(cfg.dropout),
            rng,
        );
        Self {
            mlp,
            z_dim: cfg.z_dim,
            k: cfg.k,
        }
    }

    pub fn output_dim(&self) -> usize {
        self.mlp.out_dim()
    }

    pub(crate) fn conditioned_input(&self, noise: &[T], class_index: usize) -> Result<Vec<T>> {
        if class_index >= self.k {
            return Err(Error::Parameter(format!(
                "class index {class_index} out of range for k = {}",
                self.k
            )));
        }
        if noise.len() != self.z_dim {
            return Err(Error::Parameter(format!(
                "noise has length {}, expected {}",
                noise.len(),
                self.z_dim
            )));
        }
        let mut input = noise.to_vec();
        input.extend((0..self.k).map(|c| if c == class_index { T::one() } else { T::zero() }));
        Ok(input)
    }

    pub fn forward_traced(
        &self,
        noise: &[T],
        class_index: usize,
        dropout: &mut Dropout<'_>,
    ) -> Result<Trace<T>> {
        let input = self.conditioned_input(noise, class_index)?;
        Ok(self.mlp.forward(&input, dropout))
    }

    pub fn forward(
        &self,
        noise: &[T],
        class_index: usize,
        dropout: &mut Dropout<'_>,
    ) -> Result<Vec<T>> {
        Ok(self.forward_traced(noise, class_index, dropout)?.output)
    }
}

/// Synthesizes one fake embedding. With `train_mode` off no dropout is
/// applied and `rng` is untouched.
pub fn generator_forward<T: Scalar>(
    params: &Generator<T>,
    noise: &[T],
    class_index: usize,
    train_mode: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<T>> {
    let mut dropout = if train_mode {
        Dropout::Sample(rng)
    } else {
        Dropout::Off
    };
    params.forward(noise, class_index, &mut dropout)
}

/// `k + 1`-way discriminator over embeddings; class `k` is "synthetic".
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator<T> {
    pub mlp: Mlp<T>,
    pub k: usize,
    /// Index into the forward trace's layer inputs whose activations serve
    /// as matching features; `0` is the (dropped-out) input itself and
    /// `hidden_layers()` is the last hidden layer.
    pub feature_layer_index: usize,
}

/// Output of one discriminator pass.
#[derive(Debug, Clone)]
pub struct DiscriminatorOutput<T> {
    pub logits: Vec<T>,
    pub probs: Vec<T>,
    pub features: Vec<T>,
    pub trace: Trace<T>,
}

impl<T: Scalar> Discriminator<T> {
    pub fn init(cfg: &ModelConfig, rng: &mut ChaCha8Rng) -> Self {
        let mlp = Mlp::init(
            &widths(cfg.hidden_dim, cfg.hidden_dim, cfg.discriminator_hidden_layers, cfg.k + 1),
            T::lit(cfg.leaky_slope),
            T::lit(cfg.dropout),
            T::lit(cfg.dropout),
            rng,
        );
        Self {
            mlp,
            k: cfg.k,
            feature_layer_index: cfg.discriminator_hidden_layers,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.mlp.in_dim()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mlp.shapes_chain() {
            return Err(Error::Validation("discriminator layer shapes do not chain".into()));
        }
        if self.mlp.out_dim() != self.k + 1 {
            return Err(Error::Validation(format!(
                "discriminator emits {} logits, expected k + 1 = {}",
                self.mlp.out_dim(),
                self.k + 1
            )));
        }
        if self.feature_layer_index > self.mlp.hidden_layers() {
            return Err(Error::Validation(format!(
                "feature layer {} beyond {} hidden layers",
                self.feature_layer_index,
                self.mlp.hidden_layers()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[T], dropout: &mut Dropout<'_>) -> Result<DiscriminatorOutput<T>> {
        if x.len() != self.input_dim() {
            return Err(Error::Parameter(format!(
                "input has length {}, discriminator expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let trace = self.mlp.forward(x, dropout);
        let logits = trace.output.clone();
        let probs = softmax(&logits);
        let features = trace.inputs[self.feature_layer_index].clone();
        Ok(DiscriminatorOutput {
            logits,
            probs,
            features,
            trace,
        })
    }
}

/// Returns `(probs, features)` for one embedding.
pub fn discriminator_forward<T: Scalar>(
    params: &Discriminator<T>,
    x: &[T],
    train_mode: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<T>, Vec<T>)> {
    let mut dropout = if train_mode {
        Dropout::Sample(rng)
    } else {
        Dropout::Off
    };
    let out = params.forward(x, &mut dropout)?;
    Ok((out.probs, out.features))
}

/// Freshly initialized generator and discriminator for `cfg`.
pub fn init_networks<T: Scalar>(cfg: &ModelConfig, seed: u64) -> Result<(Generator<T>, Discriminator<T>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Discriminator::init(cfg, &mut rng);
    let g = Generator::init(cfg, &mut rng);
    Ok((g, d))
}
