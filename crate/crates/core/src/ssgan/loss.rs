//! Adversarial objectives and their exact gradients.
//!
//! Discriminator, with `p = softmax(logits)` over `k + 1` classes and
//! `p_fake = p[k]`:
//!
//! * `L_sup   = mean_labeled  -log( p[y] / sum_{c<k} p[c] )`
//! * `L_unsup = mean_real     -log(1 - p_fake)  +  mean_fake -log(p_fake)`
//!
//! Generator:
//!
//! * `L_G = mean_fake -log(1 - p_fake)  +  || mean_real f - mean_fake f ||^2`
//!
//! where `f` are the discriminator's feature-layer activations. Every
//! log-probability is evaluated in log-sum-exp form, so
//! `-log(1 - p_fake) = lse(all) - lse(real)` never sees `log(0)`.

use super::mlp::{Dropout, ParamBuffers};
use super::nets::{Discriminator, Generator};
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};

/// Which discriminator terms are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `L_sup + L_unsup`.
    SemiSupervised,
    /// `L_sup` alone; the supervised-only baseline.
    SupervisedOnly,
}

#[derive(Debug, Clone)]
pub struct DiscriminatorLoss<T> {
    pub sup: T,
    pub unsup: T,
    /// Gradient of `sup + unsup` w.r.t. discriminator parameters.
    pub grads: ParamBuffers<T>,
}

impl<T: Scalar> DiscriminatorLoss<T> {
    pub fn total(&self) -> T {
        self.sup + self.unsup
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorLoss<T> {
    pub fool: T,
    pub feature_matching: T,
    /// Gradient of `fool + feature_matching` w.r.t. generator parameters.
    pub grads: ParamBuffers<T>,
}

impl<T: Scalar> GeneratorLoss<T> {
    pub fn total(&self) -> T {
        self.fool + self.feature_matching
    }
}

/// `-log(1 - p_fake)` and its gradient w.r.t. the logits, scaled by `w`.
fn real_term<T: Scalar>(logits: &[T], k: usize, w: T, d_logits: &mut [T]) -> T {
    let lse_all = log_sum_exp(logits);
    let lse_real = log_sum_exp(&logits[..k]);
    for (c, (&l, g)) in logits.iter().zip(d_logits.iter_mut()).enumerate() {
        let p_all = (l - lse_all).exp();
        let p_real = if c < k { (l - lse_real).exp() } else { T::zero() };
        *g += w * (p_all - p_real);
    }
    lse_all - lse_real
}

/// `-log p_fake` and its gradient w.r.t. the logits, scaled by `w`.
fn fake_term<T: Scalar>(logits: &[T], k: usize, w: T, d_logits: &mut [T]) -> T {
    let lse_all = log_sum_exp(logits);
    for (c, (&l, g)) in logits.iter().zip(d_logits.iter_mut()).enumerate() {
        let onehot = if c == k { T::one() } else { T::zero() };
        *g += w * ((l - lse_all).exp() - onehot);
    }
    lse_all - logits[k]
}

/// Real-class-renormalized cross-entropy and its gradient, scaled by `w`.
fn supervised_term<T: Scalar>(logits: &[T], k: usize, y: usize, w: T, d_logits: &mut [T]) -> T {
    let lse_real = log_sum_exp(&logits[..k]);
    for (c, (&l, g)) in logits[..k].iter().zip(d_logits.iter_mut()).enumerate() {
        let onehot = if c == y { T::one() } else { T::zero() };
        *g += w * ((l - lse_real).exp() - onehot);
    }
    lse_real - logits[y]
}

fn mean_weight<T: Scalar>(n: usize) -> T {
    if n == 0 {
        T::zero()
    } else {
        T::one() / T::from_usize_lossy(n)
    }
}

/// Discriminator losses and exact parameter gradients for one batch.
///
/// Fakes are treated as constants (no gradient reaches the generator). An
/// empty labeled batch yields `L_sup = 0`.
pub fn loss_discriminator<T: Scalar>(
    d: &Discriminator<T>,
    labeled: &[(&[T], usize)],
    unlabeled: &[&[T]],
    fake: &[&[T]],
    objective: Objective,
    dropout: &mut Dropout<'_>,
) -> Result<DiscriminatorLoss<T>> {
    let k = d.k;
    if let Some((_, y)) = labeled.iter().find(|(_, y)| *y >= k) {
        return Err(Error::Parameter(format!("label {y} out of range for k = {k}")));
    }
    let semi = objective == Objective::SemiSupervised;
    let w_sup = mean_weight::<T>(labeled.len());
    let w_real = mean_weight::<T>(labeled.len() + unlabeled.len());
    let w_fake = mean_weight::<T>(fake.len());

    let mut grads = ParamBuffers::zeros_like(&d.mlp);
    let mut sup = T::zero();
    let mut unsup = T::zero();
    let mut d_logits = vec![T::zero(); k + 1];

    let labeled_iter = labeled.iter().map(|&(x, y)| (x, Some(y), false));
    let unlabeled_iter = unlabeled.iter().map(|&x| (x, None, false));
    let fake_iter = fake.iter().map(|&x| (x, None, true));
    for (x, y, is_fake) in labeled_iter.chain(unlabeled_iter).chain(fake_iter) {
        if !semi && y.is_none() {
            continue;
        }
        let out = d.forward(x, dropout)?;
        d_logits.fill(T::zero());
        if let Some(y) = y {
            sup += w_sup * supervised_term(&out.logits, k, y, w_sup, &mut d_logits);
        }
        if semi {
            unsup += if is_fake {
                w_fake * fake_term(&out.logits, k, w_fake, &mut d_logits)
            } else {
                w_real * real_term(&out.logits, k, w_real, &mut d_logits)
            };
        }
        d.mlp.backward(&out.trace, &d_logits, None, Some(&mut grads));
    }
    Ok(DiscriminatorLoss { sup, unsup, grads })
}

/// Generator objective evaluated on given fake embeddings.
///
/// Returns `(fool, feature_matching, d_loss/d_fake)` with one gradient row
/// per fake. The discriminator is held fixed.
pub fn generator_objective<T: Scalar>(
    d: &Discriminator<T>,
    fake: &[&[T]],
    real: &[&[T]],
    dropout: &mut Dropout<'_>,
) -> Result<(T, T, Vec<Vec<T>>)> {
    if fake.is_empty() || real.is_empty() {
        return Err(Error::Parameter(
            "generator loss needs non-empty real and fake batches".into(),
        ));
    }
    let k = d.k;
    let mut mean_real: Option<Vec<T>> = None;
    for &x in real {
        let f = d.forward(x, dropout)?.features;
        match &mut mean_real {
            None => mean_real = Some(f),
            Some(acc) => acc.iter_mut().zip(&f).for_each(|(a, &b)| *a += b),
        }
    }
    let w_real = mean_weight::<T>(real.len());
    let mut mean_real = mean_real.expect("non-empty");
    mean_real.iter_mut().for_each(|v| *v *= w_real);

    let outs = fake
        .iter()
        .map(|&x| d.forward(x, dropout))
        .collect::<Result<Vec<_>>>()?;
    let w_fake = mean_weight::<T>(fake.len());
    let mut mean_fake = vec![T::zero(); mean_real.len()];
    for o in &outs {
        mean_fake.iter_mut().zip(&o.features).for_each(|(a, &b)| *a += b);
    }
    mean_fake.iter_mut().for_each(|v| *v *= w_fake);

    let diff: Vec<T> = mean_real.iter().zip(&mean_fake).map(|(&r, &f)| r - f).collect();
    let feature_matching: T = diff.iter().map(|&v| v * v).sum();
    // d fm / d f_j = -2 (mean_real - mean_fake) / m
    let two = T::lit(2.0);
    let d_feature: Vec<T> = diff.iter().map(|&v| -two * v * w_fake).collect();

    let mut fool = T::zero();
    let mut d_fakes = Vec::with_capacity(fake.len());
    let mut d_logits = vec![T::zero(); k + 1];
    for o in &outs {
        d_logits.fill(T::zero());
        fool += w_fake * real_term(&o.logits, k, w_fake, &mut d_logits);
        let dx = d
            .mlp
            .backward(&o.trace, &d_logits, Some((d.feature_layer_index, &d_feature)), None);
        d_fakes.push(dx);
    }
    Ok((fool, feature_matching, d_fakes))
}

/// Generator loss and exact gradients w.r.t. generator parameters for
/// fakes synthesized from `(noise[i], classes[i])`.
pub fn loss_generator<T: Scalar>(
    g: &Generator<T>,
    noise: &[Vec<T>],
    classes: &[usize],
    d: &Discriminator<T>,
    real: &[&[T]],
    dropout: &mut Dropout<'_>,
) -> Result<GeneratorLoss<T>> {
    if noise.len() != classes.len() {
        return Err(Error::Parameter("noise and class batches differ in length".into()));
    }
    if g.output_dim() != d.input_dim() {
        return Err(Error::Parameter(format!(
            "generator emits {} values, discriminator expects {}",
            g.output_dim(),
            d.input_dim()
        )));
    }
    let traces = noise
        .iter()
        .zip(classes)
        .map(|(z, &c)| g.forward_traced(z, c, dropout))
        .collect::<Result<Vec<_>>>()?;
    let fakes: Vec<&[T]> = traces.iter().map(|t| t.output.as_slice()).collect();
    let (fool, feature_matching, d_fakes) = generator_objective(d, &fakes, real, dropout)?;
    let mut grads = ParamBuffers::zeros_like(&g.mlp);
    for (trace, d_out) in traces.iter().zip(&d_fakes) {
        g.mlp.backward(trace, d_out, None, Some(&mut grads));
    }
    Ok(GeneratorLoss {
        fool,
        feature_matching,
        grads,
    })
}
