use super::mlp::{Mlp, ParamBuffers};
use crate::scalar::Scalar;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;

/// Adam with bias correction; one instance per network.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub epsilon: T,
    pub step: u64,
    pub m: ParamBuffers<T>,
    pub v: ParamBuffers<T>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(mlp: &Mlp<T>, epsilon: T) -> Self {
        Self {
            epsilon,
            step: 0,
            m: ParamBuffers::zeros_like(mlp),
            v: ParamBuffers::zeros_like(mlp),
        }
    }

    pub fn update(&mut self, params: &mut Mlp<T>, grads: &ParamBuffers<T>, lr: T) {
        self.step += 1;
        let (b1, b2) = (T::lit(BETA1), T::lit(BETA2));
        let t = i32::try_from(self.step).unwrap_or(i32::MAX);
        let c1 = T::one() - b1.powi(t);
        let c2 = T::one() - b2.powi(t);
        let eps = self.epsilon;
        let slices = params
            .param_slices_mut()
            .zip(grads.slices())
            .zip(self.m.slices_mut().zip(self.v.slices_mut()));
        for ((p, g), (m, v)) in slices {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (T::one() - b1) * g[i];
                v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

/// Linear warm-up from 0 over `warmup` steps, then linear decay to 0 at
/// `total`. Returns the learning-rate multiplier for the 0-based `step`.
pub fn warmup_linear(step: usize, warmup: usize, total: usize) -> f64 {
    if step < warmup {
        return step as f64 / warmup as f64;
    }
    if total <= warmup {
        return 0.0;
    }
    ((total - step) as f64 / (total - warmup) as f64).max(0.0)
}
