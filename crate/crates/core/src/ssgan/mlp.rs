//! Dense leaky-rectifier MLP with dropout and hand-written backpropagation.
//!
//! Layout: optional input dropout, then for every hidden layer
//! `Linear -> LeakyReLU -> Dropout`, then a linear output layer. Dropout
//! sites are numbered by the layer whose input they feed: site 0 is the
//! input, site `i > 0` follows hidden layer `i - 1`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Fully connected layer, weights row-major `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![T::zero(); in_dim * out_dim],
            bias: vec![T::zero(); out_dim],
        }
    }

    /// Uniform `(-1/sqrt(in), 1/sqrt(in))` initialization for weights and bias.
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let mut draw = || T::lit(rng.random_range(-bound..bound));
        let weights = (0..in_dim * out_dim).map(|_| draw()).collect();
        let bias = (0..out_dim).map(|_| draw()).collect();
        Self {
            in_dim,
            out_dim,
            weights,
            bias,
        }
    }

    fn forward(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.in_dim);
        self.weights
            .chunks_exact(self.in_dim)
            .zip(&self.bias)
            .map(|(row, &b)| row.iter().zip(x).fold(b, |acc, (&w, &xi)| acc + w * xi))
            .collect()
    }
}

/// Per-parameter buffers shaped like an [`Mlp`]: gradients and optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBuffers<T> {
    pub layers: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> ParamBuffers<T> {
    pub fn zeros_like(mlp: &Mlp<T>) -> Self {
        Self {
            layers: mlp
                .layers
                .iter()
                .map(|l| (vec![T::zero(); l.weights.len()], vec![T::zero(); l.bias.len()]))
                .collect(),
        }
    }

    pub fn slices(&self) -> impl Iterator<Item = &[T]> {
        self.layers
            .iter()
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
    }

    pub fn slices_mut(&mut self) -> impl Iterator<Item = &mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|(w, b)| [w.as_mut_slice(), b.as_mut_slice()])
    }

    pub fn scale(&mut self, factor: T) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.slices_mut().zip(other.slices()) {
            a.iter_mut().zip(b).for_each(|(x, &y)| *x += y);
        }
    }
}

/// Whether dropout is active, and where its masks come from.
pub enum Dropout<'a> {
    Off,
    Sample(&'a mut ChaCha8Rng),
}

impl Dropout<'_> {
    fn mask<T: Scalar>(&mut self, len: usize, rate: T) -> Option<Vec<T>> {
        match self {
            Dropout::Off => None,
            Dropout::Sample(_) if rate <= T::zero() => None,
            Dropout::Sample(rng) => {
                let keep = T::one() - rate;
                let scale = T::one() / keep;
                let p = keep.as_f64();
                Some(
                    (0..len)
                        .map(|_| if rng.random_bool(p) { scale } else { T::zero() })
                        .collect(),
                )
            }
        }
    }
}

/// Activations retained from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct Trace<T> {
    /// `inputs[i]` is what layer `i` consumed, after dropout.
    pub inputs: Vec<Vec<T>>,
    /// Hidden-layer pre-activations.
    pre: Vec<Vec<T>>,
    masks: Vec<Option<Vec<T>>>,
    pub output: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub layers: Vec<Dense<T>>,
    pub slope: T,
    pub input_dropout: T,
    pub hidden_dropout: T,
}

impl<T: Scalar> Mlp<T> {
    /// Builds `widths[0] -> widths[1] -> ... -> widths[last]`.
    pub fn init(widths: &[usize], slope: T, input_dropout: T, hidden_dropout: T, rng: &mut ChaCha8Rng) -> Self {
        assert!(widths.len() >= 2, "an MLP needs at least one layer");
        Self {
            layers: widths
                .windows(2)
                .map(|w| Dense::init(w[0], w[1], rng))
                .collect(),
            slope,
            input_dropout,
            hidden_dropout,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim
    }

    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    /// Checks that consecutive layer shapes chain.
    pub fn shapes_chain(&self) -> bool {
        !self.layers.is_empty()
            && self.layers.iter().all(|l| {
                l.weights.len() == l.in_dim * l.out_dim && l.bias.len() == l.out_dim
            })
            && self.layers.windows(2).all(|w| w[0].out_dim == w[1].in_dim)
    }

    pub fn param_slices(&self) -> impl Iterator<Item = &[T]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
    }

    pub fn param_slices_mut(&mut self) -> impl Iterator<Item = &mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
    }

    pub fn param_count(&self) -> usize {
        self.param_slices().map(<[T]>::len).sum()
    }

    fn leaky(&self, z: T) -> T {
        if z > T::zero() {
            z
        } else {
            self.slope * z
        }
    }

    fn leaky_grad(&self, z: T) -> T {
        if z > T::zero() {
            T::one()
        } else {
            self.slope
        }
    }

    pub fn forward(&self, x: &[T], dropout: &mut Dropout<'_>) -> Trace<T> {
        assert_eq!(x.len(), self.in_dim(), "input width mismatch");
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut pre = Vec::with_capacity(n - 1);
        let mut masks = Vec::with_capacity(n);

        let mut cur = x.to_vec();
        let mask = dropout.mask(cur.len(), self.input_dropout);
        apply_mask(&mut cur, mask.as_deref());
        masks.push(mask);
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&cur);
            inputs.push(cur);
            if i + 1 == n {
                return Trace {
                    inputs,
                    pre,
                    masks,
                    output: z,
                };
            }
            let mut act: Vec<T> = z.iter().map(|&v| self.leaky(v)).collect();
            let mask = dropout.mask(act.len(), self.hidden_dropout);
            apply_mask(&mut act, mask.as_deref());
            masks.push(mask);
            pre.push(z);
            cur = act;
        }
        unreachable!("loop returns at the output layer")
    }

    /// Backpropagates `d_output` (gradient w.r.t. the linear output) plus an
    /// optional gradient injected at `inputs[site]`. Parameter gradients are
    /// accumulated into `grads` when given. Returns the gradient w.r.t. the
    /// raw input `x`.
    pub fn backward(
        &self,
        trace: &Trace<T>,
        d_output: &[T],
        inject: Option<(usize, &[T])>,
        mut grads: Option<&mut ParamBuffers<T>>,
    ) -> Vec<T> {
        let mut g_z = d_output.to_vec();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let x = &trace.inputs[i];
            if let Some(grads) = grads.as_deref_mut() {
                let (gw, gb) = &mut grads.layers[i];
                for (o, &gz) in g_z.iter().enumerate() {
                    if gz == T::zero() {
                        continue;
                    }
                    gb[o] += gz;
                    let row = &mut gw[o * layer.in_dim..(o + 1) * layer.in_dim];
                    row.iter_mut().zip(x).for_each(|(g, &xi)| *g += gz * xi);
                }
            }
            let mut g_x = vec![T::zero(); layer.in_dim];
            for (row, &gz) in layer.weights.chunks_exact(layer.in_dim).zip(&g_z) {
                if gz == T::zero() {
                    continue;
                }
                g_x.iter_mut().zip(row).for_each(|(g, &w)| *g += gz * w);
            }
            if let Some((site, extra)) = inject {
                if site == i {
                    g_x.iter_mut().zip(extra).for_each(|(g, &e)| *g += e);
                }
            }
            apply_mask(&mut g_x, trace.masks[i].as_deref());
            if i == 0 {
                return g_x;
            }
            g_z = g_x
                .iter()
                .zip(&trace.pre[i - 1])
                .map(|(&g, &z)| g * self.leaky_grad(z))
                .collect();
        }
        unreachable!("loop returns at layer 0")
    }
}

fn apply_mask<T: Scalar>(v: &mut [T], mask: Option<&[T]>) {
    if let Some(mask) = mask {
        v.iter_mut().zip(mask).for_each(|(x, &m)| *x *= m);
    }
}
