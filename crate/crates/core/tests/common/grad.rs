//! Finite-difference checks of the GAN losses on small random networks.

use citegan::ssgan::{
    init_networks, loss_discriminator, loss_generator, Discriminator, Dropout, Generator, ModelConfig, Objective,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{finite_difference, relative_error};

pub const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

/// Worst relative error found for one loss on one network.
#[derive(Debug)]
pub struct GradCheck {
    pub case: String,
    pub params: usize,
    pub max_rel_error: f64,
}

pub struct Case {
    pub name: &'static str,
    pub cfg: ModelConfig,
    pub dropout: bool,
    pub seed: u64,
}

pub fn cases() -> Vec<Case> {
    let cfg = |g, d, dropout| ModelConfig {
        k: 3,
        hidden_dim: 6,
        z_dim: 4,
        generator_hidden_layers: g,
        discriminator_hidden_layers: d,
        dropout,
        leaky_slope: 0.2,
    };
    vec![
        Case { name: "G1/D1", cfg: cfg(1, 1, 0.0), dropout: false, seed: 11 },
        Case { name: "G2/D2", cfg: cfg(2, 2, 0.0), dropout: false, seed: 12 },
        Case { name: "G0/D1", cfg: cfg(0, 1, 0.0), dropout: false, seed: 13 },
        Case { name: "G1/D1 dropout", cfg: cfg(1, 1, 0.2), dropout: true, seed: 14 },
        Case { name: "G2/D2 dropout", cfg: cfg(2, 2, 0.1), dropout: true, seed: 15 },
    ]
}

fn normal_rows(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

struct Batch {
    labeled: Vec<(Vec<f64>, usize)>,
    unlabeled: Vec<Vec<f64>>,
    fake: Vec<Vec<f64>>,
    noise: Vec<Vec<f64>>,
    classes: Vec<usize>,
}

impl Batch {
    fn new(g: &Generator<f64>, cfg: &ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labeled = normal_rows(&mut rng, 4, cfg.hidden_dim)
            .into_iter()
            .enumerate()
            .map(|(i, x)| (x, i % cfg.k))
            .collect();
        let unlabeled = normal_rows(&mut rng, 3, cfg.hidden_dim);
        let noise = normal_rows(&mut rng, 3, cfg.z_dim);
        let classes: Vec<usize> = (0..3).map(|i| (i + 1) % cfg.k).collect();
        let fake = noise
            .iter()
            .zip(&classes)
            .map(|(z, &c)| g.forward(z, c, &mut Dropout::Off).unwrap())
            .collect();
        Self { labeled, unlabeled, fake, noise, classes }
    }

    fn d_loss(&self, d: &Discriminator<f64>, objective: Objective, mask_seed: Option<u64>) -> citegan::ssgan::DiscriminatorLoss<f64> {
        let labeled: Vec<(&[f64], usize)> = self.labeled.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
        let unlabeled: Vec<&[f64]> = self.unlabeled.iter().map(Vec::as_slice).collect();
        let fake: Vec<&[f64]> = self.fake.iter().map(Vec::as_slice).collect();
        with_dropout(mask_seed, |dropout| {
            loss_discriminator(d, &labeled, &unlabeled, &fake, objective, dropout).unwrap()
        })
    }

    fn g_loss(&self, g: &Generator<f64>, d: &Discriminator<f64>, mask_seed: Option<u64>) -> citegan::ssgan::GeneratorLoss<f64> {
        let real: Vec<&[f64]> = self
            .labeled
            .iter()
            .map(|(x, _)| x.as_slice())
            .chain(self.unlabeled.iter().map(Vec::as_slice))
            .collect();
        with_dropout(mask_seed, |dropout| {
            loss_generator(g, &self.noise, &self.classes, d, &real, dropout).unwrap()
        })
    }
}

/// Runs `f` with masks drawn from a freshly seeded generator, so every
/// evaluation sees the same masks.
fn with_dropout<R>(seed: Option<u64>, f: impl FnOnce(&mut Dropout<'_>) -> R) -> R {
    match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            f(&mut Dropout::Sample(&mut rng))
        }
        None => f(&mut Dropout::Off),
    }
}

fn flatten(slices: impl Iterator<Item = impl AsRef<[f64]>>) -> Vec<f64> {
    slices.flat_map(|s| s.as_ref().to_vec()).collect()
}

fn worst(case: String, analytic: &[f64], numeric: &[f64]) -> GradCheck {
    assert_eq!(analytic.len(), numeric.len());
    let max_rel_error = analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max);
    GradCheck { case, params: analytic.len(), max_rel_error }
}

/// Checks L_sup, L_unsup and L_G for one case.
fn select_d(d: &mut Discriminator<f64>) -> &mut citegan::ssgan::Mlp<f64> {
    &mut d.mlp
}

fn select_g(g: &mut Generator<f64>) -> &mut citegan::ssgan::Mlp<f64> {
    &mut g.mlp
}

pub fn check_case(case: &Case) -> Vec<GradCheck> {
    let (mut g, mut d) = init_networks::<f64>(&case.cfg, case.seed).unwrap();
    let batch = Batch::new(&g, &case.cfg, case.seed + 100);
    let masks = case.dropout.then_some(case.seed + 200);

    let sup = batch.d_loss(&d, Objective::SupervisedOnly, masks);
    let semi = batch.d_loss(&d, Objective::SemiSupervised, masks);
    let sup_grad = flatten(sup.grads.slices());
    let unsup_grad: Vec<f64> = flatten(semi.grads.slices())
        .iter()
        .zip(&sup_grad)
        .map(|(t, s)| t - s)
        .collect();
    let fd_sup = finite_difference(&mut d, select_d, |d| batch.d_loss(d, Objective::SupervisedOnly, masks).sup, STEP);
    let fd_unsup = finite_difference(&mut d, select_d, |d| batch.d_loss(d, Objective::SemiSupervised, masks).unsup, STEP);

    let gl = batch.g_loss(&g, &d, masks);
    let g_grad = flatten(gl.grads.slices());
    let fd_g = finite_difference(&mut g, select_g, |g| batch.g_loss(g, &d, masks).total(), STEP);

    vec![
        worst(format!("{} L_sup", case.name), &sup_grad, &fd_sup),
        worst(format!("{} L_unsup", case.name), &unsup_grad, &fd_unsup),
        worst(format!("{} L_G", case.name), &g_grad, &fd_g),
    ]
}
