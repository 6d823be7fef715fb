//! Single tanh unit over `n` inputs, mean-squared-error loss, Glorot-normal
//! initialization and full-batch gradient descent that records the loss and
//! the pure first/second/third derivatives of the loss with respect to every
//! weight at each epoch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::jets::{tanh_derivs, Jet3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl ModelParams {
    pub fn new(weights: Vec<f64>, bias: f64) -> Self {
        Self { weights, bias }
    }

    fn check(&self, data: &Dataset) -> Result<()> {
        if self.weights.len() != data.n_features() {
            return Err(Error::LengthMismatch {
                expected: data.n_features(),
                actual: self.weights.len(),
            });
        }
        Ok(())
    }

    /// Pre-activation `w·x + b`.
    pub fn preactivation(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.preactivation(x).tanh()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub runs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 300,
            seed: 7,
            runs: 5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Gradient history of one training run. Row `e` of each matrix holds
/// `∂ᵏL/∂w_jᵏ` for every feature `j`, evaluated before the epoch-`e` update.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientTrace {
    pub run_id: usize,
    pub seed_used: u64,
    pub loss: Vec<f64>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    pub d3: Vec<Vec<f64>>,
}

impl GradientTrace {
    pub fn epochs(&self) -> usize {
        self.loss.len()
    }

    pub fn n_features(&self) -> usize {
        self.d2.first().map_or(0, Vec::len)
    }

    pub fn d1_series(&self, j: usize) -> Vec<f64> {
        self.d1.iter().map(|row| row[j]).collect()
    }

    pub fn d2_series(&self, j: usize) -> Vec<f64> {
        self.d2.iter().map(|row| row[j]).collect()
    }

    pub fn d3_series(&self, j: usize) -> Vec<f64> {
        self.d3.iter().map(|row| row[j]).collect()
    }
}

pub fn glorot_variance(n_in: usize, n_out: usize) -> f64 {
    2.0 / (n_in + n_out) as f64
}

/// `n_in` independent draws from `N(0, 2/(n_in + n_out))`.
pub fn glorot_init<R: Rng + ?Sized>(n_in: usize, n_out: usize, rng: &mut R) -> Vec<f64> {
    let normal = Normal::new(0.0, glorot_variance(n_in, n_out).sqrt())
        .expect("glorot standard deviation is finite and positive");
    (0..n_in).map(|_| normal.sample(rng)).collect()
}

/// Scalar MSE, `(1/N) Σ (tanh(w·x + b) - t)²`.
pub fn loss(params: &ModelParams, data: &Dataset) -> f64 {
    let sum: f64 = data
        .rows()
        .zip(data.target())
        .map(|(x, t)| {
            let r = params.predict(x) - t;
            r * r
        })
        .sum();
    sum / data.n_samples() as f64
}

/// Squared residual of one sample given the pre-activation as a jet.
fn residual_sq(u: Jet3, tanh_u: &crate::jets::TanhDerivs, target: f64) -> Jet3 {
    (u.tanh_with(tanh_u) - Jet3::constant(target)).square()
}

/// Jet of the loss with respect to weight `j`: `v` is the loss, `d1..d3` are
/// `∂L/∂w_j`, `∂²L/∂w_j²`, `∂³L/∂w_j³`.
pub fn loss_jet(params: &ModelParams, data: &Dataset, j: usize) -> Result<Jet3> {
    if data.n_samples() == 0 {
        return Err(Error::EmptyDataset);
    }
    params.check(data)?;
    if j >= data.n_features() {
        return Err(Error::FeatureIndexOutOfRange {
            index: j,
            n_features: data.n_features(),
        });
    }
    let mut acc = Jet3::constant(0.0);
    for (x, &t) in data.rows().zip(data.target()) {
        let u = params.preactivation(x);
        // u is affine in w_j with slope x_j
        let u_jet = Jet3::new(u, x[j], 0.0, 0.0);
        acc = acc + residual_sq(u_jet, &tanh_derivs(u), t);
    }
    Ok(acc.scale(1.0 / data.n_samples() as f64))
}

/// [`loss_jet`] for every feature at once, sharing the forward pass per sample.
pub fn loss_jets(params: &ModelParams, data: &Dataset) -> Result<Vec<Jet3>> {
    if data.n_samples() == 0 {
        return Err(Error::EmptyDataset);
    }
    params.check(data)?;
    let mut acc = vec![Jet3::constant(0.0); data.n_features()];
    for (x, &t) in data.rows().zip(data.target()) {
        let u = params.preactivation(x);
        let tanh_u = tanh_derivs(u);
        for (a, &xj) in acc.iter_mut().zip(x) {
            *a = *a + residual_sq(Jet3::new(u, xj, 0.0, 0.0), &tanh_u, t);
        }
    }
    let inv_n = 1.0 / data.n_samples() as f64;
    Ok(acc.into_iter().map(|a| a.scale(inv_n)).collect())
}

/// `∂L/∂b`, from a jet seeded at the bias.
pub fn bias_gradient(params: &ModelParams, data: &Dataset) -> Result<f64> {
    if data.n_samples() == 0 {
        return Err(Error::EmptyDataset);
    }
    params.check(data)?;
    let mut acc = Jet3::constant(0.0);
    for (x, &t) in data.rows().zip(data.target()) {
        let u = params.preactivation(x);
        acc = acc + residual_sq(Jet3::new(u, 1.0, 0.0, 0.0), &tanh_derivs(u), t);
    }
    Ok(acc.scale(1.0 / data.n_samples() as f64).d1)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-run seed derived from the base seed and the run index.
pub fn run_seed(base: u64, run: usize) -> u64 {
    splitmix64(base ^ splitmix64(run as u64))
}

/// Train one run from a given initialization, recording the trace.
pub fn train_from(
    data: &Dataset,
    init: ModelParams,
    cfg: &TrainConfig,
    run_id: usize,
    seed_used: u64,
) -> Result<(ModelParams, GradientTrace)> {
    cfg.validate()?;
    let mut params = init;
    let mut trace = GradientTrace {
        run_id,
        seed_used,
        loss: Vec::with_capacity(cfg.epochs),
        d1: Vec::with_capacity(cfg.epochs),
        d2: Vec::with_capacity(cfg.epochs),
        d3: Vec::with_capacity(cfg.epochs),
    };
    for epoch in 0..cfg.epochs {
        let jets = loss_jets(&params, data)?;
        let grad_b = bias_gradient(&params, data)?;
        let loss = jets.first().map_or(f64::NAN, |j| j.v);
        if !loss.is_finite() || !grad_b.is_finite() || !jets.iter().all(Jet3::is_finite) {
            return Err(Error::Divergence { epoch });
        }
        trace.loss.push(loss);
        trace.d1.push(jets.iter().map(|j| j.d1).collect());
        trace.d2.push(jets.iter().map(|j| j.d2).collect());
        trace.d3.push(jets.iter().map(|j| j.d3).collect());

        for (w, jet) in params.weights.iter_mut().zip(&jets) {
            *w -= cfg.learning_rate * jet.d1;
        }
        params.bias -= cfg.learning_rate * grad_b;
        if !params.weights.iter().all(|w| w.is_finite()) || !params.bias.is_finite() {
            return Err(Error::Divergence { epoch });
        }
    }
    Ok((params, trace))
}

/// Glorot-normal weights (from the run's derived seed) and zero bias.
pub fn init_params(n_features: usize, seed: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ModelParams::new(glorot_init(n_features, 1, &mut rng), 0.0)
}

/// `cfg.runs` independently initialized training runs. Runs execute on
/// separate threads; each is fully determined by `(data, cfg, run index)`.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<Vec<(ModelParams, GradientTrace)>> {
    cfg.validate()?;
    if data.n_samples() == 0 {
        return Err(Error::EmptyDataset);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.runs)
            .map(|r| {
                scope.spawn(move || {
                    let seed = run_seed(cfg.seed, r);
                    train_from(data, init_params(data.n_features(), seed), cfg, r, seed)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    })
}
