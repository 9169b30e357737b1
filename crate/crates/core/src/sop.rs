//! Structured perceptron with a TSP oracle as the inference step.
//!
//! Costs are minimised, so for a prediction `x̂` and a true tour `x` the
//! update is `w <- w + δ (Φ(x̂) - Φ(x))`: features the prediction uses more
//! than the truth get more expensive.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Tour, WeightVector};
use crate::tsp::{CostMatrix, TourSolver};
use crate::{Error, Result};

/// One training pair: whatever the stage needs to build costs and features,
/// plus the historical tour.
pub trait StructuredExample {
    fn id(&self) -> &str;
    /// `Φ(u, t)`; `w · Φ(u, t)` must equal the cost of `t` under `cost_matrix(w)`.
    fn features(&self, t: &Tour) -> Result<Vec<f64>>;
    fn cost_matrix(&self, w: &WeightVector) -> Result<CostMatrix>;
    fn target(&self) -> &Tour;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub initial: WeightVector,
    /// Visit examples in a seeded random order each epoch instead of data order.
    #[serde(default)]
    pub shuffle_seed: Option<u64>,
}

impl TrainConfig {
    pub const DEFAULT_LEARNING_RATE: f64 = 1e-5;

    pub fn new(initial: WeightVector) -> Self {
        TrainConfig {
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            epochs: 1,
            initial,
            shuffle_seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid(alloc::format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if self.initial.is_empty() {
            return Err(Error::invalid("initial weights are empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Weights at the end of the epoch (epoch 0: initial weights).
    pub weights: WeightVector,
    pub updates: usize,
    /// Mean Euclidean norm of `Φ(x̂) - Φ(x)` over the updates of the epoch.
    pub mean_gap_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub epochs: Vec<EpochStats>,
}

impl TrainTrace {
    pub fn final_weights(&self) -> &WeightVector {
        &self.epochs.last().expect("trace holds the initial snapshot").weights
    }
}

/// `w + δ (pred - target)`, component-wise.
pub fn perceptron_step(
    w: &WeightVector,
    phi_pred: &[f64],
    phi_target: &[f64],
    learning_rate: f64,
) -> Result<WeightVector> {
    if phi_pred.len() != w.len() || phi_target.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: if phi_pred.len() != w.len() { phi_pred.len() } else { phi_target.len() },
        });
    }
    let mut next = w.clone();
    for ((v, p), t) in next.values_mut().iter_mut().zip(phi_pred).zip(phi_target) {
        *v += learning_rate * (p - t);
    }
    WeightVector::new(next.values().to_vec())
}

fn oracle_error(id: &str, epoch: usize, e: Error) -> Error {
    Error::Oracle {
        instance: String::from(id),
        epoch,
        source: Box::new(e),
    }
}

/// Run `cfg.epochs` passes of the perceptron over `data`. Inference calls
/// `solver` with the current weights, so examples are processed strictly in
/// sequence.
pub fn train<E: StructuredExample>(
    data: &[E],
    cfg: &TrainConfig,
    solver: &dyn TourSolver,
) -> Result<(WeightVector, TrainTrace)> {
    cfg.validate()?;
    let dim = cfg.initial.len();
    let mut w = cfg.initial.clone();
    let mut trace = TrainTrace {
        epochs: alloc::vec![EpochStats {
            epoch: 0,
            weights: w.clone(),
            updates: 0,
            mean_gap_norm: 0.0,
        }],
    };
    let mut rng = cfg.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=cfg.epochs {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut updates = 0;
        let mut gap_sum = 0.0;
        for &k in &order {
            let ex = &data[k];
            let wrap = |e| oracle_error(ex.id(), epoch, e);
            let costs = ex.cost_matrix(&w).map_err(wrap)?;
            let predicted = solver.solve(&costs).map_err(wrap)?;
            if predicted.same_circuit(ex.target()) {
                continue;
            }
            let phi_pred = ex.features(&predicted)?;
            let phi_true = ex.features(ex.target())?;
            if phi_pred.len() != dim || phi_true.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: phi_pred.len() });
            }
            gap_sum += libm::sqrt(phi_pred.iter().zip(&phi_true).map(|(a, b)| (a - b) * (a - b)).sum());
            w = perceptron_step(&w, &phi_pred, &phi_true, cfg.learning_rate)?;
            updates += 1;
        }
        trace.epochs.push(EpochStats {
            epoch,
            weights: w.clone(),
            updates,
            mean_gap_norm: if updates == 0 { 0.0 } else { gap_sum / updates as f64 },
        });
    }
    Ok((w, trace))
}
