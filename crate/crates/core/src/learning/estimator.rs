//! Running per-pair payoff estimates from episode returns.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Matrix;

/// Per-ordered-pair mean episode return.
///
/// Each update moves the mean toward the new return with rate
/// `max(1 / count, 1 - ema_decay)`: with `ema_decay = 1` this is the plain
/// running mean (the least-squares fit to all observed returns); smaller
/// decays weight recent returns more once enough samples have arrived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffEstimator {
    mean: Vec<Vec<f64>>,
    count: Vec<Vec<u64>>,
    ema_decay: f64,
}

impl PayoffEstimator {
    pub fn new(n: usize, ema_decay: f64) -> Result<Self> {
        if !(ema_decay > 0.0 && ema_decay <= 1.0) {
            return invalid(format!("ema_decay must lie in (0, 1], got {ema_decay}"));
        }
        Ok(Self { mean: vec![vec![0.0; n]; n], count: vec![vec![0; n]; n], ema_decay })
    }

    pub fn size(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.mean[i][j]
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.count[i][j]
    }

    pub fn ema_decay(&self) -> f64 {
        self.ema_decay
    }

    fn push(&mut self, i: usize, j: usize, value: f64) {
        self.count[i][j] += 1;
        let rate = (1.0 / self.count[i][j] as f64).max(1.0 - self.ema_decay);
        self.mean[i][j] += rate * (value - self.mean[i][j]);
    }

    /// Records `episode_return` for `(i, j)` and its negation for `(j, i)`.
    pub fn update(&mut self, i: usize, j: usize, episode_return: f64) -> Result<()> {
        let n = self.size();
        if i >= n || j >= n {
            return invalid(format!("pair ({i}, {j}) out of range for {n} slots"));
        }
        self.push(i, j, episode_return);
        self.push(j, i, -episode_return);
        Ok(())
    }

    /// Antisymmetrized estimate; pairs never observed read as 0.
    pub fn payoffs(&self) -> Matrix {
        let n = self.size();
        Matrix::from_fn(n, n, |i, j| match (self.count[i][j] > 0, self.count[j][i] > 0) {
            (true, true) => 0.5 * (self.mean[i][j] - self.mean[j][i]),
            (true, false) => self.mean[i][j],
            (false, true) => -self.mean[j][i],
            (false, false) => 0.0,
        })
    }

    /// Folds another estimator's statistics in: counts add, means combine
    /// count-weighted.
    pub fn merge(&mut self, other: &PayoffEstimator) -> Result<()> {
        if other.size() != self.size() {
            return invalid("cannot merge estimators of different sizes");
        }
        for i in 0..self.size() {
            for j in 0..self.size() {
                let (a, b) = (self.count[i][j], other.count[i][j]);
                if a + b > 0 {
                    self.mean[i][j] = (a as f64 * self.mean[i][j] + b as f64 * other.mean[i][j]) / (a + b) as f64;
                    self.count[i][j] = a + b;
                }
            }
        }
        Ok(())
    }
}

/// Functional form of [`PayoffEstimator::update`].
pub fn update_payoff_estimator(mut est: PayoffEstimator, i: usize, j: usize, episode_return: f64) -> Result<PayoffEstimator> {
    est.update(i, j, episode_return)?;
    Ok(est)
}
