use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How fresh learner policies are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    #[default]
    Uniform,
    Random,
}

/// Policy given to a learner whose interaction-graph row is new after a
/// meta-graph update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NewRowInit {
    /// Copy the policy of the slot whose previous row is L1-nearest.
    #[default]
    CloneNearest,
    /// Start from a fresh policy (see [`InitKind`]).
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Number of epochs (graph updates for adaptive solvers).
    pub epochs: usize,
    /// Iterations per epoch.
    pub iterations: usize,
    /// Episodes per iteration.
    pub episodes: usize,
    /// Fraction of each iteration's episodes spent on all-to-all evaluation.
    pub eval_split: f64,
    pub learning_rate: f64,
    /// Probability that an exploring learner acts uniformly at random.
    pub explore: f64,
    pub discount: f64,
    pub seed: u64,
    pub population_size: usize,
    /// Payoff estimator decay; 1 gives a plain running mean.
    pub ema_decay: f64,
    /// Episodes per ordered pair for Monte-Carlo evaluation.
    pub eval_episodes: usize,
    pub learner_init: InitKind,
    pub new_row_init: NewRowInit,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            iterations: 10,
            episodes: 10,
            eval_split: 0.3,
            learning_rate: 0.05,
            explore: 0.1,
            discount: 1.0,
            seed: 0,
            population_size: 4,
            ema_decay: 1.0,
            eval_episodes: 200,
            learner_init: InitKind::Uniform,
            new_row_init: NewRowInit::CloneNearest,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return invalid("episodes must be at least 1");
        }
        if self.population_size == 0 {
            return invalid("population_size must be at least 1");
        }
        if self.eval_episodes == 0 {
            return invalid("eval_episodes must be at least 1");
        }
        if !(0.0..1.0).contains(&self.eval_split) {
            return invalid(format!("eval_split must lie in [0, 1), got {}", self.eval_split));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return invalid(format!("learning_rate must lie in (0, 1], got {}", self.learning_rate));
        }
        if !(0.0..=1.0).contains(&self.explore) {
            return invalid(format!("explore must lie in [0, 1], got {}", self.explore));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return invalid(format!("discount must lie in (0, 1], got {}", self.discount));
        }
        if !(self.ema_decay > 0.0 && self.ema_decay <= 1.0) {
            return invalid(format!("ema_decay must lie in (0, 1], got {}", self.ema_decay));
        }
        Ok(())
    }

    /// Per-iteration split of `episodes` into (training, evaluation).
    pub fn episode_split(&self) -> (usize, usize) {
        let eval = ((self.episodes as f64) * self.eval_split).round() as usize;
        let eval = eval.min(self.episodes);
        (self.episodes - eval, eval)
    }
}
