//! The two kinds of environment populations train in, behind one interface.

use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::config::{InitKind, TrainConfig};
use crate::error::{invalid, Result};
use crate::exec::Executor;
use crate::games::{bilinear, play_episode, play_episode_exploring, rps_reward, MarkovGame, MatrixGame, Observation, Step, RPS_ACTIONS};
use crate::policy::{argmax_uniform, MixedStrategy, TabularPolicy};
use crate::{rng_for, Matrix, Rng};

/// Tie tolerance for exact best responses.
pub const BR_TIE_TOL: f64 = 1e-9;

/// An environment that populations can be trained and evaluated in.
pub trait Domain: Sync {
    type Policy: Clone + PartialEq + Debug + Send + Sync + Serialize + DeserializeOwned;
    /// What a learner needs from one of its episodes to update.
    type Trace: Send;

    fn uniform_policy(&self) -> Self::Policy;
    fn random_policy(&self, rng: &mut Rng) -> Self::Policy;

    fn initial_policy(&self, kind: InitKind, rng: &mut Rng) -> Self::Policy {
        match kind {
            InitKind::Uniform => self.uniform_policy(),
            InitKind::Random => self.random_policy(rng),
        }
    }

    /// Plays one episode; returns the learner's return and its trace.
    fn rollout(&self, learner: &Self::Policy, opponent: &Self::Policy, explore: f64, rng: &mut Rng) -> (f64, Self::Trace);

    /// One approximate best-response step for `learner` from an episode it
    /// played, given the opponent mixture it trains against.
    fn improve(&self, learner: &Self::Policy, opponents: &[(f64, &Self::Policy)], trace: &Self::Trace, config: &TrainConfig) -> Self::Policy;

    /// True when [`Domain::cross_payoffs`] is exact rather than sampled.
    fn is_exact(&self) -> bool;

    /// Entry `(i, j)` is the expected return of `rows[i]` against `cols[j]`.
    /// Sampled domains average `episodes` episodes per cell, seeding each
    /// episode from `(seed, i, j, episode)`.
    fn cross_payoffs(&self, rows: &[&Self::Policy], cols: &[&Self::Policy], episodes: usize, seed: u64, exec: &Executor) -> Matrix;

    /// Value of a best response against the mixture `Σ weights[k] · policies[k]`.
    fn exploitability(&self, policies: &[&Self::Policy], weights: &[f64]) -> Result<f64>;
}

fn mixture(opponents: &[(f64, &MixedStrategy)], k: usize) -> Vec<f64> {
    let mut m = vec![0.0; k];
    for (w, p) in opponents {
        for (acc, v) in m.iter_mut().zip(p.probs()) {
            *acc += w * v;
        }
    }
    m
}

/// Best response to the opponent mixture with maximum entropy: uniform over
/// every action within [`BR_TIE_TOL`] of the best.
pub(crate) fn best_response_to(payoff: &Matrix, opponents: &[(f64, &MixedStrategy)]) -> MixedStrategy {
    let m = mixture(opponents, payoff.ncols());
    let values: Vec<f64> = (0..payoff.nrows()).map(|a| (0..payoff.ncols()).map(|b| payoff[(a, b)] * m[b]).sum()).collect();
    argmax_uniform(&values, BR_TIE_TOL)
}

impl Domain for MatrixGame {
    type Policy = MixedStrategy;
    type Trace = ();

    fn uniform_policy(&self) -> MixedStrategy {
        MixedStrategy::uniform(self.num_actions())
    }

    fn random_policy(&self, rng: &mut Rng) -> MixedStrategy {
        MixedStrategy::random(self.num_actions(), rng)
    }

    /// Matrix-game episodes return the exact expected payoff; nothing is sampled.
    fn rollout(&self, learner: &MixedStrategy, opponent: &MixedStrategy, _explore: f64, _rng: &mut Rng) -> (f64, ()) {
        (bilinear(self.payoff(), learner.probs(), opponent.probs()).expect("arity checked at construction"), ())
    }

    /// Damped step `(1 - α) π + α BR(mixture)`.
    fn improve(&self, learner: &MixedStrategy, opponents: &[(f64, &MixedStrategy)], _trace: &(), config: &TrainConfig) -> MixedStrategy {
        let target = best_response_to(self.payoff(), opponents);
        learner.blend(&target, config.learning_rate)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn cross_payoffs(&self, rows: &[&MixedStrategy], cols: &[&MixedStrategy], _episodes: usize, _seed: u64, _exec: &Executor) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| bilinear(self.payoff(), rows[i].probs(), cols[j].probs()).expect("arity checked"))
    }

    fn exploitability(&self, policies: &[&MixedStrategy], weights: &[f64]) -> Result<f64> {
        if policies.len() != weights.len() {
            return invalid("one weight per policy required");
        }
        let opponents: Vec<(f64, &MixedStrategy)> = weights.iter().copied().zip(policies.iter().copied()).collect();
        let m = mixture(&opponents, self.num_actions());
        Ok((0..self.num_actions()).map(|a| (0..self.num_actions()).map(|b| self.payoff()[(a, b)] * m[b]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max))
    }
}

/// One-step Q-learning over the learner's transitions in order, refreshing
/// the greedy table at each updated observation.
pub(crate) fn q_learning_update(policy: &mut TabularPolicy, steps: &[Step], rate: f64, discount: f64) {
    for (t, step) in steps.iter().enumerate() {
        let bootstrap = match steps.get(t + 1) {
            Some(next) => discount * policy.q(next.observation).iter().copied().fold(f64::NEG_INFINITY, f64::max),
            None => 0.0,
        };
        let q = &mut policy.q_mut(step.observation)[step.action];
        *q += rate * (step.reward + bootstrap - *q);
        policy.refresh_greedy(step.observation);
    }
}

impl Domain for MarkovGame {
    type Policy = TabularPolicy;
    type Trace = Vec<Step>;

    fn uniform_policy(&self) -> TabularPolicy {
        TabularPolicy::uniform()
    }

    fn random_policy(&self, rng: &mut Rng) -> TabularPolicy {
        TabularPolicy::random(rng)
    }

    fn rollout(&self, learner: &TabularPolicy, opponent: &TabularPolicy, explore: f64, rng: &mut Rng) -> (f64, Vec<Step>) {
        let ep = play_episode_exploring(self, learner, explore, opponent, 0.0, rng);
        (ep.return_a, ep.trajectory_a)
    }

    /// The opponent mixture enters through the sampled episode only.
    fn improve(&self, learner: &TabularPolicy, _opponents: &[(f64, &TabularPolicy)], trace: &Vec<Step>, config: &TrainConfig) -> TabularPolicy {
        let mut next = learner.clone();
        q_learning_update(&mut next, trace, config.learning_rate, config.discount);
        next
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn cross_payoffs(&self, rows: &[&TabularPolicy], cols: &[&TabularPolicy], episodes: usize, seed: u64, exec: &Executor) -> Matrix {
        let n_cols = cols.len();
        let cells = exec.map(rows.len() * n_cols, |c| {
            let (i, j) = (c / n_cols, c % n_cols);
            let total: f64 = (0..episodes)
                .map(|e| {
                    let mut rng = rng_for(seed, &[i as u64, j as u64, e as u64]);
                    play_episode(self, rows[i], cols[j], &mut rng).return_a
                })
                .sum();
            total / episodes.max(1) as f64
        });
        Matrix::from_row_slice(rows.len(), n_cols, &cells)
    }

    /// Exact expectimax over joint-action histories, with the opponent's
    /// identity hidden and weighted by its likelihood of the history so far.
    fn exploitability(&self, policies: &[&TabularPolicy], weights: &[f64]) -> Result<f64> {
        if policies.len() != weights.len() {
            return invalid("one weight per policy required");
        }
        Ok(best_response_value(policies, weights.to_vec(), Observation::NONE, self.rounds()))
    }
}

/// Best achievable expected return over `rounds` remaining rounds, in units of
/// the (unnormalized) opponent weights.
fn best_response_value(policies: &[&TabularPolicy], weights: Vec<f64>, opp_obs: Observation, rounds: usize) -> f64 {
    if rounds == 0 || weights.iter().all(|w| *w == 0.0) {
        return 0.0;
    }
    // Probability mass of each opponent action, and the weights conditioned on it.
    let branches: Vec<(f64, Vec<f64>)> = (0..RPS_ACTIONS)
        .map(|b| {
            let w: Vec<f64> = weights.iter().zip(policies).map(|(w, p)| w * p.dist(opp_obs).probs()[b]).collect();
            (w.iter().sum(), w)
        })
        .collect();
    (0..RPS_ACTIONS)
        .map(|a| {
            branches
                .iter()
                .enumerate()
                .filter(|(_, (mass, _))| *mass > 0.0)
                .map(|(b, (mass, w))| mass * rps_reward(a, b) + best_response_value(policies, w.clone(), Observation::joint(b, a), rounds - 1))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
