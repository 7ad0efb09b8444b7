//! Policy representations: mixed strategies over actions and tabular
//! observation-conditioned policies for the iterated game.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::games::{Observation, NUM_OBSERVATIONS, RPS_ACTIONS};

/// Tolerance on the simplex constraint of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Probability vector over `K` choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("mixed strategy must have at least one entry");
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return invalid(format!("mixed strategy has negative or non-finite entries: {probs:?}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return invalid(format!("mixed strategy sums to {total}, expected 1"));
        }
        Ok(Self(probs))
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return invalid("weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return invalid("weights must have positive total mass");
        }
        Ok(Self(weights.iter().map(|w| w / total).collect()))
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform strategy over zero actions");
        Self(vec![1.0 / k as f64; k])
    }

    pub fn pure(k: usize, action: usize) -> Self {
        assert!(action < k, "pure action {action} out of range {k}");
        let mut probs = vec![0.0; k];
        probs[action] = 1.0;
        Self(probs)
    }

    /// Uniform-on-simplex random strategy.
    pub fn random(k: usize, rng: &mut crate::Rng) -> Self {
        let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        Self::from_weights(&w).expect("exponential draws are positive")
    }

    pub(crate) fn from_vec_unchecked(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.0.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum()
    }

    pub fn sample(&self, rng: &mut crate::Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, p) in self.0.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        // Rounding can leave `acc` a hair below 1.
        self.0.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// `(1 - rate) * self + rate * target`.
    pub fn blend(&self, target: &MixedStrategy, rate: f64) -> MixedStrategy {
        debug_assert_eq!(self.len(), target.len());
        Self(self.0.iter().zip(&target.0).map(|(a, b)| (1.0 - rate) * a + rate * b).collect())
    }

    pub fn linf_distance(&self, other: &MixedStrategy) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Index and mass of the most likely entry (first on ties).
    pub fn mode(&self) -> (usize, f64) {
        self.0.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, p)| {
            if p > best.1 {
                (i, p)
            } else {
                best
            }
        })
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}

impl AsRef<[f64]> for MixedStrategy {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Uniform distribution over the entries of `values` within `tol` of the maximum.
pub fn argmax_uniform(values: &[f64], tol: f64) -> MixedStrategy {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<bool> = values.iter().map(|v| *v >= best - tol).collect();
    let n = ties.iter().filter(|t| **t).count() as f64;
    MixedStrategy::from_vec_unchecked(ties.iter().map(|&t| if t { 1.0 / n } else { 0.0 }).collect())
}

/// Observation-conditioned policy for the iterated game.
///
/// `table` is the acting policy. `q_table` is the learner's action-value
/// estimate; for trained policies `table[o]` is kept greedy (uniform over
/// ties) with respect to `q_table[o]` at every observation touched by an
/// update, while untouched observations keep their initial distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabularRepr", into = "TabularRepr")]
pub struct TabularPolicy {
    table: Vec<MixedStrategy>,
    q_table: Vec<[f64; RPS_ACTIONS]>,
}

/// Tie tolerance when extracting the greedy policy from Q-values.
pub const GREEDY_TIE_TOL: f64 = 1e-12;

impl TabularPolicy {
    /// Plays `dist` at every observation.
    pub fn constant(dist: MixedStrategy) -> Result<Self> {
        if dist.len() != RPS_ACTIONS {
            return invalid(format!("tabular policies act over {RPS_ACTIONS} actions, got {}", dist.len()));
        }
        Ok(Self { table: vec![dist; NUM_OBSERVATIONS], q_table: vec![[0.0; RPS_ACTIONS]; NUM_OBSERVATIONS] })
    }

    pub fn uniform() -> Self {
        Self::constant(MixedStrategy::uniform(RPS_ACTIONS)).expect("uniform has the right arity")
    }

    pub fn pure(action: usize) -> Self {
        Self::constant(MixedStrategy::pure(RPS_ACTIONS, action)).expect("pure has the right arity")
    }

    /// Independent uniform-on-simplex distribution at every observation.
    pub fn random(rng: &mut crate::Rng) -> Self {
        Self {
            table: (0..NUM_OBSERVATIONS).map(|_| MixedStrategy::random(RPS_ACTIONS, rng)).collect(),
            q_table: vec![[0.0; RPS_ACTIONS]; NUM_OBSERVATIONS],
        }
    }

    pub fn dist(&self, obs: Observation) -> &MixedStrategy {
        &self.table[obs.index()]
    }

    pub fn set_dist(&mut self, obs: Observation, dist: MixedStrategy) -> Result<()> {
        if dist.len() != RPS_ACTIONS {
            return invalid("distribution arity mismatch");
        }
        self.table[obs.index()] = dist;
        Ok(())
    }

    pub fn q(&self, obs: Observation) -> &[f64; RPS_ACTIONS] {
        &self.q_table[obs.index()]
    }

    pub fn q_mut(&mut self, obs: Observation) -> &mut [f64; RPS_ACTIONS] {
        &mut self.q_table[obs.index()]
    }

    /// Recomputes the acting distribution at `obs` as greedy over Q with uniform ties.
    pub fn refresh_greedy(&mut self, obs: Observation) {
        let q = self.q_table[obs.index()];
        self.table[obs.index()] = argmax_uniform(&q, GREEDY_TIE_TOL);
    }

    /// Samples an action; with probability `explore` the action is uniform instead.
    pub fn act(&self, obs: Observation, explore: f64, rng: &mut crate::Rng) -> usize {
        if explore > 0.0 && rng.gen::<f64>() < explore {
            return rng.gen_range(0..RPS_ACTIONS);
        }
        self.dist(obs).sample(rng)
    }

    pub fn table(&self) -> &[MixedStrategy] {
        &self.table
    }
}

#[derive(Serialize, Deserialize)]
struct TabularRepr {
    table: BTreeMap<String, MixedStrategy>,
    #[serde(default)]
    q_table: BTreeMap<String, [f64; RPS_ACTIONS]>,
}

impl From<TabularPolicy> for TabularRepr {
    fn from(p: TabularPolicy) -> Self {
        let obs = Observation::all();
        Self {
            table: obs.clone().zip(p.table).map(|(o, d)| (o.name(), d)).collect(),
            q_table: obs.zip(p.q_table).map(|(o, q)| (o.name(), q)).collect(),
        }
    }
}

impl TryFrom<TabularRepr> for TabularPolicy {
    type Error = Error;
    fn try_from(repr: TabularRepr) -> Result<Self> {
        let mut policy = TabularPolicy::uniform();
        for (name, dist) in repr.table {
            let obs = Observation::parse(&name)?;
            policy.set_dist(obs, dist)?;
        }
        for (name, q) in repr.q_table {
            let obs = Observation::parse(&name)?;
            *policy.q_mut(obs) = q;
        }
        Ok(policy)
    }
}
