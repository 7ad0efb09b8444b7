//! Best-response oracles.

use super::config::TrainConfig;
use super::domain::{best_response_to, Domain};
use super::population::Population;
use crate::error::{invalid, Error, Result};
use crate::games::{MarkovGame, MatrixGame};
use crate::graphs::{sample_opponent, InteractionGraph, MetaStrategy};
use crate::policy::{MixedStrategy, TabularPolicy};
use crate::Rng;

/// Exact best response to the mixture `sigma` over the population's slots,
/// uniform over actions tied within [`super::BR_TIE_TOL`] (the
/// maximum-entropy choice).
pub fn exact_best_response(game: &MatrixGame, population: &Population<MixedStrategy>, sigma: &MetaStrategy) -> Result<MixedStrategy> {
    if sigma.len() != population.len() {
        return invalid(format!("meta-strategy has {} entries for {} slots", sigma.len(), population.len()));
    }
    if sigma.is_sink() {
        return Err(Error::SinkHasNoObjective);
    }
    if let Some(i) = (0..population.len()).find(|&i| population.policy(i).len() != game.num_actions()) {
        return invalid(format!("slot {i} does not act over the game's {} actions", game.num_actions()));
    }
    let opponents: Vec<(f64, &MixedStrategy)> = sigma.as_slice().iter().zip(population.policies()).map(|(w, p)| (*w, p)).collect();
    Ok(best_response_to(game.payoff(), &opponents))
}

/// Runs `steps` online best-response episodes for `learner` against
/// opponents drawn from its row of `graph`, updating after every episode.
pub fn train_against_row<D: Domain>(
    domain: &D,
    population: &mut Population<D::Policy>,
    learner: usize,
    graph: &InteractionGraph,
    steps: usize,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<()> {
    if learner >= population.len() || graph.size() != population.len() {
        return invalid("learner index or graph size does not match the population");
    }
    if !population.is_learner(learner) {
        return invalid(format!("slot {learner} is frozen or the sink and cannot be trained"));
    }
    if graph.is_sink(learner) {
        return Err(Error::SinkHasNoOpponents(learner));
    }
    let row = graph.row(learner);
    for _ in 0..steps {
        let j = sample_opponent(graph, learner, rng)?;
        let (_, trace) = domain.rollout(population.policy(learner), population.policy(j), config.explore, rng);
        let opponents: Vec<(f64, &D::Policy)> = row.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(k, w)| (*w, population.policy(k))).collect();
        let next = domain.improve(population.policy(learner), &opponents, &trace, config);
        population.set_policy(learner, next)?;
    }
    Ok(())
}

/// Tabular Q-learning best response on a Markov game: epsilon-greedy
/// behavior, one-step updates on the learner's own transitions.
pub fn abr_q_learning(
    env: &MarkovGame,
    population: &mut Population<TabularPolicy>,
    learner: usize,
    graph: &InteractionGraph,
    steps: usize,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<()> {
    train_against_row(env, population, learner, graph, steps, config, rng)
}
