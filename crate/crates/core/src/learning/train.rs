//! NeuPL training loops (static and adaptive graphs) and the PSRO baselines.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;

use super::config::{NewRowInit, TrainConfig};
use super::domain::Domain;
use super::estimator::PayoffEstimator;
use super::population::{Population, PopulationInit};
use crate::error::{invalid, Result};
use crate::eval::{eval_policies, PayoffMatrix};
use crate::exec::Executor;
use crate::graphs::{sample_opponent, InteractionGraph, MetaGraphSolver};
use crate::policy::MixedStrategy;
use crate::rng_for;
use crate::solvers::solve_mene;

// Seed-stream tags; each random draw site gets its own derived stream.
const STREAM_FRESH: u64 = 1;
const STREAM_MATCH: u64 = 2;
const STREAM_ROLLOUT: u64 = 3;
const STREAM_PSRO_INIT: u64 = 4;
const STREAM_PSRO_EVAL: u64 = 5;

/// Environment episodes consumed so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EpisodeCounts {
    pub training: u64,
    pub evaluation: u64,
}

/// State handed to the observer at the end of each epoch.
#[derive(Debug)]
pub struct EpochReport<'a, P> {
    pub epoch: usize,
    pub graph: &'a InteractionGraph,
    pub population: &'a Population<P>,
    pub estimator: &'a PayoffEstimator,
    pub counts: EpisodeCounts,
}

fn fresh_policies<'a, D: Domain>(domain: &'a D, config: &TrainConfig) -> impl FnMut() -> D::Policy + 'a {
    let mut made = 0u64;
    let kind = config.learner_init;
    let seed = config.seed;
    move || {
        made += 1;
        domain.initial_policy(kind, &mut rng_for(seed, &[STREAM_FRESH, made]))
    }
}

/// Records a return for `(i, j)` into every slot pair bound to the same two
/// policies, mirroring how a conditional payoff model shares its estimate
/// across equal rows.
fn record_shared<P>(est: &mut PayoffEstimator, pop: &Population<P>, i: usize, j: usize, ret: f64) -> Result<()>
where
    P: Clone + PartialEq,
{
    let (ki, kj) = (pop.slot(i).key, pop.slot(j).key);
    if ki == kj {
        return est.update(i, j, ret);
    }
    let with_key = |k| (0..pop.len()).filter(move |&s| pop.slot(s).key == k);
    for a in with_key(ki) {
        for b in with_key(kj) {
            est.update(a, b, ret)?;
        }
    }
    Ok(())
}

/// One iteration: plan matches, play them (in parallel), then apply
/// estimator and policy updates in match order.
#[allow(clippy::too_many_arguments)]
fn run_iteration<D: Domain>(
    domain: &D,
    pop: &mut Population<D::Policy>,
    graph: &InteractionGraph,
    est: &mut PayoffEstimator,
    n_train: usize,
    n_eval: usize,
    config: &TrainConfig,
    exec: &Executor,
    stream: [u64; 2],
    counts: &mut EpisodeCounts,
) -> Result<()> {
    let learners = pop.learner_groups();
    let n = pop.len();
    let mut rng = rng_for(config.seed, &[STREAM_MATCH, stream[0], stream[1]]);
    let mut matches = Vec::with_capacity(n_train + n_eval);
    if !learners.is_empty() {
        for _ in 0..n_train {
            let i = learners[rng.gen_range(0..learners.len())];
            matches.push((i, sample_opponent(graph, i, &mut rng)?, true));
        }
    }
    for _ in 0..n_eval {
        matches.push((rng.gen_range(0..n), rng.gen_range(0..n), false));
    }

    let snapshot = &*pop;
    let results = exec.map(matches.len(), |k| {
        let (i, j, train) = matches[k];
        let mut rng = rng_for(config.seed, &[STREAM_ROLLOUT, stream[0], stream[1], k as u64]);
        domain.rollout(snapshot.policy(i), snapshot.policy(j), if train { config.explore } else { 0.0 }, &mut rng)
    });

    for ((i, j, train), (ret, trace)) in matches.into_iter().zip(results) {
        record_shared(est, pop, i, j, ret)?;
        if train {
            counts.training += 1;
            let row = graph.row(i);
            let opponents: Vec<(f64, &D::Policy)> =
                row.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(k, w)| (*w, pop.policy(k))).collect();
            let next = domain.improve(pop.policy(i), &opponents, &trace, config);
            pop.set_policy(i, next)?;
        } else {
            counts.evaluation += 1;
        }
    }
    Ok(())
}

/// NeuPL on a fixed interaction graph: every iteration plays `episodes`
/// training matches, learners drawn uniformly over distinct trainable rows
/// and opponents from the learner's row.
pub fn neupl_static<D: Domain>(
    domain: &D,
    graph: &InteractionGraph,
    init: PopulationInit<D::Policy>,
    config: &TrainConfig,
    exec: &Executor,
    mut observer: impl FnMut(&EpochReport<D::Policy>) -> Result<()>,
) -> Result<(Population<D::Policy>, PayoffEstimator)> {
    config.validate()?;
    let mut pop = Population::from_graph(graph, init, fresh_policies(domain, config))?;
    let mut est = PayoffEstimator::new(graph.size(), config.ema_decay)?;
    let mut counts = EpisodeCounts::default();
    for epoch in 1..=config.epochs {
        for t in 0..config.iterations {
            run_iteration(domain, &mut pop, graph, &mut est, config.episodes, 0, config, exec, [epoch as u64, t as u64], &mut counts)?;
        }
        observer(&EpochReport { epoch, graph, population: &pop, estimator: &est, counts })?;
    }
    Ok((pop, est))
}

/// NeuPL with a meta-graph solver: each epoch re-solves the graph from the
/// estimated payoffs, rebinds slots, then trains with a fraction
/// `eval_split` of episodes spent on uniform all-to-all evaluation.
///
/// Returns the final population, the graph used in the last epoch and the
/// estimated payoffs at the end of training.
pub fn neupl_adaptive<D: Domain>(
    domain: &D,
    mgs: &dyn MetaGraphSolver,
    init: PopulationInit<D::Policy>,
    config: &TrainConfig,
    exec: &Executor,
    mut observer: impl FnMut(&EpochReport<D::Policy>) -> Result<()>,
) -> Result<(Population<D::Policy>, InteractionGraph, PayoffMatrix)> {
    config.validate()?;
    let n = config.population_size;
    let mut est = PayoffEstimator::new(n, config.ema_decay)?;
    let mut graph = mgs.solve(&est.payoffs())?;
    if graph.size() != n {
        return invalid(format!("meta-graph solver returned {} rows for {n} slots", graph.size()));
    }
    let mut fresh = fresh_policies(domain, config);
    let mut pop = Population::from_graph(&graph, init, &mut fresh)?;
    let (n_train, n_eval) = config.episode_split();
    let mut counts = EpisodeCounts::default();
    for epoch in 1..=config.epochs {
        graph = mgs.solve(&est.payoffs())?;
        match config.new_row_init {
            NewRowInit::CloneNearest => pop.rebind(&graph, None)?,
            NewRowInit::Fresh => pop.rebind(&graph, Some(&mut fresh))?,
        }
        for t in 0..config.iterations {
            run_iteration(domain, &mut pop, &graph, &mut est, n_train, n_eval, config, exec, [epoch as u64, t as u64], &mut counts)?;
        }
        observer(&EpochReport { epoch, graph: &graph, population: &pop, estimator: &est, counts })?;
    }
    let payoffs = PayoffMatrix::estimated(est.payoffs());
    Ok((pop, graph, payoffs))
}

/// Population after one PSRO iteration.
#[derive(Debug, Clone)]
pub struct PsroIteration<P> {
    pub iteration: usize,
    /// All policies so far, each frozen; row `k` is the meta-strategy slot
    /// `k` was trained against.
    pub population: Population<P>,
    pub payoffs: PayoffMatrix,
    /// Maximum-entropy Nash over `payoffs`, the next iteration's target.
    pub meta: MixedStrategy,
    pub counts: EpisodeCounts,
}

/// PSRO with a maximum-entropy Nash meta-solver, `population_size - 1`
/// iterations of `iterations × episodes` training episodes each. With
/// `continued`, iterations after the first start from the previous policy
/// instead of a fresh one.
pub fn psro<D: Domain>(domain: &D, sink: D::Policy, config: &TrainConfig, continued: bool, exec: &Executor) -> Result<Vec<PsroIteration<D::Policy>>> {
    config.validate()?;
    let mut policies = vec![sink];
    let mut rows: Vec<Vec<f64>> = vec![vec![]];
    let mut meta = MixedStrategy::pure(1, 0);
    let mut counts = EpisodeCounts::default();
    let mut history = Vec::new();
    for it in 1..config.population_size {
        let mut learner = match policies.last() {
            Some(prev) if continued && it > 1 => prev.clone(),
            _ => domain.initial_policy(config.learner_init, &mut rng_for(config.seed, &[STREAM_PSRO_INIT, it as u64])),
        };
        let weights = WeightedIndex::new(meta.probs()).map_err(|e| crate::Error::Internal(e.to_string()))?;
        let opponents: Vec<(f64, &D::Policy)> = meta.probs().iter().copied().zip(policies.iter()).filter(|(w, _)| *w > 0.0).collect();
        for t in 0..config.iterations {
            let stream = [(1u64 << 32) | it as u64, t as u64];
            let mut rng = rng_for(config.seed, &[STREAM_MATCH, stream[0], stream[1]]);
            let picks: Vec<usize> = (0..config.episodes).map(|_| weights.sample(&mut rng)).collect();
            let snapshot = &learner;
            let results = exec.map(picks.len(), |k| {
                let mut rng = rng_for(config.seed, &[STREAM_ROLLOUT, stream[0], stream[1], k as u64]);
                domain.rollout(snapshot, &policies[picks[k]], config.explore, &mut rng)
            });
            for (_, trace) in results {
                learner = domain.improve(&learner, &opponents, &trace, config);
                counts.training += 1;
            }
        }
        rows.push(meta.probs().to_vec());
        policies.push(learner);
        let size = policies.len();
        let padded: Vec<Vec<f64>> = rows.iter().map(|r| (0..size).map(|k| r.get(k).copied().unwrap_or(0.0)).collect()).collect();
        let refs: Vec<&D::Policy> = policies.iter().collect();
        let payoffs = eval_policies(domain, &refs, config.eval_episodes, crate::derive_seed(config.seed, &[STREAM_PSRO_EVAL, it as u64]), exec)?;
        if !domain.is_exact() {
            counts.evaluation += (size * size * config.eval_episodes) as u64;
        }
        meta = solve_mene(&payoffs.values)?;
        history.push(PsroIteration {
            iteration: it,
            population: Population::from_frozen(padded, policies.clone())?,
            payoffs,
            meta: meta.clone(),
            counts,
        });
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::rps_game;
    use crate::graphs::{graph_cycle, graph_fictitious_play, PsroNash};

    fn biased_sink() -> MixedStrategy {
        MixedStrategy::new(vec![0.9, 0.05, 0.05]).unwrap()
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let g = rps_game();
        let graph = graph_fictitious_play(3).unwrap();
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        let (pop, est) = neupl_static(&g, &graph, PopulationInit::with_sink(biased_sink()), &cfg, &Executor::sequential(), |_| Ok(())).unwrap();
        assert_eq!(*pop.policy(0), biased_sink());
        assert_eq!(*pop.policy(2), MixedStrategy::uniform(3));
        assert_eq!(est.count(1, 0), 0);
    }

    #[test]
    fn fictitious_play_finds_paper() {
        let g = rps_game();
        let cfg = TrainConfig { epochs: 20, iterations: 10, episodes: 10, learning_rate: 0.05, ..Default::default() };
        let (pop, _) =
            neupl_static(&g, &graph_fictitious_play(6).unwrap(), PopulationInit::with_sink(biased_sink()), &cfg, &Executor::sequential(), |_| Ok(()))
                .unwrap();
        assert!(pop.policy(1).probs()[1] >= 0.9);
    }

    #[test]
    fn cycle_converges_to_pure_strategies() {
        let g = rps_game();
        let graph = graph_cycle(3).unwrap();
        let mut init = PopulationInit::with_sink(MixedStrategy::uniform(3));
        for a in 0..3 {
            init.overrides.insert(a, MixedStrategy::pure(3, a));
        }
        let cfg = TrainConfig { epochs: 10, iterations: 10, episodes: 10, ..Default::default() };
        let (pop, _) = neupl_static(&g, &graph, init, &cfg, &Executor::sequential(), |_| Ok(())).unwrap();
        for i in 0..3 {
            assert!(pop.policy(i).mode().1 >= 0.9, "slot {i}: {:?}", pop.policy(i));
        }
    }

    #[test]
    fn adaptive_reports_every_epoch_and_keeps_sharing() {
        let g = rps_game();
        let cfg = TrainConfig { epochs: 5, iterations: 2, episodes: 10, population_size: 4, ..Default::default() };
        let mut epochs = Vec::new();
        let (pop, graph, payoffs) = neupl_adaptive(&g, &PsroNash, PopulationInit::with_sink(biased_sink()), &cfg, &Executor::sequential(), |r| {
            r.population.check_sharing()?;
            assert_eq!(r.counts.training + r.counts.evaluation, (r.epoch * 2 * 10) as u64);
            epochs.push(r.epoch);
            Ok(())
        })
        .unwrap();
        assert_eq!(epochs, vec![1, 2, 3, 4, 5]);
        assert_eq!(graph.size(), 4);
        assert_eq!(pop.len(), 4);
        assert_eq!(payoffs.values.nrows(), 4);
    }

    #[test]
    fn psro_on_rps_builds_the_cycle() {
        let g = rps_game();
        let cfg = TrainConfig { population_size: 4, iterations: 10, episodes: 100, learning_rate: 0.05, ..Default::default() };
        let history = psro(&g, MixedStrategy::pure(3, 0), &cfg, false, &Executor::sequential()).unwrap();
        assert_eq!(history.len(), 3);
        let last = history.last().unwrap();
        let mix: Vec<f64> = (0..3).map(|a| (0..4).map(|k| last.meta.probs()[k] * last.population.policy(k).probs()[a]).sum()).collect();
        let expl = crate::solvers::exploitability(g.payoff(), &MixedStrategy::new(mix).unwrap()).unwrap();
        assert!(expl <= 1e-6, "exploitability {expl}");
    }

    #[test]
    fn psro_variants_agree_on_first_iteration() {
        let g = rps_game();
        let cfg = TrainConfig { population_size: 3, iterations: 3, episodes: 5, learner_init: super::super::InitKind::Random, seed: 4, ..Default::default() };
        let fresh = psro(&g, MixedStrategy::pure(3, 0), &cfg, false, &Executor::sequential()).unwrap();
        let cont = psro(&g, MixedStrategy::pure(3, 0), &cfg, true, &Executor::sequential()).unwrap();
        assert_eq!(fresh[0].population, cont[0].population);
    }

    #[test]
    fn psro_zero_budget_appends_fresh_policy() {
        let g = rps_game();
        let cfg = TrainConfig { population_size: 2, iterations: 0, ..Default::default() };
        let history = psro(&g, MixedStrategy::pure(3, 0), &cfg, false, &Executor::sequential()).unwrap();
        assert_eq!(history[0].population.policies(), vec![&MixedStrategy::pure(3, 0), &MixedStrategy::uniform(3)]);
    }
}
