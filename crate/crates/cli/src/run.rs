//! `poplearn run`: execute one configured experiment and write its artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use poplearn::eval::{effective_population_size, meta_nash_exploitability, rpp_between};
use poplearn::graphs::InteractionGraph;
use poplearn::learning::{neupl_adaptive, neupl_static, psro, Domain, EpisodeCounts, PayoffEstimator, Population, PopulationInit};
use poplearn::serialize::{checkpoint_from_json, checkpoint_to_json, matrix_to_csv, Checkpoint};
use poplearn::{derive_seed, Executor};

use crate::config::{Algorithm, ExperimentConfig, Game};
use crate::domain::ConfigDomain;
use crate::error::{CliError, CliResult};

const STREAM_METRICS: u64 = 101;
const STREAM_REFERENCE: u64 = 102;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: usize,
}

/// One line of `metrics.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub effective_size: usize,
    pub exploitability: f64,
    pub rpp_vs_ref: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub metrics: Vec<EpochMetrics>,
    pub counts: EpisodeCounts,
}

#[derive(Serialize)]
struct EpisodeTotals {
    training: u64,
    evaluation: u64,
    training_and_evaluation: u64,
    metrics: u64,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config: &'a serde_json::Value,
    seed: u64,
    workers: usize,
    episodes: EpisodeTotals,
    unobserved_payoffs: &'static str,
    wall_clock_seconds: f64,
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn prepare_dir(dir: &Path) -> CliResult<()> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
        if entries.next().is_some() {
            return Err(CliError::Config(format!("{} is not empty; runs need a fresh output directory", dir.display())));
        }
    }
    fs::create_dir_all(dir.join("checkpoints")).map_err(|e| CliError::io(dir, e))
}

/// Writes per-epoch artifacts as training reports them.
struct Recorder<'a, D: Domain> {
    domain: &'a D,
    dir: PathBuf,
    config: serde_json::Value,
    eval_episodes: usize,
    seed: u64,
    exec: &'a Executor,
    reference: Option<Population<D::Policy>>,
    metrics_file: fs::File,
    metrics: Vec<EpochMetrics>,
    metric_episodes: u64,
}

impl<D: Domain> Recorder<'_, D> {
    fn epoch(&mut self, epoch: usize, graph: &InteractionGraph, pop: &Population<D::Policy>, est: Option<&PayoffEstimator>) -> CliResult<()> {
        let m = meta_nash_exploitability(pop, self.domain, self.eval_episodes, derive_seed(self.seed, &[STREAM_METRICS, epoch as u64]), self.exec)?;
        let rpp_vs_ref = match &self.reference {
            Some(r) => Some(rpp_between(pop, r, self.domain, self.eval_episodes, derive_seed(self.seed, &[STREAM_REFERENCE, epoch as u64]), self.exec)?),
            None => None,
        };
        if !self.domain.is_exact() {
            let n = pop.len() as u64;
            let r = self.reference.as_ref().map_or(0, |r| r.len() as u64);
            self.metric_episodes += (n * n + n * r) * self.eval_episodes as u64;
        }
        write_file(&self.dir.join(format!("sigma_epoch_{epoch}.csv")), &matrix_to_csv(graph.matrix()))?;
        write_file(&self.dir.join(format!("payoffs_epoch_{epoch}.csv")), &matrix_to_csv(&m.payoffs.values))?;
        let cp = Checkpoint::new(pop, est, self.config.clone(), epoch);
        write_file(&self.dir.join("checkpoints").join(format!("epoch_{epoch}.json")), &checkpoint_to_json(&cp)?)?;
        let line = EpochMetrics { epoch, effective_size: effective_population_size(graph), exploitability: m.exploitability, rpp_vs_ref };
        let json = serde_json::to_string(&line).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(self.metrics_file, "{json}").map_err(|e| CliError::io(&self.dir.join("metrics.jsonl"), e))?;
        self.metrics.push(line);
        Ok(())
    }
}

pub fn load_checkpoint<P>(path: &Path) -> CliResult<Checkpoint<P>>
where
    P: for<'de> serde::Deserialize<'de> + Clone + PartialEq,
{
    if !path.is_file() {
        return Err(CliError::Config(format!("{} not found", path.display())));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    checkpoint_from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The game spec recorded in a checkpoint's config echo.
pub fn checkpoint_game(path: &Path) -> CliResult<serde_json::Value> {
    if !path.is_file() {
        return Err(CliError::Config(format!("{} not found", path.display())));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), e.line())))?;
    Ok(value.get("config").and_then(|c| c.get("game")).cloned().unwrap_or(serde_json::Value::Null))
}

pub fn cmd_run(config_path: &Path, opts: &RunOptions) -> CliResult<RunSummary> {
    let (mut cfg, _) = ExperimentConfig::load(config_path)?;
    if let Some(seed) = opts.seed {
        cfg.train.seed = seed;
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: set \"output_dir\" or pass --out".into()))?;
    prepare_dir(&out)?;
    let exec = Executor::with_workers(opts.workers.max(1));
    match cfg.game.build()? {
        Game::Matrix(g) => run_domain(&g, &cfg, &out, &exec),
        Game::Markov(g) => run_domain(&g, &cfg, &out, &exec),
    }
}

fn run_domain<D: ConfigDomain>(domain: &D, cfg: &ExperimentConfig, out: &Path, exec: &Executor) -> CliResult<RunSummary> {
    let started = Instant::now();
    let echo = serde_json::to_value(cfg).map_err(|e| CliError::Io(e.to_string()))?;
    let train = &cfg.train;
    let reference = match &cfg.reference_run {
        Some(dir) => {
            let path = dir.join("population.json");
            if checkpoint_game(&path)? != echo["game"] {
                return Err(CliError::Config(format!("reference run {} was played on a different game", dir.display())));
            }
            Some(load_checkpoint::<D::Policy>(&path)?.population()?)
        }
        None => None,
    };
    let metrics_path = out.join("metrics.jsonl");
    let metrics_file = fs::File::create(&metrics_path).map_err(|e| CliError::io(&metrics_path, e))?;
    let mut rec = Recorder {
        domain,
        dir: out.to_path_buf(),
        config: echo.clone(),
        eval_episodes: train.eval_episodes,
        seed: train.seed,
        exec,
        reference,
        metrics_file,
        metrics: Vec::new(),
        metric_episodes: 0,
    };

    let mut init = PopulationInit::with_sink(domain.policy(&cfg.sink)?);
    for f in &cfg.frozen {
        init.frozen.insert(f.slot, domain.policy(&f.policy)?);
    }

    // The observer can only return library errors; keep the real one aside.
    let mut failure: Option<CliError> = None;
    let mut counts = EpisodeCounts::default();
    let (final_pop, final_est): (Population<D::Policy>, Option<PayoffEstimator>) = match cfg.algorithm {
        Algorithm::NeuplStatic => {
            let graph = cfg.static_graph()?.expect("validated");
            let result = neupl_static(domain, &graph, init, train, exec, |r| {
                counts = r.counts;
                rec.epoch(r.epoch, r.graph, r.population, Some(r.estimator)).map_err(|e| abort(&mut failure, e))
            });
            let (pop, est) = finish(result, failure)?;
            (pop, Some(est))
        }
        Algorithm::NeuplAdaptive => {
            let mgs = cfg.mgs();
            let result = neupl_adaptive(domain, &mgs, init, train, exec, |r| {
                counts = r.counts;
                rec.epoch(r.epoch, r.graph, r.population, Some(r.estimator)).map_err(|e| abort(&mut failure, e))
            });
            let (pop, _, _) = finish(result, failure)?;
            let est = load_checkpoint::<D::Policy>(&out.join("checkpoints").join(format!("epoch_{}.json", train.epochs)))
                .ok()
                .and_then(|cp| cp.estimator);
            (pop, est)
        }
        Algorithm::Psro | Algorithm::PsroC => {
            let history = psro(domain, init.sink.clone(), train, cfg.algorithm == Algorithm::PsroC, exec)?;
            for it in &history {
                rec.epoch(it.iteration, &it.population.graph()?, &it.population, None)?;
                counts = it.counts;
            }
            let pop = match history.last() {
                Some(it) => it.population.clone(),
                None => Population::from_policies(vec![init.sink]),
            };
            (pop, None)
        }
    };

    let last_epoch = rec.metrics.last().map_or(0, |m| m.epoch);
    let cp = Checkpoint::new(&final_pop, final_est.as_ref(), echo.clone(), last_epoch);
    write_file(&out.join("population.json"), &checkpoint_to_json(&cp)?)?;
    let meta = RunMeta {
        config: &echo,
        seed: train.seed,
        workers: exec.workers(),
        episodes: EpisodeTotals {
            training: counts.training,
            evaluation: counts.evaluation,
            training_and_evaluation: counts.training + counts.evaluation,
            metrics: rec.metric_episodes,
        },
        unobserved_payoffs: "read as 0 by the payoff estimator",
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let meta_json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    write_file(&out.join("run_meta.json"), &meta_json)?;
    Ok(RunSummary { out_dir: out.to_path_buf(), metrics: rec.metrics, counts })
}

fn abort(slot: &mut Option<CliError>, e: CliError) -> poplearn::Error {
    let msg = e.to_string();
    *slot = Some(e);
    poplearn::Error::Internal(msg)
}

fn finish<T>(result: poplearn::Result<T>, failure: Option<CliError>) -> CliResult<T> {
    match (result, failure) {
        (Ok(v), _) => Ok(v),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e.into()),
    }
}
