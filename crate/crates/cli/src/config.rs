//! Experiment configuration: a single JSON document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use poplearn::games::{random_zero_sum_game, rps_game, MarkovGame, MatrixGame};
use poplearn::graphs::{graph_cycle, graph_fictitious_play, graph_self_play, InteractionGraph, PsroNash};
use poplearn::learning::TrainConfig;
use poplearn::policy::{MixedStrategy, TabularPolicy};
use poplearn::Result;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSpec {
    Rps,
    Random {
        #[serde(alias = "actions")]
        n_actions: usize,
        seed: u64,
    },
    IteratedRps { rounds: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    NeuplStatic,
    NeuplAdaptive,
    Psro,
    PsroC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    SelfPlay,
    Cycle,
    FictitiousPlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MgsName {
    PsroNash,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSpec {
    Family(GraphFamily),
    Matrix(Vec<Vec<f64>>),
    Mgs(MgsName),
}

/// A fixed policy: `"uniform"`, `"pure-rock"`, `{"pure": 2}` or `{"biased": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySpec {
    Uniform,
    PureRock,
    PurePaper,
    PureScissors,
    Pure(usize),
    Biased(Vec<f64>),
}

impl PolicySpec {
    fn distribution(&self, actions: usize) -> Result<MixedStrategy> {
        match self {
            PolicySpec::Uniform => Ok(MixedStrategy::uniform(actions)),
            PolicySpec::PureRock => pure(actions, 0),
            PolicySpec::PurePaper => pure(actions, 1),
            PolicySpec::PureScissors => pure(actions, 2),
            PolicySpec::Pure(a) => pure(actions, *a),
            PolicySpec::Biased(w) if w.len() == actions => MixedStrategy::new(w.clone()),
            PolicySpec::Biased(w) => Err(poplearn::Error::InvalidArgument(format!("biased policy has {} weights for {actions} actions", w.len()))),
        }
    }

    pub fn matrix_policy(&self, game: &MatrixGame) -> Result<MixedStrategy> {
        self.distribution(game.num_actions())
    }

    pub fn tabular_policy(&self) -> Result<TabularPolicy> {
        TabularPolicy::constant(self.distribution(poplearn::games::RPS_ACTIONS)?)
    }
}

fn pure(actions: usize, a: usize) -> Result<MixedStrategy> {
    if a >= actions {
        return Err(poplearn::Error::InvalidArgument(format!("action {a} out of range for {actions} actions")));
    }
    Ok(MixedStrategy::pure(actions, a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrozenSpec {
    pub slot: usize,
    pub policy: PolicySpec,
}

fn default_sink() -> PolicySpec {
    PolicySpec::Uniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_sink")]
    pub sink: PolicySpec,
    #[serde(default)]
    pub frozen: Vec<FrozenSpec>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub reference_run: Option<PathBuf>,
}

/// Either game flavour, built from a [`GameSpec`].
pub enum Game {
    Matrix(MatrixGame),
    Markov(MarkovGame),
}

impl GameSpec {
    pub fn build(&self) -> Result<Game> {
        Ok(match self {
            GameSpec::Rps => Game::Matrix(rps_game()),
            GameSpec::Random { n_actions, seed } => Game::Matrix(random_zero_sum_game(*n_actions, *seed)?),
            GameSpec::IteratedRps { rounds } => Game::Markov(MarkovGame::iterated_rps(*rounds)?),
        })
    }
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn at_line(source: &str, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    match locate(text, key) {
        Some(line) => CliError::Config(format!("{source}:{line}: {msg}")),
        None => CliError::Config(format!("{source}: {msg}")),
    }
}

impl ExperimentConfig {
    /// Parses and validates a config document; errors name the offending line.
    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("{source}:{}:{}: {e}", e.line(), e.column())))?;
        cfg.validate(text, source)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg = Self::parse(&text, &path.display().to_string())?;
        Ok((cfg, text))
    }

    fn validate(&self, text: &str, source: &str) -> CliResult<()> {
        if let Err(e) = self.train.validate() {
            // Validation messages open with the offending field name.
            let field = match &e {
                poplearn::Error::InvalidArgument(m) => m.split_whitespace().next().unwrap_or("train").to_string(),
                _ => "train".to_string(),
            };
            return Err(at_line(source, text, &field, e));
        }
        let game = self.game.build().map_err(|e| at_line(source, text, "game", e))?;
        match (&self.algorithm, &self.graph) {
            (Algorithm::NeuplStatic, Some(GraphSpec::Family(_) | GraphSpec::Matrix(_))) => {}
            (Algorithm::NeuplStatic, _) => return Err(at_line(source, text, "algorithm", "neupl-static requires a graph family or matrix")),
            (Algorithm::NeuplAdaptive, Some(GraphSpec::Mgs(_))) => {}
            (Algorithm::NeuplAdaptive, _) => return Err(at_line(source, text, "algorithm", "neupl-adaptive requires a meta-graph solver (\"graph\": {\"mgs\": \"psro-nash\"})")),
            (Algorithm::Psro | Algorithm::PsroC, None | Some(GraphSpec::Mgs(_))) => {}
            (Algorithm::Psro | Algorithm::PsroC, _) => return Err(at_line(source, text, "graph", "psro builds its own graph; only an mgs may be named")),
        }
        if let Some(GraphSpec::Matrix(rows)) = &self.graph {
            InteractionGraph::from_rows(rows).map_err(|e| at_line(source, text, "graph", e))?;
        }
        if !self.frozen.is_empty() && matches!(self.algorithm, Algorithm::Psro | Algorithm::PsroC) {
            return Err(at_line(source, text, "frozen", "frozen policies are supported by neupl algorithms only"));
        }
        let n = self.population_size();
        for f in &self.frozen {
            if f.slot >= n {
                return Err(at_line(source, text, "frozen", format!("frozen slot {} out of range for {n} slots", f.slot)));
            }
        }
        let check = |spec: &PolicySpec, key: &str| -> CliResult<()> {
            match &game {
                Game::Matrix(g) => spec.matrix_policy(g).map(|_| ()),
                Game::Markov(_) => spec.tabular_policy().map(|_| ()),
            }
            .map_err(|e| at_line(source, text, key, e))
        };
        check(&self.sink, "sink")?;
        for f in &self.frozen {
            check(&f.policy, "frozen")?;
        }
        if let Some(reference) = &self.reference_run {
            if !reference.join("population.json").is_file() {
                return Err(at_line(source, text, "reference_run", format!("{} has no population.json", reference.display())));
            }
        }
        Ok(())
    }

    /// Number of population slots the run will use.
    pub fn population_size(&self) -> usize {
        match &self.graph {
            Some(GraphSpec::Matrix(rows)) => rows.len(),
            _ => self.train.population_size,
        }
    }

    /// The static interaction graph, if the algorithm uses one.
    pub fn static_graph(&self) -> Result<Option<InteractionGraph>> {
        let n = self.population_size();
        Ok(match &self.graph {
            Some(GraphSpec::Family(GraphFamily::SelfPlay)) => Some(graph_self_play(n)?),
            Some(GraphSpec::Family(GraphFamily::Cycle)) => Some(graph_cycle(n)?),
            Some(GraphSpec::Family(GraphFamily::FictitiousPlay)) => Some(graph_fictitious_play(n)?),
            Some(GraphSpec::Matrix(rows)) => Some(InteractionGraph::from_rows(rows)?),
            _ => None,
        })
    }

    pub fn mgs(&self) -> PsroNash {
        PsroNash
    }
}
