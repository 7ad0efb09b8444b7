//! `poplearn rpp`: relative population performance between two runs.

use std::fs;
use std::path::{Path, PathBuf};

use poplearn::eval::rpp_between;
use poplearn::learning::Population;
use poplearn::serialize::format_value;
use poplearn::{derive_seed, Executor};

use crate::config::{Game, GameSpec};
use crate::domain::ConfigDomain;
use crate::error::{CliError, CliResult};
use crate::run::{checkpoint_game, load_checkpoint, write_file};

#[derive(Debug, Clone)]
pub struct RppOptions {
    pub episodes: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RppRow {
    pub epoch_a: usize,
    pub epoch_b: usize,
    pub rpp: f64,
}

/// Per-epoch checkpoints of a run, oldest first; the final population alone
/// when the run kept none.
fn checkpoints(run: &Path) -> CliResult<Vec<(usize, PathBuf)>> {
    let dir = run.join("checkpoints");
    let mut found = Vec::new();
    if dir.is_dir() {
        for entry in fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))? {
            let path = entry.map_err(|e| CliError::io(&dir, e))?.path();
            let epoch = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.strip_prefix("epoch_"))
                .and_then(|s| s.parse::<usize>().ok());
            if let Some(epoch) = epoch {
                found.push((epoch, path));
            }
        }
    }
    found.sort();
    if found.is_empty() {
        let cp = load_checkpoint::<serde_json::Value>(&run.join("population.json"));
        let epoch = cp.map(|c| c.epoch).unwrap_or(0);
        found.push((epoch, run.join("population.json")));
    }
    Ok(found)
}

pub fn cmd_rpp(run_a: &Path, run_b: &Path, opts: &RppOptions) -> CliResult<(f64, Vec<RppRow>)> {
    let (final_a, final_b) = (run_a.join("population.json"), run_b.join("population.json"));
    let (game_a, game_b) = (checkpoint_game(&final_a)?, checkpoint_game(&final_b)?);
    if game_a != game_b {
        return Err(CliError::Config(format!("runs were played on different games: {game_a} vs {game_b}")));
    }
    let spec: GameSpec = serde_json::from_value(game_a).map_err(|e| CliError::Config(format!("{}: bad game spec: {e}", final_a.display())))?;
    let exec = Executor::with_workers(opts.workers.max(1));
    let (final_rpp, rows) = match spec.build()? {
        Game::Matrix(g) => compare(&g, run_a, run_b, opts, &exec)?,
        Game::Markov(g) => compare(&g, run_a, run_b, opts, &exec)?,
    };
    let mut csv = String::from("epoch_a,epoch_b,rpp\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.epoch_a, r.epoch_b, format_value(r.rpp)));
    }
    write_file(&opts.out, &csv)?;
    Ok((final_rpp, rows))
}

fn compare<D: ConfigDomain>(domain: &D, run_a: &Path, run_b: &Path, opts: &RppOptions, exec: &Executor) -> CliResult<(f64, Vec<RppRow>)> {
    let load = |path: &Path| -> CliResult<Population<D::Policy>> { Ok(load_checkpoint::<D::Policy>(path)?.population()?) };
    let side_a: Vec<(usize, Population<D::Policy>)> = checkpoints(run_a)?.into_iter().map(|(e, p)| load(&p).map(|pop| (e, pop))).collect::<CliResult<_>>()?;
    let side_b: Vec<(usize, Population<D::Policy>)> = checkpoints(run_b)?.into_iter().map(|(e, p)| load(&p).map(|pop| (e, pop))).collect::<CliResult<_>>()?;
    let mut rows = Vec::with_capacity(side_a.len() * side_b.len());
    for (ea, a) in &side_a {
        for (eb, b) in &side_b {
            let rpp = rpp_between(a, b, domain, opts.episodes, derive_seed(opts.seed, &[*ea as u64, *eb as u64]), exec)?;
            rows.push(RppRow { epoch_a: *ea, epoch_b: *eb, rpp });
        }
    }
    let final_rpp = rpp_between(
        &load(&run_a.join("population.json"))?,
        &load(&run_b.join("population.json"))?,
        domain,
        opts.episodes,
        derive_seed(opts.seed, &[u64::MAX]),
        exec,
    )?;
    Ok((final_rpp, rows))
}

