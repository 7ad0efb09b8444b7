//! Population evaluation: payoff matrices, cross-population comparison and
//! exploitability of meta-strategy mixtures.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exec::Executor;
use crate::graphs::{unique_rows, InteractionGraph};
use crate::learning::{Domain, Population};
use crate::policy::MixedStrategy;
use crate::solvers::{relative_population_performance, solve_mene};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffSource {
    /// Computed exactly from the game's payoff matrix.
    Exact,
    /// Averaged over sampled episodes.
    MonteCarlo,
    /// Read out of a training-time payoff estimator.
    Estimated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    pub values: Matrix,
    pub source: PayoffSource,
    /// Episodes per ordered pair; 0 unless `source` is `MonteCarlo`.
    pub episodes_per_cell: usize,
}

impl PayoffMatrix {
    pub fn estimated(values: Matrix) -> Self {
        Self { values, source: PayoffSource::Estimated, episodes_per_cell: 0 }
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }
}

fn antisymmetrize(m: &Matrix) -> Matrix {
    (m - m.transpose()) * 0.5
}

/// Payoffs among `policies`. Sampled domains play `episodes` episodes per
/// ordered pair and antisymmetrize the result.
pub fn eval_policies<D: Domain>(domain: &D, policies: &[&D::Policy], episodes: usize, seed: u64, exec: &Executor) -> Result<PayoffMatrix> {
    if policies.is_empty() {
        return invalid("cannot evaluate an empty population");
    }
    if domain.is_exact() {
        let values = antisymmetrize(&domain.cross_payoffs(policies, policies, 0, seed, exec));
        return Ok(PayoffMatrix { values, source: PayoffSource::Exact, episodes_per_cell: 0 });
    }
    if episodes == 0 {
        return invalid("Monte-Carlo evaluation needs at least one episode per pair");
    }
    let values = antisymmetrize(&domain.cross_payoffs(policies, policies, episodes, seed, exec));
    Ok(PayoffMatrix { values, source: PayoffSource::MonteCarlo, episodes_per_cell: episodes })
}

pub fn eval_population<D: Domain>(pop: &Population<D::Policy>, domain: &D, episodes: usize, seed: u64, exec: &Executor) -> Result<PayoffMatrix> {
    eval_policies(domain, &pop.policies(), episodes, seed, exec)
}

/// Cross payoffs of A's members (rows) against B's members (columns).
pub fn cross_payoffs<D: Domain>(
    a: &Population<D::Policy>,
    b: &Population<D::Policy>,
    domain: &D,
    episodes: usize,
    seed: u64,
    exec: &Executor,
) -> Result<Matrix> {
    if a.is_empty() || b.is_empty() {
        return invalid("cannot compare empty populations");
    }
    if !domain.is_exact() && episodes == 0 {
        return invalid("Monte-Carlo evaluation needs at least one episode per pair");
    }
    Ok(domain.cross_payoffs(&a.policies(), &b.policies(), episodes, seed, exec))
}

/// Maximin value of the cross-population meta-game; positive when A has a
/// mixture that beats every member of B.
pub fn rpp_between<D: Domain>(a: &Population<D::Policy>, b: &Population<D::Policy>, domain: &D, episodes: usize, seed: u64, exec: &Executor) -> Result<f64> {
    relative_population_performance(&cross_payoffs(a, b, domain, episodes, seed, exec)?)
}

/// Number of distinct learning objectives in the graph.
pub fn effective_population_size(graph: &InteractionGraph) -> usize {
    unique_rows(graph).len()
}

#[derive(Debug, Clone)]
pub struct MetaExploitability {
    pub payoffs: PayoffMatrix,
    /// Maximum-entropy Nash over `payoffs`.
    pub meta: MixedStrategy,
    /// Best-response value against the population played with `meta`.
    pub exploitability: f64,
}

/// Exploitability, in the full game, of the population's meta-Nash mixture.
pub fn meta_nash_exploitability<D: Domain>(pop: &Population<D::Policy>, domain: &D, episodes: usize, seed: u64, exec: &Executor) -> Result<MetaExploitability> {
    let payoffs = eval_population(pop, domain, episodes, seed, exec)?;
    let meta = solve_mene(&payoffs.values)?;
    let exploitability = domain.exploitability(&pop.policies(), meta.probs())?;
    Ok(MetaExploitability { payoffs, meta, exploitability })
}
