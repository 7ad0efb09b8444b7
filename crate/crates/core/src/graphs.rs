//! Interaction graphs: row `i` is the distribution over opponents that
//! policy `i` trains against. All-zero rows mark sinks.

use rand::distributions::{Distribution, WeightedIndex};

use crate::error::{invalid, Error, Result};
use crate::policy::SIMPLEX_TOL;
use crate::solvers::solve_mene;
use crate::Matrix;

/// L∞ tolerance under which two graph rows are the same objective.
pub const ROW_TOL: f64 = 1e-9;

/// Opponent distribution over population slots, or the all-zero sink marker.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaStrategy(Vec<f64>);

impl MetaStrategy {
    pub fn new(row: Vec<f64>) -> Result<Self> {
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid(format!("meta-strategy entries must be finite and nonnegative: {row:?}"));
        }
        let total: f64 = row.iter().sum();
        if total != 0.0 && (total - 1.0).abs() > SIMPLEX_TOL {
            return invalid(format!("meta-strategy sums to {total}; expected 0 (sink) or 1"));
        }
        Ok(Self(row))
    }

    pub fn sink(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn is_sink(&self) -> bool {
        is_zero_row(&self.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn is_zero_row(row: &[f64]) -> bool {
    row.iter().all(|v| *v == 0.0)
}

pub(crate) fn rows_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= ROW_TOL)
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    sigma: Matrix,
}

impl InteractionGraph {
    /// Validates a square matrix whose rows are meta-strategies.
    pub fn new(sigma: Matrix) -> Result<Self> {
        if sigma.nrows() == 0 || sigma.nrows() != sigma.ncols() {
            return invalid(format!("interaction graph must be square and nonempty, got {}x{}", sigma.nrows(), sigma.ncols()));
        }
        for i in 0..sigma.nrows() {
            let row: Vec<f64> = sigma.row(i).iter().copied().collect();
            MetaStrategy::new(row).map_err(|e| Error::InvalidArgument(format!("row {i}: {e}")))?;
        }
        Ok(Self { sigma })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("interaction graph rows must all have length equal to the row count");
        }
        Self::new(Matrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn size(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.sigma
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.sigma.row(i).iter().copied().collect()
    }

    pub fn meta_strategy(&self, i: usize) -> MetaStrategy {
        MetaStrategy(self.row(i))
    }

    pub fn is_sink(&self, i: usize) -> bool {
        self.sigma.row(i).iter().all(|v| *v == 0.0)
    }
}

/// Every policy trains against the whole population, itself included.
pub fn graph_self_play(n: usize) -> Result<InteractionGraph> {
    if n == 0 {
        return invalid("self-play graph needs at least one node");
    }
    InteractionGraph::new(Matrix::from_element(n, n, 1.0 / n as f64))
}

/// Policy `i` trains only against policy `i + 1`, wrapping around.
pub fn graph_cycle(n: usize) -> Result<InteractionGraph> {
    if n < 2 {
        return invalid("cycle graph needs at least two nodes");
    }
    InteractionGraph::new(Matrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 }))
}

/// Policy `i` trains against the uniform mixture of all earlier policies.
pub fn graph_fictitious_play(n: usize) -> Result<InteractionGraph> {
    if n == 0 {
        return invalid("fictitious-play graph needs at least one node");
    }
    InteractionGraph::new(Matrix::from_fn(n, n, |i, j| if j < i { 1.0 / i as f64 } else { 0.0 }))
}

/// Maps a payoff matrix to an interaction graph.
pub trait MetaGraphSolver {
    fn name(&self) -> &str;
    fn solve(&self, payoffs: &Matrix) -> Result<InteractionGraph>;
}

/// Row `i + 1` responds to the maximum-entropy Nash mixture over the first `i`
/// policies; row 0 is the sink.
#[derive(Debug, Clone, Copy, Default)]
pub struct PsroNash;

impl MetaGraphSolver for PsroNash {
    fn name(&self) -> &str {
        "psro-nash"
    }

    fn solve(&self, payoffs: &Matrix) -> Result<InteractionGraph> {
        mgs_psro_nash(payoffs)
    }
}

/// A meta-graph solver that ignores payoffs.
#[derive(Debug, Clone)]
pub struct ConstantGraph(pub InteractionGraph);

impl MetaGraphSolver for ConstantGraph {
    fn name(&self) -> &str {
        "static"
    }

    fn solve(&self, payoffs: &Matrix) -> Result<InteractionGraph> {
        if payoffs.nrows() != self.0.size() {
            return invalid("payoff size does not match the static graph");
        }
        Ok(self.0.clone())
    }
}

pub fn mgs_psro_nash(u: &Matrix) -> Result<InteractionGraph> {
    if u.nrows() == 0 || u.nrows() != u.ncols() {
        return invalid(format!("meta-graph solver needs a square payoff matrix, got {}x{}", u.nrows(), u.ncols()));
    }
    let n = u.nrows();
    let mut sigma = Matrix::zeros(n, n);
    for i in 1..n {
        let block = u.view((0, 0), (i, i)).clone_owned();
        let nash = solve_mene(&block)?;
        for (j, p) in nash.probs().iter().enumerate() {
            sigma[(i, j)] = *p;
        }
    }
    Ok(InteractionGraph { sigma })
}

/// First index of each distinct row, in order.
pub fn unique_rows(graph: &InteractionGraph) -> Vec<usize> {
    let rows: Vec<Vec<f64>> = (0..graph.size()).map(|i| graph.row(i)).collect();
    let mut reps: Vec<usize> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if !reps.iter().any(|&r| rows_equal(&rows[r], row)) {
            reps.push(i);
        }
    }
    reps
}

/// True iff every entry on or above the diagonal is zero.
pub fn is_grounded_lower_triangular(graph: &InteractionGraph) -> bool {
    let n = graph.size();
    (0..n).all(|i| (i..n).all(|j| graph.sigma[(i, j)] == 0.0))
}

/// Draws an opponent for policy `i` from row `i`.
pub fn sample_opponent(graph: &InteractionGraph, i: usize, rng: &mut crate::Rng) -> Result<usize> {
    if i >= graph.size() {
        return invalid(format!("slot {i} out of range for graph of size {}", graph.size()));
    }
    if graph.is_sink(i) {
        return Err(Error::SinkHasNoOpponents(i));
    }
    let row = graph.row(i);
    let dist = WeightedIndex::new(&row).map_err(|e| Error::Internal(format!("row {i}: {e}")))?;
    Ok(dist.sample(rng))
}
