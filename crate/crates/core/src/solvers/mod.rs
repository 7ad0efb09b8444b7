//! Normal-form zero-sum solvers.
//!
//! [`solve_maximin`] solves the row player's maximin linear program.
//! [`solve_mene`] then selects the maximum-entropy strategy among all maximin
//! strategies, which makes it a deterministic function of the payoffs.

pub mod lp;
mod mene;

pub use mene::solve_mene;

use crate::error::{invalid, Result};
use crate::games::bilinear;
use crate::policy::MixedStrategy;
use crate::Matrix;
use lp::{LinearProgram, Sense};

/// Feasibility tolerance for maximin optimality checks.
pub const MAXIMIN_TOL: f64 = 1e-9;

/// Expected return to the row player under a solved profile.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GameValue(pub f64);

pub(crate) fn check_matrix(u: &Matrix) -> Result<()> {
    if u.nrows() == 0 || u.ncols() == 0 {
        return invalid("payoff matrix is empty");
    }
    if u.iter().any(|v| !v.is_finite()) {
        return invalid("payoff matrix has non-finite entries");
    }
    Ok(())
}

/// Row strategy maximizing the worst-case column payoff, and that payoff.
pub fn solve_maximin(u: &Matrix) -> Result<(MixedStrategy, GameValue)> {
    check_matrix(u)?;
    let (m, n) = u.shape();
    // Shift entries to >= 1 so the value variable is nonnegative.
    let shift = 1.0 - u.min();
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for j in 0..n {
        let mut row: Vec<f64> = (0..m).map(|i| -(u[(i, j)] + shift)).collect();
        row.push(1.0);
        lp = lp.constraint(row, Sense::Le, 0.0);
    }
    let mut simplex = vec![1.0; m];
    simplex.push(0.0);
    lp = lp.constraint(simplex, Sense::Eq, 1.0);

    let solution = lp.solve_optimal()?;
    let strategy = MixedStrategy::from_weights(&solution.x[..m])?;
    // Report the value attained by the returned strategy rather than the LP
    // variable, so the two are consistent to rounding.
    let value = column_payoffs(u, strategy.probs()).into_iter().fold(f64::INFINITY, f64::min);
    Ok((strategy, GameValue(value)))
}

/// `pᵀU` as a vector over columns.
pub fn column_payoffs(u: &Matrix, p: &[f64]) -> Vec<f64> {
    (0..u.ncols()).map(|j| (0..u.nrows()).map(|i| p[i] * u[(i, j)]).sum()).collect()
}

/// `U·s` as a vector over rows.
pub fn row_payoffs(u: &Matrix, s: &[f64]) -> Vec<f64> {
    (0..u.nrows()).map(|i| (0..u.ncols()).map(|j| u[(i, j)] * s[j]).sum()).collect()
}

/// Best-response value against `s`: `max_a (U·s)_a`.
pub fn exploitability(u: &Matrix, s: &MixedStrategy) -> Result<f64> {
    if u.ncols() != s.len() {
        return invalid(format!("strategy of length {} against {}x{} payoff", s.len(), u.nrows(), u.ncols()));
    }
    check_matrix(u)?;
    Ok(row_payoffs(u, s.probs()).into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Value `pᵀ·U·q` of the zero-sum game between two populations, where entry
/// `(i, j)` is the payoff of member `i` of the first population against
/// member `j` of the second.
pub fn relative_population_performance(u_cross: &Matrix) -> Result<f64> {
    check_matrix(u_cross)?;
    let (p, _) = solve_maximin(u_cross)?;
    let (q, _) = solve_maximin(&(-u_cross.transpose()))?;
    bilinear(u_cross, p.probs(), q.probs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::rps_game;

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, v)
    }

    #[test]
    fn maximin_examples() {
        let (p, v) = solve_maximin(rps_game().payoff()).unwrap();
        assert!(p.linf_distance(&MixedStrategy::uniform(3)) < 1e-12);
        assert!(v.0.abs() < 1e-12);

        let (p, v) = solve_maximin(&m(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        assert!(p.linf_distance(&MixedStrategy::pure(2, 1)) < 1e-12);
        assert!(v.0.abs() < 1e-12);

        let (p, v) = solve_maximin(&m(1, 1, &[0.0])).unwrap();
        assert_eq!(p.probs(), &[1.0]);
        assert_eq!(v.0, 0.0);
    }

    #[test]
    fn maximin_rejects_empty() {
        assert!(solve_maximin(&Matrix::zeros(0, 3)).is_err());
        assert!(solve_mene(&Matrix::zeros(2, 0)).is_err());
        assert!(relative_population_performance(&Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn maximin_rectangular() {
        // Row 1 dominates: value 2.
        let (p, v) = solve_maximin(&m(2, 3, &[1.0, 0.0, 3.0, 2.0, 4.0, 2.0])).unwrap();
        assert!((v.0 - 2.0).abs() < 1e-12);
        assert!((p.probs()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exploitability_examples() {
        let u = rps_game().payoff().clone();
        assert!(exploitability(&u, &MixedStrategy::uniform(3)).unwrap().abs() < 1e-15);
        assert_eq!(exploitability(&u, &MixedStrategy::pure(3, 0)).unwrap(), 1.0);
        let half = MixedStrategy::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(exploitability(&u, &half).unwrap(), 0.5);
        assert!(exploitability(&u, &MixedStrategy::uniform(2)).is_err());
    }

    #[test]
    fn rpp_examples() {
        assert!((relative_population_performance(&m(2, 1, &[1.0, -1.0])).unwrap() - 1.0).abs() < 1e-12);
        assert!(relative_population_performance(rps_game().payoff()).unwrap().abs() < 1e-12);
        assert_eq!(relative_population_performance(&Matrix::zeros(2, 2)).unwrap(), 0.0);
    }
}
