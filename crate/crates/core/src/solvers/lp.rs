//! Dense two-phase simplex for small linear programs.
//!
//! Bland's rule is used for both the entering and the leaving variable, which
//! rules out cycling on the degenerate programs that payoff matrices produce.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `maximize cᵀx` subject to row constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Sense, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self { objective, rows: Vec::new() }
    }

    pub fn constraint(mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        assert_eq!(coeffs.len(), self.objective.len(), "constraint arity");
        self.rows.push((coeffs, sense, rhs));
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }

    /// Solves and maps infeasibility or unboundedness to an internal error.
    pub fn solve_optimal(&self) -> Result<LpSolution> {
        match self.solve() {
            LpOutcome::Optimal(s) => Ok(s),
            other => Err(Error::Internal(format!("linear program not optimal: {other:?}"))),
        }
    }
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    n_cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let normalized: Vec<(Vec<f64>, Sense, f64)> = lp
            .rows
            .iter()
            .map(|(a, sense, b)| {
                if *b < 0.0 {
                    let flipped = match sense {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *sense, *b)
                }
            })
            .collect();
        let n_slack = normalized.iter().filter(|r| r.1 != Sense::Eq).count();
        let n_art = normalized.iter().filter(|r| r.1 != Sense::Le).count();
        let first_artificial = n + n_slack;
        let n_cols = first_artificial + n_art;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut slack, mut art) = (n, first_artificial);
        for (a, sense, b) in normalized {
            let mut row = vec![0.0; n_cols + 1];
            row[..n].copy_from_slice(&a);
            row[n_cols] = b;
            match sense {
                Sense::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Sense::Ge => {
                    row[slack] = -1.0;
                    row[art] = 1.0;
                    basis.push(art);
                    slack += 1;
                    art += 1;
                }
                Sense::Eq => {
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Self { rows, basis, n_struct: n, n_cols, first_artificial }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `min costᵀx` for the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (rj, t) in r.iter_mut().zip(&self.rows[i][..self.n_cols]) {
                    *rj -= cb * t;
                }
            }
        }
        r
    }

    /// Runs simplex iterations on `min costᵀx` over columns `< limit`.
    /// Returns false if the program is unbounded.
    fn minimize(&mut self, cost: &[f64], limit: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(enter) = (0..limit).find(|&j| reduced[j] < -COST_TOL) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn solve(mut self, objective: &[f64]) -> LpOutcome {
        if self.first_artificial < self.n_cols {
            let mut phase1 = vec![0.0; self.n_cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            self.minimize(&phase1, self.n_cols);
            let infeasibility: f64 =
                (0..self.rows.len()).filter(|&i| self.basis[i] >= self.first_artificial).map(|i| self.rhs(i)).sum();
            if infeasibility > FEASIBILITY_TOL {
                return LpOutcome::Infeasible;
            }
            // Pivot remaining (zero-valued) artificials out, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    let col = (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > PIVOT_TOL);
                    match col {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![0.0; self.n_cols];
        for (c, o) in cost.iter_mut().zip(objective) {
            *c = -o;
        }
        if !self.minimize(&cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal(LpSolution { x, value })
    }
}
