//! Maximum-entropy maximin strategy.
//!
//! With `v` the game value, the optimal polytope is `{p ∈ Δ : pᵀU ≥ v}`.
//! Entropy is maximized over the slightly relaxed polytope
//! `{p ∈ Δ : pᵀU ≥ v − δ}`, which has a strictly feasible point (the maximin
//! strategy itself), so its Lagrange dual
//!
//! ```text
//! min_{ν ≥ 0}  log Σ_i exp((Wν)_i),   W = U − (v − δ)
//! ```
//!
//! attains its minimum and the primal optimum is `p = softmax(Wν*)`. The dual
//! is smooth and convex; it is solved with a projected Newton method.

use nalgebra::{DMatrix, DVector};

use super::{check_matrix, column_payoffs, solve_maximin, MAXIMIN_TOL};
use crate::error::Result;
use crate::policy::MixedStrategy;
use crate::Matrix;

const RELAXATION: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-14;
const MAX_ITERS: usize = 500;
const ARMIJO: f64 = 1e-4;

/// The maximin row strategy of maximum Shannon entropy.
pub fn solve_mene(u: &Matrix) -> Result<MixedStrategy> {
    check_matrix(u)?;
    let (maximin, value) = solve_maximin(u)?;
    let m = u.nrows();
    if m == 1 {
        return Ok(maximin);
    }
    let scale = u.amax().max(1.0);
    let delta = RELAXATION * scale;
    let w = u.map(|x| x - (value.0 - delta));

    let nu = minimize_dual(&w);
    let mut p = softmax(&(&w * &nu));

    // Residual dual inaccuracy: if a constraint is violated by more than
    // `delta`, pull p toward the maximin strategy until it holds.
    let slack = column_payoffs(&w, p.as_slice());
    let anchor = column_payoffs(&w, maximin.probs());
    let theta = slack
        .iter()
        .zip(&anchor)
        .map(|(a, b)| (a + delta, b + delta))
        .filter(|(a, _)| *a < 0.0)
        .map(|(a, b)| -a / (b - a))
        .fold(0.0, f64::max);
    if theta > 0.0 {
        for (pi, qi) in p.iter_mut().zip(maximin.probs()) {
            *pi = (1.0 - theta) * *pi + theta * qi;
        }
    }
    let strategy = MixedStrategy::from_weights(p.as_slice())?;
    debug_assert!(column_payoffs(u, strategy.probs()).iter().all(|c| *c >= value.0 - MAXIMIN_TOL));
    Ok(strategy)
}

fn softmax(z: &DVector<f64>) -> DVector<f64> {
    let max = z.max();
    let e = z.map(|v| (v - max).exp());
    let total = e.sum();
    e / total
}

fn log_sum_exp(z: &DVector<f64>) -> f64 {
    let max = z.max();
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn minimize_dual(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.ncols();
    let mut nu = DVector::<f64>::zeros(n);
    let mut f = log_sum_exp(&(w * &nu));
    for _ in 0..MAX_ITERS {
        let p = softmax(&(w * &nu));
        let grad = w.transpose() * &p;
        let projected = (0..n).map(|j| (nu[j] - (nu[j] - grad[j]).max(0.0)).abs()).fold(0.0, f64::max);
        if projected <= GRADIENT_TOL {
            break;
        }
        let eps = projected.min(1e-3);
        let binding: Vec<bool> = (0..n).map(|j| nu[j] <= eps && grad[j] > 0.0).collect();
        let free: Vec<usize> = (0..n).filter(|&j| !binding[j]).collect();

        let mut direction = DVector::<f64>::zeros(n);
        for j in 0..n {
            if binding[j] {
                direction[j] = -grad[j];
            }
        }
        if !free.is_empty() {
            // Hessian Wᵀ(diag p − ppᵀ)W restricted to the free coordinates.
            let wf = DMatrix::from_fn(w.nrows(), free.len(), |i, k| w[(i, free[k])]);
            let mean = wf.transpose() * &p;
            let mut hessian = DMatrix::<f64>::zeros(free.len(), free.len());
            for i in 0..w.nrows() {
                for a in 0..free.len() {
                    let da = wf[(i, a)] - mean[a];
                    for b in 0..free.len() {
                        hessian[(a, b)] += p[i] * da * (wf[(i, b)] - mean[b]);
                    }
                }
            }
            let ridge = 1e-12 * (1.0 + hessian.diagonal().max());
            let rhs = DVector::from_iterator(free.len(), free.iter().map(|&j| -grad[j]));
            let mut step = None;
            let mut reg = ridge;
            for _ in 0..20 {
                let h = &hessian + DMatrix::identity(free.len(), free.len()) * reg;
                if let Some(chol) = h.cholesky() {
                    step = Some(chol.solve(&rhs));
                    break;
                }
                reg *= 100.0;
            }
            let step = step.unwrap_or(rhs);
            for (k, &j) in free.iter().enumerate() {
                direction[j] = step[k];
            }
        }

        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-20 {
            let candidate = (&nu + &direction * t).map(|v| v.max(0.0));
            let fc = log_sum_exp(&(w * &candidate));
            let decrease = grad.dot(&(&candidate - &nu));
            if fc <= f + ARMIJO * decrease {
                accepted = candidate != nu;
                nu = candidate;
                f = fc;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    nu
}
