//! Brute-force references for the zero-sum solvers. These deliberately share
//! no code with the simplex or the entropy dual.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect()).collect()
}

/// Equal-size support pairs (S, T): solves `p_Sᵀ U_{S,T} = v`, `Σ p_S = 1`.
/// Returns every nonnegative basic solution with its guaranteed payoff
/// `min_j (pᵀU)_j` over all columns.
pub fn support_candidates(u: &Matrix) -> Vec<(Vec<f64>, f64)> {
    let (m, n) = u.shape();
    let mut out = Vec::new();
    for s in subsets(m) {
        for t in subsets(n).into_iter().filter(|t| t.len() == s.len()) {
            let k = s.len();
            let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
            let mut b = DVector::<f64>::zeros(k + 1);
            for (r, &j) in t.iter().enumerate() {
                for (c, &i) in s.iter().enumerate() {
                    a[(r, c)] = u[(i, j)];
                }
                a[(r, k)] = -1.0;
            }
            for c in 0..k {
                a[(k, c)] = 1.0;
            }
            b[k] = 1.0;
            let Some(sol) = a.lu().solve(&b) else { continue };
            if sol.iter().any(|v| !v.is_finite()) || sol.iter().take(k).any(|v| *v < -1e-12) {
                continue;
            }
            let mut p = vec![0.0; m];
            for (c, &i) in s.iter().enumerate() {
                p[i] = sol[c].max(0.0);
            }
            let guaranteed = column_min(u, &p);
            out.push((p, guaranteed));
        }
    }
    out
}

pub fn column_min(u: &Matrix, p: &[f64]) -> f64 {
    (0..u.ncols()).map(|j| (0..u.nrows()).map(|i| p[i] * u[(i, j)]).sum::<f64>()).fold(f64::INFINITY, f64::min)
}

/// Game value by support enumeration, plus one optimal strategy.
pub fn brute_force_value(u: &Matrix) -> (f64, Vec<f64>) {
    support_candidates(u)
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |best, (p, v)| if v > best.0 { (v, p) } else { best })
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

fn ternary_max(lo: f64, hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..iters {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximum-entropy optimal strategy of a three-row game by nested ternary
/// search over the optimal polytope `{p : pᵀU ≥ v − τ}` in (p0, p1) coordinates.
pub fn brute_force_mene_3rows(u: &Matrix) -> Vec<f64> {
    assert_eq!(u.nrows(), 3);
    let (value, anchor) = brute_force_value(u);
    let target = value - 1e-12;
    // Feasible p1 interval for fixed p0.
    let interval = |x: f64| -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (0.0f64, 1.0 - x);
        for j in 0..u.ncols() {
            let a = u[(1, j)] - u[(2, j)];
            let rhs = target - u[(2, j)] - x * (u[(0, j)] - u[(2, j)]);
            if a.abs() < 1e-15 {
                if rhs > 1e-15 {
                    return None;
                }
            } else if a > 0.0 {
                lo = lo.max(rhs / a);
            } else {
                hi = hi.min(rhs / a);
            }
        }
        (lo <= hi).then_some((lo, hi))
    };
    let inner = |x: f64| -> f64 {
        match interval(x) {
            None => f64::NEG_INFINITY,
            Some((lo, hi)) => ternary_max(lo, hi, 100, |y| entropy(&[x, y, 1.0 - x - y])).1,
        }
    };
    // Extent of the polytope along p0 by bisection from a feasible anchor.
    let x0 = anchor[0];
    assert!(interval(x0).is_some(), "anchor must be feasible");
    let bisect = |mut feasible: f64, mut infeasible: f64| {
        if interval(infeasible).is_some() {
            return infeasible;
        }
        for _ in 0..200 {
            let mid = 0.5 * (feasible + infeasible);
            if interval(mid).is_some() {
                feasible = mid;
            } else {
                infeasible = mid;
            }
        }
        feasible
    };
    let x_lo = bisect(x0, 0.0);
    let x_hi = bisect(x0, 1.0);
    let (x, _) = ternary_max(x_lo, x_hi, 100, inner);
    let (lo, hi) = interval(x).expect("optimum is feasible");
    let (y, _) = ternary_max(lo, hi, 100, |y| entropy(&[x, y, 1.0 - x - y]));
    vec![x, y, 1.0 - x - y]
}

/// All antisymmetric 3×3 games with off-diagonal entries in {−1, 0, 1}.
pub fn antisymmetric_sign_games() -> Vec<Matrix> {
    let vals = [-1.0, 0.0, 1.0];
    let mut out = Vec::new();
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                out.push(Matrix::from_row_slice(3, 3, &[0.0, a, b, -a, 0.0, c, -b, -c, 0.0]));
            }
        }
    }
    out
}

/// Every `m`×`n` matrix with entries in {−1, 0, 1}.
pub fn all_sign_matrices(m: usize, n: usize) -> Vec<Matrix> {
    let cells = m * n;
    (0..3usize.pow(cells as u32))
        .map(|mut code| {
            let mut data = vec![0.0; cells];
            for d in data.iter_mut() {
                *d = (code % 3) as f64 - 1.0;
                code /= 3;
            }
            Matrix::from_row_slice(m, n, &data)
        })
        .collect()
}

/// Acting table of an iterated-RPS policy: row 0 is the opening, row
/// `1 + 3 * own + opp` follows a round where we played `own` against `opp`.
pub type Table = [[f64; 3]; 10];

fn rps(a: usize, b: usize) -> f64 {
    match (3 + a - b) % 3 {
        0 => 0.0,
        1 => 1.0,
        _ => -1.0,
    }
}

fn next_row(own: usize, opp: usize) -> usize {
    1 + 3 * own + opp
}

/// Expected undiscounted return of `a` against `b` by enumerating every
/// joint-action history.
pub fn exact_return(a: &Table, b: &Table, rounds: usize) -> f64 {
    fn go(a: &Table, b: &Table, ra: usize, rb: usize, left: usize) -> f64 {
        if left == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for x in 0..3 {
            for y in 0..3 {
                let p = a[ra][x] * b[rb][y];
                if p > 0.0 {
                    total += p * (rps(x, y) + go(a, b, next_row(x, y), next_row(y, x), left - 1));
                }
            }
        }
        total
    }
    go(a, b, 0, 0, rounds)
}

/// Best two-round return against a hidden mixture, by trying all 3^10
/// deterministic tables.
pub fn brute_force_best_response_2rounds(opponents: &[(f64, Table)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(10) {
        let mut table = [[0.0; 3]; 10];
        let mut c = code;
        for row in table.iter_mut() {
            row[c % 3] = 1.0;
            c /= 3;
        }
        let value: f64 = opponents.iter().map(|(w, t)| w * exact_return(&table, t, 2)).sum();
        best = best.max(value);
    }
    best
}
