//! Independent oracles and instance generators shared by integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use reserve_core::instance::{CustomerType, Instance, RateFunction, Resource};

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Random single-period instance with `n` types and `m` resources.
/// About a fifth of the utilizations are zero (infeasible pairs).
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let caps: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
    let resources = caps.iter().enumerate().map(|(id, &capacity)| Resource { id, capacity }).collect();
    let types = (0..n)
        .map(|i| {
            let u = caps
                .iter()
                .map(|&c| if rng.random_bool(0.2) { 0.0 } else { c * rng.random_range(0.05..1.0) })
                .collect();
            CustomerType::new(i, u, RateFunction::constant(rng.random_range(0.1..4.0), 1.0).unwrap())
        })
        .collect();
    Instance::new(1.0, resources, types, None).unwrap()
}

/// Solves `A y = b` for square `A` (row-major) by Gaussian elimination with
/// partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                        *x -= f * p;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(total: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, total: usize, k: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..total {
            if total - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, total, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, total, k, &mut Vec::with_capacity(k), visit);
}

/// Routing LP optimum by enumerating every vertex of the feasible polytope.
/// Only practical for a handful of variables.
pub fn vertex_enumeration_lp(inst: &Instance) -> f64 {
    let (n, m) = (inst.n(), inst.m());
    let vars: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| inst.u(i, j) > 0.0).collect();
    let k = vars.len();
    if k == 0 {
        return 0.0;
    }
    // rows of G y <= h
    let mut g: Vec<Vec<f64>> = Vec::new();
    let mut h: Vec<f64> = Vec::new();
    for j in 0..m {
        g.push(vars.iter().map(|&(i, jj)| if jj == j { inst.u(i, j) } else { 0.0 }).collect());
        h.push(inst.capacity(j));
    }
    for i in 0..n {
        g.push(vars.iter().map(|&(ii, _)| if ii == i { 1.0 } else { 0.0 }).collect());
        h.push(inst.lambda(i));
    }
    for v in 0..k {
        g.push((0..k).map(|w| if w == v { -1.0 } else { 0.0 }).collect());
        h.push(0.0);
    }
    let cost: Vec<f64> = vars.iter().map(|&(i, j)| inst.u(i, j)).collect();
    let mut best = 0.0f64;
    combinations(g.len(), k, &mut |rows| {
        let a = rows.iter().map(|&r| g[r].clone()).collect();
        let b = rows.iter().map(|&r| h[r]).collect();
        if let Some(y) = solve_square(a, b) {
            let feasible = g.iter().zip(&h).all(|(row, &hr)| {
                let lhs: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                lhs <= hr + 1e-9 * hr.abs().max(1.0)
            });
            if feasible {
                best = best.max(cost.iter().zip(&y).map(|(c, y)| c * y).sum());
            }
        }
    });
    best
}

/// One draw of `min(sum_{k<=N} X_k, 1 - beta)` with `N ~ Poisson(mean_n)`
/// and `X_k` drawn by `x`.
pub fn capped_compound_poisson<R: Rng>(rng: &mut R, mean_n: f64, beta: f64, x: &impl Fn(&mut R) -> f64) -> f64 {
    let n = if mean_n > 0.0 { Poisson::new(mean_n).unwrap().sample(rng) as u64 } else { 0 };
    let total: f64 = (0..n).map(|_| x(rng)).sum();
    total.min(1.0 - beta)
}

/// Type-A allocation bound of an RLS resource.
pub fn type_a_bound(c: f64, small: f64, tiny: f64, z_star: f64) -> f64 {
    let a = 0.5 * c * (1.0 - (-2.0 * small / c).exp());
    let b = (1.0 - z_star) * c * (1.0 - (-tiny / ((1.0 - z_star) * c)).exp());
    a.max(b)
}

/// Type-B allocation bound of an RLS resource.
pub fn type_b_bound(c: f64, large: f64, mu_large: f64, mu_medium: f64, z_star: f64) -> f64 {
    let el = (-mu_large).exp();
    let inner = (-mu_medium).exp() * (large * el + 0.5 * c * (1.0 - el - mu_large * el))
        + (1.0 - (-mu_medium).exp()) * z_star * c;
    inner.min(z_star * c)
}
