//! The static routing LP
//!
//! ```text
//! V_LP = max  sum_ij x_ij u_ij
//!        s.t. sum_i x_ij u_ij <= c_j       for every resource j
//!             sum_j x_ij      <= Lambda_i  for every type i
//!             x >= 0
//! ```
//!
//! Only pairs with `u_ij > 0` become variables. Internally each variable is
//! rescaled to the routed fraction `p_ij = x_ij / Lambda_i` and each resource
//! row is divided by `c_j`, so every right-hand side is 1.

mod layered;
mod simplex;

pub use layered::solve_layered_greedy;
pub use simplex::{Column, LpSolution, PackingLp};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Relative tolerance on the routing invariants.
pub const ROUTING_TOL: f64 = 1e-9;

/// Optimal LP solution `x*` (dense `n x m`, row-major) and its value `V_LP`.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalRouting {
    n: usize,
    m: usize,
    x: Vec<f64>,
    objective: f64,
}

impl FractionalRouting {
    pub(crate) fn from_dense(inst: &Instance, x: Vec<f64>) -> Self {
        let (n, m) = (inst.n(), inst.m());
        debug_assert_eq!(x.len(), n * m);
        let mut x = x;
        // zero-utilization routes carry no reward and must never be routed
        for i in 0..n {
            for j in 0..m {
                let v = &mut x[i * m + j];
                if inst.u(i, j) == 0.0 || *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        let objective =
            (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| x[i * m + j] * inst.u(i, j)).sum();
        FractionalRouting { n, m, x, objective }
    }

    /// All-zero routing (feasible for every instance).
    pub fn zero(inst: &Instance) -> Self {
        FractionalRouting { n: inst.n(), m: inst.m(), x: vec![0.0; inst.n() * inst.m()], objective: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.m..(i + 1) * self.m]
    }

    /// `V_LP`.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// LP load `U_j = sum_i x_ij u_ij` of every resource.
    pub fn loads(&self, inst: &Instance) -> Vec<f64> {
        let mut loads = vec![0.0; self.m];
        for i in 0..self.n {
            for (j, l) in loads.iter_mut().enumerate() {
                *l += self.x(i, j) * inst.u(i, j);
            }
        }
        loads
    }

    pub fn check_dimensions(&self, inst: &Instance) -> Result<()> {
        if self.n != inst.n() || self.m != inst.m() {
            return Err(Error::Dimension(format!(
                "routing is {}x{}, instance is {}x{}",
                self.n,
                self.m,
                inst.n(),
                inst.m()
            )));
        }
        Ok(())
    }

    /// Verifies the capacity, demand and objective invariants.
    pub fn check_invariants(&self, inst: &Instance) -> Result<()> {
        self.check_dimensions(inst)?;
        for (j, load) in self.loads(inst).iter().enumerate() {
            let c = inst.capacity(j);
            if *load > c + ROUTING_TOL * c.max(1.0) {
                return Err(Error::Numerical(format!("resource {j} load {load} exceeds capacity {c}")));
            }
        }
        for i in 0..self.n {
            let routed: f64 = self.row(i).iter().sum();
            let lambda = inst.lambda(i);
            if routed > lambda + ROUTING_TOL * lambda.max(1.0) {
                return Err(Error::Numerical(format!("type {i} routes {routed} > Lambda {lambda}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RoutingDoc { objective: self.objective, x: (0..self.n).map(|i| self.row(i).to_vec()).collect() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// JSON layout of an LP dump: `{"objective": V, "x": [[x_11, ..., x_1m], ...]}`.
#[derive(Serialize, Deserialize)]
struct RoutingDoc {
    objective: f64,
    x: Vec<Vec<f64>>,
}

/// Solves the routing LP with the general simplex solver.
pub fn solve_routing_lp(inst: &Instance) -> Result<FractionalRouting> {
    let (n, m) = (inst.n(), inst.m());
    let mut columns = Vec::new();
    let mut var_pos = Vec::new();
    for i in 0..n {
        let lambda = inst.lambda(i);
        if lambda <= 0.0 {
            continue;
        }
        for j in inst.feasible_resources(i) {
            let u = inst.u(i, j);
            columns.push(Column { cost: lambda * u, entries: vec![(j, lambda * u / inst.capacity(j)), (m + i, 1.0)] });
            var_pos.push((i, j));
        }
    }
    let lp = PackingLp { rhs: vec![1.0; m + n], columns };
    let sol = lp.solve()?;
    let mut x = vec![0.0; n * m];
    for (&(i, j), p) in var_pos.iter().zip(&sol.values) {
        x[i * m + j] = p.min(1.0) * inst.lambda(i);
    }
    let routing = FractionalRouting::from_dense(inst, x);
    routing.check_invariants(inst)?;
    Ok(routing)
}

/// Solves with the layered greedy when the instance has scheduling structure,
/// otherwise with the simplex solver.
pub fn solve_auto(inst: &Instance) -> Result<FractionalRouting> {
    if inst.schedule().is_some() {
        solve_layered_greedy(inst)
    } else {
        solve_routing_lp(inst)
    }
}

/// Sanity check that a Monte Carlo estimate of the offline optimum does not
/// exceed `V_LP` by more than three standard errors.
pub fn upper_bound_check(routing: &FractionalRouting, offline_mean: f64, offline_stderr: f64) -> bool {
    offline_mean <= routing.objective() + 3.0 * offline_stderr
}
