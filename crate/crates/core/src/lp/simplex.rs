//! Revised primal simplex for `max c'x  s.t.  Ax <= b, x >= 0` with `b >= 0`.
//!
//! The slack basis is feasible, so no phase one is needed. The basis inverse
//! is kept dense and updated in product form, with a fresh Gauss-Jordan
//! factorization every [`REFACTOR_EVERY`] pivots. Entering and leaving
//! variables follow Bland's rule (lowest index), which rules out cycling on
//! the heavily degenerate scheduling LPs.

use crate::error::{Error, Result};

const REFACTOR_EVERY: usize = 100;
const PIVOT_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct Column {
    pub cost: f64,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct PackingLp {
    pub rhs: Vec<f64>,
    pub columns: Vec<Column>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    /// Row duals (shadow prices).
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Tableau<'a> {
    lp: &'a PackingLp,
    rows: usize,
    /// Basic variable of each row; indices `>= columns.len()` are slacks.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `rows x rows`.
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a PackingLp) -> Self {
        let rows = lp.rhs.len();
        let k = lp.columns.len();
        let mut binv = vec![0.0; rows * rows];
        for r in 0..rows {
            binv[r * rows + r] = 1.0;
        }
        let mut is_basic = vec![false; k + rows];
        is_basic[k..].iter_mut().for_each(|b| *b = true);
        Tableau { lp, rows, basis: (k..k + rows).collect(), is_basic, binv, xb: lp.rhs.clone() }
    }

    fn cost(&self, var: usize) -> f64 {
        self.lp.columns.get(var).map_or(0.0, |c| c.cost)
    }

    fn duals(&self) -> Vec<f64> {
        let rows = self.rows;
        let mut y = vec![0.0; rows];
        for (r, &var) in self.basis.iter().enumerate() {
            let cb = self.cost(var);
            if cb != 0.0 {
                let row = &self.binv[r * rows..(r + 1) * rows];
                y.iter_mut().zip(row).for_each(|(yi, b)| *yi += cb * b);
            }
        }
        y
    }

    fn reduced_cost(&self, var: usize, y: &[f64]) -> f64 {
        match self.lp.columns.get(var) {
            Some(col) => col.cost - col.entries.iter().map(|&(r, a)| y[r] * a).sum::<f64>(),
            None => -y[var - self.lp.columns.len()],
        }
    }

    /// `B^{-1} A_var`.
    fn ftran(&self, var: usize) -> Vec<f64> {
        let rows = self.rows;
        let mut w = vec![0.0; rows];
        let k = self.lp.columns.len();
        if var < k {
            for &(c, a) in &self.lp.columns[var].entries {
                for (r, wr) in w.iter_mut().enumerate() {
                    *wr += self.binv[r * rows + c] * a;
                }
            }
        } else {
            let c = var - k;
            for (r, wr) in w.iter_mut().enumerate() {
                *wr = self.binv[r * rows + c];
            }
        }
        w
    }

    fn pivot(&mut self, leave_row: usize, enter: usize, w: &[f64]) {
        let rows = self.rows;
        let wp = w[leave_row];
        let (before, rest) = self.binv.split_at_mut(leave_row * rows);
        let (prow, after) = rest.split_at_mut(rows);
        prow.iter_mut().for_each(|v| *v /= wp);
        self.xb[leave_row] /= wp;
        let xp = self.xb[leave_row];
        for (r, &wr) in w.iter().enumerate() {
            if r == leave_row || wr == 0.0 {
                continue;
            }
            let row = if r < leave_row {
                &mut before[r * rows..(r + 1) * rows]
            } else {
                let off = (r - leave_row - 1) * rows;
                &mut after[off..off + rows]
            };
            row.iter_mut().zip(prow.iter()).for_each(|(v, p)| *v -= wr * p);
            self.xb[r] -= wr * xp;
        }
        self.is_basic[self.basis[leave_row]] = false;
        self.is_basic[enter] = true;
        self.basis[leave_row] = enter;
    }

    /// Rebuilds `B^{-1}` and the basic values from scratch.
    fn refactor(&mut self) -> Result<()> {
        let rows = self.rows;
        let k = self.lp.columns.len();
        // augmented [B | I]
        let width = 2 * rows;
        let mut aug = vec![0.0; rows * width];
        for (c, &var) in self.basis.iter().enumerate() {
            if var < k {
                for &(r, a) in &self.lp.columns[var].entries {
                    aug[r * width + c] = a;
                }
            } else {
                aug[(var - k) * width + c] = 1.0;
            }
        }
        for r in 0..rows {
            aug[r * width + rows + r] = 1.0;
        }
        for col in 0..rows {
            let (piv, best) = (col..rows).map(|r| (r, aug[r * width + col].abs())).fold((col, -1.0), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
            if best < 1e-13 {
                return Err(Error::Numerical("singular basis during refactorization".into()));
            }
            if piv != col {
                for c in 0..width {
                    aug.swap(piv * width + c, col * width + c);
                }
            }
            let d = aug[col * width + col];
            for c in 0..width {
                aug[col * width + c] /= d;
            }
            for r in 0..rows {
                if r == col {
                    continue;
                }
                let f = aug[r * width + col];
                if f != 0.0 {
                    for c in 0..width {
                        aug[r * width + c] -= f * aug[col * width + c];
                    }
                }
            }
        }
        // aug now holds [I | B^{-1}] where B^{-1} rows correspond to basis positions.
        for r in 0..rows {
            for c in 0..rows {
                self.binv[r * rows + c] = aug[r * width + rows + c];
            }
        }
        for r in 0..rows {
            let row = &self.binv[r * rows..(r + 1) * rows];
            self.xb[r] = row.iter().zip(&self.lp.rhs).map(|(b, v)| b * v).sum::<f64>().max(0.0);
        }
        Ok(())
    }
}

impl PackingLp {
    pub fn solve(&self) -> Result<LpSolution> {
        let rows = self.rhs.len();
        let k = self.columns.len();
        if let Some(r) = self.rhs.iter().position(|&b| !(b >= 0.0 && b.is_finite())) {
            return Err(Error::InvalidArgument(format!("rhs[{r}] must be finite and nonnegative")));
        }
        for (v, col) in self.columns.iter().enumerate() {
            if col.entries.iter().any(|&(r, a)| r >= rows || !a.is_finite()) || !col.cost.is_finite() {
                return Err(Error::InvalidArgument(format!("column {v} is malformed")));
            }
        }
        let cost_scale = self.columns.iter().map(|c| c.cost.abs()).fold(0.0, f64::max).max(1e-300);
        let dual_tol = 1e-10 * cost_scale;
        let max_iter = 50 * (rows + k) + 10_000;

        let mut tab = Tableau::new(self);
        let mut iterations = 0;
        loop {
            if iterations >= max_iter {
                return Err(Error::Numerical(format!("simplex stalled after {iterations} pivots")));
            }
            if iterations > 0 && iterations % REFACTOR_EVERY == 0 {
                tab.refactor()?;
            }
            let y = tab.duals();
            let enter = (0..k + rows).find(|&v| !tab.is_basic[v] && tab.reduced_cost(v, &y) > dual_tol);
            let Some(enter) = enter else {
                break;
            };
            let w = tab.ftran(enter);
            let mut leave: Option<(usize, f64)> = None;
            for (r, &wr) in w.iter().enumerate() {
                if wr <= PIVOT_TOL {
                    continue;
                }
                let ratio = tab.xb[r].max(0.0) / wr;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                        if ratio < lratio && !tie || tie && tab.basis[r] < tab.basis[lr] {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((leave_row, _)) = leave else {
                return Err(Error::Numerical(format!("unbounded direction on variable {enter}")));
            };
            tab.pivot(leave_row, enter, &w);
            iterations += 1;
        }
        tab.refactor()?;
        let mut values = vec![0.0; k];
        for (r, &var) in tab.basis.iter().enumerate() {
            if var < k {
                values[var] = tab.xb[r].max(0.0);
            }
        }
        let objective = values.iter().zip(&self.columns).map(|(x, c)| x * c.cost).sum();
        Ok(LpSolution { values, objective, duals: tab.duals(), iterations })
    }
}
