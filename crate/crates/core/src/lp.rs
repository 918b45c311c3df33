//! Dense revised primal simplex for `min c^T z  s.t.  A z = b, z >= 0`.
//!
//! Rows are fixed at construction; columns may be appended between solves,
//! and the previous basis is kept as a warm start. Pricing uses Bland's rule,
//! so the method terminates on degenerate problems. Phase 1 runs on one
//! artificial variable per row.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Reduced cost below `-ENTER_TOL` makes a column eligible to enter.
pub const ENTER_TOL: f64 = 1e-11;
/// Pivot entries below this fraction of the largest entry in the column are
/// skipped; a near-zero pivot on a degenerate row wrecks `B^{-1}`.
const PIVOT_TOL: f64 = 1e-9;
const PIVOT_FLOOR: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Column(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone)]
pub struct DenseSimplex {
    rows: usize,
    /// Each row is multiplied by this sign so that `rhs >= 0`.
    row_sign: Vec<f64>,
    rhs: Vec<f64>,
    columns: Vec<Vec<f64>>,
    costs: Vec<f64>,
    basis: Vec<Var>,
    in_basis: Vec<bool>,
    /// Row-major `B^{-1}`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
}

impl DenseSimplex {
    pub fn new(rhs: &[f64]) -> Result<Self> {
        if rhs.is_empty() {
            return Err(Error::invalid("rhs", "at least one row is required"));
        }
        if rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("rhs", "entries must be finite"));
        }
        let rows = rhs.len();
        let row_sign: Vec<f64> = rhs
            .iter()
            .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let rhs: Vec<f64> = rhs.iter().map(|b| b.abs()).collect();
        let mut binv = vec![0.0; rows * rows];
        for i in 0..rows {
            binv[i * rows + i] = 1.0;
        }
        Ok(Self {
            rows,
            row_sign,
            xb: rhs.clone(),
            rhs,
            columns: Vec::new(),
            costs: Vec::new(),
            basis: (0..rows).map(Var::Artificial).collect(),
            in_basis: Vec::new(),
            binv,
            since_refactor: 0,
            pivots: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Appends a column and returns its index.
    pub fn add_column(&mut self, coefficients: &[f64], cost: f64) -> Result<usize> {
        Error::check_dim(self.rows, coefficients.len())?;
        if !cost.is_finite() || coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("column", "entries must be finite"));
        }
        let col = coefficients
            .iter()
            .zip(&self.row_sign)
            .map(|(a, s)| a * s)
            .collect();
        self.columns.push(col);
        self.costs.push(cost);
        self.in_basis.push(false);
        Ok(self.columns.len() - 1)
    }

    /// Runs phase 1 (if needed) and phase 2 to optimality.
    pub fn solve(&mut self) -> Result<()> {
        if self.artificial_mass() > FEAS_TOL * (1.0 + self.rhs_norm()) {
            self.iterate(Phase::One)?;
            if self.artificial_mass() > FEAS_TOL * (1.0 + self.rhs_norm()) {
                return Err(Error::LpInfeasible);
            }
        }
        self.iterate(Phase::Two)
    }

    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(v, x)| match v {
                Var::Column(j) => self.costs[*j] * x,
                Var::Artificial(_) => 0.0,
            })
            .sum()
    }

    /// Values of all appended columns at the current basis.
    pub fn primal(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.columns.len()];
        for (v, &x) in self.basis.iter().zip(&self.xb) {
            if let Var::Column(j) = v {
                z[*j] = x;
            }
        }
        z
    }

    /// Simplex multipliers `y` with `c_B^T = y^T B`, in the caller's row signs.
    pub fn duals(&self) -> Vec<f64> {
        let y = self.multipliers(Phase::Two);
        y.iter().zip(&self.row_sign).map(|(y, s)| y * s).collect()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn rhs_norm(&self) -> f64 {
        self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max)
    }

    fn artificial_mass(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x.max(0.0))
            .sum()
    }

    fn cost(&self, v: Var, phase: Phase) -> f64 {
        match (v, phase) {
            (Var::Column(j), Phase::Two) => self.costs[j],
            (Var::Column(_), Phase::One) => 0.0,
            (Var::Artificial(_), Phase::One) => 1.0,
            (Var::Artificial(_), Phase::Two) => 0.0,
        }
    }

    fn multipliers(&self, phase: Phase) -> Vec<f64> {
        let m = self.rows;
        let mut y = vec![0.0; m];
        for (i, &v) in self.basis.iter().enumerate() {
            let cb = self.cost(v, phase);
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += cb * bk;
                }
            }
        }
        y
    }

    fn column_of(&self, v: Var) -> Vec<f64> {
        match v {
            Var::Column(j) => self.columns[j].clone(),
            Var::Artificial(i) => {
                let mut e = vec![0.0; self.rows];
                e[i] = 1.0;
                e
            }
        }
    }

    /// Bland ordering: real columns first by index, then artificials.
    fn rank(&self, v: Var) -> usize {
        match v {
            Var::Column(j) => j,
            Var::Artificial(i) => self.columns.len() + i,
        }
    }

    fn iterate(&mut self, phase: Phase) -> Result<()> {
        let m = self.rows;
        let mut confirmed = false;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::Consistency("simplex pivot limit reached".into()));
            }
            let y = self.multipliers(phase);
            let entering = (0..self.columns.len()).find(|&j| {
                if self.in_basis[j] {
                    return false;
                }
                let col = &self.columns[j];
                let reduced = self.cost(Var::Column(j), phase) - dot(&y, col);
                reduced < -ENTER_TOL
            });
            let Some(j) = entering else {
                if confirmed || self.since_refactor == 0 {
                    return Ok(());
                }
                // Confirm optimality once against a fresh factorization.
                // Repeating this could cycle on reduced costs at the tolerance.
                confirmed = true;
                self.refactor();
                continue;
            };

            let col = &self.columns[j];
            let w: Vec<f64> = (0..m)
                .map(|i| dot(&self.binv[i * m..(i + 1) * m], col))
                .collect();

            let wmax = w.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
            let tol = (PIVOT_TOL * wmax).max(PIVOT_FLOOR);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let ratio = if phase == Phase::Two
                    && matches!(self.basis[i], Var::Artificial(_))
                    && w[i].abs() > tol
                {
                    // A zero-level artificial must not move: pivot it out now.
                    0.0
                } else if w[i] > tol {
                    self.xb[i].max(0.0) / w[i]
                } else {
                    continue;
                };
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-12
                            || (ratio <= best + 1e-12
                                && self.rank(self.basis[i]) < self.rank(self.basis[r]))
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(r, j, &w, theta);
        }
    }

    fn pivot(&mut self, r: usize, j: usize, w: &[f64], theta: f64) {
        let m = self.rows;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * w[i];
                if self.xb[i] < 0.0 && self.xb[i] > -FEAS_TOL {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[r] = theta;

        let pr = w[r];
        for k in 0..m {
            self.binv[r * m + k] /= pr;
        }
        for i in 0..m {
            if i != r && w[i] != 0.0 {
                let f = w[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }

        if let Var::Column(old) = self.basis[r] {
            self.in_basis[old] = false;
        }
        self.basis[r] = Var::Column(j);
        self.in_basis[j] = true;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Rebuilds `B^{-1}` and `x_B` from scratch to shed accumulated error.
    fn refactor(&mut self) {
        let m = self.rows;
        let mut a = vec![0.0; m * m];
        for (k, &v) in self.basis.iter().enumerate() {
            for (i, x) in self.column_of(v).into_iter().enumerate() {
                a[i * m + k] = x;
            }
        }
        if let Some(inv) = invert(&a, m) {
            self.binv = inv;
            self.xb = (0..m)
                .map(|i| dot(&self.binv[i * m..(i + 1) * m], &self.rhs))
                .collect();
            for x in &mut self.xb {
                if *x < 0.0 && *x > -FEAS_TOL {
                    *x = 0.0;
                }
            }
        }
        self.since_refactor = 0;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))?;
        if a[p * n + col].abs() < 1e-14 {
            return None;
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
                inv.swap(p * n + k, col * n + k);
            }
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[i * n + k] -= f * a[col * n + k];
                        inv[i * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}
