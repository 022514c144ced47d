//! Dense two-phase simplex for the small LPs behind witness search.
//!
//! Problems are `min cᵀx` subject to equality rows, `≤` rows and `x ≥ 0`.
//! Pricing is Dantzig's rule with a Harris ratio test; a long run of
//! degenerate pivots switches to Bland's rule so the degenerate vertices of
//! the Birkhoff polytope cannot cause cycling. The tableau is periodically rebuilt from
//! the original rows through an LU solve of the basis to stop drift.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const REFACTOR_EVERY: usize = 32;
const HARRIS_SLACK: f64 = 1e-12;
const BLAND_AFTER: usize = 50;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    eq: Vec<(Vec<f64>, f64)>,
    le: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible { phase_one_value: f64 },
    Unbounded,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            objective: vec![0.0; n_vars],
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_objective(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.n_vars);
        self.objective = c;
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.n_vars);
        self.eq.push((row, rhs));
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.n_vars);
        self.le.push((row, rhs));
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let max_iters = 50_000;
        Tableau::build(self).run(&self.objective, max_iters)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Sign-normalized constraint rows as built, used to refactor.
    original: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_vars: usize,
    n_real: usize,
    width: usize,
    scale: f64,
    since_refactor: usize,
}

impl Tableau {
    /// Columns: structural variables, one slack per `≤` row, one artificial
    /// per row, then the right-hand side.
    fn build(lp: &LinearProgram) -> Self {
        let n_le = lp.le.len();
        let m = lp.eq.len() + n_le;
        let n_real = lp.n_vars + n_le;
        let width = n_real + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut scale = 1.0_f64;
        let all = lp
            .eq
            .iter()
            .map(|(r, b)| (r, *b, None))
            .chain(lp.le.iter().enumerate().map(|(k, (r, b))| (r, *b, Some(k))));
        for (i, (coeffs, rhs, slack)) in all.enumerate() {
            let mut row = vec![0.0; width];
            row[..lp.n_vars].copy_from_slice(coeffs);
            if let Some(k) = slack {
                row[lp.n_vars + k] = 1.0;
            }
            row[width - 1] = rhs;
            if rhs < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[n_real + i] = 1.0;
            scale = scale.max(rhs.abs());
            rows.push(row);
        }
        let basis = (0..m).map(|i| n_real + i).collect();
        Tableau {
            original: rows.clone(),
            rows,
            basis,
            n_vars: lp.n_vars,
            n_real,
            width,
            scale,
            since_refactor: 0,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width - 1]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, c: usize) {
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
        let f = obj[c];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.since_refactor += 1;
    }

    /// Rebuilds the tableau and the reduced-cost row for `cost` (indexed by
    /// tableau column) from the original rows and the current basis. Leaves
    /// the tableau untouched when the basis matrix is numerically singular.
    fn refactor(&mut self, obj: &mut [f64], cost: &[f64]) {
        self.since_refactor = 0;
        let m = self.rows.len();
        if m == 0 {
            return;
        }
        let b = DMatrix::from_fn(m, m, |i, k| self.original[i][self.basis[k]]);
        let Some(inv) = b.try_inverse() else {
            return;
        };
        let a = DMatrix::from_fn(m, self.width, |i, j| self.original[i][j]);
        let t = inv * a;
        if t.iter().any(|v| !v.is_finite()) {
            return;
        }
        for (i, row) in self.rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = t[(i, j)];
            }
        }
        for (i, &c) in self.basis.iter().enumerate() {
            for (k, row) in self.rows.iter_mut().enumerate() {
                row[c] = if k == i { 1.0 } else { 0.0 };
            }
        }
        for (j, o) in obj.iter_mut().enumerate() {
            let own = if j + 1 < self.width { cost[j] } else { 0.0 };
            let basic: f64 = self
                .basis
                .iter()
                .enumerate()
                .map(|(i, &c)| cost[c] * self.rows[i][j])
                .sum();
            *o = own - basic;
        }
        for &c in &self.basis {
            obj[c] = 0.0;
        }
    }

    /// Runs simplex iterations on the reduced-cost row `obj` over columns
    /// `< allowed`. Returns false on unboundedness.
    fn iterate(
        &mut self,
        obj: &mut [f64],
        cost: &[f64],
        allowed: usize,
        budget: &mut usize,
    ) -> Result<bool> {
        let mut degenerate_run = 0;
        loop {
            if *budget == 0 {
                return Err(Error::SolverFailure("simplex iteration budget exhausted".into()));
            }
            *budget -= 1;
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor(obj, cost);
            }
            let entering = if degenerate_run >= BLAND_AFTER {
                (0..allowed).find(|&j| obj[j] < -PIVOT_EPS)
            } else {
                (0..allowed)
                    .filter(|&j| obj[j] < -PIVOT_EPS)
                    .min_by(|&a, &b| obj[a].total_cmp(&obj[b]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let col_size = self.rows.iter().fold(0.0_f64, |a, r| a.max(r[c].abs()));
            let threshold = PIVOT_EPS * col_size.max(1.0);
            let slack = HARRIS_SLACK * self.scale;
            let bound = (0..self.rows.len())
                .filter(|&i| self.rows[i][c] > threshold)
                .map(|i| (self.rhs(i).max(0.0) + slack) / self.rows[i][c])
                .fold(f64::INFINITY, f64::min);
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > threshold && self.rhs(i).max(0.0) / a <= bound {
                    let better = match best {
                        None => true,
                        Some((bi, ba)) if degenerate_run >= BLAND_AFTER => {
                            self.basis[i] < self.basis[bi] && a >= 1e-3 * ba
                        }
                        Some((_, ba)) => a > ba,
                    };
                    if better {
                        best = Some((i, a));
                    }
                }
            }
            if let Some((r, _)) = best {
                if self.rhs(r) <= slack {
                    degenerate_run += 1;
                } else {
                    degenerate_run = 0;
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(obj, r, c),
            }
        }
    }

    fn run(mut self, cost: &[f64], max_iters: usize) -> Result<LpOutcome> {
        let mut budget = max_iters;

        // Phase one: minimize the sum of artificials.
        let mut phase_one = vec![0.0; self.width];
        for c in phase_one.iter_mut().take(self.width - 1).skip(self.n_real) {
            *c = 1.0;
        }
        let mut obj = vec![0.0; self.width];
        for row in &self.rows {
            for j in 0..self.n_real {
                obj[j] -= row[j];
            }
            obj[self.width - 1] -= row[self.width - 1];
        }
        if !self.iterate(&mut obj, &phase_one, self.n_real, &mut budget)? {
            return Err(Error::SolverFailure("phase one reported unboundedness".into()));
        }
        self.refactor(&mut obj, &phase_one);
        if !self.iterate(&mut obj, &phase_one, self.n_real, &mut budget)? {
            return Err(Error::SolverFailure("phase one reported unboundedness".into()));
        }
        let infeasibility = -obj[self.width - 1];
        if infeasibility > 1e-9 * self.scale {
            return Ok(LpOutcome::Infeasible {
                phase_one_value: infeasibility,
            });
        }

        // Drive artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n_real {
                let size = self.rows[i][..self.n_real].iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                let col = (0..self.n_real)
                    .filter(|&j| self.rows[i][j].abs() > 1e-7 * size.max(1.0))
                    .max_by(|&a, &b| self.rows[i][a].abs().total_cmp(&self.rows[i][b].abs()));
                match col {
                    Some(c) => {
                        self.pivot(&mut obj, i, c);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.original.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }

        // Phase two.
        let mut full_cost = vec![0.0; self.width];
        full_cost[..self.n_vars].copy_from_slice(cost);
        let mut obj = vec![0.0; self.width];
        self.refactor(&mut obj, &full_cost);
        if !self.iterate(&mut obj, &full_cost, self.n_real, &mut budget)? {
            return Ok(LpOutcome::Unbounded);
        }
        self.refactor(&mut obj, &full_cost);
        if !self.iterate(&mut obj, &full_cost, self.n_real, &mut budget)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                x[b] = self.rhs(r).max(0.0);
            }
        }
        let value = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}
