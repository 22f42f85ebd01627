//! Exact linear programming in standard form: minimize `c·x` subject to
//! `A x = b`, `x ≥ 0`.
//!
//! Dense-tableau simplex with Bland's rule. Rows are presolved once (duplicate
//! and linearly dependent consistent rows are dropped) and the feasible basis
//! found by phase 1 is cached, so every further objective over the same
//! system starts directly in phase 2.

use std::sync::OnceLock;

use crate::rational::Rational;

/// One sparse equality row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl Row {
    /// Row `Σ_{v∈support} x_v = rhs`.
    pub fn indicator(support: &[usize], rhs: Rational) -> Self {
        Row {
            coeffs: support.iter().map(|&v| (v, Rational::one())).collect(),
            rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of one optimization.
///
/// For `Optimal`, `primal` attains `optimum` and `dual` is a vector `y` over the
/// original rows with `c - Aᵀy ≥ 0` and `b·y = optimum`. For `Infeasible`,
/// `dual` is a Farkas certificate: `Aᵀy ≤ 0` and `b·y > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub optimum: Option<Rational>,
    pub primal: Option<Vec<Rational>>,
    pub dual: Option<Vec<Rational>>,
}

#[derive(Clone, Debug)]
struct Tableau {
    /// `m` rows of `n + m + 1` entries: original columns, artificial columns, rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs for every column, objective value (negated) in the last slot.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    n: usize,
}

#[derive(Clone, Debug)]
enum Phase1 {
    Feasible(Tableau),
    Infeasible(Vec<Rational>),
}

#[derive(Debug)]
pub struct EqualitySystem {
    num_vars: usize,
    rows: Vec<Row>,
    /// Kept row indices into `rows`, each with the sign applied to make rhs ≥ 0.
    kept: OnceLock<Vec<(usize, bool)>>,
    phase1: OnceLock<Phase1>,
}

impl Clone for EqualitySystem {
    fn clone(&self) -> Self {
        EqualitySystem::new(self.num_vars, self.rows.clone())
    }
}

impl EqualitySystem {
    pub fn new(num_vars: usize, rows: Vec<Row>) -> Self {
        EqualitySystem {
            num_vars,
            rows,
            kept: OnceLock::new(),
            phase1: OnceLock::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Number of rows surviving presolve (the rank, plus one if inconsistent).
    pub fn effective_rows(&self) -> usize {
        self.kept().len()
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.phase1(), Phase1::Feasible(_))
    }

    /// Minimizes `objective · x`.
    pub fn minimize(&self, objective: &[Rational]) -> LpResult {
        assert_eq!(objective.len(), self.num_vars, "objective length");
        match self.phase1() {
            Phase1::Infeasible(y) => LpResult {
                status: LpStatus::Infeasible,
                optimum: None,
                primal: None,
                dual: Some(self.expand_dual(y)),
            },
            Phase1::Feasible(t) => {
                let mut t = t.clone();
                t.set_objective(objective);
                if !t.run(false) {
                    return LpResult {
                        status: LpStatus::Unbounded,
                        optimum: None,
                        primal: None,
                        dual: None,
                    };
                }
                let primal = t.primal();
                let optimum: Rational = objective
                    .iter()
                    .zip(&primal)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, x)| c * x)
                    .sum();
                let y: Vec<Rational> = (0..t.rows.len()).map(|i| -&t.cost[t.n + i]).collect();
                LpResult {
                    status: LpStatus::Optimal,
                    optimum: Some(optimum),
                    primal: Some(primal),
                    dual: Some(self.expand_dual(&y)),
                }
            }
        }
    }

    pub fn maximize(&self, objective: &[Rational]) -> LpResult {
        let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
        let mut r = self.minimize(&neg);
        if r.status == LpStatus::Optimal {
            r.optimum = r.optimum.map(|o| -o);
            r.dual = r.dual.map(|y| y.into_iter().map(|v| -v).collect());
        }
        r
    }

    fn expand_dual(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows.len()];
        for (k, &(r, flipped)) in self.kept().iter().enumerate() {
            out[r] = if flipped { -&y[k] } else { y[k].clone() };
        }
        out
    }

    fn kept(&self) -> &Vec<(usize, bool)> {
        self.kept.get_or_init(|| presolve(self.num_vars, &self.rows))
    }

    fn phase1(&self) -> &Phase1 {
        self.phase1.get_or_init(|| {
            let kept = self.kept();
            let n = self.num_vars;
            let m = kept.len();
            let width = n + m + 1;
            let mut rows = Vec::with_capacity(m);
            for (i, &(r, flipped)) in kept.iter().enumerate() {
                let mut row = vec![Rational::zero(); width];
                for (j, c) in &self.rows[r].coeffs {
                    row[*j] += c;
                }
                row[n + i] = Rational::one();
                row[width - 1] = self.rows[r].rhs.clone();
                if flipped {
                    for (j, v) in row.iter_mut().enumerate() {
                        if j != n + i {
                            *v = -&*v;
                        }
                    }
                }
                rows.push(row);
            }
            // Phase-1 cost: sum of artificials. Reduced cost of column j is
            // -Σ_i a_ij over original columns, 0 over the basic artificials.
            let mut cost = vec![Rational::zero(); width];
            for row in &rows {
                for j in (0..n).chain(std::iter::once(width - 1)) {
                    if !row[j].is_zero() {
                        cost[j] -= &row[j];
                    }
                }
            }
            let mut t = Tableau {
                rows,
                cost,
                basis: (n..n + m).collect(),
                n,
            };
            let bounded = t.run(true);
            debug_assert!(bounded, "phase 1 is bounded below");
            if t.cost[width - 1].is_negative() {
                // Reduced cost of artificial i is 1 - y_i.
                let y = (0..m).map(|i| Rational::one() - &t.cost[n + i]).collect();
                return Phase1::Infeasible(y);
            }
            t.drive_out_artificials();
            Phase1::Feasible(t)
        })
    }
}

/// Chooses an independent subset of rows by incremental exact elimination.
/// A row that reduces to `0 = c` with `c ≠ 0` is kept so that phase 1 reports
/// infeasibility with a certificate.
fn presolve(n: usize, rows: &[Row]) -> Vec<(usize, bool)> {
    // Echelon basis: (pivot column, dense row of length n + 1) normalized to 1 at the pivot.
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut kept = Vec::new();
    let mut inconsistent = false;
    let mut seen = std::collections::HashSet::new();
    for (r, row) in rows.iter().enumerate() {
        let mut key: Vec<(usize, Rational)> = row.coeffs.clone();
        key.sort_by_key(|(j, _)| *j);
        if !seen.insert((key, row.rhs.clone())) {
            continue;
        }
        let mut dense = vec![Rational::zero(); n + 1];
        for (j, c) in &row.coeffs {
            dense[*j] += c;
        }
        dense[n] = row.rhs.clone();
        // Reduce in pivot-insertion order; later basis rows never touch earlier pivots.
        for (col, brow) in basis.iter() {
            if dense[*col].is_zero() {
                continue;
            }
            let f = dense[*col].clone();
            for j in 0..=n {
                if !brow[j].is_zero() {
                    let delta = &f * &brow[j];
                    dense[j] -= &delta;
                }
            }
        }
        let flipped = row.rhs.is_negative();
        match (0..n).find(|&j| !dense[j].is_zero() && pivot_of_col[j].is_none()) {
            Some(col) => {
                let inv = dense[col].recip();
                for v in dense.iter_mut() {
                    if !v.is_zero() {
                        *v = &*v * &inv;
                    }
                }
                // Keep the basis fully reduced on existing pivot columns.
                pivot_of_col[col] = Some(basis.len());
                for (_, brow) in basis.iter_mut() {
                    if !brow[col].is_zero() {
                        let f = brow[col].clone();
                        for j in 0..=n {
                            if !dense[j].is_zero() {
                                let delta = &f * &dense[j];
                                brow[j] -= &delta;
                            }
                        }
                    }
                }
                basis.push((col, dense));
                kept.push((r, flipped));
            }
            None => {
                if !dense[n].is_zero() && !inconsistent {
                    inconsistent = true;
                    kept.push((r, flipped));
                }
            }
        }
    }
    kept
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len()
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let width = self.width();
        let mut cost = vec![Rational::zero(); width];
        cost[..self.n].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = if b < self.n { c[b].clone() } else { Rational::zero() };
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= &cb * v;
                }
            }
        }
        self.cost = cost;
    }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    /// Artificial columns may only enter during phase 1.
    fn run(&mut self, phase_one: bool) -> bool {
        let limit = if phase_one { self.width() - 1 } else { self.n };
        loop {
            let Some(enter) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let rhs = self.width() - 1;
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, p: usize, enter: usize) {
        let inv = self.rows[p][enter].recip();
        let nz: Vec<usize> = (0..self.width())
            .filter(|&j| !self.rows[p][j].is_zero())
            .collect();
        for &j in &nz {
            let v = &self.rows[p][j] * &inv;
            self.rows[p][j] = v;
        }
        let prow = std::mem::take(&mut self.rows[p]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                row[j] -= &delta;
            }
        }
        if !self.cost[enter].is_zero() {
            let f = self.cost[enter].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.cost[j] -= &delta;
            }
        }
        self.rows[p] = prow;
        self.basis[p] = enter;
    }

    /// Pivots zero-level artificials out of the basis where an original column
    /// allows it. Rows where none does are redundant and stay inert.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.n {
                continue;
            }
            if let Some(j) = (0..self.n).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, j);
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let rhs = self.width() - 1;
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rows[i][rhs].clone();
            }
        }
        x
    }
}
