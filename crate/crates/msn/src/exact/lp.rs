//! Two-phase dense tableau simplex over an exact field.
//!
//! Entering columns are chosen by the steepest reduced cost until a run of
//! degenerate pivots is observed; from then on Bland's lowest-index rule is
//! used, which guarantees termination. Leaving rows always break ratio ties
//! by the lowest basic variable index.

use super::linalg::dot;
use super::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn le(coeffs: Vec<T>, rhs: T) -> Self {
        Constraint { coeffs, relation: Relation::Le, rhs }
    }

    pub fn ge(coeffs: Vec<T>, rhs: T) -> Self {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<T>, rhs: T) -> Self {
        Constraint { coeffs, relation: Relation::Eq, rhs }
    }

    pub fn holds(&self, x: &[T]) -> bool {
        let v = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => v <= self.rhs,
            Relation::Ge => v >= self.rhs,
            Relation::Eq => v == self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Variables are free unless marked nonnegative.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub sense: Sense,
    pub constraints: Vec<Constraint<T>>,
    pub nonneg: Vec<bool>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn minimize(objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram { objective, sense: Sense::Minimize, constraints: Vec::new(), nonneg: vec![false; n] }
    }

    pub fn maximize(objective: Vec<T>) -> Self {
        let mut lp = Self::minimize(objective);
        lp.sense = Sense::Maximize;
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_nonneg(mut self, nonneg: Vec<bool>) -> Self {
        assert_eq!(nonneg.len(), self.objective.len());
        self.nonneg = nonneg;
        self
    }

    pub fn all_nonneg(mut self) -> Self {
        self.nonneg = vec![true; self.objective.len()];
        self
    }

    pub fn push(&mut self, c: Constraint<T>) {
        assert_eq!(c.coeffs.len(), self.objective.len(), "constraint width");
        self.constraints.push(c);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution<T> {
    pub value: T,
    pub point: Vec<T>,
    /// Indices of constraints that hold with equality at `point`.
    pub active: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded in the objective direction")]
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
    banned: Vec<bool>,
    bland: bool,
    degenerate_run: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.ncols]
    }

    fn entering(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..self.ncols {
            if self.banned[j] || !self.cost[j].is_negative() {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            match best {
                Some(b) if self.cost[b] <= self.cost[j] => {}
                _ => best = Some(j),
            }
        }
        best
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs(i).clone() / a.clone();
            best = match best {
                None => Some((i, ratio)),
                Some((b, r)) => {
                    if ratio < r || (ratio == r && self.basis[i] < self.basis[b]) {
                        Some((i, ratio))
                    } else {
                        Some((b, r))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = T::one() / self.rows[r][c].clone();
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.clone() * inv.clone();
                }
            }
        }
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * prow[j].clone();
            }
        }
        let f = self.cost[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.cost[j] = self.cost[j].clone() - f.clone() * prow[j].clone();
            }
        }
        self.basis[r] = c;
    }

    fn step(&mut self) -> Step {
        let Some(c) = self.entering() else {
            return Step::Optimal;
        };
        let Some(r) = self.leaving(c) else {
            return Step::Unbounded;
        };
        if self.rhs(r).is_zero() {
            self.degenerate_run += 1;
            if self.degenerate_run > 8 {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
        self.pivot(r, c);
        Step::Pivoted
    }

    fn run(&mut self) -> Result<(), LpError> {
        loop {
            match self.step() {
                Step::Optimal => return Ok(()),
                Step::Unbounded => return Err(LpError::Unbounded),
                Step::Pivoted => {}
            }
        }
    }

    fn set_cost(&mut self, c: &[T]) {
        self.cost = c.to_vec();
        self.cost.push(T::zero());
        for i in 0..self.rows.len() {
            let cb = c[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    self.cost[j] = self.cost[j].clone() - cb.clone() * a.clone();
                }
            }
        }
    }
}

/// Solves the program exactly; the returned point is a basic feasible solution.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
    let n = lp.num_vars();
    // Structural columns: one per nonnegative variable, two per free variable.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ns = 0;
    for j in 0..n {
        if lp.nonneg[j] {
            col_of.push((ns, None));
            ns += 1;
        } else {
            col_of.push((ns, Some(ns + 1)));
            ns += 2;
        }
    }
    let m = lp.constraints.len();
    let mut rel = Vec::with_capacity(m);
    let mut structural = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![T::zero(); ns];
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (p, q) = col_of[j];
            row[p] = a.clone();
            if let Some(q) = q {
                row[q] = -a.clone();
            }
        }
        let (mut r, mut b, mut rl) = (row, c.rhs.clone(), c.relation);
        if b.is_negative() {
            r = r.into_iter().map(|x| -x).collect();
            b = -b;
            rl = match rl {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        structural.push(r);
        rhs.push(b);
        rel.push(rl);
    }
    let n_slack = rel.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = rel.iter().filter(|r| **r != Relation::Le).count();
    let ncols = ns + n_slack + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s_idx, mut a_idx) = (ns, ns + n_slack);
    for i in 0..m {
        let mut row = structural[i].clone();
        row.resize(ncols + 1, T::zero());
        match rel[i] {
            Relation::Le => {
                row[s_idx] = T::one();
                basis.push(s_idx);
                s_idx += 1;
            }
            Relation::Ge => {
                row[s_idx] = -T::one();
                s_idx += 1;
                row[a_idx] = T::one();
                basis.push(a_idx);
                a_idx += 1;
            }
            Relation::Eq => {
                row[a_idx] = T::one();
                basis.push(a_idx);
                a_idx += 1;
            }
        }
        row[ncols] = rhs[i].clone();
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        cost: Vec::new(),
        basis,
        ncols,
        banned: vec![false; ncols],
        bland: false,
        degenerate_run: 0,
    };
    let art_start = ns + n_slack;
    if n_art > 0 {
        let mut c1 = vec![T::zero(); ncols];
        for c in c1.iter_mut().skip(art_start) {
            *c = T::one();
        }
        tab.set_cost(&c1);
        tab.run().expect("phase one is bounded below");
        let infeas: T = (0..tab.rows.len())
            .filter(|&i| tab.basis[i] >= art_start)
            .fold(T::zero(), |s, i| s + tab.rhs(i).clone());
        if !infeas.is_zero() {
            return Err(LpError::Infeasible);
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                    i += 1;
                } else {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
        for b in tab.banned.iter_mut().skip(art_start) {
            *b = true;
        }
        tab.bland = false;
        tab.degenerate_run = 0;
    }
    let mut c2 = vec![T::zero(); ncols];
    for j in 0..n {
        let c = match lp.sense {
            Sense::Minimize => lp.objective[j].clone(),
            Sense::Maximize => -lp.objective[j].clone(),
        };
        let (p, q) = col_of[j];
        if let Some(q) = q {
            c2[q] = -c.clone();
        }
        c2[p] = c;
    }
    tab.set_cost(&c2);
    tab.run()?;
    let mut values = vec![T::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rhs(i).clone();
    }
    let point: Vec<T> = (0..n)
        .map(|j| {
            let (p, q) = col_of[j];
            match q {
                Some(q) => values[p].clone() - values[q].clone(),
                None => values[p].clone(),
            }
        })
        .collect();
    let value = dot(&lp.objective, &point);
    let active = lp
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| dot(&c.coeffs, &point) == c.rhs)
        .map(|(i, _)| i)
        .collect();
    Ok(LpSolution { value, point, active })
}
