//! Exact linear programming and vertex enumeration.
//!
//! Every semistability decision in the crate reduces to the sign of an LP
//! optimum with rational data. The solver is a dense two-phase simplex with
//! Bland's rule, so it terminates on every input and never needs a
//! tolerance: feasibility, boundedness, and optimality are exact. Problem
//! sizes here are tiny (a handful of weights per filtration), which makes
//! the dense tableau the right trade-off.
//!
//! `vertices` enumerates the vertex set of a low-dimensional polyhedron by
//! brute force over active sets. The cone pipeline maximizes a convex
//! quadratic over a polytope, which is attained at a vertex, and the wall
//! scan needs the full vertex set anyway.

use crate::scalar::Scalar;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row<S> {
    coeffs: Vec<S>,
    rel: Rel,
    rhs: S,
}

/// `minimize c.x subject to rows, x_j >= 0` unless marked free.
#[derive(Debug, Clone)]
pub struct Problem<S> {
    n: usize,
    objective: Vec<S>,
    rows: Vec<Row<S>>,
    free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution<S> {
    Optimal { value: S, point: Vec<S> },
    Unbounded,
    Infeasible,
}

impl<S: Scalar> Solution<S> {
    pub fn optimal(self) -> Option<(S, Vec<S>)> {
        match self {
            Solution::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

impl<S: Scalar> Problem<S> {
    pub fn new(n: usize) -> Self {
        Problem {
            n,
            objective: vec![S::zero(); n],
            rows: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn minimize(&mut self, objective: Vec<S>) -> &mut Self {
        assert_eq!(objective.len(), self.n);
        self.objective = objective;
        self
    }

    pub fn maximize(&mut self, objective: Vec<S>) -> &mut Self {
        self.minimize(objective.into_iter().map(|c| -c).collect())
    }

    /// Declares variable `j` as sign-unconstrained.
    pub fn free(&mut self, j: usize) -> &mut Self {
        self.free[j] = true;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<S>, rel: Rel, rhs: S) -> &mut Self {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push(Row { coeffs, rel, rhs });
        self
    }

    /// Solves the problem. For `maximize`, negate the reported value.
    pub fn solve(&self) -> Solution<S> {
        Simplex::build(self).run()
    }

    /// Solves a maximization set up through [`Problem::maximize`], undoing
    /// the sign flip on the optimal value.
    pub fn solve_max(&self) -> Solution<S> {
        match self.solve() {
            Solution::Optimal { value, point } => Solution::Optimal {
                value: -value,
                point,
            },
            other => other,
        }
    }
}

/// Standard-form tableau. Columns: structural variables (free ones split
/// into a positive and negative part), then slack/surplus, then artificial.
struct Simplex<S> {
    tableau: Vec<Vec<S>>,
    basis: Vec<usize>,
    cost: Vec<S>,
    n_cols: usize,
    artificial_start: usize,
    // maps structural variable -> (plus column, optional minus column)
    var_cols: Vec<(usize, Option<usize>)>,
}

impl<S: Scalar> Simplex<S> {
    fn build(problem: &Problem<S>) -> Self {
        let m = problem.rows.len();
        let mut var_cols = Vec::with_capacity(problem.n);
        let mut n_struct = 0;
        for j in 0..problem.n {
            if problem.free[j] {
                var_cols.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            } else {
                var_cols.push((n_struct, None));
                n_struct += 1;
            }
        }
        let n_slack = problem.rows.iter().filter(|r| r.rel != Rel::Eq).count();
        let n_cols = n_struct + n_slack + m;
        let artificial_start = n_struct + n_slack;

        let mut tableau = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_idx = n_struct;
        for (i, row) in problem.rows.iter().enumerate() {
            let mut line = vec![S::zero(); n_cols + 1];
            let flip = row.rhs.is_negative();
            let sign = if flip { -S::one() } else { S::one() };
            for (j, coeff) in row.coeffs.iter().enumerate() {
                let value = sign.clone() * coeff.clone();
                let (plus, minus) = var_cols[j];
                line[plus] = value.clone();
                if let Some(minus) = minus {
                    line[minus] = -value;
                }
            }
            line[n_cols] = sign.clone() * row.rhs.clone();
            let effective = match (row.rel, flip) {
                (Rel::Eq, _) => Rel::Eq,
                (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
                (Rel::Le, true) | (Rel::Ge, false) => Rel::Ge,
            };
            match effective {
                Rel::Le => {
                    line[slack_idx] = S::one();
                    slack_idx += 1;
                }
                Rel::Ge => {
                    line[slack_idx] = -S::one();
                    slack_idx += 1;
                }
                Rel::Eq => {}
            }
            // Every row gets an artificial variable as its initial basis.
            line[artificial_start + i] = S::one();
            basis.push(artificial_start + i);
            tableau.push(line);
        }

        let mut cost = vec![S::zero(); n_cols];
        for (j, coeff) in problem.objective.iter().enumerate() {
            let (plus, minus) = var_cols[j];
            cost[plus] = coeff.clone();
            if let Some(minus) = minus {
                cost[minus] = -coeff.clone();
            }
        }

        Simplex {
            tableau,
            basis,
            cost,
            n_cols,
            artificial_start,
            var_cols,
        }
    }

    fn run(mut self) -> Solution<S> {
        // Phase 1: minimize the sum of artificials.
        let phase1: Vec<S> = (0..self.n_cols)
            .map(|j| {
                if j >= self.artificial_start {
                    S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        match self.optimize(&phase1, true) {
            PivotResult::Optimal => {}
            PivotResult::Unbounded => unreachable!("phase 1 objective is bounded below by 0"),
        }
        let infeasibility = self.objective_value(&phase1);
        if !infeasibility.is_zero() {
            return Solution::Infeasible;
        }
        self.evict_artificials();

        let cost = self.cost.clone();
        match self.optimize(&cost, false) {
            PivotResult::Unbounded => Solution::Unbounded,
            PivotResult::Optimal => {
                let value = self.objective_value(&cost);
                let mut point = Vec::with_capacity(self.var_cols.len());
                for &(plus, minus) in &self.var_cols {
                    let mut x = self.column_value(plus);
                    if let Some(minus) = minus {
                        x = x - self.column_value(minus);
                    }
                    point.push(x);
                }
                Solution::Optimal { value, point }
            }
        }
    }

    fn column_value(&self, col: usize) -> S {
        for (i, &b) in self.basis.iter().enumerate() {
            if b == col {
                return self.tableau[i][self.n_cols].clone();
            }
        }
        S::zero()
    }

    fn objective_value(&self, cost: &[S]) -> S {
        let mut value = S::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                value = value + cost[b].clone() * self.tableau[i][self.n_cols].clone();
            }
        }
        value
    }

    /// Pivots basic artificials out; drops rows that turn out redundant.
    fn evict_artificials(&mut self) {
        let mut row = 0;
        while row < self.tableau.len() {
            if self.basis[row] >= self.artificial_start {
                let pivot_col =
                    (0..self.artificial_start).find(|&j| !self.tableau[row][j].is_zero());
                match pivot_col {
                    Some(col) => self.pivot(row, col),
                    None => {
                        // All-zero row: the constraint was redundant.
                        self.tableau.remove(row);
                        self.basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
    }

    /// Reduced cost of column `col` under `cost`.
    fn reduced_cost(&self, cost: &[S], col: usize) -> S {
        let mut value = cost[col].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.tableau[i][col].is_zero() {
                value = value - cost[b].clone() * self.tableau[i][col].clone();
            }
        }
        value
    }

    fn optimize(&mut self, cost: &[S], phase1: bool) -> PivotResult {
        loop {
            // Bland's rule: smallest-index column with negative reduced cost.
            let limit = if phase1 {
                self.n_cols
            } else {
                self.artificial_start
            };
            let entering = (0..limit)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else {
                return PivotResult::Optimal;
            };
            // Ratio test, ties broken by smallest basis index (Bland).
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.tableau.len() {
                let a = &self.tableau[i][col];
                if a.is_positive() {
                    let ratio = self.tableau[i][self.n_cols].clone() / a.clone();
                    let better = match &best {
                        None => true,
                        Some((row, current)) => {
                            ratio < *current
                                || (ratio == *current && self.basis[i] < self.basis[*row])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return PivotResult::Unbounded,
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.tableau[row][col].clone();
        for entry in self.tableau[row].iter_mut() {
            *entry = entry.clone() / pivot.clone();
        }
        for i in 0..self.tableau.len() {
            if i == row {
                continue;
            }
            let factor = self.tableau[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.n_cols {
                let delta = factor.clone() * self.tableau[row][j].clone();
                self.tableau[i][j] = self.tableau[i][j].clone() - delta;
            }
        }
        self.basis[row] = col;
    }
}

enum PivotResult {
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("vertex enumeration over {bases} bases exceeds the ceiling {ceiling}")]
pub struct TooManyBases {
    pub bases: u128,
    pub ceiling: u128,
}

/// Enumerates the vertices of `{x : a.x <= b for (a, b) in ineqs, e.x = f
/// for (e, f) in eqs}` by exhausting active sets. Output is sorted and
/// deduplicated, hence canonical.
pub fn vertices<S: Scalar>(
    ineqs: &[(Vec<S>, S)],
    eqs: &[(Vec<S>, S)],
    ceiling: u128,
) -> Result<Vec<Vec<S>>, TooManyBases> {
    let dim = ineqs
        .first()
        .map(|(a, _)| a.len())
        .or_else(|| eqs.first().map(|(a, _)| a.len()))
        .unwrap_or(0);
    if dim == 0 {
        return Ok(Vec::new());
    }
    let need = dim.saturating_sub(eqs.len());
    if need > ineqs.len() {
        return Ok(Vec::new());
    }
    let bases = binomial(ineqs.len() as u128, need as u128);
    if bases > ceiling {
        return Err(TooManyBases { bases, ceiling });
    }

    let mut found = BTreeSet::new();
    let mut choice: Vec<usize> = (0..need).collect();
    loop {
        let mut system: Vec<Vec<S>> = Vec::with_capacity(dim);
        for (a, b) in eqs {
            let mut row = a.clone();
            row.push(b.clone());
            system.push(row);
        }
        for &k in &choice {
            let (a, b) = &ineqs[k];
            let mut row = a.clone();
            row.push(b.clone());
            system.push(row);
        }
        if let Some(point) = solve_square(system, dim) {
            let feasible = ineqs.iter().all(|(a, b)| dot(a, &point) <= *b);
            if feasible {
                found.insert(point);
            }
        }
        if !advance(&mut choice, ineqs.len()) {
            break;
        }
    }
    Ok(found.into_iter().collect())
}

fn dot<S: Scalar>(a: &[S], x: &[S]) -> S {
    a.iter()
        .zip(x)
        .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
}

/// Gaussian elimination on an augmented `rows x (dim+1)` system; `None` when
/// the solution is not unique.
fn solve_square<S: Scalar>(mut system: Vec<Vec<S>>, dim: usize) -> Option<Vec<S>> {
    if system.len() < dim {
        return None;
    }
    let mut row = 0;
    let mut pivots = Vec::with_capacity(dim);
    for col in 0..dim {
        let pivot_row = (row..system.len()).find(|&r| !system[r][col].is_zero())?;
        system.swap(row, pivot_row);
        let pivot = system[row][col].clone();
        for entry in system[row].iter_mut() {
            *entry = entry.clone() / pivot.clone();
        }
        let pivot_row_values = system[row].clone();
        for (r, line) in system.iter_mut().enumerate() {
            if r != row && !line[col].is_zero() {
                let factor = line[col].clone();
                for (j, pivot_entry) in pivot_row_values.iter().enumerate() {
                    let delta = factor.clone() * pivot_entry.clone();
                    line[j] = line[j].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == dim {
            break;
        }
    }
    if row < dim {
        return None;
    }
    // Inconsistent leftover rows mean the active set has no common point.
    for leftover in system.iter().skip(row) {
        if !leftover[dim].is_zero() {
            return None;
        }
    }
    let mut point = vec![S::zero(); dim];
    for (r, &col) in pivots.iter().enumerate() {
        point[col] = system[r][dim].clone();
    }
    Some(point)
}

fn advance(choice: &mut [usize], n: usize) -> bool {
    if choice.is_empty() {
        return false;
    }
    let k = choice.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if choice[i] < n - (k - i) {
            choice[i] += 1;
            for j in i + 1..k {
                choice[j] = choice[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}
