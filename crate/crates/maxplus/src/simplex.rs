//! Dense exact-rational simplex: two phases, Bland's rule throughout, so
//! termination is guaranteed and every comparison is exact. Desk scale
//! only; the tableaus here have at most a few dozen cells.

use num_rational::BigRational;
use num_traits::Zero;

pub(crate) struct StandardLp {
    /// maximize `objective . x` subject to `rows . x = rhs`, `x >= 0`
    pub rows: Vec<Vec<BigRational>>,
    pub rhs: Vec<BigRational>,
    pub objective: Vec<BigRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

pub(crate) struct SimplexOutcome {
    pub status: SimplexStatus,
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

struct Tableau {
    cols: usize,
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    alive: Vec<bool>,
}

impl Tableau {
    fn reduced_cost(&self, costs: &[BigRational], j: usize) -> BigRational {
        let mut rc = costs[j].clone();
        for r in 0..self.rows.len() {
            if self.alive[r] && !costs[self.basis[r]].is_zero() {
                rc -= &costs[self.basis[r]] * &self.rows[r][j];
            }
        }
        rc
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        for r in 0..self.rows.len() {
            if r == row || !self.alive[r] {
                continue;
            }
            let f = self.rows[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let delta = &f * &self.rows[row][j];
                self.rows[r][j] -= delta;
            }
            let delta = &f * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Bland's rule: enter the smallest improving column, leave on the
    /// smallest basic variable among the tightest ratios.
    fn run(&mut self, costs: &[BigRational], allowed: impl Fn(usize) -> bool) -> SimplexStatus {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                if self.reduced_cost(costs, j) > BigRational::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return SimplexStatus::Optimal;
            };

            let mut leaving: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if !self.alive[r] || self.rows[r][col] <= BigRational::zero() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][col];
                let better = match &leaving {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return SimplexStatus::Unbounded;
            };
            self.pivot(row, col);
        }
    }
}

pub(crate) fn solve_standard(lp: &StandardLp) -> SimplexOutcome {
    let m = lp.rows.len();
    let n = lp.objective.len();
    let cols = n + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = *b < BigRational::zero();
        let mut r: Vec<BigRational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.resize(cols, BigRational::zero());
        r[n + i] = BigRational::from_integer(1.into());
        rows.push(r);
        rhs.push(if flip { -b.clone() } else { b.clone() });
    }
    let mut t = Tableau {
        cols,
        rows,
        rhs,
        basis: (n..cols).collect(),
        alive: vec![true; m],
    };

    // phase 1: maximize minus the artificial sum
    let mut phase1 = vec![BigRational::zero(); cols];
    for c in phase1.iter_mut().skip(n) {
        *c = -BigRational::from_integer(1.into());
    }
    let status = t.run(&phase1, |_| true);
    debug_assert_eq!(status, SimplexStatus::Optimal, "phase 1 is always bounded");
    let infeasibility: BigRational = (0..m)
        .filter(|&r| t.alive[r] && t.basis[r] >= n)
        .map(|r| t.rhs[r].clone())
        .sum();
    if !infeasibility.is_zero() {
        return SimplexOutcome {
            status: SimplexStatus::Infeasible,
            x: vec![BigRational::zero(); n],
            value: BigRational::zero(),
        };
    }

    // drive leftover artificials out of the (degenerate) basis
    for r in 0..m {
        if !t.alive[r] || t.basis[r] < n {
            continue;
        }
        let col = (0..n).find(|&j| !t.rows[r][j].is_zero());
        match col {
            Some(j) => t.pivot(r, j),
            None => t.alive[r] = false, // redundant constraint
        }
    }

    let mut phase2 = lp.objective.clone();
    phase2.resize(cols, BigRational::zero());
    let status = t.run(&phase2, |j| j < n);
    let mut x = vec![BigRational::zero(); n];
    for r in 0..m {
        if t.alive[r] && t.basis[r] < n {
            x[t.basis[r]] = t.rhs[r].clone();
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    SimplexOutcome { status, x, value }
}
