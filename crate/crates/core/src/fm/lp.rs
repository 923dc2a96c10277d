//! Exact rational linear programming for small systems.
//!
//! `max cᵀx  s.t.  Ax ≤ b`, `x` free, is solved through its dual
//! `min bᵀy  s.t.  Aᵀy = c, y ≥ 0` with a two-phase tableau simplex and
//! Bland's anti-cycling rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// Optimal value and one optimal point.
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

enum Std {
    Optimal { value: Q, basis: Vec<usize> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>, // each row: coefficients then rhs
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Q]) -> Vec<Q> {
        let mut red: Vec<Q> = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row[..self.ncols].iter().enumerate() {
                if !v.is_zero() {
                    red[j] -= cb * v;
                }
            }
        }
        red
    }

    /// Minimizes `cost` over the current basis; columns `>= allowed` never enter.
    fn run(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let red = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| red[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[self.ncols] / &row[enter];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// `min cost·y  s.t.  m·y = rhs, y ≥ 0`.
fn simplex_min(m: &[Vec<Q>], rhs: &[Q], cost: &[Q]) -> Std {
    let n = cost.len();
    let k = m.len();
    let ncols = n + k;
    let mut rows = Vec::with_capacity(k);
    for (i, (row, r)) in m.iter().zip(rhs).enumerate() {
        let flip = r.is_negative();
        let mut t: Vec<Q> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        t.extend((0..k).map(|j| if j == i { Q::one() } else { Q::zero() }));
        t.push(if flip { -r } else { r.clone() });
        rows.push(t);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..ncols).collect(),
        ncols,
    };
    let mut phase1 = vec![Q::zero(); ncols];
    for c in &mut phase1[n..] {
        *c = Q::one();
    }
    tab.run(&phase1, ncols);
    let infeas: Q = tab
        .rows
        .iter()
        .zip(&tab.basis)
        .filter(|(_, &b)| b >= n)
        .map(|(row, _)| row[ncols].clone())
        .fold(Q::zero(), |a, b| a + b);
    if infeas.is_positive() {
        return Std::Infeasible;
    }
    // Drive remaining artificials out; drop rows that turn out redundant.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let mut phase2 = cost.to_vec();
    phase2.extend((0..k).map(|_| Q::zero()));
    if !tab.run(&phase2, n) {
        return Std::Unbounded;
    }
    let value = tab
        .rows
        .iter()
        .zip(&tab.basis)
        .map(|(row, &b)| &phase2[b] * &row[ncols])
        .fold(Q::zero(), |a, b| a + b);
    Std::Optimal {
        value,
        basis: tab.basis,
    }
}

/// Some solution of the (consistent) square-or-wide system `rows · x = rhs`;
/// free coordinates are set to zero.
fn solve_consistent(mut rows: Vec<Vec<Q>>, mut rhs: Vec<Q>, nvars: usize) -> Vec<Q> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let d = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = &*v / &d;
        }
        rhs[r] = &rhs[r] / &d;
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pr = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pr) {
                    *v -= &f * pv;
                }
                let t = &f * &rhs[r];
                rhs[i] -= t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut x = vec![Q::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    x
}

/// `max c·x  s.t.  a·x ≤ b`, `x` free.
pub fn maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let nv = c.len();
    let nr = a.len();
    // Dual constraint matrix Aᵀ: one row per primal variable.
    let at: Vec<Vec<Q>> = (0..nv)
        .map(|j| (0..nr).map(|i| a[i][j].clone()).collect())
        .collect();
    match simplex_min(&at, c, b) {
        Std::Optimal { value, basis } => {
            // Complementary slackness: rows in the dual basis are tight.
            let rows: Vec<Vec<Q>> = basis.iter().map(|&i| a[i].clone()).collect();
            let rhs: Vec<Q> = basis.iter().map(|&i| b[i].clone()).collect();
            let x = solve_consistent(rows, rhs, nv);
            LpOutcome::Optimal { value, x }
        }
        Std::Unbounded => LpOutcome::Infeasible,
        Std::Infeasible => {
            let zero = vec![Q::zero(); nv];
            match simplex_min(&at, &zero, b) {
                Std::Unbounded => LpOutcome::Infeasible,
                _ => LpOutcome::Unbounded,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn rows(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn box_and_sum() {
        // max x + y, x ≤ 1, y ≤ 1, x + y ≤ 3/2, x,y ≥ 0
        let a = rows(&[&[1, 0], &[0, 1], &[1, 1], &[-1, 0], &[0, -1]]);
        let b = vec![q(1), q(1), Q::new(3.into(), 2.into()), q(0), q(0)];
        let out = maximize(&a, &b, &[q(1), q(1)]);
        let LpOutcome::Optimal { value, x } = out else {
            panic!("{out:?}")
        };
        assert_eq!(value, Q::new(3.into(), 2.into()));
        for (row, bi) in a.iter().zip(&b) {
            let lhs: Q = row.iter().zip(&x).map(|(r, v)| r * v).sum();
            assert!(lhs <= *bi);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = rows(&[&[1], &[-1]]);
        assert_eq!(maximize(&a, &[q(0), q(-1)], &[q(1)]), LpOutcome::Infeasible);
        let a = rows(&[&[-1]]);
        assert_eq!(maximize(&a, &[q(0)], &[q(1)]), LpOutcome::Unbounded);
        // variable-free contradictory row
        let a = rows(&[&[0], &[1]]);
        assert_eq!(maximize(&a, &[q(-1), q(5)], &[q(1)]), LpOutcome::Infeasible);
        // infeasible even though the objective direction is unbounded
        let a = rows(&[&[0, -1], &[0, 1]]);
        assert_eq!(maximize(&a, &[q(-2), q(1)], &[q(1), q(0)]), LpOutcome::Infeasible);
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let a = rows(&[
            &[1, 1, 1, 1],
            &[-1, 0, 0, 0],
            &[0, -1, 0, 0],
            &[0, 0, -1, 0],
            &[0, 0, 0, -1],
            &[1, -1, 0, 0],
            &[0, 1, -1, 0],
            &[0, 0, 1, -1],
        ]);
        let b = vec![q(4), q(0), q(0), q(0), q(0), q(0), q(0), q(0)];
        let out = maximize(&a, &b, &[q(1), q(1), q(1), q(1)]);
        assert_eq!(out.value(), Some(&q(4)));
    }
}
