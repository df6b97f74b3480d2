//! Dense two-phase primal simplex for `min cᵀx s.t. Ax = b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule (lowest eligible index for both the
//! entering and the leaving variable), so the method terminates on
//! degenerate problems and is deterministic. Columns that already form unit
//! vectors are used as the starting basis; artificial columns are added only
//! for the remaining rows. Dual values are read off the final tableau as
//! `y = c_Bᵀ B⁻¹`.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    pub cost: Vec<T>,
    /// Constraint rows; every row has `cost.len()` entries.
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub primal: Vec<T>,
    /// One multiplier per equality row; empty unless optimal.
    pub dual: Vec<T>,
    pub objective: T,
    /// Basic variable of each row (artificial columns are `≥ cost.len()`).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(cost: Vec<T>, a: Vec<Vec<T>>, b: Vec<T>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Shape(format!("{} rows but {} right-hand sides", a.len(), b.len())));
        }
        if let Some(row) = a.iter().find(|r| r.len() != cost.len()) {
            return Err(Error::Shape(format!("row of length {} for {} variables", row.len(), cost.len())));
        }
        Ok(LpProblem { cost, a, b })
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    /// Dual objective `bᵀy`.
    pub fn dual_objective(&self, y: &[T]) -> T {
        self.b.iter().zip(y).map(|(&b, &y)| b * y).sum()
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> T {
        self.rows[i][self.width]
    }

    fn set_objective(&mut self, cost: &[T]) {
        let w = self.width;
        let mut obj: Vec<T> = cost.iter().copied().chain(std::iter::once(T::zero())).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb == T::zero() {
                continue;
            }
            for j in 0..=w {
                obj[j] = obj[j] - cb * row[j];
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v = *v / p;
        }
        self.rows[r][c] = T::one();
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == T::zero() {
                continue;
            }
            for j in 0..=w {
                if pivot_row[j] != T::zero() {
                    row[j] = row[j] - f * pivot_row[j];
                }
            }
            row[c] = T::zero();
        }
        let f = self.obj[c];
        if f != T::zero() {
            for j in 0..=w {
                if pivot_row[j] != T::zero() {
                    self.obj[j] = self.obj[j] - f * pivot_row[j];
                }
            }
            self.obj[c] = T::zero();
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn run(&mut self, allowed: usize, rc_tol: T, piv_tol: T, cap: usize) -> Result<Outcome> {
        loop {
            if self.pivots >= cap {
                return Err(Error::CycleGuardTripped(self.pivots));
            }
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -rc_tol) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a <= piv_tol {
                    continue;
                }
                let ratio = row[self.width] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= piv_tol * (T::one() + lr.abs());
                        if (!tie && ratio < lr) || (tie && self.basis[i] < self.basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solves the LP. `tol` is the optimality and feasibility tolerance
/// relative to the data scale.
pub fn lp_solve<T: Scalar>(problem: &LpProblem<T>, tol: T) -> Result<LpSolution<T>> {
    let m = problem.num_rows();
    let n = problem.num_vars();
    let mut sign = vec![T::one(); m];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = problem.b[i] < T::zero();
        if flip {
            sign[i] = -T::one();
        }
        let s = sign[i];
        rows.push(problem.a[i].iter().map(|&v| v * s).chain(std::iter::once(problem.b[i] * s)).collect());
    }

    // Unit columns seed the basis.
    let mut init = vec![usize::MAX; m];
    for j in 0..n {
        let mut hit = None;
        let mut unit = true;
        for (i, row) in rows.iter().enumerate() {
            let v = row[j];
            if v == T::zero() {
                continue;
            }
            if v == T::one() && hit.is_none() {
                hit = Some(i);
            } else {
                unit = false;
                break;
            }
        }
        if let (true, Some(i)) = (unit, hit) {
            if init[i] == usize::MAX {
                init[i] = j;
            }
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&i| init[i] == usize::MAX).collect();
    let width = n + missing.len();
    for row in rows.iter_mut() {
        let rhs = row.pop().unwrap();
        row.resize(width, T::zero());
        row.push(rhs);
    }
    for (k, &i) in missing.iter().enumerate() {
        rows[i][n + k] = T::one();
        init[i] = n + k;
    }

    let scale_b = problem.b.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let scale_c = problem.cost.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let piv_tol: T = lit(1e-11);
    let cap = 50_000 + 100 * (m + width);
    let mut tab = Tableau { rows, obj: Vec::new(), basis: init.clone(), width, pivots: 0 };

    if !missing.is_empty() {
        let mut phase1 = vec![T::zero(); width];
        for c in phase1.iter_mut().skip(n) {
            *c = T::one();
        }
        tab.set_objective(&phase1);
        tab.run(width, tol, piv_tol, cap)?;
        let infeas = -tab.obj[width];
        if infeas > tol * scale_b * lit((m.max(1)) as f64) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                dual: Vec::new(),
                objective: T::nan(),
                basis: tab.basis,
                pivots: tab.pivots,
            });
        }
        // Drive remaining artificials (at zero level) out of the basis.
        for r in 0..m {
            if tab.basis[r] < n {
                continue;
            }
            if let Some(c) = (0..n).find(|&j| tab.rows[r][j].abs() > piv_tol) {
                tab.pivot(r, c);
            }
        }
    }

    let mut cost = problem.cost.clone();
    cost.resize(width, T::zero());
    tab.set_objective(&cost);
    let outcome = tab.run(n, tol * scale_c, piv_tol, cap)?;
    if let Outcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: T::neg_infinity(),
            basis: tab.basis,
            pivots: tab.pivots,
        });
    }

    let mut primal = vec![T::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            primal[bv] = tab.rhs(i).max(T::zero());
        }
    }
    let dual: Vec<T> = (0..m)
        .map(|i| {
            let col = init[i];
            let y: T = tab.basis.iter().enumerate().map(|(k, &bv)| cost[bv] * tab.rows[k][col]).sum();
            y * sign[i]
        })
        .collect();
    let objective = problem.cost.iter().zip(&primal).map(|(&c, &x)| c * x).sum();
    Ok(LpSolution { status: LpStatus::Optimal, primal, dual, objective, basis: tab.basis, pivots: tab.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_transport() {
        let p = LpProblem::new(vec![3.0], vec![vec![1.0]], vec![1.0]).unwrap();
        let s = lp_solve(&p, 1e-12).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.primal, vec![1.0]);
        assert_eq!(s.dual, vec![3.0]);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn degenerate_transport_zero_row() {
        // 2x2 transport, mu = (1, 0), nu = (0.5, 0.5), cost [[1,2],[3,4]]
        let cost = vec![1.0f64, 2.0, 3.0, 4.0];
        let a = vec![
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ];
        let p = LpProblem::new(cost, a, vec![1.0, 0.0, 0.5, 0.5]).unwrap();
        let s = lp_solve(&p, 1e-12).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.primal[2] + s.primal[3], 0.0);
        assert!((s.objective - 1.5).abs() < 1e-14);
        assert!((p.dual_objective(&s.dual) - s.objective).abs() < 1e-14);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem::new(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![-1.0]).unwrap();
        assert_eq!(lp_solve(&p, 1e-12).unwrap().status, LpStatus::Infeasible);
        let p = LpProblem::new(vec![-1.0, 0.0], vec![vec![1.0, -1.0]], vec![1.0]).unwrap();
        assert_eq!(lp_solve(&p, 1e-12).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn slack_basis_duals() {
        // min -x - y s.t. x + s1 = 1, y + s2 = 2
        let p = LpProblem::new(
            vec![-1.0, -1.0, 0.0, 0.0],
            vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        let s = lp_solve(&p, 1e-12).unwrap();
        assert_eq!(s.objective, -3.0);
        assert_eq!(s.dual, vec![-1.0, -1.0]);
    }
}
