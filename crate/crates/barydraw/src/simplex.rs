//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves  min c·x  subject to  A x = b, x ≥ 0  for the small feasibility
//! programs the recogniser builds. Determinism matters more than speed here:
//! Bland's rule (smallest eligible index enters, smallest basic index breaks
//! ratio ties) never cycles, and every run of the same program pivots the
//! same way.

use thiserror::Error;

pub struct StandardLp {
    /// Constraint rows, each of length `cost.len()`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error)]
#[error("simplex exceeded its iteration cap of {cap} pivots")]
pub struct IterationCap {
    pub cap: usize,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-9;

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m × (n_total + 1), last column is the rhs
    basis: Vec<usize>,
    n_total: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_total]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.n_total + 1;
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.rows[i][j] -= f * self.rows[row][j];
            }
            self.rows[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| cost[b] * self.rhs(i))
            .sum()
    }

    /// Bland-rule pivoting until optimal or unbounded for the given cost.
    /// Only columns below `allowed` may enter the basis.
    fn run(&mut self, cost: &[f64], allowed: usize, budget: &mut usize) -> Result<PhaseEnd, IterationCap> {
        let cap = *budget;
        loop {
            // reduced costs from the simplex multipliers of the current basis
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    if cost[b] != 0.0 {
                        r -= cost[b] * self.rows[i][j];
                    }
                }
                if r < -COST_TOL {
                    entering = Some(j);
                    break; // Bland: smallest index
                }
            }
            let Some(col) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br - 1e-12 * (1.0 + br.abs())
                                || (tie && self.basis[i] < self.basis[best])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(PhaseEnd::Unbounded);
            };
            self.pivot(row, col);
            if *budget == 0 {
                return Err(IterationCap { cap });
            }
            *budget -= 1;
        }
    }
}

/// Two-phase solve. The iteration budget is 10·(rows + columns) per phase,
/// counting the artificial columns.
pub fn solve(lp: &StandardLp) -> Result<LpOutcome, IterationCap> {
    let m = lp.rows.len();
    let n = lp.cost.len();
    let n_total = n + m;
    let mut t = Tableau {
        rows: vec![vec![0.0; n_total + 1]; m],
        basis: (n..n + m).collect(),
        n_total,
    };
    let mut bscale = 0.0f64;
    for i in 0..m {
        debug_assert_eq!(lp.rows[i].len(), n);
        let flip = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t.rows[i][j] = flip * lp.rows[i][j];
        }
        t.rows[i][n + i] = 1.0;
        t.rows[i][n_total] = flip * lp.rhs[i];
        bscale = bscale.max(lp.rhs[i].abs());
    }

    let mut budget = 10 * (m + n_total);

    // Phase I: minimise the sum of artificials.
    let phase1: Vec<f64> = (0..n_total).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    match t.run(&phase1, n, &mut budget)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => unreachable!("phase-one objective is bounded below by zero"),
    }
    if t.objective(&phase1) > 1e-9 * (1.0 + bscale) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot
    // are redundant and get dropped.
    let mut i = 0;
    while i < t.basis.len() {
        if t.basis[i] >= n {
            let col = (0..n).find(|&j| t.rows[i][j].abs() > PIVOT_TOL);
            match col {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase II on the real cost; artificial columns are banned from entering.
    let mut cost = lp.cost.clone();
    cost.extend(std::iter::repeat(0.0).take(m));
    let mut budget2 = 10 * (t.rows.len() + n_total);
    match t.run(&cost, n, &mut budget2)? {
        PhaseEnd::Unbounded => Ok(LpOutcome::Unbounded),
        PhaseEnd::Optimal => {
            let mut x = vec![0.0; n];
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n {
                    x[b] = t.rhs(i).max(0.0);
                }
            }
            let objective = t.objective(&cost);
            Ok(LpOutcome::Optimal { x, objective })
        }
    }
}
