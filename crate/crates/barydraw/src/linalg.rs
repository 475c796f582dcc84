//! Small dense linear algebra: LU with partial pivoting and an
//! elimination-based rank. Everything here runs on desk-scale systems
//! (a few hundred unknowns at most), so no blocking or sparsity.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("matrix is singular to working precision (pivot {pivot:.3e} at step {step})")]
pub struct Singular {
    pub step: usize,
    pub pivot: f64,
}

pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

/// Factor a row-major n×n matrix.
pub fn lu_factor(mut a: Vec<f64>, n: usize) -> Result<LuFactors, Singular> {
    assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= tol {
            return Err(Singular { step: k, pivot: best });
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            perm.swap(k, piv);
        }
        let d = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            a[i * n + k] = f;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    Ok(LuFactors { n, lu: a, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Rank by Gaussian elimination with full pivoting; `tol` is relative to the
/// largest absolute entry of the input matrix.
pub fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let n = rows[0].len();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cutoff = tol * scale;
    let mut r = 0;
    let mut active_cols: Vec<usize> = (0..n).collect();
    while r < m && !active_cols.is_empty() {
        let mut best = (r, 0, 0.0f64);
        for i in r..m {
            for (ci, &c) in active_cols.iter().enumerate() {
                let v = rows[i][c].abs();
                if v > best.2 {
                    best = (i, ci, v);
                }
            }
        }
        if best.2 <= cutoff {
            break;
        }
        rows.swap(r, best.0);
        let col = active_cols.remove(best.1);
        let d = rows[r][col];
        for i in r + 1..m {
            let f = rows[i][col] / d;
            if f != 0.0 {
                for j in 0..n {
                    rows[i][j] -= f * rows[r][j];
                }
                rows[i][col] = 0.0;
            }
        }
        r += 1;
    }
    r
}
