use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse rows. Diagonal entries are stored like any other entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Build from per-row `(col, value)` lists. Duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                debug_assert!(c < dim);
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_start.push(cols.len());
        }
        SparseMatrix {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[i]..self.row_start[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                rows[j].push((i, v));
            }
        }
        SparseMatrix::from_rows(rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }
}

/// Solver switch: dense LU strictly below this many unknowns.
pub const DENSE_LIMIT: usize = 2000;
pub const ITERATIVE_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 200_000;

/// Solve `a x = b` where `a` is a nonsingular M-matrix-like system
/// (here always `-Q_T` for a transient generator block).
pub fn solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.dim() < DENSE_LIMIT {
        solve_dense(a, b)
    } else {
        gauss_seidel(a, b)
    }
}

pub fn solve_dense(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let lu = a.to_dense().lu();
    let rhs = DVector::from_column_slice(b);
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("LU factorisation found a zero pivot".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }
    Ok(x.iter().copied().collect())
}

/// Gauss-Seidel sweeps until the relative residual drops below
/// [`ITERATIVE_TOLERANCE`].
pub fn gauss_seidel(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    if diag.contains(&0.0) {
        return Err(Error::Singular("zero diagonal entry".into()));
    }
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    for _ in 0..MAX_SWEEPS {
        for i in 0..n {
            let mut s = b[i];
            for (j, v) in a.row(i) {
                if j != i {
                    s -= v * x[j];
                }
            }
            x[i] = s / diag[i];
        }
        let ax = a.mul_vec(&x);
        let resid = ax
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        if !resid.is_finite() {
            return Err(Error::Singular("iteration diverged".into()));
        }
        if resid <= ITERATIVE_TOLERANCE * scale {
            return Ok(x);
        }
    }
    Err(Error::Singular(format!(
        "Gauss-Seidel did not reach {ITERATIVE_TOLERANCE:e} in {MAX_SWEEPS} sweeps"
    )))
}

/// Stationary vector of an irreducible generator `q`: `pi q = 0`, `sum pi = 1`.
pub fn stationary(q: &SparseMatrix) -> Result<Vec<f64>> {
    let n = q.dim();
    if n == 0 {
        return Err(Error::Singular("empty generator".into()));
    }
    if n < DENSE_LIMIT {
        // Solve q^T pi = 0 with the last equation replaced by normalisation.
        let mut m = q.to_dense().transpose();
        for j in 0..n {
            m[(n - 1, j)] = 1.0;
        }
        let mut rhs = DVector::zeros(n);
        rhs[n - 1] = 1.0;
        let pi = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("stationary system is singular".into()))?;
        return Ok(pi.iter().copied().collect());
    }
    let qt = q.transpose();
    let diag: Vec<f64> = (0..n).map(|i| q.get(i, i)).collect();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..MAX_SWEEPS {
        for j in 0..n {
            let mut s = 0.0;
            for (i, v) in qt.row(j) {
                if i != j {
                    s += pi[i] * v;
                }
            }
            pi[j] = -s / diag[j];
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        let resid = qt
            .mul_vec(&pi)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let rate = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if resid <= ITERATIVE_TOLERANCE * rate {
            return Ok(pi);
        }
    }
    Err(Error::Singular("stationary iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> SparseMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 4.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.5));
                }
                r
            })
            .collect();
        SparseMatrix::from_rows(rows)
    }

    #[test]
    fn dense_and_iterative_agree() {
        let a = tridiagonal(50);
        let b: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 * 0.1).collect();
        let x1 = solve_dense(&a, &b).unwrap();
        let x2 = gauss_seidel(&a, &b).unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-10);
        }
        let ax = a.mul_vec(&x1);
        for (p, q) in ax.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_entries_are_summed() {
        let a = SparseMatrix::from_rows(vec![vec![(0, 1.0), (0, 2.0)], vec![(1, 1.0)]]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn two_state_stationary() {
        // 0 -> 1 at rate 2, 1 -> 0 at rate 3: pi = (3/5, 2/5)
        let q = SparseMatrix::from_rows(vec![
            vec![(0, -2.0), (1, 2.0)],
            vec![(0, 3.0), (1, -3.0)],
        ]);
        let pi = stationary(&q).unwrap();
        assert!((pi[0] - 0.6).abs() < 1e-14);
        assert!((pi[1] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn singular_system_is_reported() {
        let a = SparseMatrix::from_rows(vec![
            vec![(0, 1.0), (1, -1.0)],
            vec![(0, -1.0), (1, 1.0)],
        ]);
        assert!(solve_dense(&a, &[1.0, 1.0]).is_err());
    }
}
