//! Small dense linear algebra for the estimator (row-major `Vec<f64>`).

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting; `None` if
    /// the matrix is numerically singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))?;
            if a[(pivot, col)].abs() <= 1e-13 * scale {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= f * a[(col, j)];
                    inv[(i, j)] -= f * inv[(col, j)];
                }
            }
        }
        Some(inv)
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Matrix {
        let n = self.dim;
        let norm = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scale = 2f64.powi(-squarings);
        let a = Matrix { dim: n, data: self.data.iter().map(|x| x * scale).collect() };
        let mut result = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..=24 {
            term = term.mul(&a);
            for x in &mut term.data {
                *x /= k as f64;
            }
            for (r, t) in result.data.iter_mut().zip(&term.data) {
                *r += t;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Sample covariance (divisor `m - 1`) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Matrix {
    let dim = rows.first().map_or(0, Vec::len);
    let m = rows.len();
    let mut cov = Matrix::zeros(dim);
    if m < 2 {
        return cov;
    }
    let mean = column_means(rows);
    for r in rows {
        for i in 0..dim {
            let di = r[i] - mean[i];
            for j in 0..dim {
                cov[(i, j)] += di * (r[j] - mean[j]);
            }
        }
    }
    for x in &mut cov.data {
        *x /= (m - 1) as f64;
    }
    cov
}

pub fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    let m = rows.len().max(1) as f64;
    mean.iter_mut().for_each(|x| *x /= m);
    mean
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Matrix { dim: 3, data: vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0] };
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-12);
            }
        }
        let singular = Matrix { dim: 2, data: vec![1.0, 2.0, 2.0, 4.0] };
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn expm_of_two_state_generator() {
        // Q = [[-a, a], [b, -b]] has P(t)_00 = b/(a+b) + a/(a+b)·e^{-(a+b)}.
        let (a, b) = (3.0, 1.5);
        let q = Matrix { dim: 2, data: vec![-a, a, b, -b] };
        let p = q.expm();
        let expected = b / (a + b) + a / (a + b) * (-(a + b)).exp();
        assert!((p[(0, 0)] - expected).abs() < 1e-13);
        assert!((p[(0, 0)] + p[(0, 1)] - 1.0).abs() < 1e-13);
        assert_eq!(Matrix::zeros(3).expm(), Matrix::identity(3));
    }

    #[test]
    fn covariance_of_known_rows() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 6.0]];
        let c = covariance(&rows);
        assert_eq!(c.data, vec![2.0, 4.0, 4.0, 8.0]);
    }
}
