//! Dense linear algebra for the small (m ≤ ~20) radius systems: LU solves for
//! Newton steps and a cyclic Jacobi eigensolver for the symmetrized Jacobian.

use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Solve A x = b by LU decomposition with partial pivoting.
pub fn solve_lu(a: &SquareMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let mut lu = a.data.clone();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| lu[i * n + col].abs().total_cmp(&lu[j * n + col].abs()))
            .unwrap();
        if lu[pivot_row * n + col].abs() < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::InvalidInput(format!(
                "singular matrix in linear solve (pivot {col})"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            perm.swap(col, pivot_row);
            x.swap(col, pivot_row);
        }
        let piv = lu[col * n + col];
        for row in col + 1..n {
            let f = lu[row * n + col] / piv;
            lu[row * n + col] = f;
            for j in col + 1..n {
                lu[row * n + j] -= f * lu[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        for j in row + 1..n {
            x[row] -= lu[row * n + j] * x[j];
        }
        x[row] /= lu[row * n + row];
    }
    Ok(x)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and matching orthonormal eigenvectors (as columns),
/// sorted in descending eigenvalue order.
pub fn jacobi_eigen(a: &SquareMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = SquareMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    let off = |m: &SquareMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j) * m.get(i, j);
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&m) > 1e-15 * scale * (n as f64) {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::ToleranceNotMet {
                achieved: off(&m),
                requested: 1e-15 * scale,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // Stable rotation: t = sign(θ)/(|θ| + sqrt(θ²+1)).
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|row| v.get(row, col)).collect();
            // Deterministic sign: largest-magnitude component positive.
            let lead = vec
                .iter()
                .cloned()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(1.0);
            if lead < 0.0 {
                for x in &mut vec {
                    *x = -*x;
                }
            }
            vec
        })
        .collect();
    Ok((eigenvalues, eigenvectors))
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lu_solves_small_systems() {
        let a = SquareMatrix::from_fn(3, |i, j| [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]][i][j]);
        let b = vec![1.0, 2.0, 3.0];
        let x = solve_lu(&a, &b).unwrap();
        let back = a.mul_vec(&x);
        for (bi, yi) in b.iter().zip(&back) {
            assert_relative_eq!(bi, yi, epsilon = 1e-12);
        }
        let singular = SquareMatrix::from_fn(2, |i, _| if i == 0 { 1.0 } else { 2.0 });
        assert!(solve_lu(&singular, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn jacobi_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let a = SquareMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        assert_relative_eq!(vals[0], 3.0, epsilon = 1e-13);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-13);
        assert_relative_eq!(vecs[0][0], vecs[0][1], epsilon = 1e-13);
    }

    #[test]
    fn jacobi_residuals_and_orthogonality() {
        // A deterministic ill-scaled symmetric matrix.
        let n = 7;
        let a = SquareMatrix::from_fn(n, |i, j| {
            let (i, j) = (i as f64, j as f64);
            1.0 / (1.0 + i + j) + if i == j { 10.0 * (i + 1.0) } else { 0.0 }
        });
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        for (lambda, v) in vals.iter().zip(&vecs) {
            let av = a.mul_vec(v);
            for (x, y) in av.iter().zip(v.iter().map(|x| lambda * x)) {
                assert_relative_eq!(*x, y, epsilon = 1e-10);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = dot(&vecs[i], &vecs[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(d, expect, epsilon = 1e-12);
            }
        }
        // Descending order.
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }
}
