//! Dense symmetric-matrix routines sized for vocabulary-scale problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Row-major square matrix, symmetric by construction where used.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// `self · q` for a column-major `n × k` block.
    pub(crate) fn mul_block(&self, q: &[Vec<T>]) -> Vec<Vec<T>> {
        q.iter()
            .map(|col| {
                (0..self.n)
                    .map(|i| self.row(i).iter().zip(col).map(|(&a, &b)| a * b).sum())
                    .collect()
            })
            .collect()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending with matching unit eigenvectors (columns).
pub fn jacobi_eigen<T: Scalar>(m: &SymMatrix<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = m.n;
    let mut a: Vec<Vec<T>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: T = (0..n).map(|i| a[i][i] * a[i][i]).sum::<T>() + off;
        if off <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Modified Gram-Schmidt; columns that collapse are replaced with fresh
/// random directions from `rng`.
fn orthonormalize<T: Scalar>(cols: &mut [Vec<T>], rng: &mut ChaCha8Rng) {
    let tiny = T::epsilon().sqrt();
    for j in 0..cols.len() {
        for attempt in 0..8 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[i], &rest[0]);
                for (x, &q) in rest[0].iter_mut().zip(&done[i]) {
                    *x -= proj * q;
                }
            }
            let norm = dot(&cols[j], &cols[j]).sqrt();
            if norm > tiny || attempt == 7 {
                let norm = if norm > T::zero() { norm } else { T::one() };
                for x in cols[j].iter_mut() {
                    *x /= norm;
                }
                break;
            }
            for x in cols[j].iter_mut() {
                *x = T::lit(rng.gen_range(-1.0..1.0));
            }
        }
    }
}

/// Result of a dominant-subspace computation.
#[derive(Clone, Debug)]
pub struct Subspace<T> {
    /// Ritz values, descending.
    pub values: Vec<T>,
    /// Matching Ritz vectors (columns of length n).
    pub vectors: Vec<Vec<T>>,
    pub iterations: usize,
    pub converged: bool,
}

/// Dominant `k`-dimensional invariant subspace of a positive semi-definite
/// matrix by orthogonal subspace iteration with Rayleigh-Ritz extraction.
/// Converged when every Ritz residual norm drops below `tol`.
pub fn dominant_subspace<T: Scalar>(m: &SymMatrix<T>, k: usize, seed: u64, tol: T, max_iter: usize) -> Subspace<T> {
    let n = m.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Vec<T>> = (0..k)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    orthonormalize(&mut q, &mut rng);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let z = m.mul_block(&q);
        let h = SymMatrix::from_fn(k, |i, j| {
            let a = dot(&q[i], &z[j]);
            let b = dot(&q[j], &z[i]);
            (a + b) / T::lit(2.0)
        });
        let (vals, vecs) = jacobi_eigen(&h);
        // descending order of Ritz values
        let idx: Vec<usize> = (0..k).rev().collect();
        let ritz: Vec<Vec<T>> = idx
            .iter()
            .map(|&c| (0..n).map(|r| (0..k).map(|j| q[j][r] * vecs[c][j]).sum()).collect())
            .collect();
        let bz: Vec<Vec<T>> = idx
            .iter()
            .map(|&c| (0..n).map(|r| (0..k).map(|j| z[j][r] * vecs[c][j]).sum()).collect())
            .collect();
        let values: Vec<T> = idx.iter().map(|&c| vals[c]).collect();
        let max_res = (0..k)
            .map(|c| {
                bz[c]
                    .iter()
                    .zip(&ritz[c])
                    .map(|(&b, &x)| (b - values[c] * x) * (b - values[c] * x))
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max);
        if max_res < tol || iterations >= max_iter {
            return Subspace {
                values,
                vectors: ritz,
                iterations,
                converged: max_res < tol,
            };
        }
        q = z;
        orthonormalize(&mut q, &mut rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = jacobi_eigen(&m);
        assert!((vals[0] - 1.0f64).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let v = &vecs[1];
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn subspace_matches_jacobi_top_values() {
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        // B Bᵀ is PSD
        let m = SymMatrix::from_fn(n, |i, j| (0..n).map(|k| b[i][k] * b[j][k]).sum());
        let (vals, _) = jacobi_eigen(&m);
        let sub = dominant_subspace(&m, 3, 11, 1e-10, 10_000);
        assert!(sub.converged);
        for c in 0..3 {
            assert!((sub.values[c] - vals[n - 1 - c]).abs() < 1e-8);
        }
    }
}
