use crate::scalar::Scalar;

/// Dense symmetric positive definite matrix stored row-major.
#[derive(Clone, Debug)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + v;
    }

    /// In-place Cholesky factorization `A = L Lᵀ`; `None` when a pivot is
    /// not positive.
    pub fn cholesky(mut self) -> Option<Cholesky<T>> {
        let n = self.n;
        for j in 0..n {
            let mut diag = self.data[j * n + j];
            for k in 0..j {
                let l = self.data[j * n + k];
                diag = diag - l * l;
            }
            if !(diag > T::zero()) || !diag.is_finite() {
                return None;
            }
            let djj = diag.sqrt();
            self.data[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s = s - self.data[i * n + k] * self.data[j * n + k];
                }
                self.data[i * n + j] = s / djj;
            }
        }
        Some(Cholesky { n, l: self.data })
    }
}

#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Dense LU factorization with partial pivoting, reusable for several
/// right-hand sides.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    a: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Factors the row-major `n × n` matrix; `None` if a pivot vanishes.
    pub fn factor(n: usize, mut a: Vec<T>) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                perm.swap(col, piv);
            }
            let p = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                a[r * n + col] = f;
                if f == T::zero() {
                    continue;
                }
                for c in col + 1..n {
                    let u = a[col * n + c];
                    if u != T::zero() {
                        a[r * n + c] = a[r * n + c] - f * u;
                    }
                }
            }
        }
        Some(Lu { n, a, perm })
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y: Vec<T> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.a[i * n + k] * y[k];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.a[i * n + k] * y[k];
            }
            y[i] = s / self.a[i * n + i];
        }
        y
    }
}

/// Solves a small dense linear system by Gaussian elimination with partial
/// pivoting; `None` if singular.
pub fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() <= T::epsilon() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                a[r][c] = a[r][c] - f * a[col][c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for c in i + 1..n {
            s = s - a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let mut m = SymMatrix::<f64>::zeros(3);
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                m.add(i, j, a[i][j]);
            }
        }
        let x = m.cholesky().unwrap().solve(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut m = SymMatrix::<f64>::zeros(2);
        m.add(0, 0, 1.0);
        m.add(0, 1, 2.0);
        m.add(1, 0, 2.0);
        m.add(1, 1, 1.0);
        assert!(m.cholesky().is_none());
    }

    #[test]
    fn lu_matches_direct_solve() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let lu = Lu::factor(3, a.clone()).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-14);
        }
        assert!(Lu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_none());
    }

    #[test]
    fn gaussian_elimination() {
        let x = solve_dense(vec![vec![0.0, 2.0], vec![1.0, 1.0]], vec![4.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
        assert!(solve_dense(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]).is_none());
    }
}
