//! Small dense square matrices over any [`Scalar`].
//!
//! Exact determinants and commutators run here; eigenvalues, SVD and LU with
//! condition estimates go through nalgebra on the complex-double copy.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::scalar::{Scalar, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn diag(d: &[S]) -> Self {
        let n = d.len();
        Self::from_fn(n, |i, j| if i == j { d[i].clone() } else { S::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        Self::from_fn(n, |i, j| {
            S::sum_all((0..n).map(|k| self[(i, k)].clone() * o[(k, j)].clone()).collect())
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() + o[(i, j)].clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() - o[(i, j)].clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)].clone() * s.clone())
    }

    /// [A, B] = AB − BA
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> S {
        S::sum_all((0..self.n).map(|i| self[(i, i)].clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Determinant by Gaussian elimination (largest-magnitude pivot).
    pub fn det(&self) -> S {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = S::one();
        for col in 0..n {
            let mut piv = None;
            let mut best = -1.0f64;
            for r in col..n {
                let v = &m[r * n + col];
                if !v.is_zero() {
                    let mag = v.magnitude();
                    if mag > best {
                        best = mag;
                        piv = Some(r);
                    }
                    if S::EXACT {
                        break;
                    }
                }
            }
            let Some(p) = piv else { return S::zero() };
            if p != col {
                for c in 0..n {
                    m.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pv = m[col * n + col].clone();
            det = det * pv.clone();
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let f = m[r * n + col].clone() / pv.clone();
                for c in col..n {
                    let t = f.clone() * m[col * n + c].clone();
                    m[r * n + c] = m[r * n + c].clone() - t;
                }
            }
        }
        det
    }

    pub fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let n = self.n;
        let rows: Vec<usize> = (0..n).filter(|&r| r != skip_r).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != skip_c).collect();
        Self::from_fn(n - 1, |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Classical adjugate, adj(M)·M = det(M)·1.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return Self::identity(1);
        }
        Self::from_fn(n, |i, j| {
            let c = self.minor(j, i).det();
            if (i + j) % 2 == 0 {
                c
            } else {
                -c
            }
        })
    }

    /// Frobenius norm of the complex-double image.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude().powi(2)).sum::<f64>().sqrt()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SquareMatrix<T> {
        SquareMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].to_c64().unwrap_or(C64::new(f64::NAN, f64::NAN)))
    }
}

impl SquareMatrix<C64> {
    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Eigenvalues via complex Schur decomposition.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let m = self.to_dmatrix();
        match m.clone().schur().eigenvalues() {
            Some(ev) => ev.iter().copied().collect(),
            None => {
                let (_, t) = m.schur().unpack();
                (0..self.n).map(|i| t[(i, i)]).collect()
            }
        }
    }

    /// Inverse by partial-pivot LU; fails when the 2-norm condition number exceeds `max_cond`.
    pub fn inverse_checked(&self, max_cond: f64) -> crate::Result<(Self, f64)> {
        let sv = self.singular_values();
        let cond = if sv.last().copied().unwrap_or(0.0) == 0.0 { f64::INFINITY } else { sv[0] / sv[sv.len() - 1] };
        if !(cond <= max_cond) {
            return Err(crate::Error::Numerical(format!("matrix is near singular (condition number {cond:e})")));
        }
        let inv = self.to_dmatrix().lu().try_inverse().ok_or_else(|| crate::Error::Numerical("LU inverse failed".into()))?;
        Ok((Self::from_dmatrix(&inv), cond))
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.to_dmatrix().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }
}

impl<S> Index<(usize, usize)> for SquareMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for SquareMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

/// Sort complex numbers by (re, im) so spectra can be compared elementwise.
pub fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
}
