//! Truncated power series c₀ + c₁𝔮 + … + c_K 𝔮^K.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> QSeries<S> {
    /// Series with the given coefficients; the truncation order is `len - 1`.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        QSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![S::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(S::one(), order)
    }

    pub fn constant(c: S, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// c·𝔮^k truncated at `order` (zero if k > order).
    pub fn monomial(c: S, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        QSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Extend with zeros or truncate to `order`.
    pub fn resize(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, S::zero());
        QSeries { coeffs: c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        QSeries { coeffs: (0..=n).map(|k| self.coeffs[k].clone() + o.coeffs[k].clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        QSeries { coeffs: (0..=n).map(|k| self.coeffs[k].clone() - o.coeffs[k].clone()).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let coeffs = (0..=n)
            .map(|k| {
                let terms: Vec<S> = (0..=k)
                    .filter(|&i| !self.coeffs[i].is_zero() && !o.coeffs[k - i].is_zero())
                    .map(|i| self.coeffs[i].clone() * o.coeffs[k - i].clone())
                    .collect();
                S::sum_all(terms)
            })
            .collect();
        QSeries { coeffs }
    }

    /// Multiply by 𝔮^k, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut s = Self::zero(n);
        for i in 0..=n {
            if i + k <= n {
                s.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        s
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Numerical("series inverse with vanishing constant term".into()));
        }
        let n = self.order();
        let inv0 = S::one() / c0.clone();
        let mut r: Vec<S> = vec![inv0.clone()];
        for k in 1..=n {
            let terms: Vec<S> =
                (1..=k).map(|i| self.coeffs[i].clone() * r[k - i].clone()).collect();
            r.push(-(S::sum_all(terms) * inv0.clone()));
        }
        Ok(QSeries { coeffs: r })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Formal logarithm of a series with c₀ = 1.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != S::one() {
            return Err(Error::InvalidInput("formal log needs constant term 1".into()));
        }
        // f·(log f)' = f'
        let n = self.order();
        let mut l = vec![S::zero(); n + 1];
        for k in 1..=n {
            let mut terms = vec![S::from_i64(k as i64) * self.coeffs[k].clone()];
            for i in 1..k {
                terms.push(-(S::from_i64(i as i64) * l[i].clone() * self.coeffs[k - i].clone()));
            }
            l[k] = S::sum_all(terms) / S::from_i64(k as i64);
        }
        Ok(QSeries { coeffs: l })
    }

    /// Formal exponential of a series with c₀ = 0.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidInput("formal exp needs constant term 0".into()));
        }
        // e' = g'e
        let n = self.order();
        let mut e = vec![S::one()];
        for k in 1..=n {
            let terms: Vec<S> = (1..=k)
                .map(|i| S::from_i64(i as i64) * self.coeffs[i].clone() * e[k - i].clone())
                .collect();
            e.push(S::sum_all(terms) / S::from_i64(k as i64));
        }
        Ok(QSeries { coeffs: e })
    }

    /// f^c for c₀ = 1 and an arbitrary exponent, via exp(c log f).
    pub fn pow(&self, c: &S) -> Result<Self> {
        self.log()?.scale(c).exp()
    }

    /// Evaluate the truncated polynomial at 𝔮.
    pub fn eval(&self, q: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + c.clone();
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> QSeries<T> {
        QSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn s(v: &[(i64, i64)]) -> QSeries<Q> {
        QSeries::new(v.iter().map(|&(a, b)| q(a, b)).collect())
    }

    #[test]
    fn geometric_inverse() {
        let one_minus = s(&[(1, 1), (-1, 1), (0, 1), (0, 1)]);
        assert_eq!(one_minus.inverse().unwrap(), s(&[(1, 1), (1, 1), (1, 1), (1, 1)]));
    }

    #[test]
    fn log_of_geometric() {
        // log 1/(1-q) = Σ q^k/k
        let g = s(&[(1, 1), (1, 1), (1, 1), (1, 1), (1, 1)]);
        assert_eq!(g.log().unwrap(), s(&[(0, 1), (1, 1), (1, 2), (1, 3), (1, 4)]));
    }

    #[test]
    fn exp_log_roundtrip() {
        let f = s(&[(1, 1), (3, 7), (-2, 5), (1, 9), (4, 1)]);
        assert_eq!(f.log().unwrap().exp().unwrap(), f);
    }

    #[test]
    fn half_power_squares_back() {
        let f = s(&[(1, 1), (2, 1), (-1, 3), (5, 1)]);
        let h = f.pow(&q(1, 2)).unwrap();
        assert_eq!(h.mul(&h), f);
    }
}
