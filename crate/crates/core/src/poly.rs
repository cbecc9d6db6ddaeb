//! Exact univariate polynomials and rational functions over ℚ.
//!
//! `RatFunc` is kept in lowest terms with a monic denominator, so equality is
//! structural and residues can be read off exactly.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{fmt_q, Q, Scalar, C64};

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    /// Coefficients, lowest degree first, no trailing zeros.
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(v: Q) -> Self {
        Poly::new(vec![v])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for v in self.c.iter().rev() {
            acc = acc * x + v;
        }
        acc
    }

    pub fn eval_c64(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for v in self.c.iter().rev() {
            acc = acc * x + <C64 as Scalar>::from_q(v);
        }
        acc
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(self.c.iter().map(|v| v * s).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, v)| v * Q::from_integer((k as i64).into()))
                .collect(),
        )
    }

    /// Coefficients of t ↦ p(x0 + t).
    pub fn taylor_shift(&self, x0: &Q) -> Poly {
        // Horner in the shifted variable.
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![x0.clone(), Q::one()]);
        for v in self.c.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(v.clone());
        }
        acc
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let f = &r[k] / &lead;
            for (i, dv) in d.c.iter().enumerate() {
                let t = &f * dv;
                r[k - dd + i] -= t;
            }
            quot[k - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(quot), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.leading();
        Poly::new(self.c.iter().map(|v| v / &l).collect())
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `x0` as a root.
    pub fn root_multiplicity(&self, x0: &Q) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let s = self.taylor_shift(x0);
        s.c.iter().take_while(|v| v.is_zero()).count()
    }

    /// Exact Lagrange interpolation through the given nodes.
    pub fn interpolate(points: &[(Q, Q)]) -> Poly {
        let mut acc = Poly::zero();
        for (k, (xk, yk)) in points.iter().enumerate() {
            let mut basis = Poly::constant(yk.clone());
            for (m, (xm, _)) in points.iter().enumerate() {
                if m != k {
                    let lin = Poly::new(vec![-xm.clone(), Q::one()]);
                    basis = &basis * &lin;
                    basis = basis.scale(&(Q::one() / (xk - xm)));
                }
            }
            acc = &acc + &basis;
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.c.iter().enumerate().rev() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_q(v))?,
                1 => write!(f, "({})x", fmt_q(v))?,
                _ => write!(f, "({})x^{k}", fmt_q(v))?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|v| -v).collect())
    }
}

/// Rational function p/q in lowest terms, q monic.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::constant(Q::one()) };
        }
        // Fast path for constant denominators.
        if den.degree() == Some(0) {
            let l = den.leading();
            return RatFunc { num: num.scale(&(Q::one() / l)), den: Poly::constant(Q::one()) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let l = den.leading();
        let inv = Q::one() / l;
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn constant(v: Q) -> Self {
        RatFunc { num: Poly::constant(v), den: Poly::constant(Q::one()) }
    }

    /// The identity function x.
    pub fn x() -> Self {
        RatFunc { num: Poly::x(), den: Poly::constant(Q::one()) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_polynomial() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Value at `x0`, `None` at a pole.
    pub fn eval(&self, x0: &Q) -> Option<Q> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x0) / d)
        }
    }

    /// Exact residue at `x0` (zero where the function is regular).
    pub fn residue(&self, x0: &Q) -> Q {
        let m = self.den.root_multiplicity(x0);
        if m == 0 {
            return Q::zero();
        }
        let n = self.num.taylor_shift(x0);
        let d = self.den.taylor_shift(x0);
        let dt: Vec<Q> = d.coeffs()[m..].to_vec();
        // Coefficient of t^{m-1} in n(t)/dt(t).
        let mut s: Vec<Q> = Vec::with_capacity(m);
        for k in 0..m {
            let mut v = n.coeff(k);
            for j in 1..=k {
                if let Some(dj) = dt.get(j) {
                    v -= dj * &s[k - j];
                }
            }
            s.push(v / &dt[0]);
        }
        s[m - 1].clone()
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}]/[{}]", self.num, self.den)
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den);
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        self + (-o)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for RatFunc {
    type Output = RatFunc;
    fn div(self, o: RatFunc) -> RatFunc {
        assert!(!o.num.is_zero(), "rational function division by zero");
        RatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den }
    }
}

impl Scalar for RatFunc {
    const EXACT: bool = true;
    fn zero() -> Self {
        RatFunc::constant(Q::zero())
    }
    fn one() -> Self {
        RatFunc::constant(Q::one())
    }
    fn from_i64(n: i64) -> Self {
        RatFunc::constant(<Q as Scalar>::from_i64(n))
    }
    fn from_q(q: &Q) -> Self {
        RatFunc::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn magnitude(&self) -> f64 {
        match self.as_constant() {
            Some(c) => c.magnitude(),
            None => 1.0,
        }
    }
    fn to_c64(&self) -> Option<C64> {
        self.as_constant().and_then(|c| c.to_c64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn lin(c: i64) -> Poly {
        Poly::new(vec![q(-c, 1), q(1, 1)])
    }

    #[test]
    fn divrem_roundtrip() {
        let a = &(&lin(1) * &lin(2)) * &lin(-3);
        let b = lin(2);
        let (qq, r) = a.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(&qq * &b, a);
    }

    #[test]
    fn reduces_to_lowest_terms() {
        let f = RatFunc::new(&lin(1) * &lin(2), &lin(1) * &lin(3));
        assert_eq!(f.den(), &lin(3));
        assert_eq!(f.num(), &lin(2));
    }

    #[test]
    fn residues() {
        // 1/((x-1)(x-2)) has residue -1 at 1.
        let f = RatFunc::new(Poly::constant(q(1, 1)), &lin(1) * &lin(2));
        assert_eq!(f.residue(&q(1, 1)), q(-1, 1));
        assert_eq!(f.residue(&q(2, 1)), q(1, 1));
        assert_eq!(f.residue(&q(5, 1)), q(0, 1));
        // x/(x-1)^2 = 1/(x-1) + 1/(x-1)^2.
        let g = RatFunc::new(Poly::x(), &lin(1) * &lin(1));
        assert_eq!(g.residue(&q(1, 1)), q(1, 1));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![q(1, 3), q(-2, 1), q(0, 1), q(5, 7)]);
        let pts: Vec<(Q, Q)> = (0..4).map(|k| (q(k, 1), p.eval(&q(k, 1)))).collect();
        assert_eq!(Poly::interpolate(&pts), p);
    }
}
