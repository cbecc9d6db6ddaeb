//! Integer combinations of the symbolic generators ε₁..ε₄, a_k and an affine x slot.
//!
//! θ arguments are built symbolically and only evaluated at the end, so the
//! graded truncation θ^δ can inspect them.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LatticeVector {
    /// Coefficients of ε₁, ε₂, ε₃, ε₄ (ε₄ stays symbolic until evaluation).
    pub eps: [i64; 4],
    /// Sparse coefficients of the moduli a_k, sorted by k, no zeros.
    a: Vec<(usize, i64)>,
    /// Coefficient of the free variable x.
    pub x: Rational64,
}

impl LatticeVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn eps(e: [i64; 4]) -> Self {
        LatticeVector { eps: e, ..Self::default() }
    }

    /// a_k − a_l.
    pub fn a_diff(k: usize, l: usize) -> Self {
        Self::zero().with_a(k, 1).with_a(l, -1)
    }

    pub fn x_slot() -> Self {
        LatticeVector { x: Rational64::one(), ..Self::default() }
    }

    pub fn with_a(mut self, k: usize, c: i64) -> Self {
        match self.a.binary_search_by_key(&k, |p| p.0) {
            Ok(pos) => {
                self.a[pos].1 += c;
                if self.a[pos].1 == 0 {
                    self.a.remove(pos);
                }
            }
            Err(pos) => {
                if c != 0 {
                    self.a.insert(pos, (k, c));
                }
            }
        }
        self
    }

    pub fn with_eps(mut self, e: [i64; 4]) -> Self {
        for (s, v) in self.eps.iter_mut().zip(e) {
            *s += v;
        }
        self
    }

    pub fn a_coeffs(&self) -> &[(usize, i64)] {
        &self.a
    }

    pub fn eval<S: Scalar>(&self, g: &Generators<S>, x: Option<&S>) -> S {
        let mut acc = S::zero();
        let e4 = self.eps[3];
        for k in 0..3 {
            let c = self.eps[k] - e4;
            if c != 0 {
                acc = acc + S::from_i64(c) * g.eps[k].clone();
            }
        }
        for &(k, c) in &self.a {
            acc = acc + S::from_i64(c) * g.a[k].clone();
        }
        if !self.x.is_zero() {
            let xv = x.expect("lattice vector with an x slot evaluated without x");
            acc = acc + S::from_ratio(*self.x.numer(), *self.x.denom()) * xv.clone();
        }
        acc
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        let mut v = self.with_eps(o.eps);
        for (k, c) in o.a {
            v = v.with_a(k, c);
        }
        v.x += o.x;
        v
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector {
            eps: self.eps.map(|c| -c),
            a: self.a.into_iter().map(|(k, c)| (k, -c)).collect(),
            x: -self.x,
        }
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        self + (-o)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(i64, String)> = Vec::new();
        if !self.x.is_zero() {
            if self.x.is_integer() {
                terms.push((*self.x.numer(), "x".into()));
            } else {
                terms.push((1, format!("({})x", self.x)));
            }
        }
        for (k, &c) in self.eps.iter().enumerate() {
            if c != 0 {
                terms.push((c, format!("ε{}", k + 1)));
            }
        }
        for &(k, c) in &self.a {
            terms.push((c, format!("a{}", k + 1)));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (c, name)) in terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if n == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "{name}")?;
        }
        Ok(())
    }
}

/// Numerical values of the generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Generators<S> {
    pub eps: [S; 3],
    pub a: Vec<S>,
}

impl<S: Scalar> Generators<S> {
    pub fn eps4(&self) -> S {
        -(self.eps[0].clone() + self.eps[1].clone() + self.eps[2].clone())
    }

    /// Largest generator magnitude, floored at 1; the resonance tolerance scale.
    pub fn scale(&self) -> f64 {
        self.eps.iter().chain(self.a.iter()).map(|v| v.magnitude()).fold(1.0, f64::max)
    }
}

/// ℤ-linear grading map to ℤ/mℤ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub modulus: i64,
    pub eps: [i64; 4],
    pub a: Vec<i64>,
    pub x: i64,
}

impl Grading {
    pub fn grade(&self, v: &LatticeVector) -> i64 {
        let mut g = 0i64;
        for k in 0..4 {
            g += v.eps[k] * self.eps[k];
        }
        for &(k, c) in v.a_coeffs() {
            g += c * self.a[k];
        }
        if !v.x.is_zero() {
            assert!(v.x.is_integer(), "grading needs an integral x coefficient");
            g += v.x.numer() * self.x;
        }
        g.rem_euclid(self.modulus)
    }
}
