//! Numeric scalar abstraction shared by every module.
//!
//! The same formulas run over exact rationals (`Q`), Gaussian rationals (`QI`),
//! exact rational functions of one variable (`RatFunc`) and complex doubles (`C64`).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type C64 = num_complex::Complex64;
/// Gaussian rationals, used for exact checks that need the imaginary unit.
pub type QI = Complex<BigRational>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn is_zero(&self) -> bool;

    /// Size used for resonance tests. Exact types only need zero vs nonzero.
    fn magnitude(&self) -> f64;

    fn to_c64(&self) -> Option<C64>;

    fn from_c64(_z: C64) -> Option<Self> {
        None
    }

    /// Complex exponential; unavailable in exact modes.
    fn exp(&self) -> Option<Self> {
        None
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_q(&Q::new(BigInt::from(n), BigInt::from(d)))
    }

    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Sum in the given order. Float types override with compensated summation.
    fn sum_all(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Self::zero(), |a, b| a + b)
    }
}

/// Scalars carrying an imaginary unit.
pub trait ComplexScalar: Scalar {
    fn i() -> Self;
    fn conj(&self) -> Self;
}

impl Scalar for Q {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_c64(&self) -> Option<C64> {
        self.to_f64().map(|r| C64::new(r, 0.0))
    }
    fn from_c64(z: C64) -> Option<Self> {
        if z.im == 0.0 {
            Q::from_float(z.re)
        } else {
            None
        }
    }
}

impl Scalar for QI {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        QI::new(<Q as Scalar>::from_i64(n), Zero::zero())
    }
    fn from_q(q: &Q) -> Self {
        QI::new(q.clone(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
    fn to_c64(&self) -> Option<C64> {
        Some(C64::new(self.re.to_f64()?, self.im.to_f64()?))
    }
    fn from_c64(z: C64) -> Option<Self> {
        Some(QI::new(Q::from_float(z.re)?, Q::from_float(z.im)?))
    }
}

impl ComplexScalar for QI {
    fn i() -> Self {
        QI::new(Zero::zero(), One::one())
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_q(q: &Q) -> Self {
        C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        C64::new(n as f64 / d as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Option<C64> {
        Some(*self)
    }
    fn from_c64(z: C64) -> Option<Self> {
        Some(z)
    }
    fn exp(&self) -> Option<Self> {
        Some(Complex::exp(*self))
    }
    fn powi(&self, n: i64) -> Self {
        Complex::powi(self, n as i32)
    }
    fn sum_all(terms: Vec<Self>) -> Self {
        let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
        for t in terms {
            re.add(t.re);
            im.add(t.im);
        }
        C64::new(re.total(), im.total())
    }
}

impl ComplexScalar for C64 {
    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Parse "p/q", "p" or a decimal literal into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Q::from_integer(n));
    }
    // Decimal literal, read exactly as written rather than via its binary double.
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    let mut v = Q::from_integer(digits) * <Q as Scalar>::powi(&ten, scale as i64);
    if neg {
        v = -v;
    }
    Some(v)
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(re: Q, im: Q) -> QI {
    QI::new(re, im)
}

/// Render an exact rational as "p/q" (or "p").
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/7"), Some(q(3, 7)));
        assert_eq!(parse_q("-2"), Some(q(-2, 1)));
        assert_eq!(parse_q("0.25"), Some(q(1, 4)));
        assert_eq!(parse_q("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_q("-1.5e2"), Some(q(-150, 1)));
        assert_eq!(parse_q("x"), None);
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn powi_exact() {
        assert_eq!(q(2, 3).powi(3), q(8, 27));
        assert_eq!(q(2, 3).powi(-2), q(9, 4));
        assert_eq!(q(5, 1).powi(0), q(1, 1));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let terms = vec![C64::new(1e16, 0.0), C64::new(1.0, 0.0), C64::new(-1e16, 0.0)];
        assert_eq!(C64::sum_all(terms).re, 1.0);
    }
}
