//! θ-kernels for 4d/5d/6d measures, the odd Jacobi theta function and
//! Weierstrass ℘ on the lattice ℤ + τℤ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

/// Kernel selecting the rational (H), trigonometric (K) or elliptic (Ell) measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TheoryKind {
    /// θ(x) = x
    H,
    /// θ(x) = 1 − e^{−x}
    K,
    /// Triple product in the nome 𝔭; `n_max = None` picks the depth per argument.
    Ell { nome: C64, n_max: Option<usize> },
}

impl TheoryKind {
    pub fn ell(nome: C64) -> Result<Self> {
        if nome.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!("elliptic nome must satisfy |p| < 1, got {nome}")));
        }
        Ok(TheoryKind::Ell { nome, n_max: None })
    }

    pub fn label(&self) -> &'static str {
        match self {
            TheoryKind::H => "4d",
            TheoryKind::K => "5d",
            TheoryKind::Ell { .. } => "6d",
        }
    }
}

/// Product depth with |𝔭|^n < 1e−16 / (1 + |e^x|).
pub fn ell_depth(nome: C64, x: C64) -> usize {
    let p = nome.norm();
    if p == 0.0 {
        return 1;
    }
    let target = 1e-16 / (1.0 + x.re.exp());
    ((target.ln() / p.ln()).ceil() as usize).max(1)
}

pub fn theta<S: Scalar>(x: &S, kind: &TheoryKind) -> Result<S> {
    match kind {
        TheoryKind::H => Ok(x.clone()),
        TheoryKind::K => {
            let e = (-x.clone())
                .exp()
                .ok_or_else(|| Error::Unsupported("K-kind theta needs a floating-point mode".into()))?;
            Ok(S::one() - e)
        }
        TheoryKind::Ell { nome, n_max } => {
            let unsupported = || Error::Unsupported("Ell-kind theta needs a floating-point mode".into());
            let p = S::from_c64(*nome).ok_or_else(unsupported)?;
            let ex = x.exp().ok_or_else(unsupported)?;
            let emx = (-x.clone()).exp().ok_or_else(unsupported)?;
            let depth = n_max.unwrap_or_else(|| ell_depth(*nome, x.to_c64().unwrap_or_default()));
            let mut acc = S::one();
            let mut pn_1 = S::one(); // 𝔭^{n−1}
            for _ in 1..=depth {
                let pn = pn_1.clone() * p.clone();
                acc = acc
                    * (S::one() - pn.clone())
                    * (S::one() - pn_1.clone() * emx.clone())
                    * (S::one() - pn.clone() * ex.clone());
                pn_1 = pn;
            }
            Ok(acc)
        }
    }
}

fn check_tau(tau: C64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput(format!("Im tau must be positive, got {tau}")));
    }
    Ok(())
}

/// θ₁ and its first three z-derivatives from the q-series, q = e^{iπτ}.
/// Accurate for |Im z| ≲ Im τ; callers reduce z first.
fn theta1_series(z: C64, tau: C64) -> [C64; 4] {
    let i = C64::new(0.0, 1.0);
    let mut out = [C64::new(0.0, 0.0); 4];
    for n in 0..200usize {
        let k = n as f64 + 0.5;
        let qpow = (i * PI * tau * k * k).exp();
        let a = (2 * n + 1) as f64 * PI;
        let s = (a * z).sin();
        let c = (a * z).cos();
        let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
        let w = qpow * sign;
        // d^k sin(a z) = a^k sin(a z + kπ/2)
        let terms = [w * s, w * a * c, -(w * a * a * s), -(w * a * a * a * c)];
        for (o, t) in out.iter_mut().zip(terms) {
            *o += t;
        }
        if n > 2 && terms[3].norm() <= 1e-18 * out[1].norm().max(1e-300) * a * a {
            break;
        }
    }
    out
}

/// Split z = z₀ + m + nτ with |Im z₀| ≤ Im τ/2 and |Re z₀| ≤ 1/2 (roughly).
fn reduce(z: C64, tau: C64) -> (C64, i64, i64) {
    let n = (z.im / tau.im).round();
    let z1 = z - tau * n;
    let m = z1.re.round();
    (z1 - m, m as i64, n as i64)
}

/// Odd Jacobi theta θ₁(z|τ) = 2Σ(−1)ⁿ q^{(n+½)²} sin((2n+1)πz).
pub fn jacobi_theta_odd(z: C64, tau: C64) -> Result<C64> {
    check_tau(tau)?;
    let (z0, m, n) = reduce(z, tau);
    let base = theta1_series(z0, tau)[0];
    // θ₁(z₀ + m + nτ) = (−1)^{m+n} e^{−iπτn² − 2πinz₀} θ₁(z₀)
    let i = C64::new(0.0, 1.0);
    let nf = n as f64;
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(base * sign * (-i * PI * tau * nf * nf - 2.0 * i * PI * nf * z0).exp())
}

/// θ₁′(0|τ).
pub fn jacobi_theta_odd_prime0(tau: C64) -> Result<C64> {
    check_tau(tau)?;
    Ok(theta1_series(C64::new(0.0, 0.0), tau)[1])
}

/// Lattice ℤ + τℤ with its Weierstrass invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticCurve {
    pub tau: C64,
    pub g2: C64,
    pub g3: C64,
    /// ℘(1/2), ℘(τ/2), ℘((1+τ)/2)
    pub e: [C64; 3],
    theta_p0: C64,
    theta_ppp0: C64,
}

impl EllipticCurve {
    pub fn new(tau: C64) -> Result<Self> {
        check_tau(tau)?;
        let d0 = theta1_series(C64::new(0.0, 0.0), tau);
        let mut curve = EllipticCurve {
            tau,
            g2: C64::new(0.0, 0.0),
            g3: C64::new(0.0, 0.0),
            e: [C64::new(0.0, 0.0); 3],
            theta_p0: d0[1],
            theta_ppp0: d0[3],
        };
        let half = [C64::new(0.5, 0.0), tau * 0.5, (tau + 1.0) * 0.5];
        for (k, h) in half.iter().enumerate() {
            curve.e[k] = curve.wp(*h)?;
        }
        let [e1, e2, e3] = curve.e;
        curve.g2 = (e1 * e1 + e2 * e2 + e3 * e3) * 2.0;
        curve.g3 = e1 * e2 * e3 * 4.0;
        Ok(curve)
    }

    fn log_derivs(&self, z: C64) -> Result<(C64, C64, C64)> {
        let (z0, _, _) = reduce(z, self.tau);
        if z0.norm() < 1e-14 {
            return Err(Error::Pole(format!("z = {z} is a lattice point")));
        }
        let [t, t1, t2, t3] = theta1_series(z0, self.tau);
        let (a, b, c) = (t1 / t, t2 / t, t3 / t);
        Ok((a, b, c))
    }

    /// ℘(z), normalized with no constant term at z = 0.
    pub fn wp(&self, z: C64) -> Result<C64> {
        let (a, b, _) = self.log_derivs(z)?;
        Ok(a * a - b + self.theta_ppp0 / (self.theta_p0 * 3.0))
    }

    /// ℘′(z).
    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        let (a, b, c) = self.log_derivs(z)?;
        Ok(-(c - b * a * 3.0 + a * a * a * 2.0))
    }

    pub fn theta_prime0(&self) -> C64 {
        self.theta_p0
    }
}

pub fn weierstrass_p(z: C64, tau: C64) -> Result<(C64, C64)> {
    let c = EllipticCurve::new(tau)?;
    Ok((c.wp(z)?, c.wp_prime(z)?))
}
