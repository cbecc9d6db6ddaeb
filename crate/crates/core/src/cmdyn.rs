//! Calogero–Moser dynamics: rational Lax pair, equations of motion for the
//! rational, trigonometric and elliptic potentials, fixed-step integration,
//! the moment-map matrix, the trigonometric gauge matrix E(x), Krichever's
//! elliptic Lax matrix and the N=2 elliptic invariants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{ComplexScalar, Q, QI, Scalar, C64};
use crate::specfun::{jacobi_theta_odd, EllipticCurve};

/// Positions, momenta and coupling; real states have zero imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<C64>,
    pub p: Vec<C64>,
    pub nu: C64,
}

impl PhasePoint {
    pub fn new(x: Vec<C64>, p: Vec<C64>, nu: C64) -> Result<Self> {
        if x.is_empty() || x.len() != p.len() {
            return Err(Error::InvalidInput(format!("need N ≥ 1 positions and momenta, got {} and {}", x.len(), p.len())));
        }
        Ok(PhasePoint { x, p, nu })
    }

    pub fn real(x: &[f64], p: &[f64], nu: f64) -> Result<Self> {
        Self::new(x.iter().map(|&v| C64::new(v, 0.0)).collect(), p.iter().map(|&v| C64::new(v, 0.0)).collect(), C64::new(nu, 0.0))
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CmKind {
    Rational,
    Trig,
    Elliptic { tau: C64 },
}

fn coincident(i: usize, j: usize, d: f64) -> Error {
    Error::Singular(format!("particles {} and {} are {d:e} apart", i + 1, j + 1))
}

fn pair_gap<S: Scalar>(x: &[S], eps_sep: f64) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = (x[i].clone() - x[j].clone()).magnitude();
            if d <= eps_sep {
                return Err(coincident(i, j, d));
            }
        }
    }
    Ok(())
}

/// L_ij = p_i δ_ij + (1−δ_ij) iν/(x_i−x_j); A_ij = (1−δ_ij) iν/(x_i−x_j)² − δ_ij Σ_{k≠i} iν/(x_i−x_k)².
pub fn rational_lax<S: ComplexScalar>(x: &[S], p: &[S], nu: &S) -> Result<(SquareMatrix<S>, SquareMatrix<S>)> {
    pair_gap(x, 0.0)?;
    let n = x.len();
    let inu = S::i() * nu.clone();
    let l = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            p[i].clone()
        } else {
            inu.clone() / (x[i].clone() - x[j].clone())
        }
    });
    let a = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            let terms = (0..n)
                .filter(|&k| k != i)
                .map(|k| {
                    let d = x[i].clone() - x[k].clone();
                    inu.clone() / (d.clone() * d)
                })
                .collect();
            -S::sum_all(terms)
        } else {
            let d = x[i].clone() - x[j].clone();
            inu.clone() / (d.clone() * d)
        }
    });
    Ok((l, a))
}

/// Time derivative (ẋ, ṗ) of a phase point.
pub struct Derivative {
    pub dx: Vec<C64>,
    pub dp: Vec<C64>,
}

/// Forces ṗ_i = −∂V/∂x_i for the chosen potential.
pub fn forces(x: &[C64], nu: C64, kind: &CmKind, curve: Option<&EllipticCurve>) -> Result<Vec<C64>> {
    let n = x.len();
    let nu2 = nu * nu;
    let mut f = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = x[i] - x[k];
            f[i] += match kind {
                CmKind::Rational => {
                    if d.norm() == 0.0 {
                        return Err(coincident(i, k, 0.0));
                    }
                    nu2 * 2.0 / (d * d * d)
                }
                CmKind::Trig => {
                    let s = (d * PI).sin();
                    if s.norm() < 1e-300 {
                        return Err(coincident(i, k, d.norm()));
                    }
                    nu2 * 0.25 * 2.0 * PI * (d * PI).cos() / (s * s * s)
                }
                CmKind::Elliptic { tau } => {
                    let owned;
                    let c = match curve {
                        Some(c) => c,
                        None => {
                            owned = EllipticCurve::new(*tau)?;
                            &owned
                        }
                    };
                    -nu2 * c.wp_prime(d).map_err(|_| coincident(i, k, d.norm()))?
                }
            };
        }
    }
    Ok(f)
}

/// ẋ_i = p_i, ṗ_i from [`forces`].
pub fn eom_rhs(s: &PhasePoint, kind: &CmKind) -> Result<Derivative> {
    let curve = elliptic_curve(kind)?;
    Ok(Derivative { dx: s.p.clone(), dp: forces(&s.x, s.nu, kind, curve.as_ref())? })
}

fn elliptic_curve(kind: &CmKind) -> Result<Option<EllipticCurve>> {
    match kind {
        CmKind::Elliptic { tau } => Ok(Some(EllipticCurve::new(*tau)?)),
        _ => Ok(None),
    }
}

/// Energy: Σp²/2 + ν² Σ_{i<j} V(x_i−x_j) with V = 1/x², sin^{−2}(πx)/4 or ℘(x).
pub fn energy(s: &PhasePoint, kind: &CmKind) -> Result<C64> {
    let curve = elliptic_curve(kind)?;
    let n = s.n();
    let mut h: C64 = s.p.iter().map(|p| p * p * 0.5).sum();
    let nu2 = s.nu * s.nu;
    for i in 0..n {
        for j in i + 1..n {
            let d = s.x[i] - s.x[j];
            h += nu2
                * match kind {
                    CmKind::Rational => 1.0 / (d * d),
                    CmKind::Trig => {
                        let sn = (d * PI).sin();
                        0.25 / (sn * sn)
                    }
                    CmKind::Elliptic { .. } => curve.as_ref().unwrap().wp(d)?,
                };
        }
    }
    Ok(h)
}

/// Σp_i²/2 + (ν²/4) Σ_{i<j} sin^{−2}(π(x_i−x_j)).
pub fn trig_hamiltonian(s: &PhasePoint) -> Result<C64> {
    for i in 0..s.n() {
        for j in i + 1..s.n() {
            let sn = ((s.x[i] - s.x[j]) * PI).sin();
            if sn.norm() < 1e-12 {
                return Err(Error::Resonance {
                    vector: format!("sin π(x{} − x{})", i + 1, j + 1),
                    magnitude: sn.norm(),
                });
            }
        }
    }
    energy(s, &CmKind::Trig)
}

/// H_k = Tr(L^k)/k, k = 1..k_max, from the rational Lax matrix.
pub fn hamiltonians(s: &PhasePoint, k_max: usize) -> Result<Vec<C64>> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let (l, _) = rational_lax(&s.x, &s.p, &s.nu)?;
    let mut out = Vec::with_capacity(k_max);
    let mut pow = l.clone();
    for k in 1..=k_max {
        out.push(pow.trace() / k as f64);
        pow = pow.mul(&l);
    }
    Ok(out)
}

/// ‖L̇ − [A, L]‖_F / max(‖L̇‖_F, ‖A‖_F‖L‖_F) with L̇ from the chain rule along the rational flow.
pub fn lax_residual(s: &PhasePoint) -> Result<f64> {
    let (l, a) = rational_lax(&s.x, &s.p, &s.nu)?;
    let d = eom_rhs(s, &CmKind::Rational)?;
    let n = s.n();
    let inu = C64::i() * s.nu;
    let ldot = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            d.dp[i]
        } else {
            let x = s.x[i] - s.x[j];
            -inu * (d.dx[i] - d.dx[j]) / (x * x)
        }
    });
    let r = ldot.sub(&a.commutator(&l)).frobenius();
    let scale = ldot.frobenius().max(a.frobenius() * l.frobenius());
    Ok(if scale == 0.0 { r } else { r / scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Rk4,
    Leapfrog,
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub scheme: Scheme,
    /// Abort when a pair distance drops to this value.
    pub eps_sep: f64,
    /// Keep every n-th step (the final state is always kept).
    pub record_every: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { scheme: Scheme::Rk4, eps_sep: 1e-8, record_every: 1 }
    }
}

/// Pair distance in the geometry of the potential (mod 1 for trig, mod the lattice for elliptic).
fn min_separation(x: &[C64], kind: &CmKind) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let mut d = x[i] - x[j];
            match kind {
                CmKind::Rational => {}
                CmKind::Trig => d.re -= d.re.round(),
                CmKind::Elliptic { tau } => {
                    let m = (d.im / tau.im).round();
                    d -= *tau * m;
                    d.re -= d.re.round();
                }
            }
            if d.norm() < best.2 {
                best = (i, j, d.norm());
            }
        }
    }
    best
}

/// A real rational pair whose ordering flipped within one step went through the singular point.
fn crossed(before: &[C64], after: &[C64], kind: &CmKind) -> Option<(usize, usize)> {
    if !matches!(kind, CmKind::Rational) || before.iter().chain(after).any(|v| v.im != 0.0) {
        return None;
    }
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            if (before[i].re - before[j].re).signum() != (after[i].re - after[j].re).signum() {
                return Some((i, j));
            }
        }
    }
    None
}

fn axpy(a: &[C64], h: f64, b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y * h).collect()
}

/// Fixed-step trajectory from t = 0 to t_end; returns (t, state) pairs.
pub fn integrate(s0: &PhasePoint, kind: &CmKind, t_end: f64, dt: f64, opts: &IntegrateOptions) -> Result<Vec<(f64, PhasePoint)>> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("need dt > 0 and t_end ≥ 0, got dt={dt}, t_end={t_end}")));
    }
    let curve = elliptic_curve(kind)?;
    let force = |x: &[C64]| forces(x, s0.nu, kind, curve.as_ref());
    let steps = (t_end / dt).round() as usize;
    let every = opts.record_every.max(1);
    let mut out = vec![(0.0, s0.clone())];
    let (mut x, mut p) = (s0.x.clone(), s0.p.clone());
    let mut f = force(&x)?;
    let mut prev_x = x.clone();
    for step in 1..=steps {
        match opts.scheme {
            Scheme::Rk4 => {
                let k1x = p.clone();
                let k1p = f.clone();
                let k2x = axpy(&p, dt / 2.0, &k1p);
                let k2p = force(&axpy(&x, dt / 2.0, &k1x))?;
                let k3x = axpy(&p, dt / 2.0, &k2p);
                let k3p = force(&axpy(&x, dt / 2.0, &k2x))?;
                let k4x = axpy(&p, dt, &k3p);
                let k4p = force(&axpy(&x, dt, &k3x))?;
                for i in 0..x.len() {
                    x[i] += (k1x[i] + k2x[i] * 2.0 + k3x[i] * 2.0 + k4x[i]) * (dt / 6.0);
                    p[i] += (k1p[i] + k2p[i] * 2.0 + k3p[i] * 2.0 + k4p[i]) * (dt / 6.0);
                }
                f = force(&x)?;
            }
            Scheme::Leapfrog => {
                let ph = axpy(&p, dt / 2.0, &f);
                x = axpy(&x, dt, &ph);
                f = force(&x)?;
                p = axpy(&ph, dt / 2.0, &f);
            }
        }
        let (i, j, d) = min_separation(&x, kind);
        if let Some((a, b)) = crossed(&prev_x, &x, kind) {
            return Err(Error::Singular(format!(
                "particles {} and {} passed through each other near t = {}; reduce dt",
                a + 1,
                b + 1,
                step as f64 * dt
            )));
        }
        prev_x.clone_from(&x);
        if d <= opts.eps_sep {
            return Err(Error::Singular(format!(
                "particles {} and {} collided ({d:e} apart) at t = {}",
                i + 1,
                j + 1,
                step as f64 * dt
            )));
        }
        if !x.iter().chain(&p).all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state at t = {}", step as f64 * dt)));
        }
        if step % every == 0 || step == steps {
            out.push((step as f64 * dt, PhasePoint { x: x.clone(), p: p.clone(), nu: s0.nu }));
        }
    }
    Ok(out)
}

/// Gauge-fixed solution of the moment-map constraint, exact in Gaussian rationals.
#[derive(Clone, Debug)]
pub struct MomentMap {
    pub p_matrix: SquareMatrix<QI>,
    /// z_i = √ν, principal positive root.
    pub z: Vec<f64>,
    /// μ = [P, X] + i(z z† − ν·1), with z z† = ν·(all ones) formed exactly.
    pub mu: SquareMatrix<QI>,
}

pub fn moment_map_matrix(x: &[Q], p: &[Q], nu: &Q) -> Result<MomentMap> {
    if *nu <= Q::zero() {
        return Err(Error::InvalidInput("ν must be positive".into()));
    }
    if x.len() != p.len() || x.is_empty() {
        return Err(Error::InvalidInput("need N ≥ 1 positions and momenta".into()));
    }
    let xs: Vec<QI> = x.iter().map(QI::from_q).collect();
    let ps: Vec<QI> = p.iter().map(QI::from_q).collect();
    let nuq = QI::from_q(nu);
    let (pm, _) = rational_lax(&xs, &ps, &nuq)?;
    let n = x.len();
    let xm = SquareMatrix::diag(&xs);
    let gram = SquareMatrix::from_fn(n, |_, _| nuq.clone());
    let mu = pm.commutator(&xm).add(&gram.sub(&SquareMatrix::identity(n).scale(&nuq)).scale(&QI::i()));
    let sq = nu.to_c64().unwrap().re.sqrt();
    Ok(MomentMap { p_matrix: pm, z: vec![sq; n], mu })
}

/// E_ii = p_i; E_ij(x) = iν e^{−πi x_ij} e^{i x_ij x} / (2 sin π x_ij).
pub fn trig_gauge_e(xg: f64, s: &PhasePoint) -> Result<SquareMatrix<C64>> {
    let n = s.n();
    let mut e = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            e[(i, j)] = if i == j {
                s.p[i]
            } else {
                let d = s.x[i] - s.x[j];
                let sn = (d * PI).sin();
                if sn.norm() < 1e-12 {
                    return Err(Error::Resonance { vector: format!("sin π(x{} − x{})", i + 1, j + 1), magnitude: sn.norm() });
                }
                C64::i() * s.nu * (-C64::i() * PI * d).exp() * (C64::i() * d * xg).exp() / (sn * 2.0)
            };
        }
    }
    Ok(e)
}

/// (1/2π)∫₀^{2π} ½Tr E(x)² dx by the composite trapezoid rule on `m` panels.
pub fn trig_hamiltonian_quadrature(s: &PhasePoint, m: usize) -> Result<C64> {
    let h = 2.0 * PI / m as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=m {
        let e = trig_gauge_e(k as f64 * h, s)?;
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        acc += e.mul(&e).trace() * 0.5 * w;
    }
    Ok(acc * h / (2.0 * PI))
}

/// L_ij(z) = ν θ₁′(0) θ₁(z + x_ij) / (θ₁(x_ij) θ₁(z)) off the diagonal, L_ii = p_i.
pub fn krichever_lax(z: C64, s: &PhasePoint, tau: C64) -> Result<SquareMatrix<C64>> {
    let curve = EllipticCurve::new(tau)?;
    let tz = jacobi_theta_odd(z, tau)?;
    if tz.norm() < 1e-14 {
        return Err(Error::Pole(format!("z = {z} is a lattice point")));
    }
    let tp = curve.theta_prime0();
    let n = s.n();
    let mut l = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = if i == j {
                s.p[i]
            } else {
                let d = s.x[i] - s.x[j];
                let td = jacobi_theta_odd(d, tau)?;
                if td.norm() < 1e-14 {
                    return Err(coincident(i, j, d.norm()));
                }
                s.nu * tp * jacobi_theta_odd(z + d, tau)? / (td * tz)
            };
        }
    }
    Ok(l)
}

/// Residuals of the three defining properties of the Krichever matrix at a sample z:
/// [z L_ij(z) → ν at z → 0, L(z+1) = L(z), L_ij(z+τ) = e^{−2πi x_ij} L_ij(z)], each relative.
pub fn krichever_constraints(z: C64, s: &PhasePoint, tau: C64) -> Result<[f64; 3]> {
    let n = s.n();
    // Richardson on h, h/2, h/4 removes the O(h) and O(h²) terms of h L(h).
    let h = C64::new(1e-3, 4e-4);
    let f = |t: C64| -> Result<SquareMatrix<C64>> { Ok(krichever_lax(t, s, tau)?.scale(&t)) };
    let (f1, f2, f4) = (f(h)?, f(h / 2.0)?, f(h / 4.0)?);
    let r1 = f2.scale(&C64::new(2.0, 0.0)).sub(&f1);
    let r2 = f4.scale(&C64::new(2.0, 0.0)).sub(&f2);
    let lim = r2.scale(&C64::new(4.0 / 3.0, 0.0)).sub(&r1.scale(&C64::new(1.0 / 3.0, 0.0)));
    let l0 = krichever_lax(z, s, tau)?;
    let l1 = krichever_lax(z + 1.0, s, tau)?;
    let lt = krichever_lax(z + tau, s, tau)?;
    let mut res = [0.0f64; 3];
    let nn = s.nu.norm().max(1e-300);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            res[0] = res[0].max((lim[(i, j)] - s.nu).norm() / nn);
            let sc = l0[(i, j)].norm().max(1e-300);
            res[1] = res[1].max((l1[(i, j)] - l0[(i, j)]).norm() / sc);
            let mult = (-C64::i() * 2.0 * PI * (s.x[i] - s.x[j])).exp();
            res[2] = res[2].max((lt[(i, j)] - mult * l0[(i, j)]).norm() / (mult * l0[(i, j)]).norm().max(1e-300));
        }
    }
    Ok(res)
}

/// A = ℘(x), B = p℘′(x)/(2ν), u = p²/ν + ℘(x) for the relative coordinate of N=2.
pub fn ecm_n2_invariants(x: C64, p: C64, nu: C64, tau: C64) -> Result<(C64, C64, C64)> {
    let c = EllipticCurve::new(tau)?;
    let a = c.wp(x)?;
    let b = p * c.wp_prime(x)? / (nu * 2.0);
    Ok((a, b, p * p / nu + a))
}

/// |B² − (u−A)(A−e₁)(A−e₂)(A−e₃)| relative to |B²| + 1.
pub fn ecm_n2_relation_residual(x: C64, p: C64, nu: C64, tau: C64) -> Result<f64> {
    let c = EllipticCurve::new(tau)?;
    let (a, b, u) = ecm_n2_invariants(x, p, nu, tau)?;
    let rhs = (u - a) * (a - c.e[0]) * (a - c.e[1]) * (a - c.e[2]);
    Ok((b * b - rhs).norm() / (1.0 + (b * b).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn lax_examples() {
        let s = PhasePoint::real(&[0.0], &[3.0], 1.0).unwrap();
        let (l, a) = rational_lax(&s.x, &s.p, &s.nu).unwrap();
        assert_eq!(l[(0, 0)], c(3.0, 0.0));
        assert_eq!(a[(0, 0)], c(0.0, 0.0));

        let s = PhasePoint::real(&[-1.0, 1.0], &[0.0, 0.0], 1.0).unwrap();
        let (l, _) = rational_lax(&s.x, &s.p, &s.nu).unwrap();
        assert!(close(l[(0, 1)], c(0.0, -0.5), 1e-15));
        assert!(close(l[(1, 0)], c(0.0, 0.5), 1e-15));
        let h = hamiltonians(&s, 2).unwrap();
        assert!(close(h[0], c(0.0, 0.0), 1e-15));
        assert!(close(h[1], c(0.25, 0.0), 1e-15));
        assert!(close(energy(&s, &CmKind::Rational).unwrap(), c(0.25, 0.0), 1e-15));

        let d = eom_rhs(&s, &CmKind::Rational).unwrap();
        // 2ν²(x₁−x₂)^{−3} = −1/4, the gradient of ν²/(x₁−x₂)².
        assert!(close(d.dp[0], c(-0.25, 0.0), 1e-15));
        assert!(close(d.dp[1], c(0.25, 0.0), 1e-15));
        assert!(matches!(rational_lax(&[c(1.0, 0.0), c(1.0, 0.0)], &s.p, &s.nu), Err(Error::Singular(_))));

        let one = PhasePoint::real(&[0.3], &[2.0], 1.5).unwrap();
        let hk = hamiltonians(&one, 3).unwrap();
        for (k, v) in hk.iter().enumerate() {
            assert!(close(*v, c(2f64.powi(k as i32 + 1) / (k + 1) as f64, 0.0), 1e-14));
        }
        assert_eq!(lax_residual(&one).unwrap(), 0.0);
    }

    #[test]
    fn free_particle() {
        let s = PhasePoint::real(&[0.5], &[2.0], 1.0).unwrap();
        for kind in [CmKind::Rational, CmKind::Trig, CmKind::Elliptic { tau: c(0.0, 1.0) }] {
            let d = eom_rhs(&s, &kind).unwrap();
            assert_eq!(d.dp[0], c(0.0, 0.0));
        }
        let tr = integrate(&s, &CmKind::Rational, 1.0, 1e-2, &IntegrateOptions::default()).unwrap();
        assert!((tr.last().unwrap().1.x[0] - c(2.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn symmetric_pair_keeps_center_of_mass() {
        let s = PhasePoint::real(&[-1.0, 1.0], &[0.3, -0.3], 1.0).unwrap();
        for scheme in [Scheme::Rk4, Scheme::Leapfrog] {
            let opts = IntegrateOptions { scheme, record_every: 100, ..Default::default() };
            for (_, st) in integrate(&s, &CmKind::Rational, 2.0, 1e-3, &opts).unwrap() {
                assert!((st.x[0] + st.x[1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rational_integrals_and_spectrum_conserved() {
        let s = PhasePoint::real(&[-1.3, 0.2, 1.9], &[0.4, -0.25, 0.1], 0.9).unwrap();
        let h0 = hamiltonians(&s, 3).unwrap();
        let spec = |st: &PhasePoint| {
            let mut e = rational_lax(&st.x, &st.p, &st.nu).unwrap().0.eigenvalues();
            crate::linalg::sort_complex(&mut e);
            e
        };
        let e0 = spec(&s);
        let opts = IntegrateOptions { record_every: 1000, ..Default::default() };
        for (_, st) in integrate(&s, &CmKind::Rational, 10.0, 1e-3, &opts).unwrap() {
            let h = hamiltonians(&st, 3).unwrap();
            for k in 0..3 {
                assert!((h[k] - h0[k]).norm() <= 1e-8 * h0[k].norm(), "H_{}", k + 1);
            }
            for (a, b) in spec(&st).iter().zip(&e0) {
                assert!((a - b).norm() <= 1e-7 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn collisions_are_reported() {
        // Attractive coupling (ν imaginary) drives the pair together.
        let s = PhasePoint::new(vec![c(-0.05, 0.0), c(0.05, 0.0)], vec![c(0.0, 0.0); 2], c(0.0, 1.0)).unwrap();
        let r = integrate(&s, &CmKind::Rational, 1.0, 1e-3, &IntegrateOptions { eps_sep: 1e-2, ..Default::default() });
        assert!(matches!(r, Err(Error::Singular(_))), "{r:?}");
    }

    #[test]
    fn trig_and_elliptic_energy_conserved() {
        let s = PhasePoint::real(&[0.1, 0.45, 0.8], &[0.2, -0.1, 0.05], 0.7).unwrap();
        for kind in [CmKind::Trig, CmKind::Elliptic { tau: c(0.1, 1.1) }] {
            let h0 = energy(&s, &kind).unwrap();
            let tr = integrate(&s, &kind, 5.0, 1e-3, &IntegrateOptions { record_every: 500, ..Default::default() }).unwrap();
            for (_, st) in &tr {
                let h = energy(st, &kind).unwrap();
                assert!((h - h0).norm() <= 1e-7 * h0.norm(), "{kind:?}: {h} vs {h0}");
            }
        }
    }

    #[test]
    fn moment_map_examples() {
        let m = moment_map_matrix(&[q(0, 1)], &[q(3, 2)], &q(2, 1)).unwrap();
        assert!(m.mu.is_zero());
        assert!((m.z[0] - 2f64.sqrt()).abs() < 1e-15);
        let m = moment_map_matrix(&[q(0, 1), q(1, 1)], &[q(0, 1), q(0, 1)], &q(2, 1)).unwrap();
        assert_eq!(m.p_matrix[(0, 1)], QI::new(q(0, 1), q(-2, 1)));
        assert_eq!(m.p_matrix[(1, 0)], QI::new(q(0, 1), q(2, 1)));
        assert!(m.mu.is_zero());
        assert!(moment_map_matrix(&[q(0, 1)], &[q(0, 1)], &q(-1, 1)).is_err());
    }

    #[test]
    fn trig_gauge_examples() {
        let s = PhasePoint::real(&[0.13, 0.52, 0.77], &[0.4, -0.2, 1.1], 1.3).unwrap();
        let e0 = trig_gauge_e(0.0, &s).unwrap();
        let e2 = trig_gauge_e(2.0 * PI, &s).unwrap();
        for i in 0..3 {
            assert_eq!(e0[(i, i)], s.p[i]);
            for j in 0..3 {
                if i != j {
                    assert!((e0[(i, j)] - e2[(i, j)] - s.nu).norm() < 1e-10);
                }
            }
        }
        // ∂_x E_ij = i x_ij E_ij by central differences.
        let (xg, h) = (1.7, 1e-5);
        let (ep, em, e) = (trig_gauge_e(xg + h, &s).unwrap(), trig_gauge_e(xg - h, &s).unwrap(), trig_gauge_e(xg, &s).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let fd = (ep[(i, j)] - em[(i, j)]) / (2.0 * h);
                assert!((fd - C64::i() * (s.x[i] - s.x[j]) * e[(i, j)]).norm() < 1e-8);
            }
        }
        let two = PhasePoint::real(&[0.0, 0.5], &[0.0, 0.0], 2.0).unwrap();
        assert!(close(trig_hamiltonian(&two).unwrap(), c(1.0, 0.0), 1e-14));
        let h = trig_hamiltonian(&s).unwrap();
        assert!(close(trig_hamiltonian_quadrature(&s, 64).unwrap(), h, 1e-6));
    }

    #[test]
    fn krichever_examples() {
        let s = PhasePoint::new(vec![c(0.1, 0.05), c(0.42, -0.1), c(-0.3, 0.2)], vec![c(0.5, 0.0), c(-0.2, 0.1), c(0.3, 0.0)], c(0.8, 0.0))
            .unwrap();
        let tau = c(0.2, 1.1);
        let l = krichever_lax(c(0.31, 0.17), &s, tau).unwrap();
        for i in 0..3 {
            assert_eq!(l[(i, i)], s.p[i]);
        }
        let r = krichever_constraints(c(0.31, 0.17), &s, tau).unwrap();
        assert!(r.iter().all(|&v| v <= 1e-9), "{r:?}");
        assert!(krichever_lax(c(1.0, 0.0), &s, tau).is_err());
    }

    #[test]
    fn ecm_examples() {
        let tau = c(0.0, 1.0);
        let (a, b, u) = ecm_n2_invariants(c(0.3, 0.2), c(0.0, 0.0), c(1.0, 0.0), tau).unwrap();
        assert_eq!(b, c(0.0, 0.0));
        assert_eq!(u, a);
        let (a1, b1, u1) = ecm_n2_invariants(c(0.3, 0.2), c(0.7, -0.1), c(1.0, 0.0), tau).unwrap();
        let (a2, b2, u2) = ecm_n2_invariants(c(0.3, 0.2), c(-0.7, 0.1), c(1.0, 0.0), tau).unwrap();
        assert_eq!((a1, u1), (a2, u2));
        assert!(close(b1, -b2, 1e-15));
        assert!(ecm_n2_relation_residual(c(0.3, 0.2), c(0.7, -0.1), c(1.0, 0.0), tau).unwrap() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn lax_equation_and_momentum_balance(n in 2usize..6, seed in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -1.0f64..1.0, -1.0f64..1.0), 5),
                                            nu in 0.2f64..2.0) {
            let x: Vec<C64> = (0..n).map(|i| c(seed[i].0 + 7.0 * i as f64, seed[i].2)).collect();
            let p: Vec<C64> = (0..n).map(|i| c(seed[i].1, seed[i].3)).collect();
            let s = PhasePoint::new(x, p, c(nu, 0.0)).unwrap();
            prop_assert!(lax_residual(&s).unwrap() <= 1e-12);
            let d = eom_rhs(&s, &CmKind::Rational).unwrap();
            let total: C64 = d.dp.iter().sum();
            prop_assert!(total.norm() <= 1e-12 * d.dp.iter().map(|v| v.norm()).fold(1.0, f64::max));
            let h = hamiltonians(&s, 1).unwrap();
            prop_assert!((h[0] - s.p.iter().sum::<C64>()).norm() <= 1e-12);
        }

        #[test]
        fn moment_map_vanishes_exactly(n in 1usize..6, xs in prop::collection::vec((-50i64..50, 1i64..9), 5),
                                       ps in prop::collection::vec((-50i64..50, 1i64..9), 5), nu in (1i64..20, 1i64..7)) {
            let x: Vec<Q> = (0..n).map(|i| q(xs[i].0, xs[i].1) + q(101 * i as i64, 1)).collect();
            let p: Vec<Q> = (0..n).map(|i| q(ps[i].0, ps[i].1)).collect();
            let m = moment_map_matrix(&x, &p, &q(nu.0, nu.1)).unwrap();
            prop_assert!(m.mu.is_zero());
        }

        #[test]
        fn ecm_relation(re in -0.45f64..0.45, im in 0.05f64..0.45, pr in -2.0f64..2.0, pi in -2.0f64..2.0) {
            prop_assert!(ecm_n2_relation_residual(c(re, im), c(pr, pi), c(1.0, 0.0), c(0.0, 1.0)).unwrap() <= 1e-9);
        }
    }
}
