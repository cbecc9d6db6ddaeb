//! Pole cancellation and polynomiality of normalized qq-character expectations.
//!
//! The exact path carries x as a rational function and takes partial-fraction
//! residues; the float path samples circles around each candidate pole.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Generators;
use crate::nekrasov::ParamSet;
use crate::partitions::multipartitions_up_to;
use crate::poly::{Poly, RatFunc};
use crate::scalar::{fmt_q, Q, Scalar, C64};
use crate::series::QSeries;
use crate::specfun::TheoryKind;

use super::ar::{ar_expectation, ar_leading_series, node_configurations, ArParams};
use super::{c12, eps12, expectation, qq_leading_series, QqObs, QqWeight, YObs};

#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub candidate_poles: Vec<String>,
    /// Largest |residue| over all candidates and orders.
    pub max_residue: f64,
    /// Exact mode: every residue is exactly zero.
    pub exact_zero: Option<bool>,
    /// Exact mode: x-degree of the reduced denominator per order.
    pub denominator_degrees: Vec<usize>,
    /// Fit of a degree-N polynomial through N+1 samples, checked at one more point (max over orders).
    pub polynomial_fit_residual: f64,
    /// The x^N coefficient matches the closed-form leading series at every order.
    pub leading_coefficient_ok: bool,
}

/// Candidate poles x₀ = a_α + c₁₂(□), □ ∈ ∂₋λ^{(α)}, over configurations up to order K.
fn a0hat_candidates<S: Scalar>(p: &ParamSet<S>, order: usize) -> Vec<S> {
    let g = p.generators();
    let mut out: Vec<S> = Vec::new();
    for mp in multipartitions_up_to(p.n(), order) {
        for (alpha, lam) in mp.entries().iter().enumerate() {
            for b in lam.inner_boundary() {
                out.push(p.a[alpha].clone() + c12(b).eval(&g, None));
            }
        }
    }
    dedup(out)
}

fn dedup<S: Scalar>(v: Vec<S>) -> Vec<S> {
    let mut out: Vec<S> = Vec::new();
    for x in v {
        if !out.iter().any(|y| (y.clone() - x.clone()).magnitude() <= if S::EXACT { 0.0 } else { 1e-13 }) {
            out.push(x);
        }
    }
    out
}

/// Residues, denominators, degree-N fit and leading coefficient of an exact x-dependent series.
fn analyze_exact(series: &QSeries<RatFunc>, candidates: &[Q], n: usize, leading: &QSeries<Q>) -> PoleReport {
    let mut max_res = 0.0f64;
    let mut all_zero = true;
    let mut dens = Vec::new();
    let mut fit = 0.0f64;
    let mut lead_ok = true;
    for c in series.coeffs() {
        for x0 in candidates {
            let r = c.residue(x0);
            if !r.is_zero() {
                all_zero = false;
                max_res = max_res.max(r.magnitude());
            }
        }
        dens.push(c.den().degree().unwrap_or(0));
        fit = fit.max(exact_fit_residual(c, n));
    }
    for (k, c) in series.coeffs().iter().enumerate() {
        let top = if c.is_polynomial() { c.num().coeff(n) } else { Q::zero() };
        let deg_ok = c.is_polynomial() && c.num().degree().unwrap_or(0) <= n;
        if !deg_ok || top != *leading.coeff(k) {
            lead_ok = false;
        }
    }
    PoleReport {
        candidate_poles: candidates.iter().map(fmt_q).collect(),
        max_residue: max_res,
        exact_zero: Some(all_zero),
        denominator_degrees: dens,
        polynomial_fit_residual: fit,
        leading_coefficient_ok: lead_ok,
    }
}

/// |c(x_{N+2}) − P(x_{N+2})| for P interpolating c at N+1 regular sample points.
fn exact_fit_residual(c: &RatFunc, n: usize) -> f64 {
    let mut pts: Vec<(Q, Q)> = Vec::new();
    let mut j = 0i64;
    while pts.len() < n + 2 {
        let x = Q::new((7 * j + 2).into(), 3.into());
        if let Some(v) = c.eval(&x) {
            pts.push((x, v));
        }
        j += 1;
    }
    let last = pts.pop().unwrap();
    let interp = Poly::interpolate(&pts);
    (interp.eval(&last.0) - last.1).magnitude()
}

fn require_h<S>(kind: &TheoryKind) -> Result<()> {
    if *kind != TheoryKind::H {
        return Err(Error::Unsupported("exact residues are defined for the H kind".into()));
    }
    Ok(())
}

/// Exact residue check of ⟨𝔛(x)⟩ through order K.
///
/// `k_inner = Some(0)` gives the negative control ⟨Y(x+ε₁+ε₂)⟩, whose poles sit at the same candidates.
pub fn pole_residue_check(p: &ParamSet<Q>, order: usize, k_inner: Option<usize>, weight: QqWeight) -> Result<PoleReport> {
    require_h::<Q>(&p.kind)?;
    let pr = p.map(RatFunc::from_q);
    let series = expectation(&QqObs { k_inner, weight }, &pr, order, &RatFunc::x())?;
    let leading = qq_leading_series(p, k_inner.unwrap_or(order).min(order), weight)?.resize(order);
    Ok(analyze_exact(&series, &a0hat_candidates(p, order), p.n(), &leading))
}

/// Exact residues of ⟨Y(x)⟩ at its own poles a_α + c₁₂(□) + ε₁ + ε₂.
pub fn y_residue_check(p: &ParamSet<Q>, order: usize) -> Result<PoleReport> {
    require_h::<Q>(&p.kind)?;
    let pr = p.map(RatFunc::from_q);
    let series = expectation(&YObs { shift: crate::lattice::LatticeVector::zero() }, &pr, order, &RatFunc::x())?;
    let e12 = eps12().eval(&p.generators(), None);
    let cands: Vec<Q> = a0hat_candidates(p, order).into_iter().map(|c| c + &e12).collect();
    Ok(analyze_exact(&series, &cands, p.n(), &QSeries::one(order)))
}

/// Trapezoidal contour residue of f around x₀ on a circle of radius ρ.
fn circle_residue(f: &dyn Fn(C64) -> Result<Vec<C64>>, x0: C64, rho: f64, m: usize, orders: usize) -> Result<Vec<C64>> {
    let mut acc = vec![C64::new(0.0, 0.0); orders];
    for j in 0..m {
        let w = C64::from_polar(rho, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64);
        let v = f(x0 + w)?;
        for (a, vk) in acc.iter_mut().zip(v) {
            *a += vk * w;
        }
    }
    Ok(acc.into_iter().map(|a| a / m as f64).collect())
}

fn complex_lagrange(pts: &[(C64, C64)], x: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (k, (xk, yk)) in pts.iter().enumerate() {
        let mut b = *yk;
        for (m, (xm, _)) in pts.iter().enumerate() {
            if m != k {
                b *= (x - xm) / (xk - xm);
            }
        }
        acc += b;
    }
    acc
}

/// Float residue check: circle sampling at radii 1e−2, 1e−3, 1e−4 with a
/// Richardson step on the last two radii.
pub fn pole_residue_check_float(
    p: &ParamSet<C64>,
    order: usize,
    k_inner: Option<usize>,
    weight: QqWeight,
) -> Result<PoleReport> {
    let obs = QqObs { k_inner, weight };
    let f = |x: C64| -> Result<Vec<C64>> { Ok(expectation(&obs, p, order, &x)?.into_coeffs()) };
    let cands = a0hat_candidates(p, order);
    let radii = [1e-2, 1e-3, 1e-4];
    let mut max_res = 0.0f64;
    for x0 in &cands {
        let est: Vec<Vec<C64>> =
            radii.iter().map(|&r| circle_residue(&f, *x0, r, 16, order + 1)).collect::<Result<_>>()?;
        let (r1, r2) = (radii[1], radii[2]);
        for k in 0..=order {
            let e = est[2][k] + (est[2][k] - est[1][k]) * (r2 / (r1 - r2));
            max_res = max_res.max(e.norm());
        }
    }
    // Degree-N fit on a spread of points away from the candidates.
    let n = p.n();
    let scale = p.generators().scale();
    let pts: Vec<C64> = (0..n + 2).map(|j| C64::new(0.37 + 0.91 * j as f64, 0.23 + 0.1 * j as f64) * scale).collect();
    let vals: Vec<Vec<C64>> = pts.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let leading = qq_leading_series(p, k_inner.unwrap_or(order).min(order), weight)?.resize(order);
    let mut fit = 0.0f64;
    let mut lead_ok = true;
    for k in 0..=order {
        let sample: Vec<(C64, C64)> = pts[..=n].iter().zip(&vals[..=n]).map(|(x, v)| (*x, v[k])).collect();
        let pred = complex_lagrange(&sample, pts[n + 1]);
        let actual = vals[n + 1][k];
        fit = fit.max((pred - actual).norm() / (1.0 + actual.norm()));
        // Leading coefficient via the N-th divided difference.
        let mut dd: Vec<C64> = sample.iter().map(|s| s.1).collect();
        for level in 1..=n {
            for i in (level..=n).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (pts[i] - pts[i - level]);
            }
        }
        if (dd[n] - leading.coeff(k)).norm() > 1e-8 * (1.0 + leading.coeff(k).norm()) {
            lead_ok = false;
        }
    }
    Ok(PoleReport {
        candidate_poles: cands.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect(),
        max_residue: max_res,
        exact_zero: None,
        denominator_degrees: Vec::new(),
        polynomial_fit_residual: fit,
        leading_coefficient_ok: lead_ok,
    })
}

/// Candidate poles of the A_r characters: zeros and poles of every Y_s over the shifts ε₁₂·m that occur.
fn ar_candidates(p: &ArParams<Q>, order: usize, l: usize) -> Vec<Q> {
    let g: Generators<Q> = p.generators();
    let e12 = eps12().eval(&g, None);
    let r = p.r();
    let mut set: BTreeSet<Q> = BTreeSet::new();
    let shifts: Vec<i64> = (-(l as i64) - 1..=l as i64 + 1).collect();
    let mut add = |base: Q| {
        for m in &shifts {
            set.insert(&base + &e12 * Q::from_integer((*m).into()));
        }
    };
    for s in [0, r + 1] {
        for a in &p.a[s] {
            add(a.clone());
        }
    }
    for k in 0..=order {
        for mps in node_configurations(r, p.n(), k) {
            for (s0, m) in mps.iter().enumerate() {
                for (alpha, lam) in m.entries().iter().enumerate() {
                    let a = &p.a[s0 + 1][alpha];
                    for b in lam.outer_boundary().into_iter().chain(lam.inner_boundary()) {
                        add(a + c12(b).eval(&g, None));
                    }
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Exact pole and degree-N polynomiality check of ⟨𝔛_l(x)⟩ through order t^K.
pub fn ar_expectation_pole_check(p: &ArParams<Q>, order: usize, l: usize) -> Result<PoleReport> {
    require_h::<Q>(&p.kind)?;
    let pr = p.map(RatFunc::from_q);
    let series = ar_expectation(l, &pr, order, &RatFunc::x())?;
    let leading = ar_leading_series(l, p, order)?;
    Ok(analyze_exact(&series, &ar_candidates(p, order, l), p.n(), &leading))
}
