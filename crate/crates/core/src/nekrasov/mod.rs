//! Measures on multipartitions for the Â₀ theory, the instanton partition
//! function and its oracles.

mod orbifold;

pub use orbifold::{
    column_color_counts, defect_density, orbifold_fiber, orbifold_measure, pi_map, Coloring,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Generators, Grading, LatticeVector};
use crate::partitions::{enumerate_multipartitions, MultiPartition, Partition};
use crate::scalar::Scalar;
use crate::series::QSeries;
use crate::specfun::{theta, TheoryKind};

/// Coulomb moduli, Ω-background and fugacity. ε₄ is always derived.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<S> {
    pub a: Vec<S>,
    pub eps: [S; 3],
    pub q: S,
    pub kind: TheoryKind,
}

impl<S: Scalar> ParamSet<S> {
    pub fn new(a: Vec<S>, eps: [S; 3], q: S, kind: TheoryKind) -> Self {
        ParamSet { a, eps, q, kind }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn eps4(&self) -> S {
        -(self.eps[0].clone() + self.eps[1].clone() + self.eps[2].clone())
    }

    pub fn generators(&self) -> Generators<S> {
        Generators { eps: self.eps.clone(), a: self.a.clone() }
    }

    /// Fails unless Σ a_α = 0 (for callers that want the SU(N) slice).
    pub fn check_traceless(&self) -> Result<()> {
        let s = S::sum_all(self.a.clone());
        if s.magnitude() > if S::EXACT { 0.0 } else { 1e-12 * self.generators().scale() } {
            return Err(Error::InvalidInput("moduli do not sum to zero".into()));
        }
        Ok(())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ParamSet<T> {
        ParamSet {
            a: self.a.iter().map(&f).collect(),
            eps: [f(&self.eps[0]), f(&self.eps[1]), f(&self.eps[2])],
            q: f(&self.q),
            kind: self.kind,
        }
    }

    pub fn with_eps(&self, eps: [S; 3]) -> Self {
        ParamSet { eps, ..self.clone() }
    }
}

/// One θ-ratio factor; either side may be absent (θ^δ truncation).
#[derive(Clone, Debug)]
pub(crate) struct Factor {
    pub num: Option<LatticeVector>,
    pub den: Option<LatticeVector>,
}

/// Resonance test for a denominator value.
pub(crate) fn resonant<S: Scalar>(v: &S, scale: f64) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.magnitude() < 1e-12 * scale
    }
}

pub(crate) fn eval_factors<S: Scalar>(
    factors: &[Factor],
    g: &Generators<S>,
    kind: &TheoryKind,
    x: Option<&S>,
) -> Result<S> {
    let scale = g.scale();
    let mut acc = S::one();
    for f in factors {
        let mut r = match &f.num {
            Some(v) => theta(&v.eval(g, x), kind)?,
            None => S::one(),
        };
        if let Some(v) = &f.den {
            let d = theta(&v.eval(g, x), kind)?;
            if resonant(&d, scale) {
                return Err(Error::Resonance { vector: v.to_string(), magnitude: d.magnitude() });
            }
            r = r / d;
        }
        acc = acc * r;
    }
    Ok(acc)
}

/// Box coefficients (c₁, c₂) of ε₁, ε₂ for the ordered color pair (α, β):
/// first the boxes of λ^{(β)}, then those of λ^{(α)}.
pub(crate) fn pair_coefficients(la: &Partition, lb: &Partition) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(la.size() + lb.size());
    for b in lb.boxes() {
        let (i, j) = (b.i as i64, b.j as i64);
        out.push((i - lb.col(b.j) as i64, 1 + la.row(b.i) as i64 - j));
    }
    for b in la.boxes() {
        let (i, j) = (b.i as i64, b.j as i64);
        out.push((la.col(b.j) as i64 + 1 - i, j - lb.row(b.i) as i64));
    }
    out
}

/// θ arguments of the Â₀ measure, `(argument, shift ε₃)` per box pair.
pub(crate) fn a0hat_arguments(mp: &MultiPartition) -> Vec<LatticeVector> {
    let n = mp.n_colors();
    let mut out = Vec::new();
    for alpha in 0..n {
        for beta in 0..n {
            for (c1, c2) in pair_coefficients(mp.color(alpha), mp.color(beta)) {
                out.push(LatticeVector::eps([c1, c2, 0, 0]) + LatticeVector::a_diff(alpha, beta));
            }
        }
    }
    out
}

pub(crate) fn eps3() -> LatticeVector {
    LatticeVector::eps([0, 0, 1, 0])
}

/// Factors of the Â₀ measure, optionally θ^δ-truncated by a grading.
pub(crate) fn a0hat_factors(mp: &MultiPartition, grading: Option<&Grading>) -> Vec<Factor> {
    a0hat_arguments(mp)
        .into_iter()
        .map(|v| {
            let num = v.clone() + eps3();
            match grading {
                None => Factor { num: Some(num), den: Some(v) },
                Some(gr) => Factor {
                    num: (gr.grade(&num) == 0).then_some(num),
                    den: (gr.grade(&v) == 0).then_some(v),
                },
            }
        })
        .collect()
}

/// μ_λ of the Â₀ theory (no fugacity factor).
pub fn measure_a0hat<S: Scalar>(mp: &MultiPartition, p: &ParamSet<S>) -> Result<S> {
    if mp.n_colors() != p.n() {
        return Err(Error::InvalidInput(format!(
            "multipartition has {} colors, parameters have {}",
            mp.n_colors(),
            p.n()
        )));
    }
    eval_factors(&a0hat_factors(mp, None), &p.generators(), &p.kind, None)
}

/// Evaluate `f` on every N-tuple of size k, in canonical order, in parallel.
pub(crate) fn map_multipartitions<S: Scalar, F>(n: usize, k: usize, f: F) -> Result<Vec<(MultiPartition, S)>>
where
    F: Fn(&MultiPartition) -> Result<S> + Sync,
{
    let mps = enumerate_multipartitions(n, k);
    let vals: Vec<Result<S>> = mps.par_iter().map(&f).collect();
    mps.into_iter().zip(vals).map(|(m, v)| v.map(|v| (m, v))).collect()
}

/// Z^inst to order 𝔮^K as a series (coefficients independent of the value of 𝔮).
pub fn z_inst<S: Scalar>(p: &ParamSet<S>, order: usize) -> Result<QSeries<S>> {
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let terms = map_multipartitions(p.n(), k, |mp| measure_a0hat(mp, p))?;
        coeffs.push(S::sum_all(terms.into_iter().map(|(_, v)| v).collect()));
    }
    Ok(QSeries::new(coeffs))
}

fn require_h<S>(p: &ParamSet<S>) -> Result<()> {
    if p.kind != TheoryKind::H {
        return Err(Error::Unsupported("closed forms are stated for the H kind only".into()));
    }
    Ok(())
}

fn ratio<S: Scalar>(num: S, den: S, what: &str) -> Result<S> {
    if resonant(&den, 1.0) {
        return Err(Error::Resonance { vector: what.to_string(), magnitude: den.magnitude() });
    }
    Ok(num / den)
}

/// One-instanton coefficient as the sum over the single-box configurations.
pub fn z1_closed_form<S: Scalar>(p: &ParamSet<S>) -> Result<S> {
    require_h(p)?;
    let [e1, e2, e3] = p.eps.clone();
    let n = p.n();
    let a = |i: usize, j: usize| p.a[i].clone() - p.a[j].clone();
    let pre = ratio(
        (e3.clone() + e2.clone()) * (e3.clone() + e1.clone()),
        e2.clone() * e1.clone(),
        "ε2ε1",
    )?;
    let mut terms = Vec::new();
    for al in 0..n {
        let mut t = pre.clone();
        for b in (0..n).filter(|&b| b != al) {
            let num = (e3.clone() + a(b, al)) * (e3.clone() + e1.clone() + e2.clone() + a(al, b));
            let den = a(b, al) * (e1.clone() + e2.clone() + a(al, b));
            t = t * ratio(num, den, "a_βα(ε1 + ε2 + a_αβ)")?;
        }
        terms.push(t);
    }
    Ok(S::sum_all(terms))
}

/// Two-instanton coefficient from the column, row and two-box product formulas.
pub fn z2_closed_form<S: Scalar>(p: &ParamSet<S>) -> Result<S> {
    require_h(p)?;
    let [e1, e2, e3] = p.eps.clone();
    let n = p.n();
    let a = |i: usize, j: usize| p.a[i].clone() - p.a[j].clone();
    let two = S::from_i64(2);

    // Column (1,1) and row (2) at color α; `f`/`s` are the first/second ε.
    let single = |al: usize, f: &S, s: &S| -> Result<S> {
        let num = (e3.clone() - f.clone() + s.clone())
            * (e3.clone() + two.clone() * f.clone())
            * (e3.clone() + s.clone())
            * (e3.clone() + f.clone());
        let den = (-f.clone() + s.clone()) * two.clone() * f.clone() * s.clone() * f.clone();
        let mut t = ratio(num, den, "(s - f)2f²s")?;
        for b in (0..n).filter(|&b| b != al) {
            let num = (e3.clone() + two.clone() * f.clone() + s.clone() + a(al, b))
                * (e3.clone() + f.clone() + s.clone() + a(al, b))
                * (e3.clone() - f.clone() + a(b, al))
                * (e3.clone() + a(b, al));
            let den = (two.clone() * f.clone() + s.clone() + a(al, b))
                * (f.clone() + s.clone() + a(al, b))
                * (-f.clone() + a(b, al))
                * a(b, al);
            t = t * ratio(num, den, "two-box column/row denominator")?;
        }
        Ok(t)
    };

    let pair = |a1: usize, a2: usize| -> Result<S> {
        let base = ratio((e3.clone() + e2.clone()) * (e3.clone() + e1.clone()), e2.clone() * e1.clone(), "ε2ε1")?;
        let d = a(a1, a2) * a(a1, a2);
        let sq = |v: S| v.clone() * v;
        let mut t = base.clone()
            * base
            * ratio(
                (sq(e3.clone() + e2.clone()) - d.clone()) * (sq(e3.clone() + e1.clone()) - d.clone()),
                (sq(e2.clone()) - d.clone()) * (sq(e1.clone()) - d),
                "(ε2² - a²)(ε1² - a²)",
            )?;
        for b in (0..n).filter(|&b| b != a1 && b != a2) {
            let e12 = e1.clone() + e2.clone();
            let num = (e3.clone() + e12.clone() + a(a1, b))
                * (e3.clone() + e12.clone() + a(a2, b))
                * (e3.clone() + a(b, a1))
                * (e3.clone() + a(b, a2));
            let den = (e12.clone() + a(a1, b)) * (e12 + a(a2, b)) * a(b, a1) * a(b, a2);
            t = t * ratio(num, den, "two single boxes denominator")?;
        }
        Ok(t)
    };

    let mut terms = Vec::new();
    for al in 0..n {
        terms.push(single(al, &e1, &e2)?);
        terms.push(single(al, &e2, &e1)?);
    }
    let half = S::from_ratio(1, 2);
    for a1 in 0..n {
        for a2 in (0..n).filter(|&a2| a2 != a1) {
            terms.push(half.clone() * pair(a1, a2)?);
        }
    }
    Ok(S::sum_all(terms))
}

/// F = ε₁ε₂ log Z^inst, to order K.
pub fn prepotential<S: Scalar>(p: &ParamSet<S>, order: usize) -> Result<QSeries<S>> {
    if order < 1 {
        return Err(Error::InvalidInput("prepotential needs order >= 1".into()));
    }
    let z = z_inst(p, order)?;
    Ok(z.log()?.scale(&(p.eps[0].clone() * p.eps[1].clone())))
}

/// Π_{n≥1}(1−𝔮ⁿ)^{−(ε₃+ε₁)(ε₃+ε₂)/(ε₁ε₂)} to order K.
pub fn n1_product_series<S: Scalar>(eps: &[S; 3], order: usize) -> Result<QSeries<S>> {
    let [e1, e2, e3] = eps.clone();
    let expo = ratio((e3.clone() + e1.clone()) * (e3 + e2.clone()), e1 * e2, "ε1ε2")?;
    // −Σ_n log(1−qⁿ) = Σ_{n,k} q^{nk}/k
    let mut g = vec![S::zero(); order + 1];
    for n in 1..=order {
        let mut k = 1;
        while n * k <= order {
            g[n * k] = g[n * k].clone() + S::from_ratio(1, k as i64);
            k += 1;
        }
    }
    QSeries::new(g).scale(&expo).exp()
}

/// (−Λ²/ħ²)^{|λ|} / Π hooks².
pub fn plancherel_weight<S: Scalar>(lam: &Partition, big_lambda: &S, hbar: &S) -> Result<S> {
    if hbar.is_zero() {
        return Err(Error::InvalidInput("hbar must be nonzero".into()));
    }
    let h = lam.hook_product();
    let hook = S::from_q(&crate::scalar::Q::from_integer(h.into()));
    let base = -(big_lambda.clone() * big_lambda.clone()) / (hbar.clone() * hbar.clone());
    Ok(base.powi(lam.size() as i64) / (hook.clone() * hook))
}

/// |𝔮^{|λ|}μ_λ / plancherel_weight − 1| along ε₃ = s, 𝔮 = Λ²/s², ε₁ = −ε₂ = ħ.
pub fn plancherel_limit_check<S: Scalar>(lam: &Partition, scales: &[S], big_lambda: &S, hbar: &S) -> Result<Vec<f64>> {
    let w = plancherel_weight(lam, big_lambda, hbar)?;
    let mut out = Vec::with_capacity(scales.len());
    for s in scales {
        let qv = big_lambda.clone() * big_lambda.clone() / (s.clone() * s.clone());
        let p = ParamSet::new(vec![S::zero()], [hbar.clone(), -hbar.clone(), s.clone()], qv.clone(), TheoryKind::H);
        let mu = measure_a0hat(&MultiPartition::new(vec![lam.clone()]), &p)?;
        let r = qv.powi(lam.size() as i64) * mu / w.clone() - S::one();
        out.push(r.magnitude());
    }
    Ok(out)
}
