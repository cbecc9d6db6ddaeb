//! Y-observables, fundamental qq-characters and their normalized expectation
//! values for the Â₀ theory; the A_r linear quiver lives in [`ar`], the pole
//! and polynomiality checks in [`check`].
//!
//! Every observable is assembled from θ factors whose arguments are
//! [`LatticeVector`]s with an affine x slot, evaluated once at the end.

pub mod ar;
pub mod check;

pub use ar::{ar_expectation, ar_lambda, ar_measure, ar_qq_character, ar_y_observable, ArParams};
pub use check::{ar_expectation_pole_check, pole_residue_check, pole_residue_check_float, y_residue_check, PoleReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Generators, LatticeVector};
use crate::nekrasov::{a0hat_factors, eval_factors, measure_a0hat, z_inst, Factor, ParamSet};
use crate::partitions::{enumerate_multipartitions, enumerate_partitions, Box, MultiPartition, Partition};
use crate::scalar::{Scalar, C64};
use crate::series::QSeries;
use crate::specfun::TheoryKind;

pub(crate) fn c12(b: Box) -> LatticeVector {
    LatticeVector::eps([b.i as i64 - 1, b.j as i64 - 1, 0, 0])
}

pub(crate) fn c34(b: Box) -> LatticeVector {
    LatticeVector::eps([0, 0, b.i as i64 - 1, b.j as i64 - 1])
}

pub(crate) fn eps12() -> LatticeVector {
    LatticeVector::eps([1, 1, 0, 0])
}

/// Factors of Y(x + shift) for diagrams `parts` whose moduli sit at generator indices `idx`.
pub(crate) fn y_factors(parts: &[Partition], idx: &[usize], shift: &LatticeVector) -> Vec<Factor> {
    let mut out = Vec::new();
    for (lam, &k) in parts.iter().zip(idx) {
        let base = LatticeVector::x_slot() + shift.clone().with_a(k, -1);
        for b in lam.outer_boundary() {
            out.push(Factor { num: Some(base.clone() - c12(b)), den: None });
        }
        for b in lam.inner_boundary() {
            out.push(Factor { num: None, den: Some(base.clone() - c12(b) - eps12()) });
        }
    }
    out
}

pub(crate) fn invert(factors: Vec<Factor>) -> Vec<Factor> {
    factors.into_iter().map(|f| Factor { num: f.den, den: f.num }).collect()
}

/// Evaluate x-dependent factors; a vanishing denominator is a pole in x.
pub(crate) fn eval_observable<S: Scalar>(
    factors: &[Factor],
    g: &Generators<S>,
    kind: &TheoryKind,
    x: &S,
) -> Result<S> {
    eval_factors(factors, g, kind, Some(x)).map_err(|e| match e {
        Error::Resonance { vector, magnitude } => {
            Error::Pole(format!("θ({vector}) = {magnitude:e} in an observable denominator"))
        }
        other => other,
    })
}

/// Y(x) = Π_α Π_{∂₊λ^{(α)}} θ(x−a_α−c₁₂) / Π_{∂₋λ^{(α)}} θ(x−a_α−c₁₂−ε₁−ε₂).
pub fn y_observable<S: Scalar>(x: &S, mp: &MultiPartition, p: &ParamSet<S>) -> Result<S> {
    check_colors(mp, p)?;
    let idx: Vec<usize> = (0..p.n()).collect();
    eval_observable(&y_factors(mp.entries(), &idx, &LatticeVector::zero()), &p.generators(), &p.kind, x)
}

fn check_colors<S: Scalar>(mp: &MultiPartition, p: &ParamSet<S>) -> Result<()> {
    if mp.n_colors() != p.n() {
        return Err(Error::InvalidInput(format!(
            "multipartition has {} colors, parameters have {}",
            mp.n_colors(),
            p.n()
        )));
    }
    Ok(())
}

/// Which per-diagram weight the qq-character sum uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QqWeight {
    /// The one-color Â₀ measure in the variables (ε₃, ε₄; ε₁). Pole-free.
    #[default]
    Measure,
    /// The arm/leg display θ(ε₃(a+1)−ε₄l+ε₁)θ(−ε₃a+ε₄(l−1)+ε₂)/[θ(ε₃(a+1)−ε₄l)θ(−ε₃a+ε₄(l+1))].
    Displayed,
}

/// θ factors of the inner weight w(λ).
pub(crate) fn weight_factors(lam: &Partition, weight: QqWeight) -> Vec<Factor> {
    match weight {
        QqWeight::Measure => {
            let swap = |v: LatticeVector| {
                let [c1, c2, c3, _] = v.eps;
                LatticeVector::eps([c3, 0, c1, c2])
            };
            a0hat_factors(&MultiPartition::new(vec![lam.clone()]), None)
                .into_iter()
                .map(|f| Factor { num: f.num.map(swap), den: f.den.map(swap) })
                .collect()
        }
        QqWeight::Displayed => {
            let mut out = Vec::new();
            for b in lam.boxes() {
                let (a, l) = lam.arm_leg(b).expect("box of its own diagram");
                out.push(Factor {
                    num: Some(LatticeVector::eps([1, 0, a + 1, -l])),
                    den: Some(LatticeVector::eps([0, 0, a + 1, -l])),
                });
                out.push(Factor {
                    num: Some(LatticeVector::eps([0, 1, -a, l - 1])),
                    den: Some(LatticeVector::eps([0, 0, -a, l + 1])),
                });
            }
            out
        }
    }
}

/// w(λ) with the given parameters' ε and θ kind.
pub fn qq_weight<S: Scalar>(lam: &Partition, p: &ParamSet<S>, weight: QqWeight) -> Result<S> {
    eval_factors(&weight_factors(lam, weight), &p.generators(), &p.kind, None)
}

/// Π_{∂₊λ} Y(x+s+ε₁₂+c₃₄(□)) / Π_{∂₋λ} Y(x+s+c₃₄(□)) for a shift s.
pub(crate) fn qq_term_factors(mp: &MultiPartition, lam: &Partition, shift: &LatticeVector) -> Vec<Factor> {
    let idx: Vec<usize> = (0..mp.n_colors()).collect();
    let mut out = Vec::new();
    for b in lam.outer_boundary() {
        out.extend(y_factors(mp.entries(), &idx, &(shift.clone() + eps12() + c34(b))));
    }
    for b in lam.inner_boundary() {
        out.extend(invert(y_factors(mp.entries(), &idx, &(shift.clone() + c34(b)))));
    }
    out
}

/// 𝔛(x) on one configuration as a 𝔮-series: the coefficient of 𝔮^k is the
/// sum over |λ| = k ≤ K_inner of w(λ) times the shifted Y ratio.
pub fn qq_character_a0hat<S: Scalar>(
    x: &S,
    mp: &MultiPartition,
    p: &ParamSet<S>,
    k_inner: usize,
    weight: QqWeight,
) -> Result<QSeries<S>> {
    qq_character_shifted(x, mp, p, k_inner, weight, &LatticeVector::zero())
}

fn qq_character_shifted<S: Scalar>(
    x: &S,
    mp: &MultiPartition,
    p: &ParamSet<S>,
    k_inner: usize,
    weight: QqWeight,
    shift: &LatticeVector,
) -> Result<QSeries<S>> {
    check_colors(mp, p)?;
    let g = p.generators();
    let mut coeffs = Vec::with_capacity(k_inner + 1);
    for k in 0..=k_inner {
        let mut terms = Vec::new();
        for lam in enumerate_partitions(k) {
            let w = eval_factors(&weight_factors(&lam, weight), &g, &p.kind, None)?;
            let t = eval_observable(&qq_term_factors(mp, &lam, shift), &g, &p.kind, x)?;
            terms.push(w * t);
        }
        coeffs.push(S::sum_all(terms));
    }
    Ok(QSeries::new(coeffs))
}

/// 𝔛(x) at the parameters' value of 𝔮.
pub fn qq_character_value<S: Scalar>(
    x: &S,
    mp: &MultiPartition,
    p: &ParamSet<S>,
    k_inner: usize,
    weight: QqWeight,
) -> Result<S> {
    Ok(qq_character_a0hat(x, mp, p, k_inner, weight)?.eval(&p.q))
}

/// Σ_{|λ|≤K} 𝔮^{|λ|} w(λ): the x^N coefficient of 𝔛 on any configuration.
pub fn qq_leading_series<S: Scalar>(p: &ParamSet<S>, k_inner: usize, weight: QqWeight) -> Result<QSeries<S>> {
    let mut coeffs = Vec::with_capacity(k_inner + 1);
    for k in 0..=k_inner {
        let terms = enumerate_partitions(k).iter().map(|l| qq_weight(l, p, weight)).collect::<Result<Vec<S>>>()?;
        coeffs.push(S::sum_all(terms));
    }
    Ok(QSeries::new(coeffs))
}

/// A per-configuration observable whose expectation can be taken.
pub trait Observable<S: Scalar>: Sync {
    /// Value on `mp` as a 𝔮-series truncated at `order`.
    fn eval(&self, mp: &MultiPartition, x: &S, p: &ParamSet<S>, order: usize) -> Result<QSeries<S>>;
}

/// The constant observable 1.
pub struct Unit;

impl<S: Scalar> Observable<S> for Unit {
    fn eval(&self, _mp: &MultiPartition, _x: &S, _p: &ParamSet<S>, order: usize) -> Result<QSeries<S>> {
        Ok(QSeries::one(order))
    }
}

/// Y(x + shift).
pub struct YObs {
    pub shift: LatticeVector,
}

impl<S: Scalar> Observable<S> for YObs {
    fn eval(&self, mp: &MultiPartition, x: &S, p: &ParamSet<S>, order: usize) -> Result<QSeries<S>> {
        check_colors(mp, p)?;
        let idx: Vec<usize> = (0..p.n()).collect();
        let v = eval_observable(&y_factors(mp.entries(), &idx, &self.shift), &p.generators(), &p.kind, x)?;
        Ok(QSeries::constant(v, order))
    }
}

/// The fundamental qq-character; `k_inner = None` ties the inner order to the outer one.
pub struct QqObs {
    pub k_inner: Option<usize>,
    pub weight: QqWeight,
}

impl<S: Scalar> Observable<S> for QqObs {
    fn eval(&self, mp: &MultiPartition, x: &S, p: &ParamSet<S>, order: usize) -> Result<QSeries<S>> {
        let k = self.k_inner.unwrap_or(order);
        qq_character_a0hat(x, mp, p, k, self.weight).map(|s| s.resize(order))
    }
}

/// ⟨obs⟩ = (Σ_mp μ 𝔮^{|mp|} obs(mp, x)) / Z^inst truncated at 𝔮^K.
pub fn expectation<S: Scalar, O: Observable<S>>(obs: &O, p: &ParamSet<S>, order: usize, x: &S) -> Result<QSeries<S>> {
    let mps: Vec<MultiPartition> = (0..=order).flat_map(|k| enumerate_multipartitions(p.n(), k)).collect();
    let terms: Vec<Result<QSeries<S>>> = mps
        .par_iter()
        .map(|mp| {
            let k = mp.total_size();
            let mu = measure_a0hat(mp, p)?;
            Ok(obs.eval(mp, x, p, order - k)?.resize(order).shift(k).scale(&mu))
        })
        .collect();
    let mut num: Vec<Vec<S>> = vec![Vec::new(); order + 1];
    for t in terms {
        for (k, c) in t?.into_coeffs().into_iter().enumerate() {
            num[k].push(c);
        }
    }
    let num = QSeries::new(num.into_iter().map(S::sum_all).collect());
    num.div(&z_inst(p, order)?)
}

/// Origami observable 𝔛̃(x) on a pair (λ, μ): Π_β [Π_{∂₊μ_β} Y_λ(x+b_β+ε₁₂+c₃₄) / Π_{∂₋μ_β} Y_λ(x+b_β+c₃₄)].
/// The b_β enter through the x slot only; `b` has one entry per color of μ.
pub fn origami_xtilde<S: Scalar>(x: &S, lam: &MultiPartition, mu: &MultiPartition, p: &ParamSet<S>, b: &[S]) -> Result<S> {
    check_colors(lam, p)?;
    if mu.n_colors() != b.len() {
        return Err(Error::InvalidInput("second factor needs one modulus per color".into()));
    }
    let mut acc = S::one();
    for (m, bb) in mu.entries().iter().zip(b) {
        let xs = x.clone() + bb.clone();
        let f = qq_term_factors(lam, m, &LatticeVector::zero());
        acc = acc * eval_observable(&f, &p.generators(), &p.kind, &xs)?;
    }
    Ok(acc)
}

/// π₁*𝔛̃: Σ_{|μ|≤K} 𝔮^{|μ|} w_M(μ; b) 𝔛̃(λ, μ), with w_M the M-color Â₀ measure in (ε₃, ε₄; ε₁).
pub fn origami_pushforward<S: Scalar>(
    x: &S,
    lam: &MultiPartition,
    p: &ParamSet<S>,
    b: &[S],
    order: usize,
) -> Result<QSeries<S>> {
    let m = b.len();
    let e4 = p.eps4();
    let p2 = ParamSet::new(b.to_vec(), [p.eps[2].clone(), e4, p.eps[0].clone()], p.q.clone(), p.kind);
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut terms = Vec::new();
        for mu in enumerate_multipartitions(m, k) {
            terms.push(measure_a0hat(&mu, &p2)? * origami_xtilde(x, lam, &mu, p, b)?);
        }
        coeffs.push(S::sum_all(terms));
    }
    Ok(QSeries::new(coeffs))
}

/// Predicted Y(x + log 𝔭)/Y(x) in the Ell kind: (−1/𝔭)^N e^{−Nx} exp(Σ_{∂₊}(a+c₁₂) − Σ_{∂₋}(a+c₁₂+ε₁₂)).
pub fn y_ell_multiplier(x: C64, mp: &MultiPartition, p: &ParamSet<C64>) -> Result<C64> {
    let TheoryKind::Ell { nome, .. } = p.kind else {
        return Err(Error::InvalidInput("the quasi-period multiplier is defined for the Ell kind".into()));
    };
    check_colors(mp, p)?;
    let g = p.generators();
    let idx: Vec<usize> = (0..p.n()).collect();
    let mut expo = C64::new(0.0, 0.0);
    let mut net = 0i64;
    for f in y_factors(mp.entries(), &idx, &LatticeVector::zero()) {
        // Each factor is θ(x − s); record −s with the factor's sign.
        if let Some(v) = f.num {
            expo -= (v - LatticeVector::x_slot()).eval(&g, None);
            net += 1;
        }
        if let Some(v) = f.den {
            expo += (v - LatticeVector::x_slot()).eval(&g, None);
            net -= 1;
        }
    }
    let m = -C64::new(1.0, 0.0) / nome;
    Ok(m.powi(net as i32) * (-(net as f64) * x).exp() * expo.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::multipartitions_up_to;
    use crate::poly::RatFunc;
    use crate::scalar::{q, Q};

    fn mp(parts: Vec<Vec<usize>>) -> MultiPartition {
        MultiPartition::from_parts(parts).unwrap()
    }

    fn params(a: &[Q]) -> ParamSet<Q> {
        ParamSet::new(a.to_vec(), [q(3, 7), q(-5, 11), q(2, 13)], q(1, 10), TheoryKind::H)
    }

    fn rat(p: &ParamSet<Q>) -> ParamSet<RatFunc> {
        p.map(RatFunc::from_q)
    }

    #[test]
    fn y_examples() {
        let p = params(&[q(1, 3), q(-1, 5)]);
        let x = q(7, 4);
        let empty = y_observable(&x, &MultiPartition::empty(2), &p).unwrap();
        assert_eq!(empty, (&x - &p.a[0]) * (&x - &p.a[1]));

        let p1 = params(&[q(1, 3)]);
        let v = y_observable(&x, &mp(vec![vec![1]]), &p1).unwrap();
        let [e1, e2, _] = p1.eps.clone();
        let a = p1.a[0].clone();
        let expect = (&x - &a - &e2) * (&x - &a - &e1) / (&x - &a - &e1 - &e2);
        assert_eq!(v, expect);

        // Monic degree N in x for the empty configuration.
        let r = rat(&p);
        let y = y_observable(&RatFunc::x(), &MultiPartition::empty(2), &r).unwrap();
        assert!(y.is_polynomial());
        assert_eq!(y.num().degree(), Some(2));
        assert_eq!(y.num().leading(), q(1, 1));

        let at_pole = &a + &e1 + &e2;
        assert!(matches!(y_observable(&at_pole, &mp(vec![vec![1]]), &p1), Err(Error::Pole(_))));
    }

    #[test]
    fn qq_inner_order_examples() {
        let p = params(&[q(1, 3)]);
        let [e1, e2, e3] = p.eps.clone();
        let e4 = p.eps4();
        let x = q(9, 5);
        let m = mp(vec![vec![2]]);
        let yv = |y: &Q| y_observable(y, &m, &p).unwrap();

        let s0 = qq_character_a0hat(&x, &m, &p, 0, QqWeight::Measure).unwrap();
        assert_eq!(s0.coeff(0), &yv(&(&x + &e1 + &e2)));

        let s1 = qq_character_a0hat(&x, &m, &p, 1, QqWeight::Measure).unwrap();
        let c = (&e1 + &e3) * (&e1 + &e4) / (&e3 * &e4);
        let expect = c * yv(&(&x - &e3)) * yv(&(&x - &e4)) / yv(&x);
        assert_eq!(s1.coeff(1), &expect);
        // The arm/leg display gives (ε₁+ε₃)(ε₂−ε₄)/(ε₃ε₄) on the single box instead.
        let d1 = qq_character_a0hat(&x, &m, &p, 1, QqWeight::Displayed).unwrap();
        let cd = (&e1 + &e3) * (&e2 - &e4) / (&e3 * &e4);
        assert_eq!(d1.coeff(1), &(cd * yv(&(&x - &e3)) * yv(&(&x - &e4)) / yv(&x)));

        // θ(ε₁+ε₃) vanishes at ε₁ = −ε₃.
        let pz = p.with_eps([-e3.clone(), e2.clone(), e3.clone()]);
        assert_eq!(qq_weight(&Partition::new(vec![1]).unwrap(), &pz, QqWeight::Measure).unwrap(), q(0, 1));
    }

    #[test]
    fn expectation_examples() {
        let p = params(&[q(1, 3), q(-2, 7)]);
        let x = q(5, 3);
        let one = expectation(&Unit, &p, 3, &x).unwrap();
        assert_eq!(one, QSeries::one(3));

        let y0 = expectation(&YObs { shift: LatticeVector::zero() }, &p, 0, &x).unwrap();
        assert_eq!(y0.coeff(0), &((&x - &p.a[0]) * (&x - &p.a[1])));

        // N=1, K=1: the 𝔮 coefficient is finite at x = a.
        let p1 = params(&[q(1, 3)]);
        let e = expectation(&QqObs { k_inner: None, weight: QqWeight::Measure }, &rat(&p1), 1, &RatFunc::x()).unwrap();
        assert!(e.coeff(1).eval(&p1.a[0]).is_some());
    }

    #[test]
    fn float_matches_exact() {
        let p = params(&[q(1, 3), q(-2, 7)]);
        let pf = p.map(|v| v.to_c64().unwrap());
        let x = q(5, 3);
        let obs = QqObs { k_inner: None, weight: QqWeight::Measure };
        let ex = expectation(&obs, &p, 2, &x).unwrap();
        let fl = expectation(&obs, &pf, 2, &x.to_c64().unwrap()).unwrap();
        for k in 0..=2 {
            let d = (ex.coeff(k).to_c64().unwrap() - fl.coeff(k)).norm();
            assert!(d <= 1e-12 * (1.0 + fl.coeff(k).norm()), "order {k}: {d}");
        }
    }

    #[test]
    fn ell_quasi_periodicity() {
        let nome = C64::new(0.05, 0.02);
        let pe = ParamSet::new(
            vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.05)],
            [C64::new(0.21, 0.0), C64::new(-0.13, 0.02), C64::new(0.07, 0.0)],
            C64::new(0.1, 0.0),
            TheoryKind::ell(nome).unwrap(),
        );
        let shift = nome.ln();
        for m in multipartitions_up_to(2, 2) {
            for x in [C64::new(0.41, 0.17), C64::new(-0.33, 0.52)] {
                let r = y_observable(&(x + shift), &m, &pe).unwrap() / y_observable(&x, &m, &pe).unwrap();
                let pred = y_ell_multiplier(x, &m, &pe).unwrap();
                assert!((r / pred - 1.0).norm() < 1e-8, "{m:?}: {r} vs {pred}");
            }
        }
    }

    #[test]
    fn origami_examples() {
        let p = params(&[q(1, 3)]);
        let x = q(11, 6);
        let lam = MultiPartition::empty(1);
        assert_eq!(origami_xtilde(&x, &lam, &MultiPartition::empty(0), &p, &[]).unwrap(), q(1, 1));
        let b = q(-2, 9);
        let v = origami_xtilde(&x, &lam, &MultiPartition::empty(1), &p, &[b.clone()]).unwrap();
        assert_eq!(v, &x - &p.a[0] + &b + &p.eps[0] + &p.eps[1]);
    }

    #[test]
    fn origami_pushforward_reproduces_qq_character() {
        let p = rat(&params(&[q(1, 3)]));
        let b = RatFunc::from_q(&q(-2, 9));
        let x = RatFunc::x();
        for lam in multipartitions_up_to(1, 2) {
            for order in 0..=2 {
                let push = origami_pushforward(&x, &lam, &p, &[b.clone()], order).unwrap();
                let xs = x.clone() + b.clone();
                let direct = qq_character_a0hat(&xs, &lam, &p, order, QqWeight::Measure).unwrap();
                assert_eq!(push, direct, "λ={lam:?} order {order}");
            }
        }
    }

    #[test]
    fn inner_order_beyond_outer_changes_nothing() {
        let p = params(&[q(1, 3), q(-2, 7)]);
        let x = q(5, 3);
        let a = expectation(&QqObs { k_inner: Some(2), weight: QqWeight::Measure }, &p, 2, &x).unwrap();
        let b = expectation(&QqObs { k_inner: Some(3), weight: QqWeight::Measure }, &p, 2, &x).unwrap();
        assert_eq!(a, b);
    }
}
