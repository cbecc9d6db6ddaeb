//! The A_r linear quiver: nodes s = 0..r+1 with frozen (empty, fugacity-free)
//! end nodes whose moduli play the role of masses.
//!
//! Node fugacities are 𝔮_s = c_s·t and every series is in the bookkeeping
//! variable t, so z_{i}/z_{b−1} = Π_{s=b}^{i} c_s · t^{i−b+1}.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Generators, LatticeVector};
use crate::nekrasov::{eval_factors, pair_coefficients, Factor};
use crate::partitions::{enumerate_multipartitions, MultiPartition, Partition};
use crate::scalar::Scalar;
use crate::series::QSeries;
use crate::specfun::TheoryKind;

use super::{eps12, eval_observable, invert, y_factors};

#[derive(Clone, Debug, PartialEq)]
pub struct ArParams<S> {
    /// Moduli a_{α,s} for s = 0..r+1; rows 0 and r+1 are the masses.
    pub a: Vec<Vec<S>>,
    pub eps: [S; 2],
    /// Fugacity coefficients c_1..c_r (𝔮_s = c_s t).
    pub c: Vec<S>,
    /// z₀; cancels from the qq-characters, kept for Λ_i.
    pub z0: S,
    pub kind: TheoryKind,
}

impl<S: Scalar> ArParams<S> {
    pub fn new(a: Vec<Vec<S>>, eps: [S; 2], c: Vec<S>, z0: S, kind: TheoryKind) -> Result<Self> {
        let r = c.len();
        if r == 0 {
            return Err(Error::InvalidInput("A_r needs r ≥ 1".into()));
        }
        if a.len() != r + 2 {
            return Err(Error::InvalidInput(format!("expected {} rows of moduli, got {}", r + 2, a.len())));
        }
        let n = a[0].len();
        if n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("every node needs the same nonzero rank".into()));
        }
        Ok(ArParams { a, eps, c, z0, kind })
    }

    pub fn r(&self) -> usize {
        self.c.len()
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    pub fn generators(&self) -> Generators<S> {
        Generators {
            eps: [self.eps[0].clone(), self.eps[1].clone(), S::zero()],
            a: self.a.iter().flatten().cloned().collect(),
        }
    }

    fn index(&self, s: usize, alpha: usize) -> usize {
        s * self.n() + alpha
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ArParams<T> {
        ArParams {
            a: self.a.iter().map(|row| row.iter().map(&f).collect()).collect(),
            eps: [f(&self.eps[0]), f(&self.eps[1])],
            c: self.c.iter().map(&f).collect(),
            z0: f(&self.z0),
            kind: self.kind,
        }
    }

    /// Diagrams of node s; the frozen nodes are empty.
    fn node(&self, s: usize, mps: &[MultiPartition]) -> Vec<Partition> {
        if s == 0 || s == self.r() + 1 {
            vec![Partition::empty(); self.n()]
        } else {
            mps[s - 1].entries().to_vec()
        }
    }

    fn check(&self, mps: &[MultiPartition]) -> Result<()> {
        if mps.len() != self.r() || mps.iter().any(|m| m.n_colors() != self.n()) {
            return Err(Error::InvalidInput(format!("expected {} node configurations of {} colors", self.r(), self.n())));
        }
        Ok(())
    }

    fn node_factors(&self, s: usize, mps: &[MultiPartition], shift: &LatticeVector) -> Vec<Factor> {
        let idx: Vec<usize> = (0..self.n()).map(|a| self.index(s, a)).collect();
        y_factors(&self.node(s, mps), &idx, shift)
    }
}

/// Measure of a node configuration: vector denominators at every gauge node, bifundamental numerators for neighbours.
pub fn ar_measure<S: Scalar>(mps: &[MultiPartition], p: &ArParams<S>) -> Result<S> {
    p.check(mps)?;
    let n = p.n();
    let r = p.r();
    let mut f = Vec::new();
    for s in 0..=r {
        let here = p.node(s, mps);
        let next = p.node(s + 1, mps);
        for al in 0..n {
            for be in 0..n {
                if s >= 1 {
                    for (c1, c2) in pair_coefficients(&here[al], &here[be]) {
                        let v = LatticeVector::eps([c1, c2, 0, 0]).with_a(p.index(s, al), 1).with_a(p.index(s, be), -1);
                        f.push(Factor { num: None, den: Some(v) });
                    }
                }
                for (c1, c2) in pair_coefficients(&here[al], &next[be]) {
                    let v = LatticeVector::eps([c1, c2, 0, 0]).with_a(p.index(s, al), 1).with_a(p.index(s + 1, be), -1);
                    f.push(Factor { num: Some(v), den: None });
                }
            }
        }
    }
    eval_factors(&f, &p.generators(), &p.kind, None)
}

/// Y_s(x) for s = 0..r+1; the end nodes give Π_α θ(x − a_{α,s}).
pub fn ar_y_observable<S: Scalar>(s: usize, x: &S, mps: &[MultiPartition], p: &ArParams<S>) -> Result<S> {
    p.check(mps)?;
    if s > p.r() + 1 {
        return Err(Error::InvalidInput(format!("node {s} out of range 0..={}", p.r() + 1)));
    }
    eval_observable(&p.node_factors(s, mps, &LatticeVector::zero()), &p.generators(), &p.kind, x)
}

/// Λ_i(x) = z_i Y_{i+1}(x+ε₁₂)/Y_i(x) at t = 1.
pub fn ar_lambda<S: Scalar>(i: usize, x: &S, mps: &[MultiPartition], p: &ArParams<S>) -> Result<S> {
    p.check(mps)?;
    if i > p.r() {
        return Err(Error::InvalidInput(format!("Λ index {i} out of range 0..={}", p.r())));
    }
    let mut f = p.node_factors(i + 1, mps, &eps12());
    f.extend(invert(p.node_factors(i, mps, &LatticeVector::zero())));
    let z = p.c[..i].iter().fold(p.z0.clone(), |acc, c| acc * c.clone());
    Ok(z * eval_observable(&f, &p.generators(), &p.kind, x)?)
}

/// Increasing index tuples 0 ≤ i₁ < … < i_l ≤ r.
fn tuples(l: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=r {
            if r + 1 - i < left {
                break;
            }
            cur.push(i);
            rec(i + 1, left - 1, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, l, r, &mut Vec::new(), &mut out);
    out
}

/// t-degree and fugacity coefficient of Π_b z_{i_b}/z_{b−1}.
fn tuple_weight<S: Scalar>(t: &[usize], p: &ArParams<S>) -> (usize, S) {
    let mut deg = 0;
    let mut w = S::one();
    for (b0, &i) in t.iter().enumerate() {
        deg += i - b0;
        for s in b0 + 1..=i {
            w = w * p.c[s - 1].clone();
        }
    }
    (deg, w)
}

fn check_l<S: Scalar>(l: usize, p: &ArParams<S>) -> Result<()> {
    if l == 0 || l > p.r() + 1 {
        return Err(Error::InvalidInput(format!("qq-character index {l} out of range 1..={}", p.r() + 1)));
    }
    Ok(())
}

/// 𝔛_l(x) = Y₀(x+ε₁₂(1−l)) Σ_{i₁<…<i_l} Π_b Λ_{i_b}(x+ε₁₂(b−l))/z_{b−1}, as a t-series.
///
/// The Λ shifts run up to x so the i₁ = 0 denominator meets the Y₀ prefactor.
pub fn ar_qq_character<S: Scalar>(
    l: usize,
    x: &S,
    mps: &[MultiPartition],
    p: &ArParams<S>,
    order: usize,
) -> Result<QSeries<S>> {
    p.check(mps)?;
    check_l(l, p)?;
    let g = p.generators();
    let pre = p.node_factors(0, mps, &LatticeVector::eps([1 - l as i64, 1 - l as i64, 0, 0]));
    let mut coeffs: Vec<Vec<S>> = vec![Vec::new(); order + 1];
    for t in tuples(l, p.r()) {
        let (deg, w) = tuple_weight(&t, p);
        if deg > order {
            continue;
        }
        let mut f = pre.clone();
        for (b0, &i) in t.iter().enumerate() {
            let s = b0 as i64 + 1 - l as i64;
            f.extend(p.node_factors(i + 1, mps, &LatticeVector::eps([s + 1, s + 1, 0, 0])));
            f.extend(invert(p.node_factors(i, mps, &LatticeVector::eps([s, s, 0, 0]))));
        }
        coeffs[deg].push(w * eval_observable(&f, &g, &p.kind, x)?);
    }
    Ok(QSeries::new(coeffs.into_iter().map(S::sum_all).collect()))
}

/// Leading x^N coefficient of 𝔛_l: Σ_{i₁<…<i_l} Π_b z_{i_b}/z_{b−1} as a t-series.
pub fn ar_leading_series<S: Scalar>(l: usize, p: &ArParams<S>, order: usize) -> Result<QSeries<S>> {
    check_l(l, p)?;
    let mut coeffs: Vec<Vec<S>> = vec![Vec::new(); order + 1];
    for t in tuples(l, p.r()) {
        let (deg, w) = tuple_weight(&t, p);
        if deg <= order {
            coeffs[deg].push(w);
        }
    }
    Ok(QSeries::new(coeffs.into_iter().map(S::sum_all).collect()))
}

/// All node configurations of total size k, split from r·N-colored tuples.
pub(crate) fn node_configurations(r: usize, n: usize, k: usize) -> Vec<Vec<MultiPartition>> {
    enumerate_multipartitions(r * n, k)
        .into_iter()
        .map(|m| m.entries().chunks(n).map(|c| MultiPartition::new(c.to_vec())).collect())
        .collect()
}

/// ⟨𝔛_l(x)⟩ to order t^K.
pub fn ar_expectation<S: Scalar>(l: usize, p: &ArParams<S>, order: usize, x: &S) -> Result<QSeries<S>> {
    check_l(l, p)?;
    let configs: Vec<(usize, Vec<MultiPartition>)> =
        (0..=order).flat_map(|k| node_configurations(p.r(), p.n(), k).into_iter().map(move |c| (k, c))).collect();
    let terms: Vec<Result<(S, QSeries<S>)>> = configs
        .par_iter()
        .map(|(k, mps)| {
            let mut w = ar_measure(mps, p)?;
            for (m, c) in mps.iter().zip(&p.c) {
                w = w * c.powi(m.total_size() as i64);
            }
            let obs = ar_qq_character(l, x, mps, p, order - k)?.resize(order).shift(*k).scale(&w);
            Ok((w, obs))
        })
        .collect();
    let mut z: Vec<Vec<S>> = vec![Vec::new(); order + 1];
    let mut num: Vec<Vec<S>> = vec![Vec::new(); order + 1];
    for ((k, _), t) in configs.iter().zip(terms) {
        let (w, obs) = t?;
        z[*k].push(w);
        for (j, c) in obs.into_coeffs().into_iter().enumerate() {
            num[j].push(c);
        }
    }
    let z = QSeries::new(z.into_iter().map(S::sum_all).collect());
    let num = QSeries::new(num.into_iter().map(S::sum_all).collect());
    num.div(&z)
}
