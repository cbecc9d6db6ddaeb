//! ℤ/N orbifold measure, the π map to ordinary multipartitions and the
//! surface-defect density.

use crate::error::{Error, Result};
use crate::lattice::Grading;
use crate::partitions::{MultiPartition, Partition};
use crate::scalar::Scalar;

use super::{a0hat_factors, eval_factors, measure_a0hat, ParamSet};

/// Bijection c : {colors} → {0..N−1}, stored as `c[α]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring(Vec<usize>);

impl Coloring {
    pub fn new(c: Vec<usize>) -> Result<Self> {
        let n = c.len();
        let mut seen = vec![false; n];
        for &v in &c {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!("coloring {c:?} is not a bijection onto 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(Coloring(c))
    }

    /// c(α) = α − 1 in 1-based terms.
    pub fn identity(n: usize) -> Self {
        Coloring((0..n).collect())
    }

    pub fn get(&self, alpha: usize) -> usize {
        self.0[alpha]
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// [a_α] = c(α), [ε₁] = [ε₃] = 0, [ε₂] = 1, [ε₄] = −1.
    pub fn grading(&self) -> Grading {
        Grading { modulus: self.n() as i64, eps: [0, 1, 0, -1], a: self.0.iter().map(|&v| v as i64).collect(), x: 0 }
    }
}

/// k_ω = Σ_α #{(i,j) ∈ λ^{(α)} : c(α) + j − 1 ≡ ω mod N}.
pub fn column_color_counts(mp: &MultiPartition, c: &Coloring) -> Vec<usize> {
    let n = c.n();
    let mut k = vec![0usize; n];
    for (alpha, lam) in mp.entries().iter().enumerate() {
        for b in lam.boxes() {
            k[(c.get(alpha) + b.j - 1) % n] += 1;
        }
    }
    k
}

/// Π 𝔮_ω^{k_ω} times the Â₀ double product with every θ replaced by θ^δ.
pub fn orbifold_measure<S: Scalar>(mp: &MultiPartition, c: &Coloring, fugacities: &[S], p: &ParamSet<S>) -> Result<S> {
    let n = p.n();
    if c.n() != n || fugacities.len() != n || mp.n_colors() != n {
        return Err(Error::InvalidInput("coloring, fugacities and multipartition must all have N entries".into()));
    }
    let k = column_color_counts(mp, c);
    let mut w = S::one();
    for (qw, kw) in fugacities.iter().zip(k) {
        w = w * qw.powi(kw as i64);
    }
    let body = eval_factors(&a0hat_factors(mp, Some(&c.grading())), &p.generators(), &p.kind, None)?;
    Ok(w * body)
}

/// Λ^{(α)t}_j = λ^{(α)t}_{α+N(j−1)} (α 1-based), read literally.
pub fn pi_map(mp: &MultiPartition, n: usize) -> MultiPartition {
    MultiPartition::new(
        mp.entries()
            .iter()
            .enumerate()
            .map(|(a0, lam)| {
                let cols: Vec<usize> = (0..).map(|j| lam.col(a0 + 1 + n * j)).take_while(|&h| h > 0).collect();
                Partition::new(cols).expect("subsequence of column heights").transpose()
            })
            .collect(),
    )
}

/// Column-height sequences of one color whose π image is `target`, total size ≤ budget.
fn color_fiber(target: &Partition, alpha1: usize, n: usize, budget: usize) -> Vec<Partition> {
    let tcols: Vec<usize> = target.transpose().parts().to_vec();
    let ell = tcols.len();
    // Index k (1-based) is fixed when k ≥ α and (k − α) ≡ 0 mod N.
    let fixed = |k: usize| -> Option<usize> {
        if k >= alpha1 && (k - alpha1) % n == 0 {
            Some(tcols.get((k - alpha1) / n).copied().unwrap_or(0))
        } else {
            None
        }
    };
    let last = alpha1 + n * ell; // first index forced to height 0
    let mut out = Vec::new();

    fn rec(
        k: usize,
        last: usize,
        upper: usize,
        used: usize,
        budget: usize,
        fixed: &dyn Fn(usize) -> Option<usize>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if k == last {
            let cols: Vec<usize> = cur.iter().copied().filter(|&h| h > 0).collect();
            out.push(Partition::new(cols).unwrap().transpose());
            return;
        }
        // Lower bound: the next fixed height at or after k.
        let mut lower = 0;
        for m in k..=last {
            if let Some(h) = fixed(m) {
                lower = h;
                break;
            }
        }
        let range: Vec<usize> = match fixed(k) {
            Some(h) => vec![h],
            None => (lower..=upper.min(budget.saturating_sub(used))).collect(),
        };
        for h in range {
            if h > upper || used + h > budget || h < lower {
                continue;
            }
            cur.push(h);
            rec(k + 1, last, h, used + h, budget, fixed, cur, out);
            cur.pop();
        }
    }
    rec(1, last, usize::MAX, 0, budget, &fixed, &mut Vec::new(), &mut out);
    out
}

/// All multipartitions λ with π(λ) = Λ and |λ| ≤ bound.
pub fn orbifold_fiber(target: &MultiPartition, bound: usize) -> Vec<MultiPartition> {
    let n = target.n_colors();
    let per: Vec<Vec<Partition>> =
        target.entries().iter().enumerate().map(|(a0, t)| color_fiber(t, a0 + 1, n, bound)).collect();
    let mut out = Vec::new();
    fn combine(
        per: &[Vec<Partition>],
        k: usize,
        used: usize,
        bound: usize,
        cur: &mut Vec<Partition>,
        out: &mut Vec<MultiPartition>,
    ) {
        if k == per.len() {
            out.push(MultiPartition::new(cur.clone()));
            return;
        }
        for p in &per[k] {
            if used + p.size() <= bound {
                cur.push(p.clone());
                combine(per, k + 1, used + p.size(), bound, cur, out);
                cur.pop();
            }
        }
    }
    combine(&per, 0, 0, bound, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// 𝒮 = (Σ_{π(λ)=Λ, |λ|≤bound} μ^orb(λ)) / (𝔮^{|Λ|} μ(Λ)) with 𝔮 = Π 𝔮_ω.
pub fn defect_density<S: Scalar>(
    target: &MultiPartition,
    c: &Coloring,
    fugacities: &[S],
    p: &ParamSet<S>,
    bound: usize,
) -> Result<S> {
    let fiber = orbifold_fiber(target, bound);
    if fiber.is_empty() {
        return Err(Error::EmptyFiber { order: bound });
    }
    let terms: Vec<S> =
        fiber.iter().map(|m| orbifold_measure(m, c, fugacities, p)).collect::<Result<_>>()?;
    let total = S::sum_all(terms);
    let qq = fugacities.iter().fold(S::one(), |acc, v| acc * v.clone());
    let pq = ParamSet { q: qq.clone(), ..p.clone() };
    let base = qq.powi(target.total_size() as i64) * measure_a0hat(target, &pq)?;
    if base.is_zero() {
        return Err(Error::Resonance { vector: "q^|Λ| μ(Λ)".into(), magnitude: 0.0 });
    }
    Ok(total / base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::multipartitions_up_to;
    use crate::scalar::{q, Q};
    use crate::specfun::TheoryKind;

    fn mp(parts: Vec<Vec<usize>>) -> MultiPartition {
        MultiPartition::from_parts(parts).unwrap()
    }

    fn params(n: usize) -> ParamSet<Q> {
        let a = [q(1, 3), q(-2, 7), q(5, 11)];
        ParamSet::new(a[..n].to_vec(), [q(3, 7), q(-5, 11), q(2, 13)], q(1, 10), TheoryKind::H)
    }

    #[test]
    fn column_counts() {
        let c = Coloring::identity(2);
        assert_eq!(column_color_counts(&mp(vec![vec![], vec![]]), &c), vec![0, 0]);
        assert_eq!(column_color_counts(&mp(vec![vec![2], vec![]]), &c), vec![1, 1]);
        assert_eq!(column_color_counts(&mp(vec![vec![1], vec![]]), &c), vec![1, 0]);
        let m = mp(vec![vec![3, 1], vec![2, 2]]);
        assert_eq!(column_color_counts(&m, &c).iter().sum::<usize>(), m.total_size());
        assert!(Coloring::new(vec![0, 0]).is_err());
    }

    #[test]
    fn pi_map_examples() {
        let m = mp(vec![vec![2, 2, 1], vec![]]);
        assert_eq!(pi_map(&m, 2), mp(vec![vec![1, 1, 1], vec![]]));
        let id = mp(vec![vec![4, 2, 1]]);
        assert_eq!(pi_map(&id, 1), id);
        assert_eq!(pi_map(&MultiPartition::empty(3), 3), MultiPartition::empty(3));
    }

    #[test]
    fn n1_reduces_to_plain_measure() {
        let p = params(1);
        let c = Coloring::identity(1);
        let q0 = q(2, 9);
        for m in multipartitions_up_to(1, 4) {
            let orb = orbifold_measure(&m, &c, &[q0.clone()], &p).unwrap();
            let plain = measure_a0hat(&m, &p).unwrap();
            assert_eq!(orb, q0.powi(m.total_size() as i64) * plain);
            assert_eq!(defect_density(&m, &c, &[q0.clone()], &p, 4).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn empty_target_at_zero_truncation() {
        let p = params(2);
        let c = Coloring::identity(2);
        let f = [q(1, 3), q(2, 5)];
        assert_eq!(defect_density(&MultiPartition::empty(2), &c, &f, &p, 0).unwrap(), q(1, 1));
        let t = mp(vec![vec![1], vec![]]);
        assert_eq!(defect_density(&t, &c, &f, &p, 0), Err(Error::EmptyFiber { order: 0 }));
    }

    #[test]
    fn fiber_matches_brute_force() {
        for n in 1..=3 {
            let all = multipartitions_up_to(n, 6);
            for target in multipartitions_up_to(n, 2) {
                let brute: Vec<MultiPartition> = {
                    let mut v: Vec<MultiPartition> = all.iter().filter(|m| pi_map(m, n) == target).cloned().collect();
                    v.sort();
                    v
                };
                assert_eq!(orbifold_fiber(&target, 6), brute, "N={n} target={target:?}");
            }
        }
    }

    #[test]
    fn defect_density_matches_direct_enumeration() {
        let p = params(2);
        let c = Coloring::new(vec![1, 0]).unwrap();
        let f = [q(1, 3), q(2, 5)];
        let target = mp(vec![vec![1], vec![]]);
        let all = multipartitions_up_to(2, 4);
        let num: Q = all
            .iter()
            .filter(|m| pi_map(m, 2) == target)
            .map(|m| orbifold_measure(m, &c, &f, &p).unwrap())
            .fold(q(0, 1), |a, b| a + b);
        let qq = &f[0] * &f[1];
        let expect = num / (qq * measure_a0hat(&target, &p).unwrap());
        assert_eq!(defect_density(&target, &c, &f, &p, 4).unwrap(), expect);
    }
}
