//! Young diagrams: enumeration, transpose, boundaries, arm/leg, characters, hooks.
//!
//! Boxes are 1-based `(i, j)` = (row, column); `(i, j) ∈ λ` iff `j ≤ λ_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Box {
    pub i: usize,
    pub j: usize,
}

impl Box {
    pub fn new(i: usize, j: usize) -> Self {
        Box { i, j }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("partition parts must be positive: {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("partition parts must be non-increasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// λ_i with the convention λ_i = 0 past the last row (1-based).
    pub fn row(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// λᵗ_j = #{i : λ_i ≥ j} (1-based).
    pub fn col(&self, j: usize) -> usize {
        if j == 0 {
            return 0;
        }
        self.parts.iter().take_while(|&&p| p >= j).count()
    }

    pub fn contains(&self, b: Box) -> bool {
        b.i >= 1 && b.j >= 1 && b.j <= self.row(b.i)
    }

    pub fn transpose(&self) -> Partition {
        let w = self.row(1);
        Partition { parts: (1..=w).map(|j| self.col(j)).collect() }
    }

    /// Boxes row by row, left to right.
    pub fn boxes(&self) -> impl Iterator<Item = Box> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (1..=len).map(move |j| Box::new(r + 1, j)))
    }

    pub fn arm_leg(&self, b: Box) -> Result<(i64, i64)> {
        if !self.contains(b) {
            return Err(Error::InvalidInput(format!("box ({}, {}) not in diagram {:?}", b.i, b.j, self.parts)));
        }
        Ok((self.row(b.i) as i64 - b.j as i64, self.col(b.j) as i64 - b.i as i64))
    }

    /// Removable boxes ∂₋λ, in row order.
    pub fn inner_boundary(&self) -> Vec<Box> {
        let l = self.length();
        (1..=l)
            .filter(|&i| self.row(i) > self.row(i + 1))
            .map(|i| Box::new(i, self.row(i)))
            .collect()
    }

    /// Addable boxes ∂₊λ, in row order; ∂₊∅ = {(1,1)}.
    pub fn outer_boundary(&self) -> Vec<Box> {
        let l = self.length();
        (1..=l + 1)
            .filter(|&i| i == 1 || self.row(i - 1) > self.row(i))
            .map(|i| Box::new(i, self.row(i) + 1))
            .collect()
    }

    /// (outer, inner).
    pub fn boundaries(&self) -> (Vec<Box>, Vec<Box>) {
        (self.outer_boundary(), self.inner_boundary())
    }

    pub fn add_box(&self, b: Box) -> Result<Partition> {
        let mut parts = self.parts.clone();
        if b.i == parts.len() + 1 {
            parts.push(0);
        }
        if b.i == 0 || b.i > parts.len() || parts[b.i - 1] + 1 != b.j {
            return Err(Error::InvalidInput(format!("({}, {}) is not at the end of a row", b.i, b.j)));
        }
        parts[b.i - 1] += 1;
        Partition::new(parts)
    }

    pub fn remove_box(&self, b: Box) -> Result<Partition> {
        let mut parts = self.parts.clone();
        if b.i == 0 || b.i > parts.len() || parts[b.i - 1] != b.j {
            return Err(Error::InvalidInput(format!("({}, {}) is not the last box of a row", b.i, b.j)));
        }
        parts[b.i - 1] -= 1;
        if parts[b.i - 1] == 0 {
            parts.pop();
        }
        Partition::new(parts)
    }

    pub fn character<S: Scalar>(&self, q1: &S, q2: &S) -> S {
        S::sum_all(self.boxes().map(|b| q1.powi(b.i as i64 - 1) * q2.powi(b.j as i64 - 1)).collect())
    }

    /// 1 − (1−q₁)(1−q₂)·χ_λ.
    pub fn s_lambda<S: Scalar>(&self, q1: &S, q2: &S) -> S {
        S::one() - (S::one() - q1.clone()) * (S::one() - q2.clone()) * self.character(q1, q2)
    }

    /// Σ_{∂₊} q₁^{i−1}q₂^{j−1} − Σ_{∂₋} q₁^{i}q₂^{j}.
    ///
    /// Removable boxes enter with the extra weight q₁q₂ of the second homology.
    pub fn s_lambda_boundary<S: Scalar>(&self, q1: &S, q2: &S) -> S {
        let mono = |b: &Box, s: i64| q1.powi(b.i as i64 - 1 + s) * q2.powi(b.j as i64 - 1 + s);
        let (outer, inner) = self.boundaries();
        let mut terms: Vec<S> = outer.iter().map(|b| mono(b, 0)).collect();
        terms.extend(inner.iter().map(|b| -mono(b, 1)));
        S::sum_all(terms)
    }

    pub fn hook_product(&self) -> u128 {
        self.boxes()
            .map(|b| {
                let (a, l) = self.arm_leg(b).unwrap();
                (a + l + 1) as u128
            })
            .product()
    }
}

/// All partitions of `n`, reverse-lexicographic: (n), (n−1,1), …, (1,…,1).
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Partitions of every size 0..=n, concatenated by size.
pub fn partitions_up_to(n: usize) -> Vec<Partition> {
    (0..=n).flat_map(enumerate_partitions).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiPartition {
    entries: Vec<Partition>,
}

impl MultiPartition {
    pub fn new(entries: Vec<Partition>) -> Self {
        MultiPartition { entries }
    }

    pub fn empty(n: usize) -> Self {
        MultiPartition { entries: vec![Partition::empty(); n] }
    }

    pub fn from_parts(parts: Vec<Vec<usize>>) -> Result<Self> {
        Ok(MultiPartition { entries: parts.into_iter().map(Partition::new).collect::<Result<_>>()? })
    }

    pub fn entries(&self) -> &[Partition] {
        &self.entries
    }

    pub fn color(&self, alpha: usize) -> &Partition {
        &self.entries[alpha]
    }

    pub fn n_colors(&self) -> usize {
        self.entries.len()
    }

    pub fn total_size(&self) -> usize {
        self.entries.iter().map(|p| p.size()).sum()
    }
}

/// All N-tuples of total size `k`, in canonical order.
///
/// Order: size vectors (k₁,…,k_N) in reverse-lexicographic order, then the
/// per-color partitions with the first color varying fastest, each color
/// running through `enumerate_partitions`.
pub fn enumerate_multipartitions(n: usize, k: usize) -> Vec<MultiPartition> {
    fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return if k == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in (0..=k).rev() {
            for mut rest in compositions(n - 1, k - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for sizes in compositions(n, k) {
        let lists: Vec<Vec<Partition>> = sizes.iter().map(|&s| enumerate_partitions(s)).collect();
        let total: usize = lists.iter().map(|l| l.len()).product();
        for mut idx in 0..total {
            let mut entries = Vec::with_capacity(n);
            for l in &lists {
                entries.push(l[idx % l.len()].clone());
                idx /= l.len();
            }
            out.push(MultiPartition::new(entries));
        }
    }
    out
}

pub fn multipartitions_up_to(n: usize, k: usize) -> Vec<MultiPartition> {
    (0..=k).flat_map(|s| enumerate_multipartitions(n, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn b(i: usize, j: usize) -> Box {
        Box::new(i, j)
    }

    // Independent oracle: p(n, k) = number of partitions of n with parts ≤ k.
    fn count_oracle(n: usize) -> u64 {
        let mut t = vec![vec![0u64; n + 1]; n + 1];
        for k in 0..=n {
            t[0][k] = 1;
        }
        for m in 1..=n {
            for k in 1..=n {
                t[m][k] = t[m][k - 1] + if m >= k { t[m - k][k] } else { 0 };
            }
        }
        t[n][n]
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(1), vec![p(&[1])]);
        assert_eq!(
            enumerate_partitions(4),
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]
        );
    }

    #[test]
    fn enumeration_counts_match_recurrence() {
        for n in 0..=30 {
            assert_eq!(enumerate_partitions(n).len() as u64, count_oracle(n), "n = {n}");
        }
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(Partition::empty().transpose(), Partition::empty());
        assert_eq!(p(&[5, 3, 2, 2]).transpose(), p(&[4, 4, 2, 1, 1]));
        assert_eq!(p(&[2, 1]).transpose(), p(&[2, 1]));
    }

    #[test]
    fn arm_leg_examples() {
        assert_eq!(p(&[1]).arm_leg(b(1, 1)).unwrap(), (0, 0));
        assert_eq!(p(&[5, 3, 2, 2]).arm_leg(b(1, 2)).unwrap(), (3, 3));
        assert_eq!(p(&[2, 1]).arm_leg(b(1, 1)).unwrap(), (1, 1));
        assert!(p(&[2, 1]).arm_leg(b(2, 2)).is_err());
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(Partition::empty().boundaries(), (vec![b(1, 1)], vec![]));
        assert_eq!(p(&[1]).boundaries(), (vec![b(1, 2), b(2, 1)], vec![b(1, 1)]));
        assert_eq!(p(&[2, 1]).boundaries(), (vec![b(1, 3), b(2, 2), b(3, 1)], vec![b(1, 2), b(2, 1)]));
    }

    // Brute-force boundary straight from the membership definitions.
    fn brute_boundaries(l: &Partition) -> (Vec<Box>, Vec<Box>) {
        let h = l.length() + 2;
        let w = l.row(1) + 2;
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        for i in 1..=h {
            for j in 1..=w {
                let c = |i: usize, j: usize| i >= 1 && j >= 1 && l.contains(b(i, j));
                if c(i, j) && !c(i + 1, j) && !c(i, j + 1) {
                    inner.push(b(i, j));
                }
                if !c(i, j) && (i == 1 || c(i - 1, j)) && (j == 1 || c(i, j - 1)) {
                    outer.push(b(i, j));
                }
            }
        }
        (outer, inner)
    }

    #[test]
    fn boundaries_match_brute_force_and_count() {
        for n in 0..=12 {
            for l in enumerate_partitions(n) {
                let (o, i) = l.boundaries();
                assert_eq!((o.clone(), i.clone()), brute_boundaries(&l), "{l:?}");
                assert_eq!(o.len(), i.len() + 1);
                for bx in &i {
                    assert_eq!(l.remove_box(*bx).unwrap().size(), n - 1);
                }
                for bx in &o {
                    assert_eq!(l.add_box(*bx).unwrap().size(), n + 1);
                }
                assert_eq!(l.transpose().transpose(), l);
            }
        }
    }

    #[test]
    fn character_and_s_lambda_examples() {
        let (two, three) = (q(2, 1), q(3, 1));
        assert_eq!(Partition::empty().character(&two, &three), q(0, 1));
        assert_eq!(p(&[1]).character(&two, &three), q(1, 1));
        assert_eq!(p(&[2, 1]).character(&two, &three), q(6, 1));
        assert_eq!(Partition::empty().s_lambda(&two, &three), q(1, 1));
        let z = Q::from_integer(0.into());
        // q₁ + q₂ − q₁q₂ at the origin.
        assert_eq!(p(&[1]).s_lambda(&z, &z), q(0, 1));
        assert_eq!(p(&[1]).s_lambda_boundary(&z, &z), q(0, 1));
        assert_eq!(p(&[2, 1]).s_lambda(&two, &three), q(-11, 1));
        assert_eq!(p(&[2, 1]).s_lambda_boundary(&two, &three), q(-11, 1));
    }

    #[test]
    fn hook_examples() {
        assert_eq!(Partition::empty().hook_product(), 1);
        assert_eq!(p(&[1]).hook_product(), 1);
        assert_eq!(p(&[2, 1]).hook_product(), 3);
    }

    #[test]
    fn hook_length_formula() {
        // n!/Π hooks = number of standard tableaux; Σ (dim)^2 = n!.
        for n in 1..=9usize {
            let fact: u128 = (1..=n as u128).product();
            let total: u128 =
                enumerate_partitions(n).iter().map(|l| (fact / l.hook_product()).pow(2)).sum();
            assert_eq!(total, fact);
        }
    }

    #[test]
    fn multipartition_counts() {
        // Coefficients of Π(1−q^n)^{−2}: 1, 2, 5, 10, 20.
        let c: Vec<usize> = (0..5).map(|k| enumerate_multipartitions(2, k).len()).collect();
        assert_eq!(c, vec![1, 2, 5, 10, 20]);
        for mp in enumerate_multipartitions(3, 3) {
            assert_eq!(mp.total_size(), 3);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let mp = MultiPartition::from_parts(vec![vec![5, 3, 2, 2], vec![]]).unwrap();
        let js = serde_json::to_string(&mp).unwrap();
        assert_eq!(js, "[[5,3,2,2],[]]");
        assert_eq!(serde_json::from_str::<MultiPartition>(&js).unwrap(), mp);
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }

    proptest! {
        #[test]
        fn s_lambda_two_forms_agree(n in 0usize..9, idx in 0usize..1000,
                                    a in -9i64..9, b_ in 1i64..9, c in -9i64..9, d in 1i64..9) {
            let all = enumerate_partitions(n);
            let l = &all[idx % all.len()];
            let (q1, q2) = (q(a, b_), q(c, d));
            prop_assert_eq!(l.s_lambda(&q1, &q2), l.s_lambda_boundary(&q1, &q2));
        }
    }
}
