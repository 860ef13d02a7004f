//! Permutations of `{1, …, n}` in one-line form.
//!
//! The public surface is 1-indexed: `value(i)` is `π(i)` for `i ∈ 1..=n` and
//! [`Permutation::one_line`] returns `[π(1), …, π(n)]`. Storage is 0-based.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Builds from 1-based one-line notation, rejecting anything that is not a
    /// bijection of `{1, …, n}`.
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for (pos, &v) in values.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} at position {} is outside 1..={n}",
                    pos + 1
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
        }
        Ok(Permutation {
            image: values.iter().map(|v| v - 1).collect(),
        })
    }

    pub(crate) fn from_zero_based(image: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&image));
        Permutation { image }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// `[n, n−1, …, 1]`.
    pub fn reversed_identity(n: usize) -> Self {
        Permutation {
            image: (0..n).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `π(i)` for 1-based `i`.
    pub fn value(&self, i: usize) -> usize {
        self.image[i - 1] + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (pos, &v) in self.image.iter().enumerate() {
            inv[v] = pos;
        }
        Permutation { image: inv }
    }

    /// The one-line form read right to left.
    pub fn reverse(&self) -> Permutation {
        Permutation {
            image: self.image.iter().rev().copied().collect(),
        }
    }

    /// Number of `i ∈ 1..n` with `π(i) > π(i+1)`.
    pub fn descent_count(&self) -> usize {
        self.image.windows(2).filter(|w| w[0] > w[1]).count()
    }

    /// Number of pairs `i < j` with `π(i) > π(j)`. `O(n log n)` via a Fenwick tree.
    pub fn inversion_count(&self) -> u64 {
        let n = self.n();
        let mut tree = vec![0u32; n + 1];
        let mut inversions = 0u64;
        for (seen, &v) in self.image.iter().enumerate() {
            // entries already placed that are <= v
            let mut k = v + 1;
            let mut le = 0u64;
            while k > 0 {
                le += u64::from(tree[k]);
                k &= k - 1;
            }
            inversions += seen as u64 - le;
            let mut k = v + 1;
            while k <= n {
                tree[k] += 1;
                k += k & k.wrapping_neg();
            }
        }
        inversions
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((0..n).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            if next_lexicographic(&mut succ) {
                next = Some(succ);
            }
            Some(Permutation { image: cur })
        })
    }
}

pub(crate) fn is_bijection(image: &[usize]) -> bool {
    let mut seen = vec![false; image.len()];
    image
        .iter()
        .all(|&v| v < image.len() && !std::mem::replace(&mut seen[v], true))
}

/// Advances to the next permutation in lexicographic order; returns `false`
/// (leaving the slice untouched) at the last one.
pub(crate) fn next_lexicographic(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_line())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("]")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_line().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_line(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p(&[6, 4, 1, 5, 3, 2, 7]).inverse(), p(&[3, 6, 5, 2, 4, 1, 7]));
        assert_eq!(Permutation::identity(5).inverse(), Permutation::identity(5));
        assert_eq!(p(&[2, 3, 1]).inverse(), p(&[3, 1, 2]));
    }

    #[test]
    fn descent_examples() {
        assert_eq!(p(&[3, 6, 5, 2, 4, 1, 7]).descent_count(), 3);
        assert_eq!(Permutation::identity(9).descent_count(), 0);
        assert_eq!(Permutation::reversed_identity(9).descent_count(), 8);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(p(&[3, 6, 5, 2, 4, 1, 7]).inversion_count(), 11);
        assert_eq!(Permutation::identity(6).inversion_count(), 0);
        assert_eq!(p(&[3, 2, 1]).inversion_count(), 3);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_line(&[]).is_err());
        assert!(Permutation::from_one_line(&[1, 1]).is_err());
        assert!(Permutation::from_one_line(&[0, 1]).is_err());
        assert!(Permutation::from_one_line(&[1, 3]).is_err());
    }

    #[test]
    fn enumerates_all_of_s_n() {
        for n in 1..=6 {
            let all: Vec<_> = Permutation::all(n).collect();
            let expected: usize = (1..=n).product();
            assert_eq!(all.len(), expected);
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    fn naive_inversions(p: &Permutation) -> u64 {
        let v = p.one_line();
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    c += 1;
                }
            }
        }
        c
    }

    proptest! {
        #[test]
        fn inverse_undoes(v in (1usize..40).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
            let perm = Permutation::from_zero_based(v);
            let inv = perm.inverse();
            for i in 1..=perm.n() {
                prop_assert_eq!(inv.value(perm.value(i)), i);
            }
        }

        #[test]
        fn inversions_plus_reverse(v in (1usize..60).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
            let perm = Permutation::from_zero_based(v);
            let n = perm.n() as u64;
            prop_assert_eq!(perm.inversion_count() + perm.reverse().inversion_count(), n * (n - 1) / 2);
            prop_assert_eq!(perm.inversion_count(), naive_inversions(&perm));
        }
    }
}
