//! Symmetric-group and pair-partition combinatorics.
//!
//! Permutations are stored in one-line notation over `1..=n`. A
//! [`ReducedWord`] `[i_1, ..., i_k]` stands for the product
//! `π_{i_1} ∘ π_{i_2} ∘ ... ∘ π_{i_k}` of adjacent transpositions, with the
//! rightmost factor applied first, the same order in which the matching
//! operator product `T_{i_1} ... T_{i_k}` acts.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest `n` for which all of `S_n` may be enumerated.
pub const PERMUTATION_CAP: usize = 6;
/// Largest `n` for which all pair partitions of `{1..n}` may be enumerated.
pub const PAIRING_CAP: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from one-line notation (values in `1..=n`).
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::Config(alloc::format!(
                    "{images:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n).collect(),
        }
    }

    /// The adjacent transposition `π_i` exchanging `i` and `i + 1` in `S_n`.
    pub fn transposition(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange(alloc::format!(
                "transposition π_{i} in S_{n}"
            )));
        }
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(i - 1, i);
        Ok(Self { images })
    }

    /// The order-reversing permutation `k ↦ n + 1 - k`.
    pub fn reversal(n: usize) -> Self {
        Self {
            images: (1..=n).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self(i)` for `i` in `1..=n`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    /// `self ∘ other`, i.e. `other` applied first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = alloc::vec![0; self.len()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v - 1] = k + 1;
        }
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

/// A word in the adjacent transpositions `π_1, ..., π_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    pub n: usize,
    pub letters: Vec<usize>,
}

impl ReducedWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Multiplies the letters back together.
    pub fn compose(&self) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.n);
        for &i in &self.letters {
            acc = acc.compose(&Permutation::transposition(self.n, i)?)?;
        }
        Ok(acc)
    }
}

/// Number of pairs `i < j` with `p(i) > p(j)`.
pub fn inversion_count(p: &Permutation) -> usize {
    let v = p.images();
    let mut count = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                count += 1;
            }
        }
    }
    count
}

/// A minimal word for `p`, found by bubble-sorting its one-line notation.
///
/// Each sweep removes a descent `p(i) > p(i+1)` by right-multiplying with
/// `π_i`, which lowers the inversion count by exactly one; the recorded
/// letters, read in reverse, multiply back to `p`.
pub fn reduced_word(p: &Permutation) -> ReducedWord {
    let n = p.len();
    let mut work = p.images.clone();
    let mut sorted_by = Vec::new();
    loop {
        let mut swapped = false;
        for i in 0..n.saturating_sub(1) {
            if work[i] > work[i + 1] {
                work.swap(i, i + 1);
                sorted_by.push(i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    sorted_by.reverse();
    ReducedWord {
        n,
        letters: sorted_by,
    }
}

/// All `n!` permutations of `1..=n` in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::Config("enumerate_permutations needs n >= 1".into()));
    }
    if n > PERMUTATION_CAP {
        return Err(Error::ResourceLimit {
            what: "permutation degree",
            requested: n,
            cap: PERMUTATION_CAP,
        });
    }
    let mut current: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation {
            images: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..n - 1).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    Ok(out)
}

/// A pair partition `{(a_1, z_1), ..., (a_p, z_p)}` of an ordered set of
/// positions, with `a_k < z_k` and pairs sorted by their first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
    crossings: Vec<(usize, usize)>,
}

impl Pairing {
    /// Validates that `pairs` partition `{1..n}` and computes the crossings.
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = alloc::vec![false; n];
        for &(a, z) in &pairs {
            if a == 0 || z > n || a >= z || seen[a - 1] || seen[z - 1] {
                return Err(Error::Config(alloc::format!(
                    "{pairs:?} is not a pairing of 1..={n}"
                )));
            }
            seen[a - 1] = true;
            seen[z - 1] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config(alloc::format!(
                "{pairs:?} does not cover 1..={n}"
            )));
        }
        pairs.sort_unstable();
        Ok(Self::from_sorted(pairs))
    }

    fn from_sorted(pairs: Vec<(usize, usize)>) -> Self {
        let crossings = crossings_of(&pairs);
        Self { pairs, crossings }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Index pairs `(k, l)` (1-based into [`Self::pairs`]) with
    /// `a_k < a_l < z_k < z_l`.
    pub fn crossings(&self) -> &[(usize, usize)] {
        &self.crossings
    }

    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }
}

fn crossings_of(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (k, &(ak, zk)) in pairs.iter().enumerate() {
        for (l, &(al, zl)) in pairs.iter().enumerate() {
            if ak < al && al < zk && zk < zl {
                out.push((k + 1, l + 1));
            }
        }
    }
    out
}

/// The crossing set of a pairing.
pub fn crossing_set(v: &Pairing) -> Vec<(usize, usize)> {
    v.crossings.clone()
}

/// All pair partitions of `{1..n}`; empty for odd `n`.
///
/// The first unmatched position is paired with every later free position
/// in increasing order, so the enumeration order is deterministic.
pub fn enumerate_pairings(n: usize) -> Result<Vec<Pairing>> {
    if n > PAIRING_CAP {
        return Err(Error::ResourceLimit {
            what: "pairing size",
            requested: n,
            cap: PAIRING_CAP,
        });
    }
    let mut out = Vec::new();
    if n % 2 == 1 {
        return Ok(out);
    }
    let mut used = alloc::vec![false; n + 1];
    let mut stack = Vec::with_capacity(n / 2);
    pair_up(n, &mut used, &mut stack, &mut out);
    Ok(out)
}

fn pair_up(
    n: usize,
    used: &mut [bool],
    stack: &mut Vec<(usize, usize)>,
    out: &mut Vec<Pairing>,
) {
    let Some(a) = (1..=n).find(|&k| !used[k]) else {
        out.push(Pairing::from_sorted(stack.clone()));
        return;
    };
    used[a] = true;
    for z in a + 1..=n {
        if used[z] {
            continue;
        }
        used[z] = true;
        stack.push((a, z));
        pair_up(n, used, stack, out);
        stack.pop();
        used[z] = false;
    }
    used[a] = false;
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute_inversions(v: &[usize]) -> usize {
        (0..v.len())
            .flat_map(|i| (0..v.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i < j && v[i] > v[j])
            .count()
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversion_count(&Permutation::identity(4)), 0);
        assert_eq!(inversion_count(&Permutation::transposition(2, 1).unwrap()), 1);
        let rev = Permutation::new(vec![3, 2, 1]).unwrap();
        assert_eq!(inversion_count(&rev), brute_inversions(&[3, 2, 1]));
        assert_eq!(inversion_count(&rev), 3);
    }

    #[test]
    fn reduced_word_examples() {
        assert!(reduced_word(&Permutation::identity(3)).is_empty());
        let pi1 = Permutation::transposition(2, 1).unwrap();
        assert_eq!(reduced_word(&pi1).letters, vec![1]);
        let rev = Permutation::reversal(3);
        let w = reduced_word(&rev);
        assert_eq!(w.len(), 3);
        assert_eq!(w.compose().unwrap(), rev);
    }

    #[test]
    fn reduced_words_recompose_for_all_small_permutations() {
        for n in 1..=5 {
            for p in enumerate_permutations(n).unwrap() {
                let w = reduced_word(&p);
                assert_eq!(w.len(), inversion_count(&p));
                assert_eq!(w.compose().unwrap(), p);
            }
        }
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(
            enumerate_permutations(1).unwrap(),
            vec![Permutation::identity(1)]
        );
        assert_eq!(enumerate_permutations(3).unwrap().len(), 6);
        let all4 = enumerate_permutations(4).unwrap();
        assert_eq!(all4.len(), 24);
        let mut dedup = all4.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 24);
        assert!(matches!(
            enumerate_permutations(7),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn invalid_permutations_rejected() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::transposition(3, 3).is_err());
    }

    #[test]
    fn pairing_counts() {
        assert!(enumerate_pairings(3).unwrap().is_empty());
        assert_eq!(enumerate_pairings(0).unwrap().len(), 1);
        assert_eq!(enumerate_pairings(4).unwrap().len(), 3);
        assert_eq!(enumerate_pairings(6).unwrap().len(), 15);
        assert!(enumerate_pairings(10).is_err());
    }

    #[test]
    fn crossing_examples() {
        let disjoint = Pairing::new(4, vec![(1, 2), (3, 4)]).unwrap();
        assert!(crossing_set(&disjoint).is_empty());
        let crossed = Pairing::new(4, vec![(1, 3), (2, 4)]).unwrap();
        assert_eq!(crossing_set(&crossed), vec![(1, 2)]);
        let nested = Pairing::new(4, vec![(1, 4), (2, 3)]).unwrap();
        assert!(crossing_set(&nested).is_empty());
    }

    #[test]
    fn pairings_are_sorted_and_partition() {
        for p in enumerate_pairings(6).unwrap() {
            let firsts: Vec<usize> = p.pairs().iter().map(|x| x.0).collect();
            let mut sorted = firsts.clone();
            sorted.sort();
            assert_eq!(firsts, sorted);
            let mut all: Vec<usize> = p.pairs().iter().flat_map(|&(a, z)| [a, z]).collect();
            all.sort();
            assert_eq!(all, (1..=6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn invalid_pairings_rejected() {
        assert!(Pairing::new(4, vec![(1, 2), (2, 3)]).is_err());
        assert!(Pairing::new(4, vec![(2, 1), (3, 4)]).is_err());
        assert!(Pairing::new(4, vec![(1, 2)]).is_err());
    }
}
