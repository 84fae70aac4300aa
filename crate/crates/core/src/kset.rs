//! Finite subsets of a ground set `[n] = {1, ..., n}` stored as bit-vectors.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Default bound on the ground set size for materialized sets and families.
pub const DEFAULT_GROUND_CAP: usize = 4096;

const WORD: usize = 64;

/// A subset of `[n]`. Element `e` is stored at bit `e - 1`.
///
/// Trailing zero words are never stored, so two sets compare equal exactly when
/// they hold the same elements. The total order is size first, then colex
/// (the set whose largest differing element is smaller comes first).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct KSet {
    words: Vec<u64>,
    size: usize,
}

impl KSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from 1-based elements. Duplicates are merged.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut set = Self::empty();
        for e in elements {
            if e == 0 {
                return Err(Error::ElementOutOfRange { element: 0, n: 0 });
            }
            set.insert(e);
        }
        Ok(set)
    }

    /// Builds from elements known to be positive; panics on `0`.
    pub fn of(elements: &[usize]) -> Self {
        Self::from_elements(elements.iter().copied()).expect("elements are 1-based")
    }

    /// Interprets bit `i` of `mask` as element `i + 1`.
    pub fn from_mask(mask: u64) -> Self {
        let mut set = Self {
            words: vec![mask],
            size: mask.count_ones() as usize,
        };
        set.normalize();
        set
    }

    /// The low 64 bits as a mask, or `None` if the set reaches beyond element 64.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        let size = words.iter().map(|w| w.count_ones() as usize).sum();
        let mut set = Self { words, size };
        set.normalize();
        set
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        if e == 0 {
            return false;
        }
        let (w, b) = ((e - 1) / WORD, (e - 1) % WORD);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e > 0, "elements are 1-based");
        let (w, b) = ((e - 1) / WORD, (e - 1) % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.size += 1;
        }
    }

    pub fn remove(&mut self, e: usize) {
        if self.contains(e) {
            let (w, b) = ((e - 1) / WORD, (e - 1) % WORD);
            self.words[w] &= !(1 << b);
            self.size -= 1;
            self.normalize();
        }
    }

    /// Copy with `from` replaced by `to`.
    pub fn replaced(&self, from: usize, to: usize) -> Self {
        let mut out = self.clone();
        out.remove(from);
        out.insert(to);
        out
    }

    /// Elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(w * WORD + b + 1)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements().collect()
    }

    pub fn min_element(&self) -> Option<usize> {
        self.elements().next()
    }

    pub fn max_element(&self) -> Option<usize> {
        let (w, &word) = self.words.iter().enumerate().next_back()?;
        Some(w * WORD + (WORD - word.leading_zeros() as usize))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_words(
            self.words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }

    pub fn union(&self, other: &Self) -> Self {
        let len = self.words.len().max(other.words.len());
        Self::from_words(
            (0..len)
                .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_words(
            self.words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    /// `self ∩ [m]`.
    pub fn truncated(&self, m: usize) -> Self {
        let full = m / WORD;
        let mut words: Vec<u64> = self.words.iter().take(full + 1).copied().collect();
        if words.len() > full {
            let rem = m % WORD;
            words[full] &= if rem == 0 { 0 } else { u64::MAX >> (WORD - rem) };
        }
        Self::from_words(words)
    }

    /// Colex comparison of the underlying bit-vectors, ignoring size.
    pub fn colex_cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl Ord for KSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.colex_cmp(other))
    }
}

impl PartialOrd for KSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Coordinatewise precedence: the i-th smallest element of `f` is at most the
/// i-th smallest element of `g`, for every i.
pub fn precedes(f: &KSet, g: &KSet) -> Result<bool> {
    if f.len() != g.len() {
        return Err(Error::SizeMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    Ok(f.elements().zip(g.elements()).all(|(a, b)| a <= b))
}

/// All `k`-subsets of `[n]` in colex order.
pub fn enumerate_ksets(n: usize, k: usize) -> ColexKSets {
    ColexKSets {
        n,
        current: if k <= n { Some((1..=k).collect()) } else { None },
    }
}

/// Iterator behind [`enumerate_ksets`].
#[derive(Debug, Clone)]
pub struct ColexKSets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for ColexKSets {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let c = self.current.as_mut()?;
        let out = KSet::of(c);
        let k = c.len();
        // Smallest position that can move up without colliding.
        let pos = (0..k).find(|&i| {
            let limit = if i + 1 < k { c[i + 1] } else { self.n + 1 };
            c[i] + 1 < limit
        });
        match pos {
            Some(i) => {
                c[i] += 1;
                for (j, slot) in c.iter_mut().enumerate().take(i) {
                    *slot = j + 1;
                }
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// Iterates all `k`-subsets of a 64-bit universe mask as sub-masks, using
/// Gosper's hack on positions within the universe.
pub fn submasks_of_size(universe: u64, k: u32) -> impl Iterator<Item = u64> {
    let positions: Vec<u64> = (0..64).filter(|b| universe >> b & 1 == 1).map(|b| 1u64 << b).collect();
    let m = positions.len() as u32;
    let mut state: Option<u64> = if k > m {
        None
    } else if k == 0 {
        Some(0)
    } else if k == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let x = state?;
        let out = (0..m)
            .filter(|&i| x >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | positions[i as usize]);
        state = if x == 0 {
            None
        } else {
            let c = x & x.wrapping_neg();
            let r = x.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let next = (((r ^ x) >> 2) / c) | r;
                if m < 64 && next >> m != 0 {
                    None
                } else {
                    Some(next)
                }
            }
        };
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::binom;
    use num_bigint::BigInt;
    use std::collections::{HashSet, VecDeque};

    #[test]
    fn basic_membership() {
        let mut s = KSet::of(&[1, 3, 70]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(70));
        assert!(!s.contains(2));
        assert_eq!(s.max_element(), Some(70));
        s.remove(70);
        assert_eq!(s.words().len(), 1);
        assert_eq!(s, KSet::of(&[1, 3]));
        assert_eq!(s.to_string(), "{1,3}");
        assert!(KSet::from_elements([0]).is_err());
    }

    #[test]
    fn precedes_examples() {
        assert!(precedes(&KSet::of(&[1, 3]), &KSet::of(&[2, 3])).unwrap());
        assert!(!precedes(&KSet::of(&[2, 3]), &KSet::of(&[1, 4])).unwrap());
        let f = KSet::of(&[2, 5]);
        assert!(precedes(&f, &f).unwrap());
        assert!(matches!(
            precedes(&KSet::of(&[1]), &KSet::of(&[1, 2])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let sets: Vec<_> = enumerate_ksets(3, 2).collect();
        assert_eq!(sets, vec![KSet::of(&[1, 2]), KSet::of(&[1, 3]), KSet::of(&[2, 3])]);
        assert_eq!(enumerate_ksets(4, 0).collect::<Vec<_>>(), vec![KSet::empty()]);
        assert_eq!(enumerate_ksets(5, 2).count(), 10);
        assert_eq!(enumerate_ksets(2, 3).count(), 0);
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 0..=9 {
            for k in 0..=n {
                let sets: Vec<_> = enumerate_ksets(n, k).collect();
                assert_eq!(BigInt::from(sets.len()), binom(n as u64, k as i64));
                assert!(sets.windows(2).all(|w| w[0] < w[1]), "strict colex order");
            }
        }
    }

    #[test]
    fn submask_enumeration_matches_binomials() {
        let universe = 0b1011_0110_1101u64;
        for k in 0..=8 {
            let subs: Vec<u64> = submasks_of_size(universe, k).collect();
            assert_eq!(BigInt::from(subs.len()), binom(8, k as i64));
            assert!(subs.iter().all(|s| s & !universe == 0 && s.count_ones() == k));
            let distinct: HashSet<_> = subs.iter().collect();
            assert_eq!(distinct.len(), subs.len());
        }
        assert_eq!(submasks_of_size(u64::MAX, 64).count(), 1);
        assert_eq!(submasks_of_size(u64::MAX, 63).count(), 64);
    }

    fn all_pairs(n: usize, k: usize) -> Vec<(KSet, KSet)> {
        let sets: Vec<_> = enumerate_ksets(n, k).collect();
        sets.iter()
            .flat_map(|a| sets.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    #[test]
    fn precedence_is_a_partial_order() {
        for n in 1..=7 {
            for k in 1..=3.min(n) {
                let sets: Vec<_> = enumerate_ksets(n, k).collect();
                for a in &sets {
                    assert!(precedes(a, a).unwrap());
                    for b in &sets {
                        let ab = precedes(a, b).unwrap();
                        if ab && precedes(b, a).unwrap() {
                            assert_eq!(a, b);
                        }
                        if ab {
                            // Colex is a linear extension.
                            assert!(a <= b);
                            for c in &sets {
                                if precedes(b, c).unwrap() {
                                    assert!(precedes(a, c).unwrap());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Sets reachable from `f` by repeatedly raising one element by one.
    fn increment_closure(f: &KSet, n: usize) -> HashSet<KSet> {
        let mut seen = HashSet::from([f.clone()]);
        let mut queue = VecDeque::from([f.clone()]);
        while let Some(cur) = queue.pop_front() {
            for x in cur.to_vec() {
                if x < n && !cur.contains(x + 1) {
                    let next = cur.replaced(x, x + 1);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        seen
    }

    #[test]
    fn precedence_equals_increment_reachability() {
        for n in 1..=7 {
            for k in 1..=3.min(n) {
                let sets: Vec<_> = enumerate_ksets(n, k).collect();
                for f in &sets {
                    let reach = increment_closure(f, n);
                    for g in &sets {
                        assert_eq!(precedes(f, g).unwrap(), reach.contains(g), "{f} vs {g}");
                    }
                }
            }
        }
        assert_eq!(all_pairs(3, 1).len(), 9);
    }

    #[test]
    fn set_algebra() {
        let a = KSet::of(&[1, 2, 65]);
        let b = KSet::of(&[2, 3]);
        assert_eq!(a.intersection(&b), KSet::of(&[2]));
        assert_eq!(a.union(&b), KSet::of(&[1, 2, 3, 65]));
        assert_eq!(a.difference(&b), KSet::of(&[1, 65]));
        assert!(KSet::of(&[2]).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.truncated(64), KSet::of(&[1, 2]));
        assert_eq!(a.truncated(65), a);
        assert_eq!(a.truncated(1), KSet::of(&[1]));
        assert_eq!(a.truncated(0), KSet::empty());
        assert_eq!(KSet::from_mask(0b101), KSet::of(&[1, 3]));
        assert_eq!(KSet::of(&[1, 3]).to_mask(), Some(0b101));
    }
}
