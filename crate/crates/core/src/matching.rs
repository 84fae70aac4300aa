//! Exact matching number of a family, with a disjoint-set certificate.

use crate::family::Family;
use crate::kset::KSet;

/// Default cap on branch-and-bound nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Result of a bounded exact search: either solved or explicitly unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Solved(T),
    Unknown { nodes: u64 },
}

impl<T> Outcome<T> {
    pub fn solved(self) -> Option<T> {
        match self {
            Outcome::Solved(v) => Some(v),
            Outcome::Unknown { .. } => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Outcome::Unknown { .. })
    }

    pub fn map<U, F: FnOnce(T) -> U>(self, f: F) -> Outcome<U> {
        match self {
            Outcome::Solved(v) => Outcome::Solved(f(v)),
            Outcome::Unknown { nodes } => Outcome::Unknown { nodes },
        }
    }
}

/// Pairwise disjoint members of a family witnessing its matching number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCertificate {
    pub sets: Vec<KSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub nu: usize,
    pub certificate: MatchingCertificate,
    pub nodes: u64,
}

pub fn is_pairwise_disjoint(sets: &[KSet]) -> bool {
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.is_disjoint(b)))
}

/// Maximum number of pairwise disjoint members of `fam`.
///
/// Branches on the colex-least remaining candidate (include first, then
/// exclude) and prunes with the smaller of two upper bounds: free elements
/// divided by the smallest candidate size, and a greedy cover of the candidates
/// by stars (sets through a common element pairwise intersect, so a matching
/// uses at most one set per star). Because sets are visited in colex order and
/// only strict improvements are kept, the certificate is the lexicographically
/// least sequence of colex ranks among all maximum matchings.
pub fn matching_number(fam: &Family, budget: Option<u64>) -> Outcome<Matching> {
    let words = fam.ground_n().div_ceil(64).max(1);
    let mut flat = vec![0u64; words * fam.len()];
    for (i, m) in fam.iter().enumerate() {
        flat[i * words..i * words + m.words().len()].copy_from_slice(m.words());
    }
    let sizes: Vec<usize> = fam.iter().map(KSet::len).collect();
    let mut solver = Solver {
        words,
        flat,
        sizes,
        ground_n: fam.ground_n(),
        budget,
        nodes: 0,
        best: Vec::new(),
        chosen: Vec::new(),
    };
    let all: Vec<usize> = (0..fam.len()).collect();
    if solver.search(&all).is_err() {
        return Outcome::Unknown {
            nodes: solver.nodes,
        };
    }
    let sets: Vec<KSet> = solver.best.iter().map(|&i| fam.members()[i].clone()).collect();
    Outcome::Solved(Matching {
        nu: sets.len(),
        certificate: MatchingCertificate { sets },
        nodes: solver.nodes,
    })
}

struct BudgetExhausted;

struct Solver {
    words: usize,
    flat: Vec<u64>,
    sizes: Vec<usize>,
    ground_n: usize,
    budget: Option<u64>,
    nodes: u64,
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl Solver {
    fn set(&self, i: usize) -> &[u64] {
        &self.flat[i * self.words..(i + 1) * self.words]
    }

    fn disjoint(&self, a: usize, b: usize) -> bool {
        self.set(a).iter().zip(self.set(b)).all(|(x, y)| x & y == 0)
    }

    fn search(&mut self, cands: &[usize]) -> Result<(), BudgetExhausted> {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return Err(BudgetExhausted);
        }
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        for start in 0..cands.len() {
            let rest = &cands[start..];
            if self.chosen.len() + self.upper_bound(rest) <= self.best.len() {
                return Ok(());
            }
            let pick = rest[0];
            let next: Vec<usize> = rest[1..]
                .iter()
                .copied()
                .filter(|&j| self.disjoint(pick, j))
                .collect();
            self.chosen.push(pick);
            let r = self.search(&next);
            self.chosen.pop();
            r?;
        }
        Ok(())
    }

    fn upper_bound(&self, cands: &[usize]) -> usize {
        let mut empties = 0;
        let mut min_size = usize::MAX;
        let mut union = vec![0u64; self.words];
        for &c in cands {
            if self.sizes[c] == 0 {
                empties += 1;
                continue;
            }
            min_size = min_size.min(self.sizes[c]);
            for (u, w) in union.iter_mut().zip(self.set(c)) {
                *u |= w;
            }
        }
        if min_size == usize::MAX {
            return empties;
        }
        let free: usize = union.iter().map(|w| w.count_ones() as usize).sum();
        let element_bound = free / min_size;
        empties + element_bound.min(self.star_cover(cands))
    }

    /// Number of stars a greedy cover needs to hit every non-empty candidate.
    fn star_cover(&self, cands: &[usize]) -> usize {
        let mut alive: Vec<usize> = cands.iter().copied().filter(|&c| self.sizes[c] > 0).collect();
        let mut counts = vec![0usize; self.ground_n];
        let mut stars = 0;
        while !alive.is_empty() {
            counts.iter_mut().for_each(|c| *c = 0);
            for &c in &alive {
                for_each_bit(self.set(c), |e| counts[e] += 1);
            }
            let (centre, _) = counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("non-empty ground set");
            let (w, b) = (centre / 64, centre % 64);
            alive.retain(|&c| self.set(c)[w] >> b & 1 == 0);
            stars += 1;
        }
        stars
    }
}

fn for_each_bit<F: FnMut(usize)>(words: &[u64], mut f: F) {
    for (w, &word) in words.iter().enumerate() {
        let mut rest = word;
        while rest != 0 {
            f(w * 64 + rest.trailing_zeros() as usize);
            rest &= rest - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kset::enumerate_ksets;

    fn fam(n: usize, sets: &[&[usize]]) -> Family {
        Family::new(n, None, sets.iter().map(|s| KSet::of(s))).unwrap()
    }

    fn solve(f: &Family) -> Matching {
        matching_number(f, None).solved().unwrap()
    }

    #[test]
    fn disjointness_predicate() {
        assert!(is_pairwise_disjoint(&[KSet::of(&[1, 2]), KSet::of(&[3, 4])]));
        assert!(!is_pairwise_disjoint(&[KSet::of(&[1, 2]), KSet::of(&[2, 3])]));
        assert!(is_pairwise_disjoint(&[]));
    }

    #[test]
    fn already_disjoint_family() {
        let f = fam(6, &[&[1, 2], &[3, 4], &[5, 6]]);
        let m = solve(&f);
        assert_eq!(m.nu, 3);
        assert_eq!(m.certificate.sets, f.members().to_vec());
    }

    #[test]
    fn empty_family() {
        assert_eq!(solve(&Family::empty(4, Some(2))).nu, 0);
    }

    #[test]
    fn empty_set_member_counts_once() {
        let f = fam(4, &[&[], &[1, 2], &[3, 4]]);
        assert_eq!(solve(&f).nu, 3);
    }

    #[test]
    fn complete_graph_k5() {
        let f = Family::complete(5, 2).unwrap();
        let m = solve(&f);
        assert_eq!(m.nu, 2);
        assert_eq!(m.certificate.sets, vec![KSet::of(&[1, 2]), KSet::of(&[3, 4])]);
    }

    #[test]
    fn star_is_a_single_edge() {
        let f = Family::new(8, Some(3), enumerate_ksets(8, 3).filter(|s| s.contains(1))).unwrap();
        assert_eq!(solve(&f).nu, 1);
    }

    #[test]
    fn budget_exhaustion_is_explicit() {
        let f = Family::complete(9, 3).unwrap();
        assert!(matching_number(&f, Some(1)).is_unknown());
        assert_eq!(solve(&f).nu, 3);
    }

    #[test]
    fn certificate_tie_break_is_lex_least_ranks() {
        // {1,2} and {3,4} are disjoint, and so are {1,3},{2,4}; colex ranks
        // favour the pair containing the colex-least member.
        let f = fam(4, &[&[2, 4], &[1, 3], &[3, 4], &[1, 2]]);
        let m = solve(&f);
        assert_eq!(m.certificate.sets, vec![KSet::of(&[1, 2]), KSet::of(&[3, 4])]);
    }
}
