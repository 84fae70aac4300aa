//! `(i, j)`-compressions and shiftedness.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::kset::KSet;

/// Replaces `j` by `i` in every member containing `j` but not `i`, unless the
/// replacement is already a member of the input family.
pub fn compress_ij(fam: &Family, i: usize, j: usize) -> Result<Family> {
    if i == 0 || i >= j || j > fam.ground_n() {
        return Err(Error::InvalidParams(format!(
            "compression needs 1 <= i < j <= n, got i={i}, j={j}, n={}",
            fam.ground_n()
        )));
    }
    let present: HashSet<&KSet> = fam.iter().collect();
    let members = fam.iter().map(|f| {
        if f.contains(j) && !f.contains(i) {
            let moved = f.replaced(j, i);
            if present.contains(&moved) {
                f.clone()
            } else {
                moved
            }
        } else {
            f.clone()
        }
    });
    Family::new(fam.ground_n(), fam.uniformity(), members)
}

/// Applies compressions in lexicographic `(i, j)` order, restarting from
/// `(1, 2)` after every change, until nothing moves.
pub fn shift_to_fixpoint(fam: &Family) -> Family {
    let n = fam.ground_n();
    let mut cur = fam.clone();
    'sweep: loop {
        for i in 1..=n {
            for j in i + 1..=n {
                let next = compress_ij(&cur, i, j).expect("indices in range");
                if next != cur {
                    cur = next;
                    continue 'sweep;
                }
            }
        }
        return cur;
    }
}

/// Closure under precedence, checked through single-element decrements: for
/// every member and every `x` in it, each `y < x` outside the member gives a
/// set that must also be a member.
pub fn is_shifted(fam: &Family) -> bool {
    fam.iter().all(|g| {
        g.elements().all(|x| {
            (1..x)
                .filter(|&y| !g.contains(y))
                .all(|y| fam.contains(&g.replaced(x, y)))
        })
    })
}

/// Violations found by [`random_suite`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteTally {
    pub families: usize,
    pub compressions: usize,
    pub size_changed: Vec<Family>,
    pub nu_increased: Vec<Family>,
    pub not_shifted: Vec<Family>,
}

/// A random `k`-uniform family on `[n]`, `n <= 10`, `k <= 3`, for trial
/// `index` under `seed`.
pub fn random_family(seed: u64, index: u64) -> Family {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let k = rng.gen_range(1..=3);
    let n = rng.gen_range(k.max(2)..=10);
    let density: f64 = rng.gen_range(0.05..0.6);
    let members: Vec<KSet> = crate::kset::enumerate_ksets(n, k).filter(|_| rng.gen_bool(density)).collect();
    Family::new(n, Some(k), members).expect("subsets of [n]")
}

/// On `trials` seeded random families: every compression keeps the size and
/// does not raise the matching number, and every fixpoint is shifted.
pub fn random_suite(trials: u64, seed: u64) -> SuiteTally {
    use crate::matching::matching_number;
    use rayon::prelude::*;
    let nu = |f: &Family| matching_number(f, None).solved().expect("no budget").nu;
    let per: Vec<SuiteTally> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = random_family(seed, t);
            let base_nu = nu(&f);
            let mut tally = SuiteTally {
                families: 1,
                ..SuiteTally::default()
            };
            for i in 1..=f.ground_n() {
                for j in i + 1..=f.ground_n() {
                    let g = compress_ij(&f, i, j).expect("indices in range");
                    tally.compressions += 1;
                    if g.len() != f.len() && tally.size_changed.is_empty() {
                        tally.size_changed.push(f.clone());
                    }
                    if nu(&g) > base_nu && tally.nu_increased.is_empty() {
                        tally.nu_increased.push(f.clone());
                    }
                }
            }
            let fixed = shift_to_fixpoint(&f);
            if !is_shifted(&fixed) || fixed.len() != f.len() || nu(&fixed) > base_nu {
                tally.not_shifted.push(f);
            }
            tally
        })
        .collect();
    per.into_iter().fold(SuiteTally::default(), |mut acc, t| {
        acc.families += t.families;
        acc.compressions += t.compressions;
        acc.size_changed.extend(t.size_changed);
        acc.nu_increased.extend(t.nu_increased);
        acc.not_shifted.extend(t.not_shifted);
        acc
    })
}

/// Families on which the decrement criterion and full precedence closure
/// disagree, over every family of `k`-subsets of `[n]` for the given shapes.
pub fn decrement_criterion_mismatches(shapes: &[(usize, usize)]) -> Vec<Family> {
    use crate::kset::{enumerate_ksets, precedes};
    let mut bad = Vec::new();
    for &(n, k) in shapes {
        let all: Vec<KSet> = enumerate_ksets(n, k).collect();
        assert!(all.len() <= 20, "exhaustive shape too large");
        for mask in 0u32..(1 << all.len()) {
            let f = Family::new(
                n,
                Some(k),
                all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()),
            )
            .expect("subsets of [n]");
            let closed = all
                .iter()
                .all(|c| f.contains(c) || !f.iter().any(|g| precedes(c, g).expect("same size")));
            if closed != is_shifted(&f) {
                bad.push(f);
            }
        }
    }
    bad
}
