use std::cmp::Ordering;

use emc_core::matching::{is_pairwise_disjoint, matching_number};
use emc_core::{enumerate_ksets, precedes, Family, KSet};
use proptest::prelude::*;

fn kset_strategy(n: usize, k: usize) -> impl Strategy<Value = KSet> {
    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), k).prop_map(|v| KSet::of(&v))
}

/// `(n, k, members)` with `n <= 8`, `k <= 3`.
fn family_strategy() -> impl Strategy<Value = Family> {
    (2usize..=8, 1usize..=3)
        .prop_filter("k <= n", |(n, k)| k <= n)
        .prop_flat_map(|(n, k)| {
            let all: Vec<KSet> = enumerate_ksets(n, k).collect();
            let len = all.len();
            proptest::sample::subsequence(all, 0..=len.min(14))
                .prop_map(move |m| Family::new(n, Some(k), m).unwrap())
        })
}

/// Largest number of pairwise disjoint members, by trying every subset.
fn brute_nu(f: &Family) -> usize {
    let m = f.members();
    (0u32..1 << m.len())
        .filter(|mask| {
            let chosen: Vec<KSet> = (0..m.len()).filter(|i| mask >> i & 1 == 1).map(|i| m[i].clone()).collect();
            is_pairwise_disjoint(&chosen)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mask_round_trip(mask in any::<u64>()) {
        let s = KSet::from_mask(mask);
        prop_assert_eq!(s.to_mask(), Some(mask));
        prop_assert_eq!(s.len(), mask.count_ones() as usize);
    }

    #[test]
    fn colex_matches_enumeration_order(n in 1usize..=9, k in 0usize..=4) {
        prop_assume!(k <= n);
        let all: Vec<KSet> = enumerate_ksets(n, k).collect();
        for w in all.windows(2) {
            prop_assert_eq!(w[0].colex_cmp(&w[1]), Ordering::Less);
        }
    }

    #[test]
    fn precedence_is_a_partial_order(a in kset_strategy(9, 3), b in kset_strategy(9, 3), c in kset_strategy(9, 3)) {
        prop_assert!(precedes(&a, &a).unwrap());
        if precedes(&a, &b).unwrap() && precedes(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if precedes(&a, &b).unwrap() && precedes(&b, &c).unwrap() {
            prop_assert!(precedes(&a, &c).unwrap());
        }
        // Precedence refines colex.
        if precedes(&a, &b).unwrap() {
            prop_assert!(a.colex_cmp(&b) != Ordering::Greater);
        }
    }

    #[test]
    fn family_text_round_trip(f in family_strategy()) {
        let back: Family = f.to_text().parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn matching_agrees_with_brute_force(f in family_strategy()) {
        let m = matching_number(&f, None).solved().unwrap();
        prop_assert_eq!(m.nu, brute_nu(&f));
        prop_assert_eq!(m.certificate.sets.len(), m.nu);
        prop_assert!(is_pairwise_disjoint(&m.certificate.sets));
        prop_assert!(m.certificate.sets.iter().all(|s| f.contains(s)));
    }

    #[test]
    fn matching_is_monotone(f in family_strategy(), keep in any::<u64>()) {
        let sub = {
            let mut i = 0;
            f.filtered(|_| { i += 1; keep >> (i % 64) & 1 == 1 })
        };
        let nu = |g: &Family| matching_number(g, None).solved().unwrap().nu;
        prop_assert!(nu(&sub) <= nu(&f));
    }
}

#[test]
fn parse_rejects_malformed_input() {
    assert!("".parse::<Family>().is_err());
    assert!("5 2\n3,2\n".parse::<Family>().is_err());
    assert!("5 2\n1,6\n".parse::<Family>().is_err());
    assert!("5 2\n1,2,3\n".parse::<Family>().is_err());
    assert!("5\n1,2\n".parse::<Family>().is_err());
    let f: Family = "# comment\n5 2\n\n2,3 # trailing\n1,2\n".parse().unwrap();
    assert_eq!(f.len(), 2);
    assert_eq!(f.members()[0], KSet::of(&[1, 2]));
}
