use emc_core::constructions::extremal_sizes;
use emc_core::matching::matching_number;
use emc_core::search::{find_g0, max_family_size, verify_conjecture, Method};
use num_traits::ToPrimitive;

/// Erdős–Gallai: the largest graph on `n` vertices with no `s + 1`
/// independent edges, for `n >= 2s + 1`.
fn erdos_gallai(n: usize, s: usize) -> usize {
    let clique = (2 * s + 1) * (2 * s) / 2;
    let star = s * (s - 1) / 2 + s * (n - s);
    clique.max(star)
}

fn best(n: usize, k: usize, s: usize, method: Method) -> usize {
    max_family_size(n, k, s, method).unwrap().solved().unwrap().max
}

#[test]
fn graphs_match_erdos_gallai() {
    for s in 1..=3 {
        for n in 2 * s + 1..=(2 * s + 3).min(7) {
            assert_eq!(best(n, 2, s, Method::Exhaustive), erdos_gallai(n, s), "n={n}, s={s}");
        }
        for n in 2 * s + 1..=(2 * s + 4).min(10) {
            assert_eq!(best(n, 2, s, Method::Bnb), erdos_gallai(n, s), "n={n}, s={s}");
        }
    }
}

#[test]
fn small_cases_hold() {
    assert_eq!(best(6, 2, 2, Method::Exhaustive), 10);
    assert_eq!(best(5, 2, 1, Method::Exhaustive), 4);
    assert_eq!(best(7, 2, 2, Method::Bnb), 11);
}

#[test]
fn witnesses_are_valid() {
    for (n, k, s) in [(6, 2, 2), (7, 2, 2), (6, 3, 1), (8, 2, 3)] {
        let r = max_family_size(n, k, s, Method::Bnb).unwrap().solved().unwrap();
        assert_eq!(r.witness.len(), r.max);
        assert!(matching_number(&r.witness, None).solved().unwrap().nu <= s);
    }
}

#[test]
fn conjecture_grid() {
    let mut points = Vec::new();
    for s in 1..=3 {
        for n in 2 * (s + 1)..=(2 * (s + 1) + 3).min(10) {
            points.push((n, 2, s));
        }
    }
    points.extend([(6, 3, 1), (7, 3, 1), (8, 3, 1)]);
    for (n, k, s) in points {
        let r = verify_conjecture(n, k, s, Method::Bnb).unwrap().solved().unwrap();
        assert!(r.pass, "n={n}, k={k}, s={s}: {}", r.summary_line());
        let (a, b) = extremal_sizes(n as u64, k as u64, s as u64).unwrap();
        assert_eq!(best(n, k, s, Method::Bnb), a.max(b).to_usize().unwrap());
    }
}

#[test]
fn shifted_search_agrees_with_exhaustive() {
    for (n, k, s) in [(4, 2, 1), (5, 2, 1), (5, 2, 2), (6, 2, 2), (6, 3, 1), (6, 2, 1)] {
        assert_eq!(best(n, k, s, Method::ShiftedOnly), best(n, k, s, Method::Exhaustive), "n={n}, k={k}, s={s}");
    }
}

#[test]
fn optimal_families_have_special_sets() {
    let r = max_family_size(7, 2, 2, Method::Bnb).unwrap().solved().unwrap();
    assert!(find_g0(&r.witness, 2, 2).unwrap().is_some());
}
