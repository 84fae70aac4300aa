use emc_core::matching::matching_number;
use emc_core::shifting::{compress_ij, decrement_criterion_mismatches, is_shifted, random_family, random_suite, shift_to_fixpoint};

#[test]
fn thousand_seeded_families() {
    let tally = random_suite(1000, 2024);
    assert_eq!(tally.families, 1000);
    assert!(tally.compressions > 1000);
    assert!(tally.size_changed.is_empty(), "size changed: {:?}", tally.size_changed.first());
    assert!(tally.nu_increased.is_empty(), "nu increased: {:?}", tally.nu_increased.first());
    assert!(tally.not_shifted.is_empty(), "fixpoint not shifted: {:?}", tally.not_shifted.first());
}

#[test]
fn suite_is_reproducible() {
    for i in 0..20 {
        assert_eq!(random_family(9, i), random_family(9, i));
    }
    assert_eq!(random_suite(40, 5), random_suite(40, 5));
}

#[test]
fn random_families_stay_small() {
    for i in 0..300 {
        let f = random_family(1, i);
        let k = f.uniformity().unwrap();
        assert!(f.ground_n() <= 10 && (1..=3).contains(&k));
    }
}

#[test]
fn fixpoint_is_idempotent_and_keeps_nu() {
    for i in 0..200 {
        let f = random_family(77, i);
        let g = shift_to_fixpoint(&f);
        assert!(is_shifted(&g));
        assert_eq!(shift_to_fixpoint(&g), g);
        let nu = |x| matching_number(x, None).solved().unwrap().nu;
        assert!(nu(&g) <= nu(&f));
        for j in 2..=g.ground_n() {
            assert_eq!(compress_ij(&g, 1, j).unwrap(), g);
        }
    }
}

#[test]
fn decrement_criterion_on_every_tiny_family() {
    assert!(decrement_criterion_mismatches(&[(3, 1), (4, 1), (4, 2), (5, 2), (5, 3), (6, 2)]).is_empty());
}
