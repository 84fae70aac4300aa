use emc_core::constructions::{build_a, build_b, saturate, size_via_trace, trace_of};
use emc_core::shifting::shift_to_fixpoint;
use emc_core::weights::{candidate_count, count_bound, family_weight_identity, wa_of_m, LocalFrame, Params, WeightFrame};
use emc_core::{binom, enumerate_ksets, ExactScalar, Family};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frame(n: usize, k: usize, s: usize) -> WeightFrame {
    WeightFrame::canonical(Params::new(n as u64, k as u64, s as u64).unwrap()).unwrap()
}

fn int(v: impl Into<num_bigint::BigInt>) -> ExactScalar {
    ExactScalar::from_integer(v.into())
}

/// A shifted family saturated over its trace.
fn random_saturated(rng: &mut ChaCha8Rng, n: usize, k: usize, s: usize) -> Family {
    let density = rng.gen_range(0.02..0.3);
    let members: Vec<_> = enumerate_ksets(n, k).filter(|_| rng.gen_bool(density)).collect();
    let f = Family::new(n, Some(k), members).unwrap();
    saturate(&shift_to_fixpoint(&f), k, s).unwrap()
}

#[test]
fn candidates_satisfy_identity() {
    for (k, s) in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)] {
        let p = (s + 1) * k;
        for n in p..=p + 4 {
            for f in [build_a(n, k, s).unwrap(), build_b(n, k, s).unwrap()] {
                let check = family_weight_identity(&f, &frame(n, k, s)).unwrap();
                assert!(check.pass, "k={k}, s={s}, n={n}: {} != {}", check.lhs, check.rhs);
                assert_eq!(check.rhs, int(f.len() as u64));
                if let Some(direct) = check.direct {
                    assert_eq!(direct, check.rhs);
                }
            }
        }
    }
}

#[test]
fn b_at_eight_two_two() {
    let b = build_b(8, 2, 2).unwrap();
    let check = family_weight_identity(&b, &frame(8, 2, 2)).unwrap();
    assert_eq!((check.lhs, check.rhs), (int(13), int(13)));
}

#[test]
fn random_saturated_shifted_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, s) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        let n = (s + 1) * k + 1;
        for _ in 0..20 {
            let f = random_saturated(&mut rng, n, k, s);
            let check = family_weight_identity(&f, &frame(n, k, s)).unwrap();
            assert!(check.pass, "k={k}, s={s}: {f}");
            if let Some(direct) = check.direct {
                assert_eq!(direct, check.rhs);
            }
            let tr = trace_of(&f, k, s).unwrap().family;
            assert_eq!(size_via_trace(&tr, n, k, s).unwrap(), (f.len() as u64).into());
        }
    }
}

#[test]
fn wa_sums_to_clique() {
    for k in 2..=3u64 {
        for s in k..=6 {
            let p = Params::new((s + 1) * k, k, s).unwrap();
            let wa: ExactScalar = wa_of_m(&p, &LocalFrame::canonical(k as usize).unwrap()).unwrap();
            assert_eq!(int(binom(s, k as i64)) * wa, int(binom((s + 1) * k - 1, k as i64)), "k={k}, s={s}");
        }
    }
    let p = Params::new(8, 2, 3).unwrap();
    let wa: ExactScalar = wa_of_m(&p, &LocalFrame::canonical(2).unwrap()).unwrap();
    assert_eq!(int(3) * wa, int(21));
}

#[test]
fn candidate_counts_within_bound() {
    for k in 3..=4usize {
        let local = LocalFrame::canonical(k).unwrap();
        for d in 1..=k {
            for c in 1..=d {
                let got = candidate_count(c, d, &local).unwrap();
                let bound: ExactScalar = count_bound(k as u64, c as u64, d as u64);
                assert!(int(got) <= bound, "k={k}, c={c}, d={d}: {got}");
                assert!(!bound.is_zero());
            }
        }
    }
}
