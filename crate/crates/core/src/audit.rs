//! Exact-rational audits of every bound the proof chain relies on.
//!
//! Each audit returns a list of [`AuditReport`]s. Quantities that depend on an
//! unknown extremal family are replaced by brute-force counts over all
//! candidate subsets of `G(M)`; those reports carry `envelope` in their id.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kset::submasks_of_size;
use crate::scalar::{binom, Scalar};
use crate::transversals::{
    almost_full_transversals, bad_pair_stats, check_cyclic_collections, full_transversals,
    product_inequality_check, q_multiplicity, q_random_checks, BAD_PAIR_MAX_K,
};
use crate::weights::{
    candidate_count_by_profiles, count_bound, wg_envelope, CandidateTable, LocalFrame, Params, WeightCalculus,
};
use crate::ExactScalar as Q;

pub use crate::report::{AuditReport, Cmp, ReportParams};

type Calc = WeightCalculus<Q>;

fn int<T: Into<BigInt>>(v: T) -> Q {
    Q::from_integer(v.into())
}

fn frac(p: u64, q: u64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

fn bool_count(ok: bool) -> Q {
    int(if ok { 0 } else { 1 })
}

/// `1 + a/k`.
fn one_plus(a: u64, k: u64) -> Q {
    Q::one() + frac(a, k)
}

/// `(1 - (k-1)/s)^{k-1} / (1 + (ε+1)/(εs))^{k-1}`.
fn aux_ratio(calc: &Calc) -> Q {
    let Params { k, s, .. } = calc.params();
    let eps = calc.epsilon();
    let shrink = Q::one() - frac(k - 1, s);
    let grow = Q::one() + (eps.clone() + Q::one()) / (eps * int(s));
    shrink.powu(k as u32 - 1) / grow.powu(k as u32 - 1)
}

/// Weight bound, its two-step derivation, and the auxiliary chain behind it.
pub fn audit_claim2(k: u64, s: u64, n: u64) -> Result<Vec<AuditReport>> {
    let p = Params::theorem_window(n, k, s)?;
    let calc = Calc::new(p);
    let base = ReportParams::ksn(k, s, n);
    let mut out = Vec::new();
    for c in 1..=k {
        for d in c..=k {
            let at = base.with_cd(c, d);
            let w = calc.weight(c, d)?;
            let bound = calc.weight_bound(c, d);
            let expansion = calc.weight_expansion(c, d);
            out.push(AuditReport::compare("claim2.weight", at, w.clone(), Cmp::Le, bound.clone()));
            out.push(AuditReport::compare("claim2.expansion", at, w, Cmp::Le, expansion.clone()));
            out.push(AuditReport::compare("claim2.expansion_bound", at, expansion, Cmp::Le, bound));
        }
    }
    let eps = calc.epsilon();
    out.push(AuditReport::compare(
        "claim2.nbar",
        base,
        int(p.n_bar()),
        Cmp::Lt,
        eps.clone() * int(s + 1) + Q::one(),
    ));
    let ratio = aux_ratio(&calc);
    let km1 = k - 1;
    let bern = (Q::one() - frac(km1 * km1, s)) * (Q::one() - int(km1) * (eps.clone() + Q::one()) / (eps * int(s)));
    let linear = Q::one() - frac(km1 * km1, s) - frac(km1 * (100 * k + 1), s);
    let target = Q::one() - frac(1, k + 1);
    out.push(AuditReport::compare("claim2.aux", base, frac(k, k + 1), Cmp::Le, ratio.clone()));
    out.push(AuditReport::compare("claim2.aux.bernoulli", base, bern.clone(), Cmp::Le, ratio));
    out.push(AuditReport::compare("claim2.aux.linear", base, linear.clone(), Cmp::Le, bern));
    out.push(AuditReport::compare("claim2.aux.final", base, target, Cmp::Le, linear));
    Ok(out)
}

/// Sum over compositions `a_0 + ... + a_c = d - c` of
/// `k^c C(k-1,a_0) C(k-1,a_1) ... C(k-1,a_c)`, enumerated term by term.
fn relaxed_composition_sum(k: u64, c: u64, d: u64) -> BigInt {
    fn go(parts_left: u64, total: u64, k: u64) -> BigInt {
        if parts_left == 0 {
            return if total == 0 { BigInt::one() } else { BigInt::zero() };
        }
        (0..=total)
            .map(|a| binom(k - 1, a as i64) * go(parts_left - 1, total - a, k))
            .sum()
    }
    num_traits::pow(BigInt::from(k), c as usize) * go(c + 1, d - c, k)
}

fn claim3_reports(k: u64, table: &CandidateTable) -> Vec<AuditReport> {
    let mut out = Vec::new();
    for c in 1..=k {
        for d in c..=k {
            let at = ReportParams::k(k).with_cd(c, d);
            let counted = int(table.get(c as usize, d as usize));
            let profiles = int(candidate_count_by_profiles(k, c, d));
            let choose_blocks = binom(k, c as i64);
            let relaxed = int(&choose_blocks * relaxed_composition_sum(k, c, d));
            let kc = num_traits::pow(BigInt::from(k), c as usize);
            let vander = int(&choose_blocks * &kc * binom((k - 1) * (c + 1), (d - c) as i64));
            let k2 = int(&choose_blocks * &kc * binom(k * k, (d - c) as i64));
            let bound: Q = count_bound(k, c, d);
            out.push(
                AuditReport::compare("claim3", at, counted.clone(), Cmp::Le, bound.clone())
                    .witness_on_failure(|| format!("c={c},d={d}")),
            );
            out.push(AuditReport::compare("claim3.profiles", at, counted, Cmp::Eq, profiles.clone()));
            out.push(AuditReport::compare("claim3.relaxed", at, profiles, Cmp::Le, relaxed.clone()));
            out.push(AuditReport::compare("claim3.vandermonde", at, relaxed, Cmp::Eq, vander.clone()));
            out.push(AuditReport::compare("claim3.k2", at, vander, Cmp::Le, k2.clone()));
            out.push(AuditReport::compare("claim3.final", at, k2, Cmp::Le, bound));
        }
    }
    out
}

/// Candidate counts against `C(k,c) k^{2d-c} / (d-c)!`, by full enumeration of
/// subsets of `G(M)` up to size `k`.
pub fn audit_claim3(k: u64) -> Result<Vec<AuditReport>> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be positive".into()));
    }
    let frame = LocalFrame::canonical(k as usize)?;
    let table = CandidateTable::enumerate(&frame, k as usize)?;
    Ok(claim3_reports(k, &table))
}

fn claim4_reports(p: Params, table: &CandidateTable, g: u64) -> Result<Vec<AuditReport>> {
    let Params { n, k, s } = p;
    let calc = Calc::new(p);
    let at = ReportParams::ksn(k, s, n).with_g(g);
    let env = wg_envelope::<Q>(&p, table, g)?;
    let mut out = vec![AuditReport::compare("claim4.envelope", at, env.lhs, Cmp::Le, env.rhs)];
    let eps = calc.epsilon();
    let ratio = frac(k * k, s);
    let mut geometric = Q::zero();
    for c in 1..k - g {
        for d in c + g..k {
            let decay = eps.powu((k - d - 1) as u32) * ratio.powu((d - c - g) as u32);
            geometric += decay.clone();
            let lhs = calc.weight_bound(c, d) * calc.count_bound(c, d);
            let rhs = calc.wg_term_scale(g) * decay;
            out.push(
                AuditReport::compare("claim4.term", at.with_cd(c, d), lhs, Cmp::Le, rhs)
                    .witness_on_failure(|| format!("g={g},c={c},d={d}")),
            );
        }
    }
    let series = Q::one() / ((Q::one() - eps) * (Q::one() - ratio));
    out.push(AuditReport::compare("claim4.geometric", at, geometric, Cmp::Le, series));
    Ok(out)
}

fn claim4_closing(p: Params) -> Vec<AuditReport> {
    let Params { n, k, s } = p;
    let at = ReportParams::ksn(k, s, n);
    let eps = Calc::new(p).epsilon();
    let lead = one_plus(1, k) / (Q::one() - eps);
    vec![
        AuditReport::compare(
            "claim4.closing",
            at,
            lead.clone() / (Q::one() - frac(k * k, s)),
            Cmp::Lt,
            one_plus(2, k),
        ),
        AuditReport::compare(
            "claim4.closing_uniform",
            at,
            lead / (Q::one() - frac(1, 101 * k)),
            Cmp::Lt,
            one_plus(2, k),
        ),
        AuditReport::compare("claim4.ratio", at, frac(k * k, s), Cmp::Lt, frac(1, 101 * k)),
    ]
}

/// Envelope of `W_g` for one `g`, or for every `g = 0..k-2` when `g` is `None`,
/// plus the closing inequality.
pub fn audit_claim4(k: u64, s: u64, n: u64, g: Option<u64>) -> Result<Vec<AuditReport>> {
    let p = Params::theorem_window(n, k, s)?;
    if let Some(g) = g {
        if g > k - 2 {
            return Err(Error::InvalidParams(format!("g must lie in [0, k-2] = [0, {}], got {g}", k - 2)));
        }
    }
    let table = CandidateTable::enumerate(&LocalFrame::canonical(k as usize)?, k as usize - 1)?;
    claim4_with_table(p, &table, g)
}

fn claim4_with_table(p: Params, table: &CandidateTable, g: Option<u64>) -> Result<Vec<AuditReport>> {
    let gs: Vec<u64> = match g {
        Some(g) => vec![g],
        None => (0..=p.k - 2).collect(),
    };
    let mut out = Vec::new();
    for g in gs {
        out.extend(claim4_reports(p, table, g)?);
    }
    out.extend(claim4_closing(p));
    Ok(out)
}

/// Weight of the short near-transversal sets per unit of `r_{k-1}`.
pub fn audit_rx(k: u64, s: u64, n: u64) -> Result<Vec<AuditReport>> {
    let p = Params::theorem_window(n, k, s)?;
    let calc = Calc::new(p);
    let mut sum = Q::zero();
    for d in 2..k {
        sum += calc.weight(d - 1, d)?;
    }
    let rhs = one_plus(2, k) * int(2) * calc.epsilon() / int(s);
    Ok(vec![AuditReport::compare(
        "claim_rx.weight",
        ReportParams::ksn(k, s, n),
        sum,
        Cmp::Le,
        rhs,
    )])
}

/// Number of subsets of `G(M)` of size `k-1` and width `k-2` meeting `G0`.
pub fn r_shape_count(k: usize) -> Result<u64> {
    let frame = LocalFrame::canonical(k)?;
    let size = (k * k + k - 1) as u64;
    let work = binom(size, k as i64 - 1);
    if work > BigInt::from(crate::weights::ENUMERATION_CAP) {
        return Err(Error::TooLarge {
            what: "r-shape enumeration".into(),
            size: u128::try_from(work).unwrap_or(u128::MAX),
            cap: crate::weights::ENUMERATION_CAP,
        });
    }
    Ok(submasks_of_size(frame.universe(), k as u32 - 1)
        .filter(|&m| frame.width_mask(m) + 2 == k && m & frame.g0_mask() != 0)
        .count() as u64)
}

/// Profiles `(a_0, ..., a_c)` of a `(k-1)`-set of width `c` with
/// `k - 3 <= c <= k - 2`, positive parts and `Σ a_i = k`.
fn claim7_profiles(k: u64) -> Vec<Vec<u64>> {
    fn comps(total: u64, parts: u64) -> Vec<Vec<u64>> {
        if parts == 0 {
            return if total == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        (1..=total)
            .flat_map(|first| {
                comps(total - first, parts - 1).into_iter().map(move |mut r| {
                    r.insert(0, first);
                    r
                })
            })
            .collect()
    }
    (k.saturating_sub(3).max(1)..=k - 2)
        .flat_map(|c| comps(k, c + 1))
        .collect()
}

/// Threshold and counting lemmas used between the claims. These depend on
/// `k` and `s` only.
pub fn audit_numeric_lemmas(k: u64, s: u64) -> Result<Vec<AuditReport>> {
    if k < 4 {
        return Err(Error::InvalidParams(format!("numeric lemmas need k >= 4, got {k}")));
    }
    if s <= 101 * k * k * k {
        return Err(Error::OutsideWindow {
            k,
            s,
            n: 0,
            reason: format!("s must exceed 101k³ = {}", 101 * k * k * k),
        });
    }
    let p = Params::new((s + 1) * k, k, s)?;
    let calc = Calc::new(p);
    let at = ReportParams::ks(k, s);
    let eps = calc.epsilon();
    let kq = int(k);
    let kpow = |e: u64| kq.powu(e as u32);
    let c2 = one_plus(2, k);
    let c3 = one_plus(3, k);
    let mut out = Vec::new();

    let mut rx_sum = Q::zero();
    let mut r_weight = Q::zero();
    for d in 2..k {
        rx_sum += eps.powu((k - d - 1) as u32) * int(k - d + 1);
        r_weight += calc.weight_bound(d - 1, d);
    }
    out.push(AuditReport::compare(
        "lemma.rx_sum",
        at,
        one_plus(1, k) * rx_sum,
        Cmp::Le,
        int(2) * c2.clone(),
    ));
    out.push(AuditReport::compare(
        "lemma.r_weight",
        at,
        r_weight,
        Cmp::Le,
        c2.clone() * int(2) * eps.clone() / int(s),
    ));
    out.push(AuditReport::compare(
        "lemma.full_threshold",
        at,
        c2.clone() * kpow(k) * eps.clone(),
        Cmp::Lt,
        int(k - 1).powu(k as u32 - 1),
    ));
    out.push(AuditReport::compare(
        "lemma.w1_threshold",
        at,
        calc.wg_bound(1),
        Cmp::Lt,
        int(k - 2).powu(k as u32 - 1),
    ));
    out.push(AuditReport::compare(
        "lemma.w2_split",
        at,
        calc.wg_bound(2),
        Cmp::Eq,
        c2.clone() * int(2) * eps.clone() / int(s) * kpow(k + 4) / int(4 * s),
    ));
    out.push(AuditReport::compare(
        "lemma.full_weight",
        at,
        calc.weight(k, k)?,
        Cmp::Eq,
        Q::one(),
    ));
    let afw = calc.weight(k - 1, k)?;
    out.push(AuditReport::compare(
        "lemma.almost_full_weight",
        at,
        afw.clone(),
        Cmp::Eq,
        frac(1, s - k + 1),
    ));
    out.push(AuditReport::compare("lemma.almost_full_weight_gt", at, frac(1, s), Cmp::Lt, afw));

    let frame = LocalFrame::canonical(k as usize)?;
    out.push(AuditReport::compare(
        "lemma.full_count",
        at,
        int(full_transversals(&frame).len() as u64),
        Cmp::Eq,
        kpow(k),
    ));
    let r_cap = int((k - 1) * (k - 1)) * kpow(k - 1) / int(2);
    match r_shape_count(k as usize) {
        Ok(r) => out.push(AuditReport::compare("lemma.r_count", at, int(r), Cmp::Le, r_cap.clone())),
        Err(Error::TooLarge { .. }) => {}
        Err(e) => return Err(e),
    }
    out.push(AuditReport::compare(
        "lemma.almost_full_accounting",
        at,
        r_cap.clone() + kpow(k + 4) / int(4 * s),
        Cmp::Le,
        kpow(k + 1),
    ));
    let slack = c2.clone() * eps.clone();
    out.push(AuditReport::compare(
        "lemma.x_rearrangement",
        at,
        slack.clone() / (Q::one() - slack),
        Cmp::Le,
        c3.clone() * eps.clone(),
    ));
    out.push(AuditReport::compare(
        "lemma.w_after_x",
        at,
        c2.clone() * (r_cap + c3.clone() * eps.clone() * kpow(k + 1) + kpow(k + 4) / int(4 * s)),
        Cmp::Le,
        c3.clone() * kpow(k + 1),
    ));

    // (1 - 1/k)^{(k²-k)/(k-3)} > 6k(1 + 3/k)ε, compared after raising both
    // sides to the power k - 3.
    let e = (k - 3) as u32;
    let base = Q::one() - frac(1, k);
    let lhs = (int(6 * k) * c3.clone() * eps.clone()).powu(e);
    out.push(AuditReport::compare(
        "lemma.claim7_count",
        at,
        lhs,
        Cmp::Lt,
        base.powu((k * k - k) as u32),
    ));

    let mut tight: Option<(Q, Q, Vec<u64>)> = None;
    let mut worst_mult = 0;
    for parts in claim7_profiles(k) {
        let c = parts.len() as u64 - 1;
        let prod: Q = parts.iter().map(|&a| int(k - a)).fold(Q::one(), |x, y| x * y) * kpow(k - c);
        let have = prod.powu(e);
        let need = base.powu((k * k - k) as u32) * kpow(k + 1).powu(e);
        let ratio = have.clone() / need.clone();
        if tight.as_ref().is_none_or(|t| ratio < t.0.clone() / t.1.clone()) {
            tight = Some((have, need, parts.clone()));
        }
        worst_mult = worst_mult.max(parts.iter().map(|&a| a * (k - a)).max().unwrap_or(0));
    }
    if let Some((have, need, parts)) = tight {
        out.push(
            AuditReport::compare("lemma.claim7_profiles", at, need, Cmp::Le, have).with_witness(format!("{parts:?}")),
        );
    }
    out.push(AuditReport::compare(
        "lemma.claim7_multiplicity",
        at,
        int(worst_mult),
        Cmp::Le,
        int(3 * k),
    ));
    out.push(AuditReport::compare(
        "lemma.final_threshold",
        at,
        c2 * kpow(k + 6) * eps / (int(6) * int(s).powu(2)),
        Cmp::Lt,
        kpow(k - 1),
    ));
    Ok(out)
}

/// The product inequality over every profile, reported at its tightest point.
pub fn audit_product(k: u64) -> Result<Vec<AuditReport>> {
    if k < 2 {
        return Err(Error::InvalidParams("product inequality needs k >= 2".into()));
    }
    let pc = product_inequality_check(k as usize);
    let at = ReportParams::k(k);
    Ok(vec![
        AuditReport::compare("claim8.product", at, int(pc.rhs), Cmp::Le, int(pc.lhs))
            .with_witness(format!("{:?}", pc.tightest)),
        AuditReport::compare("claim8.all_profiles", at, bool_count(pc.holds), Cmp::Eq, Q::zero()),
    ])
}

/// Which transversal checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransversalCheck {
    Counts,
    Cyclic,
    BadPairs,
    Q,
    Product,
    All,
}

impl std::str::FromStr for TransversalCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "counts" => Self::Counts,
            "cyclic" => Self::Cyclic,
            "badpairs" => Self::BadPairs,
            "q" => Self::Q,
            "product" => Self::Product,
            "all" => Self::All,
            other => return Err(Error::InvalidParams(format!("unknown check {other:?}"))),
        })
    }
}

/// Largest k for the exhaustive cyclic-collection check.
pub const CYCLIC_MAX_K: u64 = 5;

/// Largest k for the composition scan on its own.
pub const PRODUCT_MAX_K: u64 = 16;

pub fn audit_transversals(k: u64, check: TransversalCheck, seed: u64) -> Result<Vec<AuditReport>> {
    use TransversalCheck as C;
    if check == C::Product && (2..=PRODUCT_MAX_K).contains(&k) {
        return audit_product(k);
    }
    if !(2..=7).contains(&k) {
        return Err(Error::InvalidParams(format!("transversal checks need 2 <= k <= 7, got {k}")));
    }
    let ku = k as usize;
    let frame = LocalFrame::canonical(ku)?;
    let at = ReportParams::k(k);
    let want = |c: C| check == c || check == C::All;
    let mut out = Vec::new();

    if want(C::Counts) {
        let full = full_transversals(&frame);
        out.push(AuditReport::compare(
            "transversal.full_count",
            at,
            int(full.len() as u64),
            Cmp::Eq,
            int(k.pow(k as u32)),
        ));
        // Brute-force cross-check only while the k-subsets of G(M) stay enumerable.
        if binom(frame.universe().count_ones() as u64, k as i64) <= BigInt::from(crate::weights::ENUMERATION_CAP) {
            let brute = |w: usize| {
                submasks_of_size(frame.universe(), k as u32)
                    .filter(|&m| frame.width_mask(m) == w)
                    .count() as u64
            };
            out.push(AuditReport::compare(
                "transversal.full_brute",
                at,
                int(full.len() as u64),
                Cmp::Eq,
                int(brute(ku)),
            ));
            out.push(AuditReport::compare(
                "transversal.almost_full_brute",
                at,
                int(almost_full_transversals(&frame).len() as u64),
                Cmp::Eq,
                int(brute(ku - 1)),
            ));
        }
    }
    if want(C::Cyclic) && k > CYCLIC_MAX_K {
        if check == C::Cyclic {
            return Err(Error::TooLarge {
                what: "cyclic collection check".into(),
                size: k as u128,
                cap: CYCLIC_MAX_K as u128,
            });
        }
    } else if want(C::Cyclic) {
        let cc = check_cyclic_collections(&frame)?;
        out.push(AuditReport::compare(
            "cyclic.count",
            at,
            int(cc.collections as u64),
            Cmp::Eq,
            int((k - 1).pow(k as u32 - 1)),
        ));
        out.push(AuditReport::compare("cyclic.uniform", at, bool_count(cc.uniform_count), Cmp::Eq, Q::zero()));
        out.push(AuditReport::compare(
            "cyclic.internal_disjoint",
            at,
            bool_count(cc.internally_disjoint),
            Cmp::Eq,
            Q::zero(),
        ));
        out.push(AuditReport::compare("cyclic.cross_disjoint", at, bool_count(cc.cross_disjoint), Cmp::Eq, Q::zero()));
        out.push(AuditReport::compare(
            "cyclic.avoids_reserved",
            at,
            bool_count(cc.avoids_reserved),
            Cmp::Eq,
            Q::zero(),
        ));
    }
    if want(C::BadPairs) && (3..=BAD_PAIR_MAX_K as u64).contains(&k) {
        let st = bad_pair_stats(&frame, seed)?;
        let per_t = int(k * (k - 1).pow(k as u32 - 1));
        out.push(AuditReport::compare("badpair.per_t_min", at, int(st.per_t_min), Cmp::Eq, per_t.clone()));
        out.push(AuditReport::compare("badpair.per_t_max", at, int(st.per_t_max), Cmp::Eq, per_t));
        out.push(AuditReport::compare(
            "badpair.per_mask",
            at,
            int(st.per_mask_max),
            Cmp::Le,
            int(k * (k - 1).pow(k as u32 - 2) * (k - 2) / 2),
        ));
        out.push(AuditReport::compare(
            "badpair.doubling",
            at,
            int(2 * st.x_sets as u64),
            Cmp::Le,
            int(st.masks_hit as u64),
        ));
        out.push(AuditReport::compare(
            "badpair.doubling_subfamilies",
            at,
            bool_count(st.doubling_ok),
            Cmp::Eq,
            Q::zero(),
        ));
    } else if check == C::BadPairs {
        return Err(Error::TooLarge {
            what: "bad-pair enumeration".into(),
            size: k as u128,
            cap: BAD_PAIR_MAX_K as u128,
        });
    }
    if want(C::Q) && k >= 3 && k <= BAD_PAIR_MAX_K as u64 {
        // One element in each of B_1..B_{k-1}: profile (1; 1, ..., 1).
        let t = (1..ku).map(|i| 1u64 << frame.block_bits(i)[0]).fold(0, |a, b| a | b);
        let m = q_multiplicity(t, &frame)?;
        out.push(AuditReport::compare("q.total_shifts", at, int(m.total_shifts), Cmp::Eq, int(m.formula)));
        out.push(AuditReport::compare("q.multiplicity", at, int(m.violations as u64), Cmp::Eq, Q::zero()));
        out.push(AuditReport::compare("q.max_multiplicity", at, int(m.max_multiplicity as u64), Cmp::Le, int(3 * k)));
        out.push(AuditReport::compare("q.structure", at, int(m.malformed as u64), Cmp::Eq, Q::zero()));
        out.push(AuditReport::compare(
            "q.random",
            at,
            int(q_random_checks(&frame, 100, seed)? as u64),
            Cmp::Eq,
            Q::zero(),
        ));
    }
    if want(C::Product) {
        out.extend(audit_product(k)?);
    }
    crate::report::sort_reports(&mut out);
    Ok(out)
}

/// Every audit at one point of the theorem window, sorted by
/// `(claim_id, params)`.
pub fn audit_all(k: u64, s: u64, n: u64) -> Result<Vec<AuditReport>> {
    let p = Params::theorem_window(n, k, s)?;
    let frame = LocalFrame::canonical(k as usize)?;
    let table = CandidateTable::enumerate(&frame, k as usize)?;
    let mut out = audit_claim2(k, s, n)?;
    out.extend(claim3_reports(k, &table));
    out.extend(claim4_with_table(p, &table, None)?);
    out.extend(audit_rx(k, s, n)?);
    out.extend(audit_numeric_lemmas(k, s)?);
    out.extend(audit_product(k)?);
    crate::report::sort_reports(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;

    fn failures(reports: &[AuditReport]) -> Vec<String> {
        reports.iter().filter(|r| !r.pass).map(AuditReport::summary_line).collect()
    }

    #[test]
    fn claim2_passes_at_both_endpoints() {
        for n in [63135, Params::window_max_n(5, 12626)] {
            let r = audit_claim2(5, 12626, n).unwrap();
            assert_eq!(r.len(), 3 * 15 + 5);
            assert!(all_pass(&r), "{:?}", failures(&r));
        }
    }

    #[test]
    fn claim2_rejects_outside_window() {
        assert!(matches!(audit_claim2(5, 100, 505), Err(Error::OutsideWindow { .. })));
        assert!(audit_claim2(5, 12626, 63260).is_err());
        assert!(audit_claim2(4, 6465, 32330).is_err());
    }

    #[test]
    fn claim3_small_k() {
        for k in 2..=4 {
            let r = audit_claim3(k).unwrap();
            assert!(all_pass(&r), "k={k} {:?}", failures(&r));
        }
        let r2 = audit_claim3(2).unwrap();
        let main: Vec<_> = r2.iter().filter(|r| r.claim_id == "claim3").collect();
        for r in main {
            if r.params.c == r.params.d {
                assert_eq!(r.lhs, r.rhs, "equality expected at {}", r.params);
            }
        }
    }

    #[test]
    fn claim4_and_lemmas_k5() {
        let r = audit_claim4(5, 12626, 63135, None).unwrap();
        assert!(all_pass(&r), "{:?}", failures(&r));
        let env: Vec<_> = r.iter().filter(|r| r.claim_id == "claim4.envelope").collect();
        assert_eq!(env.len(), 4);
        assert!(audit_claim4(5, 12626, 63135, Some(4)).is_err());
        let l = audit_numeric_lemmas(5, 12626).unwrap();
        assert!(all_pass(&l), "{:?}", failures(&l));
        let full = l.iter().find(|r| r.claim_id == "lemma.full_threshold").unwrap();
        assert_eq!(full.lhs, frac(35, 4));
        assert_eq!(full.rhs, int(256));
        let c7 = l.iter().find(|r| r.claim_id == "lemma.claim7_count").unwrap();
        // 0.096^2 < 0.8^20
        assert_eq!(c7.lhs, frac(48, 500).powu(2));
    }

    #[test]
    fn rx_and_product() {
        assert!(all_pass(&audit_rx(5, 12626, 63135).unwrap()));
        for k in 2..=10 {
            assert!(all_pass(&audit_product(k).unwrap()), "k={k}");
        }
    }

    #[test]
    fn transversal_audits_small() {
        for k in [3, 4] {
            let r = audit_transversals(k, TransversalCheck::All, 0).unwrap();
            assert!(all_pass(&r), "k={k} {:?}", failures(&r));
            assert!(r.iter().any(|r| r.claim_id == "cyclic.count"));
            assert!(r.iter().any(|r| r.claim_id == "badpair.per_t_min"));
        }
        assert!(audit_transversals(6, TransversalCheck::BadPairs, 0).is_err());
    }

    #[test]
    fn audit_all_rejects_small_k() {
        assert!(audit_all(4, 6465, 32330).is_err());
    }

    #[test]
    fn every_report_rechecks() {
        let r = audit_claim2(5, 12626, 63135).unwrap();
        assert!(r.iter().all(AuditReport::recheck));
    }
}
