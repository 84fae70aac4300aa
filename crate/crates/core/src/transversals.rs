//! Transversals of the local universe `G(M)` and the disjoint collections built
//! from them by cyclic shifts.
//!
//! Everything here works on [`LocalFrame`] masks. Residual sets are always
//! listed in increasing order, and a cyclic shift with offset `o` sends the
//! `j`-th listed element to the `(j + o)`-th, modulo the listing length.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kset::{submasks_of_size, KSet};
use crate::weights::{bits_of, LocalFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransversalKind {
    Full,
    AlmostFull,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    pub set: KSet,
    pub mask: u64,
    pub kind: TransversalKind,
    /// `(|T ∩ G0|, |T ∩ B1|, ..., |T ∩ Bk|)`.
    pub profile: Vec<usize>,
}

impl Transversal {
    fn new(frame: &LocalFrame, mask: u64, kind: TransversalKind) -> Self {
        Self {
            set: frame.to_kset(mask),
            mask,
            kind,
            profile: frame.profile_mask(mask),
        }
    }
}

/// Every `k`-set with one element in each block, in lexicographic order of
/// the chosen positions.
pub fn full_transversals(frame: &LocalFrame) -> Vec<Transversal> {
    let k = frame.k();
    let blocks: Vec<Vec<u32>> = (1..=k).map(|i| frame.block_bits(i)).collect();
    product_masks(&blocks)
        .into_iter()
        .map(|m| Transversal::new(frame, m, TransversalKind::Full))
        .collect()
}

/// Every `k`-set of width `k - 1`: one block doubled and one untouched, or
/// one element of `G0` and one block untouched.
pub fn almost_full_transversals(frame: &LocalFrame) -> Vec<Transversal> {
    let k = frame.k();
    let mut out = Vec::new();
    for skip in 1..=k {
        let singles = |exclude: usize| -> Vec<Vec<u32>> {
            (1..=k)
                .filter(|&i| i != skip && i != exclude)
                .map(|i| frame.block_bits(i))
                .collect()
        };
        for dbl in (1..=k).filter(|&f| f != skip) {
            let rest = product_masks(&singles(dbl));
            for pair in submasks_of_size(frame.block_mask(dbl), 2) {
                out.extend(rest.iter().map(|r| r | pair));
            }
        }
        let rest = product_masks(&singles(0));
        for g in frame.g0_bits() {
            out.extend(rest.iter().map(|r| r | 1 << g));
        }
    }
    out.sort_unstable();
    out.into_iter()
        .map(|m| Transversal::new(frame, m, TransversalKind::AlmostFull))
        .collect()
}

/// Masks choosing one bit from each listed group.
fn product_masks(groups: &[Vec<u32>]) -> Vec<u64> {
    groups.iter().fold(vec![0u64], |acc, g| {
        acc.iter()
            .flat_map(|&a| g.iter().map(move |&b| a | 1 << b))
            .collect()
    })
}

/// A rotation of an ordered listing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicShift {
    base: Vec<usize>,
    offset: usize,
}

impl CyclicShift {
    pub fn new(base: Vec<usize>, offset: usize) -> Result<Self> {
        if !base.is_empty() && offset >= base.len() {
            return Err(Error::InvalidParams(format!(
                "shift offset {offset} outside [0, {})",
                base.len()
            )));
        }
        if base.is_empty() && offset != 0 {
            return Err(Error::InvalidParams("an empty listing admits only offset 0".into()));
        }
        Ok(Self { base, offset })
    }

    pub fn identity(base: Vec<usize>) -> Self {
        Self { base, offset: 0 }
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Image of `x`, or `None` when `x` is not listed.
    pub fn apply(&self, x: usize) -> Option<usize> {
        let j = self.base.iter().position(|&b| b == x)?;
        Some(self.base[(j + self.offset) % self.base.len()])
    }

    /// Image of the `j`-th listed element (0-based).
    pub fn apply_at(&self, j: usize) -> usize {
        self.base[(j + self.offset) % self.base.len()]
    }
}

/// Relabelling for a `(k-1)`-set of width `k-1` avoiding `G0`: the untouched
/// block goes last and its minimum is set aside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicLayout {
    t: u64,
    /// Block indices (1-based) with the untouched block last.
    order: Vec<usize>,
    /// `B_l ∖ T` for touched blocks, `B_m ∖ {min B_m}` for the untouched one.
    residuals: Vec<Vec<usize>>,
    reserved: usize,
}

impl CyclicLayout {
    pub fn new(t: u64, frame: &LocalFrame) -> Result<Self> {
        let k = frame.k();
        let bad = |msg: &str| Error::InvalidParams(format!("cyclic collection: {msg}"));
        if k < 2 {
            return Err(bad("needs k >= 2"));
        }
        if t & !frame.universe() != 0 || t.count_ones() as usize != k - 1 {
            return Err(bad("T must be a (k-1)-subset of G(M)"));
        }
        if t & frame.g0_mask() != 0 {
            return Err(bad("T must avoid G0"));
        }
        let profile = frame.profile_mask(t);
        if profile[1..].iter().any(|&a| a > 1) {
            return Err(bad("T must meet every block at most once"));
        }
        let missing = (1..=k).find(|&i| profile[i] == 0).expect("k-1 elements in k blocks");
        let mut order: Vec<usize> = (1..=k).filter(|&i| i != missing).collect();
        order.push(missing);
        let mut residuals = Vec::with_capacity(k);
        for &l in &order[..k - 1] {
            residuals.push(bits_of(frame.block_mask(l) & !t).into_iter().map(|b| b as usize).collect());
        }
        let last = frame.block_bits(missing);
        let reserved = last[0] as usize;
        residuals.push(last[1..].iter().map(|&b| b as usize).collect());
        Ok(Self {
            t,
            order,
            residuals,
            reserved,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Block order after relabelling; the last entry is the untouched block.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The minimum of the untouched block, kept out of every collection.
    pub fn reserved(&self) -> usize {
        self.reserved
    }

    /// Residual listing of the `l`-th block in relabelled order (0-based).
    pub fn residual(&self, l: usize) -> &[usize] {
        &self.residuals[l]
    }

    pub fn shifts(&self, offsets: &[usize]) -> Result<Vec<CyclicShift>> {
        if offsets.len() + 1 != self.order.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} offsets, got {}",
                self.order.len() - 1,
                offsets.len()
            )));
        }
        offsets
            .iter()
            .enumerate()
            .map(|(l, &o)| CyclicShift::new(self.residuals[l].clone(), o))
            .collect()
    }

    /// The `k - 1` transversals `{σ_1(b_1^i), ..., σ_{k-1}(b_{k-1}^i), b_k^i}`.
    pub fn collection(&self, sigmas: &[CyclicShift]) -> Result<Vec<u64>> {
        let k = self.order.len();
        if sigmas.len() != k - 1 || sigmas.iter().zip(&self.residuals).any(|(s, r)| s.base() != &r[..]) {
            return Err(Error::InvalidParams(
                "shifts must act on the residual listings of the touched blocks".into(),
            ));
        }
        Ok((0..k - 1)
            .map(|i| {
                sigmas
                    .iter()
                    .map(|s| 1u64 << s.apply_at(i))
                    .fold(1u64 << self.residuals[k - 1][i], |a, b| a | b)
            })
            .collect())
    }

    /// All `(k-1)^{k-1}` collections in lexicographic order of offsets.
    pub fn all_collections(&self) -> Vec<Vec<u64>> {
        let k = self.order.len();
        offset_tuples(&vec![k - 1; k - 1])
            .into_iter()
            .map(|offs| self.collection(&self.shifts(&offs).expect("valid offsets")).expect("valid shifts"))
            .collect()
    }
}

/// `cyclic_collection(T, σ̄)` on masks.
pub fn cyclic_collection(t: u64, sigmas: &[CyclicShift], frame: &LocalFrame) -> Result<Vec<u64>> {
    CyclicLayout::new(t, frame)?.collection(sigmas)
}

/// Every tuple `(o_1, ..., o_r)` with `0 <= o_i < sizes[i]`, lexicographically.
/// An empty listing contributes the single offset 0.
fn offset_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &len| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..len.max(1)).map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect()
    })
}

fn pairwise_disjoint_masks(masks: &[u64]) -> bool {
    let mut seen = 0u64;
    for &m in masks {
        if seen & m != 0 {
            return false;
        }
        seen |= m;
    }
    true
}

/// Admissible sets for the cyclic construction: `k-1` elements, one in each of
/// `k-1` blocks, none in `G0`.
pub fn cyclic_bases(frame: &LocalFrame) -> Vec<u64> {
    let k = frame.k();
    let mut out = Vec::new();
    for skip in 1..=k {
        let groups: Vec<Vec<u32>> = (1..=k).filter(|&i| i != skip).map(|i| frame.block_bits(i)).collect();
        out.extend(product_masks(&groups));
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCheck {
    pub bases: usize,
    /// Collections per base; the same for every base when `uniform_count`.
    pub collections: usize,
    pub uniform_count: bool,
    /// Every collection consists of pairwise disjoint full transversals.
    pub internally_disjoint: bool,
    /// No full transversal appears in two collections of the same base.
    pub cross_disjoint: bool,
    /// Every collection avoids `T`, `G0` and the reserved minimum.
    pub avoids_reserved: bool,
}

impl CyclicCheck {
    pub fn ok(&self) -> bool {
        self.uniform_count && self.internally_disjoint && self.cross_disjoint && self.avoids_reserved
    }
}

/// Builds all collections for every admissible base and checks them.
pub fn check_cyclic_collections(frame: &LocalFrame) -> Result<CyclicCheck> {
    let k = frame.k();
    let bases = cyclic_bases(frame);
    let expected = (k - 1).pow(k as u32 - 1);
    let per_base: Vec<(usize, bool, bool, bool)> = bases
        .par_iter()
        .map(|&t| {
            let layout = CyclicLayout::new(t, frame).expect("admissible base");
            let cols = layout.all_collections();
            let forbidden = t | frame.g0_mask() | 1 << layout.reserved();
            let mut internal = true;
            let mut avoids = true;
            let mut seen: HashMap<u64, usize> = HashMap::new();
            let mut cross = true;
            for (ci, col) in cols.iter().enumerate() {
                internal &= pairwise_disjoint_masks(col)
                    && col.iter().all(|&m| m.count_ones() as usize == k && frame.width_mask(m) == k);
                avoids &= col.iter().all(|&m| m & forbidden == 0);
                for &m in col {
                    if let Some(prev) = seen.insert(m, ci) {
                        cross &= prev == ci;
                    }
                }
            }
            (cols.len(), internal, cross, avoids)
        })
        .collect();
    Ok(CyclicCheck {
        bases: bases.len(),
        collections: per_base.first().map_or(0, |p| p.0),
        uniform_count: per_base.iter().all(|p| p.0 == expected),
        internally_disjoint: per_base.iter().all(|p| p.1),
        cross_disjoint: per_base.iter().all(|p| p.2),
        avoids_reserved: per_base.iter().all(|p| p.3),
    })
}

/// A set of size `k-1` and width `k-2` avoiding `G0`: `(l, {i, j})` means
/// `|T ∩ B_l| = 2` and `B_i`, `B_j` untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XType {
    pub l: usize,
    pub i: usize,
    pub j: usize,
}

pub fn x_type(frame: &LocalFrame, t: u64) -> Option<XType> {
    let k = frame.k();
    if t.count_ones() as usize != k - 1 || t & frame.g0_mask() != 0 || t & !frame.universe() != 0 {
        return None;
    }
    let prof = frame.profile_mask(t);
    let doubled: Vec<usize> = (1..=k).filter(|&b| prof[b] == 2).collect();
    let empty: Vec<usize> = (1..=k).filter(|&b| prof[b] == 0).collect();
    match (doubled.as_slice(), empty.as_slice()) {
        ([l], [i, j]) => Some(XType { l: *l, i: *i, j: *j }),
        _ => None,
    }
}

/// An almost full transversal avoiding `G0`: `(l, f)` means `B_l` untouched
/// and `|Q ∩ B_f| = 2`.
pub fn mask_type(frame: &LocalFrame, q: u64) -> Option<(usize, usize)> {
    let k = frame.k();
    if q.count_ones() as usize != k || q & frame.g0_mask() != 0 || q & !frame.universe() != 0 {
        return None;
    }
    let prof = frame.profile_mask(q);
    let l = (1..=k).filter(|&b| prof[b] == 0).collect::<Vec<_>>();
    let f = (1..=k).filter(|&b| prof[b] == 2).collect::<Vec<_>>();
    match (l.as_slice(), f.as_slice()) {
        ([l], [f]) => Some((*l, *f)),
        _ => None,
    }
}

/// Whether `(t, q)` is a bad pair: `q` has type `(l, i)` or `(l, j)`, is
/// disjoint from `t`, and meets the remaining untouched block of `t` in an
/// element other than its minimum.
pub fn is_bad_pair(frame: &LocalFrame, t: u64, q: u64) -> bool {
    let (Some(xt), Some((ql, qf))) = (x_type(frame, t), mask_type(frame, q)) else {
        return false;
    };
    if ql != xt.l || (qf != xt.i && qf != xt.j) || t & q != 0 {
        return false;
    }
    let m = if qf == xt.i { xt.j } else { xt.i };
    let hit = q & frame.block_mask(m);
    let min_bit = frame.block_mask(m) & frame.block_mask(m).wrapping_neg();
    hit != min_bit
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadPairStats {
    /// Number of sets of the `x` shape.
    pub x_sets: usize,
    pub per_t_min: u64,
    pub per_t_max: u64,
    /// Largest number of `x`-shaped sets forming a bad pair with one mask.
    pub per_mask_max: u64,
    /// Masks in at least one bad pair.
    pub masks_hit: usize,
    /// `2|X| <= m(X)` on every tested subfamily `X`.
    pub doubling_ok: bool,
    pub subfamilies_tested: usize,
}

/// Largest feasible `k` for [`bad_pair_stats`].
pub const BAD_PAIR_MAX_K: usize = 5;

/// Exhaustive bad-pair statistics. `seed` drives the random subfamilies used
/// for the doubling check.
pub fn bad_pair_stats(frame: &LocalFrame, seed: u64) -> Result<BadPairStats> {
    let k = frame.k();
    if k < 3 {
        return Err(Error::InvalidParams("bad pairs need k >= 3".into()));
    }
    if k > BAD_PAIR_MAX_K {
        return Err(Error::TooLarge {
            what: "bad-pair enumeration".into(),
            size: k as u128,
            cap: BAD_PAIR_MAX_K as u128,
        });
    }
    let blocks_union = frame.universe() & !frame.g0_mask();
    let xs: Vec<u64> = submasks_of_size(blocks_union, k as u32 - 1)
        .filter(|&t| x_type(frame, t).is_some())
        .collect();
    let masks: Vec<u64> = submasks_of_size(blocks_union, k as u32)
        .filter(|&q| mask_type(frame, q).is_some())
        .collect();
    let mut by_type: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
    for (idx, &q) in masks.iter().enumerate() {
        by_type.entry(mask_type(frame, q).expect("mask")).or_default().push(idx as u32);
    }
    let bad_of = |t: u64| -> Vec<u32> {
        let xt = x_type(frame, t).expect("x shape");
        [xt.i, xt.j]
            .iter()
            .flat_map(|&f| by_type.get(&(xt.l, f)).map(Vec::as_slice).unwrap_or(&[]))
            .copied()
            .filter(|&qi| is_bad_pair(frame, t, masks[qi as usize]))
            .collect()
    };

    let bad: Vec<Vec<u32>> = xs.par_iter().map(|&t| bad_of(t)).collect();
    let mut per_mask = vec![0u32; masks.len()];
    for qi in bad.iter().flatten() {
        per_mask[*qi as usize] += 1;
    }

    let hit_count = |subset: &[usize]| -> usize {
        let mut hit = vec![false; masks.len()];
        for &qi in subset.iter().flat_map(|&ti| &bad[ti]) {
            hit[qi as usize] = true;
        }
        hit.iter().filter(|&&h| h).count()
    };
    let all: Vec<usize> = (0..xs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut subfamilies: Vec<Vec<usize>> = vec![
        all.clone(),
        all[..all.len() / 2].to_vec(),
        all.iter().step_by(3).copied().collect(),
    ];
    for size in [1, all.len() / 10, all.len() / 3] {
        let mut pick = all.clone();
        pick.shuffle(&mut rng);
        pick.truncate(size.max(1));
        subfamilies.push(pick);
    }
    let masks_hit = hit_count(&all);
    let doubling_ok = subfamilies.iter().all(|sub| 2 * sub.len() <= hit_count(sub));
    Ok(BadPairStats {
        x_sets: xs.len(),
        per_t_min: bad.iter().map(|b| b.len() as u64).min().unwrap_or(0),
        per_t_max: bad.iter().map(|b| b.len() as u64).max().unwrap_or(0),
        per_mask_max: per_mask.iter().copied().max().unwrap_or(0) as u64,
        masks_hit,
        doubling_ok,
        subfamilies_tested: subfamilies.len(),
    })
}

/// Block profile of a `(k-1)`-set: `a_i = |T ∩ B_i|` over the touched blocks
/// in increasing order, `a_0 = k - p` with `p = Σ a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeProfile {
    pub a0: usize,
    /// `a_1, ..., a_c`.
    pub a: Vec<usize>,
    /// `p_0 = 0, p_1, ..., p_c`.
    pub prefix: Vec<usize>,
    /// `μ_1, ..., μ_p`.
    pub mu: Vec<usize>,
}

impl ShapeProfile {
    pub fn new(k: usize, a: Vec<usize>) -> Result<Self> {
        if a.contains(&0) {
            return Err(Error::InvalidParams("block intersections must be positive".into()));
        }
        let mut prefix = vec![0];
        for &x in &a {
            prefix.push(prefix.last().unwrap() + x);
        }
        let p = *prefix.last().unwrap();
        if p >= k {
            return Err(Error::InvalidParams(format!("profile leaves a_0 = k - p = {} < 1", k as i64 - p as i64)));
        }
        let mu = (1..=p).map(|i| prefix.iter().position(|&pj| pj >= i).unwrap()).collect();
        Ok(Self { a0: k - p, a, prefix, mu })
    }

    pub fn c(&self) -> usize {
        self.a.len()
    }

    pub fn p(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    /// `a_j` with `a_0` at index 0.
    pub fn part(&self, j: usize) -> usize {
        if j == 0 {
            self.a0
        } else {
            self.a[j - 1]
        }
    }

    /// `a_μ(k - a_μ)` for the `i`-th set (1-based), with `μ_i = 0` for `i > p`.
    pub fn multiplicity_bound(&self, k: usize, i: usize) -> usize {
        let mu = if i <= self.p() { self.mu[i - 1] } else { 0 };
        let a = self.part(mu);
        a * (k - a)
    }

    /// `(k - a_0)(k - a_1)...(k - a_c) · k^{k-c}`.
    pub fn shift_count(&self, k: usize) -> BigInt {
        let parts: BigInt = (0..=self.c()).map(|j| BigInt::from(k - self.part(j))).product();
        parts * num_traits::pow(BigInt::from(k), k - self.c())
    }
}

/// Numbering of `G(M)` around a `(k-1)`-set `T`: touched blocks first, `T`'s
/// elements of the `l`-th block at positions `p_{l-1}+1..p_l`, and `T ∩ G0` at
/// the end of `G0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLayout {
    k: usize,
    t: u64,
    profile: ShapeProfile,
    /// `numbering[l][i-1] = b_l^i` for relabelled blocks `l = 1..k`; index 0
    /// holds `g_1..g_{k-1}`.
    numbering: Vec<Vec<usize>>,
    /// Residual listings `G0 ∖ T, B̃_1, ..., B̃_k`.
    residuals: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl QLayout {
    pub fn new(t: u64, frame: &LocalFrame) -> Result<Self> {
        let k = frame.k();
        if t & !frame.universe() != 0 || t.count_ones() as usize + 1 != k {
            return Err(Error::InvalidParams("T must be a (k-1)-subset of G(M)".into()));
        }
        let prof = frame.profile_mask(t);
        let touched: Vec<usize> = (1..=k).filter(|&i| prof[i] > 0).collect();
        if touched.is_empty() {
            return Err(Error::InvalidParams("T must meet at least one block".into()));
        }
        let mut order = touched.clone();
        order.extend((1..=k).filter(|&i| prof[i] == 0));
        let profile = ShapeProfile::new(k, touched.iter().map(|&i| prof[i]).collect())?;

        let as_usize = |v: Vec<u32>| v.into_iter().map(|b| b as usize).collect::<Vec<_>>();
        let mut numbering = Vec::with_capacity(k + 1);
        let mut residuals = Vec::with_capacity(k + 1);
        let g_out = as_usize(bits_of(frame.g0_mask() & !t));
        let g_in = as_usize(bits_of(frame.g0_mask() & t));
        numbering.push(g_out.iter().chain(&g_in).copied().collect());
        residuals.push(g_out);
        for (pos, &b) in order.iter().enumerate() {
            let inside = as_usize(bits_of(frame.block_mask(b) & t));
            let outside = as_usize(bits_of(frame.block_mask(b) & !t));
            let mut slots = vec![usize::MAX; k];
            if pos < profile.c() {
                let start = profile.prefix[pos];
                for (off, &e) in inside.iter().enumerate() {
                    slots[start + off] = e;
                }
            }
            let mut rest = outside.iter();
            for s in slots.iter_mut().filter(|s| **s == usize::MAX) {
                *s = *rest.next().expect("block has k elements");
            }
            numbering.push(slots);
            residuals.push(outside);
        }
        Ok(Self {
            k,
            t,
            profile,
            numbering,
            residuals,
            order,
        })
    }

    pub fn profile(&self) -> &ShapeProfile {
        &self.profile
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Block indices in relabelled order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sizes of `G0 ∖ T, B̃_1, ..., B̃_k`.
    pub fn residual_sizes(&self) -> Vec<usize> {
        self.residuals.iter().map(Vec::len).collect()
    }

    /// Number of shift collections `π̄`, which equals the profile formula.
    pub fn total_shift_count(&self) -> BigInt {
        self.residuals.iter().map(|r| BigInt::from(r.len().max(1))).product()
    }

    pub fn shifts(&self, offsets: &[usize]) -> Result<Vec<CyclicShift>> {
        if offsets.len() != self.k + 1 {
            return Err(Error::InvalidParams(format!("expected {} offsets", self.k + 1)));
        }
        offsets
            .iter()
            .zip(&self.residuals)
            .map(|(&o, r)| CyclicShift::new(r.clone(), o))
            .collect()
    }

    fn image(&self, pis: &[CyclicShift], l: usize, i: usize) -> usize {
        let x = self.numbering[l][i - 1];
        pis[l].apply(x).expect("element lies in the residual")
    }

    /// `Q_{1,π̄}, ..., Q_{k,π̄}`.
    pub fn q_family(&self, pis: &[CyclicShift]) -> Result<Vec<u64>> {
        if pis.len() != self.k + 1 || pis.iter().zip(&self.residuals).any(|(p, r)| p.base() != &r[..]) {
            return Err(Error::InvalidParams("shifts must act on G0 ∖ T and the residual blocks".into()));
        }
        let p = self.profile.p();
        Ok((1..=self.k)
            .map(|i| {
                let skip = if i <= p { self.profile.mu[i - 1] } else { 0 };
                let mut q = 0u64;
                for l in 1..=self.k {
                    if l != skip {
                        q |= 1 << self.image(pis, l, i);
                    }
                }
                if i <= p {
                    q |= 1 << self.image(pis, 0, i);
                }
                q
            })
            .collect())
    }

    pub fn all_offsets(&self) -> Vec<Vec<usize>> {
        offset_tuples(&self.residual_sizes())
    }
}

/// `q_family(T, π̄)` on masks.
pub fn q_family(t: u64, pis: &[CyclicShift], frame: &LocalFrame) -> Result<Vec<u64>> {
    QLayout::new(t, frame)?.q_family(pis)
}

/// Structural checks on one `Q` collection.
pub fn q_family_ok(frame: &LocalFrame, layout: &QLayout, qs: &[u64]) -> bool {
    let k = frame.k();
    let p = layout.profile().p();
    pairwise_disjoint_masks(qs)
        && qs.iter().all(|&q| q & layout.t() == 0 && q.count_ones() as usize == k)
        && qs.iter().enumerate().all(|(idx, &q)| {
            let width = frame.width_mask(q);
            if idx < p {
                width == k - 1
            } else {
                width == k
            }
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMultiplicity {
    pub total_shifts: BigInt,
    pub formula: BigInt,
    pub distinct_sets: usize,
    /// Largest `#{π̄ : Q = Q_{i,π̄}}` over all produced `Q`.
    pub max_multiplicity: usize,
    /// Produced sets whose multiplicity exceeds `a_μ(k - a_μ)`.
    pub violations: usize,
    /// Collections failing [`q_family_ok`].
    pub malformed: usize,
}

/// Runs every `π̄` for the given `T` and counts how often each set recurs.
pub fn q_multiplicity(t: u64, frame: &LocalFrame) -> Result<QMultiplicity> {
    let k = frame.k();
    let layout = QLayout::new(t, frame)?;
    let mut seen: HashMap<u64, (usize, usize, usize)> = HashMap::new();
    let mut malformed = 0;
    let offsets = layout.all_offsets();
    for (idx, offs) in offsets.iter().enumerate() {
        let qs = layout.q_family(&layout.shifts(offs)?)?;
        if !q_family_ok(frame, &layout, &qs) {
            malformed += 1;
        }
        for (i, &q) in qs.iter().enumerate() {
            let bound = layout.profile().multiplicity_bound(k, i + 1);
            let e = seen.entry(q).or_insert((0, usize::MAX, bound));
            if e.1 != idx {
                e.0 += 1;
                e.1 = idx;
            }
            e.2 = e.2.min(bound);
        }
    }
    Ok(QMultiplicity {
        total_shifts: BigInt::from(offsets.len()),
        formula: layout.profile().shift_count(k),
        distinct_sets: seen.len(),
        max_multiplicity: seen.values().map(|e| e.0).max().unwrap_or(0),
        violations: seen.values().filter(|e| e.0 > e.2).count(),
        malformed,
    })
}

/// Random admissible `T` and `π̄`, checking structure only.
pub fn q_random_checks(frame: &LocalFrame, trials: usize, seed: u64) -> Result<usize> {
    use rand::Rng;
    let k = frame.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: Vec<u32> = bits_of(frame.universe());
    let mut failures = 0;
    let mut done = 0;
    while done < trials {
        let mut pick = universe.clone();
        pick.shuffle(&mut rng);
        let t = pick[..k - 1].iter().fold(0u64, |a, &b| a | 1 << b);
        let Ok(layout) = QLayout::new(t, frame) else {
            continue;
        };
        let offs: Vec<usize> = layout.residual_sizes().iter().map(|&n| rng.gen_range(0..n.max(1))).collect();
        let qs = layout.q_family(&layout.shifts(&offs)?)?;
        if !q_family_ok(frame, &layout, &qs) {
            failures += 1;
        }
        done += 1;
    }
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCheck {
    pub k: usize,
    pub holds: bool,
    pub profiles: usize,
    /// Profile `(a_0, ..., a_c)` with the smallest `lhs - rhs`.
    pub tightest: Vec<usize>,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// `(k - a_0)...(k - a_c) k^{k-c} >= max_i a_i(k - a_i) · k^{k-1}` over every
/// composition of `k` into positive parts `a_0, ..., a_c`.
pub fn product_inequality_check(k: usize) -> ProductCheck {
    assert!(k >= 2, "product inequality needs k >= 2");
    let kb = BigInt::from(k);
    let mut best: Option<(BigInt, Vec<usize>, BigInt, BigInt)> = None;
    let mut holds = true;
    let mut profiles = 0;
    for parts in compositions(k) {
        let c = parts.len() - 1;
        let lhs: BigInt = parts.iter().map(|&a| BigInt::from(k - a)).product::<BigInt>()
            * num_traits::pow(kb.clone(), k - c);
        let m = parts.iter().map(|&a| a * (k - a)).max().unwrap();
        let rhs = BigInt::from(m) * num_traits::pow(kb.clone(), k - 1);
        holds &= lhs >= rhs;
        profiles += 1;
        let margin = &lhs - &rhs;
        if best.as_ref().is_none_or(|b| margin < b.0) {
            best = Some((margin, parts, lhs, rhs));
        }
    }
    let (_, tightest, lhs, rhs) = best.expect("at least one composition");
    ProductCheck {
        k,
        holds,
        profiles,
        tightest,
        lhs,
        rhs,
    }
}

/// Compositions of `k` into positive parts, in lexicographic order.
fn compositions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (1..=k)
        .flat_map(|first| {
            compositions(k - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}
