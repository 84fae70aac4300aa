//! Width and weight bookkeeping on a block frame.
//!
//! A frame splits the prefix `[(s+1)k - 1]` into a special block `G0` of size
//! `k - 1` and `s` blocks `G1..Gs` of size `k`. A selection `M` of `k` block
//! indices gives the local universe `G(M) = G0 ∪ B1 ∪ ... ∪ Bk` of
//! `k² + k - 1` elements, where every comparison against the clique candidate
//! takes place.

use std::collections::BTreeMap;
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::constructions::{prefix_len, trace_of};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::kset::{enumerate_ksets, submasks_of_size, KSet};
use crate::scalar::{binom, binom_signed, factorial, Scalar};
use crate::ExactScalar;

/// Default cap on the number of subsets an enumeration may visit.
pub const ENUMERATION_CAP: u128 = 50_000_000;

/// The triple `(n, k, s)` with `s >= k >= 1` and `n >= (s+1)k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params {
    pub n: u64,
    pub k: u64,
    pub s: u64,
}

impl Params {
    pub fn new(n: u64, k: u64, s: u64) -> Result<Self> {
        if k == 0 || s < k {
            return Err(Error::InvalidParams(format!("need s >= k >= 1, got k={k}, s={s}")));
        }
        let prefix = (s + 1) * k - 1;
        if n < prefix {
            return Err(Error::InvalidParams(format!("need n >= (s+1)k - 1 = {prefix}, got n={n}")));
        }
        Ok(Self { n, k, s })
    }

    /// Parameters inside the theorem window: `k >= 5`, `s > 101k³`, and
    /// `(s+1)k <= n < (s+1)(k + 1/(100k))`.
    pub fn theorem_window(n: u64, k: u64, s: u64) -> Result<Self> {
        let reject = |reason: String| Error::OutsideWindow { k, s, n, reason };
        if k < 5 {
            return Err(reject("k must be at least 5".into()));
        }
        if s <= 101 * k * k * k {
            return Err(reject(format!("s must exceed 101k³ = {}", 101 * k * k * k)));
        }
        let lo = (s + 1) * k;
        let hi = Self::window_max_n(k, s);
        if n < lo || n > hi {
            return Err(reject(format!("n must lie in [{lo}, {hi}]")));
        }
        Self::new(n, k, s)
    }

    /// Largest `n` with `n < (s+1)(k + 1/(100k))`.
    pub fn window_max_n(k: u64, s: u64) -> u64 {
        // 100k·n < (s+1)(100k² + 1)
        let num = (s as u128 + 1) * (100 * k as u128 * k as u128 + 1);
        let den = 100 * k as u128;
        (num.div_ceil(den) - 1) as u64
    }

    pub fn prefix_len(&self) -> u64 {
        (self.s + 1) * self.k - 1
    }

    pub fn n_bar(&self) -> u64 {
        self.n - self.prefix_len()
    }

    pub fn gm_len(&self) -> u64 {
        self.k * self.k + self.k - 1
    }
}

/// Outcome of one exact or approximate comparison `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<S> {
    pub lhs: S,
    pub rhs: S,
    pub pass: bool,
}

/// The weight formulas, evaluated in a chosen scalar type.
#[derive(Debug, Clone, Copy)]
pub struct WeightCalculus<S> {
    params: Params,
    _scalar: PhantomData<S>,
}

impl<S: Scalar> WeightCalculus<S> {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            _scalar: PhantomData,
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    fn int(v: u64) -> S {
        S::from_u64(v)
    }

    fn frac(p: &BigInt, q: &BigInt) -> S {
        S::ratio(p, q)
    }

    /// `1 / (100k)`.
    pub fn epsilon(&self) -> S {
        S::one() / Self::int(100 * self.params.k)
    }

    /// `w_{c,d} = C(n̄, k-d) / C(s-c, k-c)` for `0 <= c <= d <= k`.
    pub fn weight(&self, c: u64, d: u64) -> Result<S> {
        let Params { k, s, .. } = self.params;
        if c > d || d > k {
            return Err(Error::InvalidParams(format!("weight needs 0 <= c <= d <= k, got c={c}, d={d}, k={k}")));
        }
        let num = binom(self.params.n_bar(), (k - d) as i64);
        let den = binom(s - c, (k - c) as i64);
        Ok(Self::frac(&num, &den))
    }

    /// `(1 + 1/k) · ε^{k-d} / s^{d-c} · (k-c)! / (k-d)!`.
    pub fn weight_bound(&self, c: u64, d: u64) -> S {
        let Params { k, s, .. } = self.params;
        let fact = Self::frac(&factorial(k - c), &factorial(k - d));
        (S::one() + S::one() / Self::int(k)) * self.epsilon().powu((k - d) as u32) * fact
            / Self::int(s).powu((d - c) as u32)
    }

    /// The unsimplified middle expression of the weight bound:
    /// `(εs)^{k-d}(k-c)! / (s^{k-c}(k-d)!) · (1 + (ε+1)/(εs))^{k-d} / (1 - (k-1)/s)^{k-c}`.
    pub fn weight_expansion(&self, c: u64, d: u64) -> S {
        let Params { k, s, .. } = self.params;
        let eps = self.epsilon();
        let s_ = Self::int(s);
        let eps_s = eps.clone() * s_.clone();
        let head = eps_s.clone().powu((k - d) as u32) * Self::frac(&factorial(k - c), &factorial(k - d))
            / s_.clone().powu((k - c) as u32);
        let grow = S::one() + (eps.clone() + S::one()) / eps_s;
        let shrink = S::one() - Self::int(k - 1) / s_;
        head * grow.powu((k - d) as u32) / shrink.powu((k - c) as u32)
    }

    /// `C(k,c) · k^{2d-c} / (d-c)!`.
    pub fn count_bound(&self, c: u64, d: u64) -> S {
        count_bound::<S>(self.params.k, c, d)
    }

    /// `(1 + 2/k) · k^{k+2g} · ε / (s^g · g!)`.
    pub fn wg_bound(&self, g: u64) -> S {
        let Params { k, s, .. } = self.params;
        (S::one() + Self::int(2) / Self::int(k)) * Self::int(k).powu((k + 2 * g) as u32) * self.epsilon()
            / (Self::int(s).powu(g as u32) * S::from_bigint(&factorial(g)))
    }

    /// `(1 + 1/k) · k^{k+2g} · ε / (s^g · g!)`.
    pub fn wg_term_scale(&self, g: u64) -> S {
        let Params { k, s, .. } = self.params;
        (S::one() + S::one() / Self::int(k)) * Self::int(k).powu((k + 2 * g) as u32) * self.epsilon()
            / (Self::int(s).powu(g as u32) * S::from_bigint(&factorial(g)))
    }
}

/// `C(k,c) · k^{2d-c} / (d-c)!` for `0 <= c <= d`.
pub fn count_bound<S: Scalar>(k: u64, c: u64, d: u64) -> S {
    let num = binom(k, c as i64) * num_traits::pow(BigInt::from(k), (2 * d - c) as usize);
    S::ratio(&num, &factorial(d - c))
}

/// Shortcut for `WeightCalculus::<S>::new(params).weight(c, d)`.
pub fn weight_cd<S: Scalar>(c: u64, d: u64, params: &Params) -> Result<S> {
    WeightCalculus::<S>::new(*params).weight(c, d)
}

/// A partition of the prefix into `G0` and blocks `G1..Gs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    s: usize,
    g0: KSet,
    groups: Vec<KSet>,
}

impl Partition {
    /// `G_i = {(i-1)k+1, ..., ik}`, `G0 = {sk+1, ..., (s+1)k-1}`.
    pub fn canonical(k: usize, s: usize) -> Result<Self> {
        let groups = (1..=s)
            .map(|i| KSet::from_elements((i - 1) * k + 1..=i * k))
            .collect::<Result<Vec<_>>>()?;
        let g0 = KSet::from_elements(s * k + 1..(s + 1) * k)?;
        Self::new(k, s, g0, groups)
    }

    pub fn new(k: usize, s: usize, g0: KSet, groups: Vec<KSet>) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParams(format!("not a block partition: {msg}"));
        if k == 0 || groups.len() != s {
            return Err(bad(format!("expected {s} blocks, got {}", groups.len())));
        }
        if g0.len() != k - 1 {
            return Err(bad(format!("G0 has {} elements, expected {}", g0.len(), k - 1)));
        }
        let prefix = prefix_len(k, s);
        let mut seen = g0.clone();
        for (i, g) in groups.iter().enumerate() {
            if g.len() != k {
                return Err(bad(format!("block {} has {} elements", i + 1, g.len())));
            }
            if seen.intersects(g) {
                return Err(bad(format!("block {} overlaps an earlier block", i + 1)));
            }
            seen = seen.union(g);
        }
        if seen.len() != prefix || seen.max_element().unwrap_or(0) > prefix {
            return Err(bad(format!("blocks do not cover [{prefix}]")));
        }
        Ok(Self { k, s, g0, groups })
    }

    pub fn g0(&self) -> &KSet {
        &self.g0
    }

    /// Block `G_i`, 1-based.
    pub fn group(&self, i: usize) -> &KSet {
        &self.groups[i - 1]
    }

    pub fn groups(&self) -> &[KSet] {
        &self.groups
    }

    pub fn prefix_len(&self) -> usize {
        prefix_len(self.k, self.s)
    }

    /// Number of blocks `G1..Gs` that `t` meets.
    pub fn width(&self, t: &KSet) -> Result<usize> {
        if t.max_element().is_some_and(|m| m > self.prefix_len()) {
            return Err(Error::InvalidParams(format!(
                "{t} is not inside the prefix [{}]",
                self.prefix_len()
            )));
        }
        Ok(self.groups.iter().filter(|g| g.intersects(t)).count())
    }
}

/// Parameters, a partition, and a block selection `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFrame {
    params: Params,
    partition: Partition,
    selection: Vec<usize>,
    anchored: bool,
}

impl WeightFrame {
    pub fn new(params: Params, partition: Partition, selection: Vec<usize>) -> Result<Self> {
        let k = params.k as usize;
        let s = params.s as usize;
        if partition.k != k || partition.s != s {
            return Err(Error::InvalidParams("partition does not match parameters".into()));
        }
        let mut sorted = selection.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k || sorted.iter().any(|&m| m == 0 || m > s) {
            return Err(Error::InvalidParams(format!(
                "selection must be a {k}-subset of [{s}], got {selection:?}"
            )));
        }
        Ok(Self {
            params,
            partition,
            selection: sorted,
            anchored: false,
        })
    }

    /// Canonical partition with `M = {1, ..., k}`.
    pub fn canonical(params: Params) -> Result<Self> {
        let partition = Partition::canonical(params.k as usize, params.s as usize)?;
        Self::new(params, partition, (1..=params.k as usize).collect())
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn selection(&self) -> &[usize] {
        &self.selection
    }

    pub fn with_selection(&self, selection: Vec<usize>) -> Result<Self> {
        let mut out = Self::new(self.params, self.partition.clone(), selection)?;
        out.anchored = self.anchored;
        Ok(out)
    }

    pub fn width(&self, t: &KSet) -> Result<usize> {
        self.partition.width(t)
    }

    /// `G(M)`.
    pub fn gm(&self) -> KSet {
        self.selection
            .iter()
            .fold(self.partition.g0.clone(), |acc, &m| acc.union(self.partition.group(m)))
    }

    /// The local view of `G(M)` with blocks in selection order.
    pub fn local(&self) -> Result<LocalFrame> {
        let blocks: Vec<KSet> = self
            .selection
            .iter()
            .map(|&m| self.partition.group(m).clone())
            .collect();
        LocalFrame::from_blocks(self.partition.g0.clone(), blocks)
    }

    pub fn is_anchored(&self) -> bool {
        self.anchored
    }

    /// Marks the frame anchored after checking it against `fam`: every block
    /// `G_i` is a trace member, `G0` is not, and `G0 ∪ {min B}` belongs to
    /// `fam` for every member `B` avoiding `G0`.
    pub fn anchor(mut self, fam: &Family) -> Result<Self> {
        let (k, s) = (self.params.k as usize, self.params.s as usize);
        let trace = trace_of(fam, k, s)?.family;
        for (i, g) in self.partition.groups.iter().enumerate() {
            if !trace.contains(g) {
                return Err(Error::InvalidParams(format!("block G{} = {g} is not in the trace", i + 1)));
            }
        }
        if !has_special_set_property(fam, &trace, &self.partition.g0) {
            return Err(Error::InvalidParams(format!(
                "G0 = {} fails the special-set property",
                self.partition.g0
            )));
        }
        self.anchored = true;
        Ok(self)
    }
}

/// `g0 ∉ trace`, and `g0 ∪ {min B} ∈ fam` for every `B ∈ fam` disjoint from `g0`.
pub fn has_special_set_property(fam: &Family, trace: &Family, g0: &KSet) -> bool {
    if trace.contains(g0) {
        return false;
    }
    fam.iter().filter(|b| b.is_disjoint(g0)).all(|b| match b.min_element() {
        Some(m) => {
            let mut cand = g0.clone();
            cand.insert(m);
            fam.contains(&cand)
        }
        None => false,
    })
}

/// `G(M)` as a 64-bit universe: bit `i` stands for the `i`-th smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFrame {
    k: usize,
    elements: Vec<usize>,
    g0: u64,
    blocks: Vec<u64>,
}

impl LocalFrame {
    /// `B_i = {(i-1)k+1, ..., ik}` and `G0 = {k²+1, ..., k²+k-1}`.
    pub fn canonical(k: usize) -> Result<Self> {
        let blocks = (1..=k)
            .map(|i| KSet::from_elements((i - 1) * k + 1..=i * k))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(KSet::from_elements(k * k + 1..k * k + k)?, blocks)
    }

    pub fn from_blocks(g0: KSet, blocks: Vec<KSet>) -> Result<Self> {
        let k = blocks.len();
        if k == 0 || g0.len() + 1 != k || blocks.iter().any(|b| b.len() != k) {
            return Err(Error::InvalidParams("local frame needs k blocks of size k and |G0| = k-1".into()));
        }
        let universe = blocks.iter().fold(g0.clone(), |acc, b| acc.union(b));
        if universe.len() != k * k + k - 1 {
            return Err(Error::InvalidParams("local blocks overlap".into()));
        }
        if universe.len() > 64 {
            return Err(Error::TooLarge {
                what: "local frame".into(),
                size: universe.len() as u128,
                cap: 64,
            });
        }
        let elements = universe.to_vec();
        let to_mask = |set: &KSet| {
            set.elements()
                .map(|e| 1u64 << elements.binary_search(&e).expect("inside universe"))
                .fold(0, |a, b| a | b)
        };
        let g0_mask = to_mask(&g0);
        let block_masks = blocks.iter().map(to_mask).collect();
        Ok(Self {
            k,
            g0: g0_mask,
            blocks: block_masks,
            elements,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn universe(&self) -> u64 {
        self.blocks.iter().fold(self.g0, |a, b| a | b)
    }

    pub fn g0_mask(&self) -> u64 {
        self.g0
    }

    /// Mask of block `B_i`, 1-based.
    pub fn block_mask(&self, i: usize) -> u64 {
        self.blocks[i - 1]
    }

    pub fn block_masks(&self) -> &[u64] {
        &self.blocks
    }

    /// Elements of `B_i` (1-based) as local bit positions, increasing.
    pub fn block_bits(&self, i: usize) -> Vec<u32> {
        bits_of(self.blocks[i - 1])
    }

    pub fn g0_bits(&self) -> Vec<u32> {
        bits_of(self.g0)
    }

    pub fn width_mask(&self, mask: u64) -> usize {
        self.blocks.iter().filter(|&&b| b & mask != 0).count()
    }

    /// `(|T ∩ G0|, |T ∩ B1|, ..., |T ∩ Bk|)`.
    pub fn profile_mask(&self, mask: u64) -> Vec<usize> {
        std::iter::once(self.g0)
            .chain(self.blocks.iter().copied())
            .map(|b| (b & mask).count_ones() as usize)
            .collect()
    }

    pub fn to_kset(&self, mask: u64) -> KSet {
        KSet::from_elements(bits_of(mask).into_iter().map(|b| self.elements[b as usize]))
            .expect("positive elements")
    }

    /// Local mask of `t`, or `None` if `t` leaves `G(M)`.
    pub fn to_mask(&self, t: &KSet) -> Option<u64> {
        t.elements().try_fold(0u64, |acc, e| {
            self.elements.binary_search(&e).ok().map(|i| acc | 1 << i)
        })
    }
}

pub(crate) fn bits_of(mask: u64) -> Vec<u32> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Brute-force counts `N̂_{c,d}` of all subsets of `G(M)` with width `c` and
/// size `d`, for `d <= max_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTable {
    k: usize,
    max_d: usize,
    counts: Vec<Vec<u64>>,
}

impl CandidateTable {
    pub fn enumerate(frame: &LocalFrame, max_d: usize) -> Result<Self> {
        Self::enumerate_with_cap(frame, max_d, ENUMERATION_CAP)
    }

    pub fn enumerate_with_cap(frame: &LocalFrame, max_d: usize, cap: u128) -> Result<Self> {
        let k = frame.k();
        let universe = frame.universe();
        let size = universe.count_ones() as u64;
        let work: BigInt = (0..=max_d).map(|d| binom(size, d as i64)).sum();
        let work = work.to_u128().unwrap_or(u128::MAX);
        if work > cap {
            return Err(Error::TooLarge {
                what: format!("subset enumeration of G(M) up to size {max_d}"),
                size: work,
                cap,
            });
        }
        let mut counts = vec![vec![0u64; max_d + 1]; k + 1];
        for d in 0..=max_d {
            for mask in submasks_of_size(universe, d as u32) {
                counts[frame.width_mask(mask)][d] += 1;
            }
        }
        Ok(Self { k, max_d, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_d(&self) -> usize {
        self.max_d
    }

    /// `N̂_{c,d}`; zero outside the enumerated range.
    pub fn get(&self, c: usize, d: usize) -> u64 {
        if c > self.k || d > self.max_d {
            0
        } else {
            self.counts[c][d]
        }
    }
}

/// `N̂_{c,d}` by enumeration.
pub fn candidate_count(c: usize, d: usize, frame: &LocalFrame) -> Result<u64> {
    if c > d || d > frame.k() {
        return Err(Error::InvalidParams(format!("need c <= d <= k, got c={c}, d={d}")));
    }
    let table = CandidateTable::enumerate(frame, d)?;
    Ok(table.get(c, d))
}

/// `N̂_{c,d}` from the block-profile decomposition: choose the `c` blocks met,
/// then distribute the remaining `d - c` elements over `G0` and those blocks.
pub fn candidate_count_by_profiles(k: u64, c: u64, d: u64) -> BigInt {
    if c > d || c > k {
        return BigInt::zero();
    }
    // Coefficient of x^{d-c} in (Σ_a C(k-1,a) x^a) · (Σ_a C(k,a+1) x^a)^c.
    let top = (d - c) as usize;
    let g0_poly: Vec<BigInt> = (0..=top).map(|a| binom(k - 1, a as i64)).collect();
    let block_poly: Vec<BigInt> = (0..=top).map(|a| binom(k, a as i64 + 1)).collect();
    let mut acc = g0_poly;
    for _ in 0..c {
        let mut next = vec![BigInt::zero(); top + 1];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in block_poly.iter().enumerate().take(top + 1 - i) {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    binom(k, c as i64) * &acc[top]
}

/// Sum of `w_{v(T),k}` over all `k`-subsets `T` of `G(M)`.
pub fn wa_of_m<S: Scalar>(params: &Params, frame: &LocalFrame) -> Result<S> {
    let k = frame.k();
    let calc = WeightCalculus::<S>::new(*params);
    let mut by_width = vec![0u64; k + 1];
    for mask in submasks_of_size(frame.universe(), k as u32) {
        by_width[frame.width_mask(mask)] += 1;
    }
    let mut total = S::zero();
    for (c, &count) in by_width.iter().enumerate() {
        if count > 0 {
            total = total + S::from_u64(count) * calc.weight(c as u64, k as u64)?;
        }
    }
    Ok(total)
}

/// The envelope `Σ_{c=1}^{k-g-1} Σ_{d=c+g}^{k-1} w_{c,d} · N̂_{c,d}` against
/// `(1 + 2/k) k^{k+2g} ε / (s^g g!)`.
pub fn wg_envelope<S: Scalar>(params: &Params, table: &CandidateTable, g: u64) -> Result<Comparison<S>> {
    let k = params.k;
    if k < 2 || g > k - 2 {
        return Err(Error::InvalidParams(format!("g must lie in [0, k-2], got g={g}, k={k}")));
    }
    if table.k() as u64 != k || (table.max_d() as u64) < k - 1 {
        return Err(Error::InvalidParams("candidate table does not cover sizes below k".into()));
    }
    let calc = WeightCalculus::<S>::new(*params);
    let mut lhs = S::zero();
    for c in 1..k - g {
        for d in c + g..k {
            let n_hat = table.get(c as usize, d as usize);
            lhs = lhs + calc.weight(c, d)? * S::from_u64(n_hat);
        }
    }
    let rhs = calc.wg_bound(g);
    let pass = lhs <= rhs;
    Ok(Comparison { lhs, rhs, pass })
}

/// The result of checking the block decomposition of `|fam|`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    /// `Σ_{T ∈ trace} C(s - v(T), k - v(T)) · w_{v(T),|T|}`.
    pub lhs: ExactScalar,
    /// `|fam|`.
    pub rhs: ExactScalar,
    /// `Σ_M Σ_{T ∈ trace, T ⊆ G(M)} w(T)`, when there are few enough selections.
    pub direct: Option<ExactScalar>,
    /// Trace members of width zero.
    pub width_zero: usize,
    pub pass: bool,
}

/// Checks that the weights of the trace, summed over all block selections,
/// recover `|fam|`.
pub fn family_weight_identity(fam: &Family, frame: &WeightFrame) -> Result<IdentityCheck> {
    let params = frame.params();
    let (k, s) = (params.k as usize, params.s as usize);
    if fam.ground_n() as u64 != params.n {
        return Err(Error::InvalidParams("family ground set differs from frame n".into()));
    }
    let calc = WeightCalculus::<ExactScalar>::new(params);
    let trace = trace_of(fam, k, s)?.family;
    let mut lhs = ExactScalar::zero();
    let mut widths = Vec::with_capacity(trace.len());
    let mut width_zero = 0;
    for t in &trace {
        let v = frame.width(t)?;
        if v == 0 {
            width_zero += 1;
        }
        widths.push(v);
        let mult = binom_signed(params.s as i64 - v as i64, k as i64 - v as i64);
        lhs += ExactScalar::from_integer(mult) * calc.weight(v as u64, t.len() as u64)?;
    }
    let rhs = ExactScalar::from_integer(BigInt::from(fam.len()));

    let selections = binom(params.s, params.k as i64);
    let work = selections.clone() * BigInt::from(trace.len().max(1));
    let direct = if work <= BigInt::from(10_000_000u64) {
        let mut sum = ExactScalar::zero();
        for m in enumerate_ksets(s, k) {
            let gm = frame.with_selection(m.to_vec())?.gm();
            for (t, &v) in trace.iter().zip(&widths) {
                if t.is_subset(&gm) {
                    sum += calc.weight(v as u64, t.len() as u64)?;
                }
            }
        }
        Some(sum)
    } else {
        None
    };
    let pass = lhs == rhs && direct.as_ref().is_none_or(|d| *d == rhs);
    Ok(IdentityCheck {
        lhs,
        rhs,
        direct,
        width_zero,
        pass,
    })
}

/// Counts of short, nearly-transversal trace members inside `G(M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RxCounts {
    /// `d -> r_d`: size `d`, width `d - 1`, meets `G0`.
    pub r: BTreeMap<usize, u64>,
    /// `d -> x_d`: size `d`, width `d - 1`, avoids `G0`.
    pub x: BTreeMap<usize, u64>,
    /// `d -> [k(k-d+1) r_d <= d r_{d+1}]` for `d = 2..k-2`.
    pub chain: BTreeMap<usize, bool>,
    pub chain_holds: bool,
}

/// Trace members of `fam` that lie inside `G(M)`.
pub fn trace_in_gm(fam: &Family, frame: &WeightFrame) -> Result<Vec<KSet>> {
    let p = frame.params();
    let trace = trace_of(fam, p.k as usize, p.s as usize)?.family;
    let gm = frame.gm();
    Ok(trace.iter().filter(|t| t.is_subset(&gm)).cloned().collect())
}

pub fn rx_counts(fam: &Family, frame: &WeightFrame) -> Result<RxCounts> {
    let k = frame.params().k as usize;
    let members = trace_in_gm(fam, frame)?;
    let g0 = frame.partition().g0().clone();
    let mut r: BTreeMap<usize, u64> = (2..k).map(|d| (d, 0)).collect();
    let mut x = r.clone();
    for t in &members {
        let d = t.len();
        if d < 2 || d >= k || frame.width(t)? + 1 != d {
            continue;
        }
        let slot = if t.intersects(&g0) { &mut r } else { &mut x };
        *slot.get_mut(&d).expect("d in range") += 1;
    }
    let mut chain = BTreeMap::new();
    for d in 2..k.saturating_sub(1) {
        let lhs = (k * (k - d + 1)) as u64 * r[&d];
        let rhs = d as u64 * r[&(d + 1)];
        chain.insert(d, lhs <= rhs);
    }
    let chain_holds = chain.values().all(|&ok| ok);
    Ok(RxCounts {
        r,
        x,
        chain,
        chain_holds,
    })
}

/// Per-family `W_g`: the total weight of trace members inside `G(M)` with
/// `|T| < k` and `|T| - v(T) >= g`.
pub fn family_wg(fam: &Family, frame: &WeightFrame, g: usize) -> Result<ExactScalar> {
    let p = frame.params();
    let calc = WeightCalculus::<ExactScalar>::new(p);
    let mut total = ExactScalar::zero();
    for t in trace_in_gm(fam, frame)? {
        let v = frame.width(&t)?;
        if t.len() < p.k as usize && t.len() >= v + g {
            total += calc.weight(v as u64, t.len() as u64)?;
        }
    }
    Ok(total)
}

/// `w_F(M)`: total weight of the trace members inside `G(M)`.
pub fn family_weight_of_m(fam: &Family, frame: &WeightFrame) -> Result<ExactScalar> {
    let calc = WeightCalculus::<ExactScalar>::new(frame.params());
    let mut total = ExactScalar::zero();
    for t in trace_in_gm(fam, frame)? {
        total += calc.weight(frame.width(&t)? as u64, t.len() as u64)?;
    }
    Ok(total)
}
