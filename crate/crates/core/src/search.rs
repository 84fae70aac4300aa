//! Exact maximum size of a `k`-uniform family with no `s + 1` pairwise
//! disjoint members, for ground sets small enough to search, and the
//! special-set search on a given family.
//!
//! Families are handled as bitmasks over colex ranks of the `k`-subsets of
//! `[n]`, so comparing two masks as integers is the colex order on families.
//! Ties between maximisers are broken towards the smallest mask.

use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::constructions::{extremal_sizes, prefix_len, trace_of};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::kset::{enumerate_ksets, KSet};
use crate::matching::{Outcome, DEFAULT_NODE_BUDGET};
use crate::report::{AuditReport, Cmp, ReportParams};
use crate::weights::has_special_set_property;
use crate::ExactScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exhaustive,
    Bnb,
    ShiftedOnly,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Self::Exhaustive),
            "bnb" => Ok(Self::Bnb),
            "shifted_only" | "shifted-only" => Ok(Self::ShiftedOnly),
            other => Err(Error::InvalidParams(format!(
                "unknown method {other:?}; expected exhaustive, bnb or shifted_only"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Largest `C(n, k)` the exhaustive method accepts.
    pub exhaustive_max: usize,
    /// Largest `C(n, k)` the branch-and-bound methods accept.
    pub bnb_max: usize,
    pub node_budget: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            exhaustive_max: 24,
            bnb_max: 60,
            node_budget: Some(DEFAULT_NODE_BUDGET),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub max: usize,
    pub witness: Family,
    pub nodes: u64,
}

/// The `k`-subsets of `[n]` in colex order, with the forbidden matchings
/// expressed over their ranks.
struct Instance {
    n: usize,
    k: usize,
    sets: Vec<KSet>,
    /// Each `(s+1)`-matching as a rank mask.
    matchings: Vec<u64>,
    /// For each rank, the matchings through it with that rank removed.
    through: Vec<Vec<u64>>,
    /// For each rank, the ranks of its immediate predecessors.
    preds: Vec<Vec<usize>>,
}

impl Instance {
    fn new(n: usize, k: usize, s: usize, cap: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!("need 1 <= k <= n, got n={n}, k={k}")));
        }
        let sets: Vec<KSet> = enumerate_ksets(n, k).collect();
        if sets.len() > cap.min(64) {
            return Err(Error::TooLarge {
                what: format!("search over C({n},{k}) sets"),
                size: sets.len() as u128,
                cap: cap.min(64) as u128,
            });
        }
        let masks: Vec<u64> = sets.iter().map(|s| s.to_mask().expect("n <= 64")).collect();
        let mut matchings = Vec::new();
        collect_matchings(&masks, s + 1, 0, 0, 0, &mut matchings);
        let mut through = vec![Vec::new(); sets.len()];
        for &m in &matchings {
            let mut rest = m;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                through[i].push(m & !(1 << i));
                rest &= rest - 1;
            }
        }
        let index = |set: &KSet| sets.binary_search(set).expect("k-subset of [n]");
        let mut preds = vec![Vec::new(); sets.len()];
        for (r, set) in sets.iter().enumerate() {
            for x in set.elements() {
                if x > 1 && !set.contains(x - 1) {
                    preds[r].push(index(&set.replaced(x, x - 1)));
                }
            }
        }
        Ok(Self {
            n,
            k,
            sets,
            matchings,
            through,
            preds,
        })
    }

    fn len(&self) -> usize {
        self.sets.len()
    }

    /// Whether adding rank `i` to `cur` completes a forbidden matching.
    fn completes_matching(&self, cur: u64, i: usize) -> bool {
        self.through[i].iter().any(|&rest| rest & !cur == 0)
    }

    /// Lower bound on how many `undecided` ranks must stay out: forbidden
    /// matchings whose decided part lies in `cur` each need one undecided
    /// member excluded, and greedily packed disjoint ones need distinct ones.
    fn forced_exclusions(&self, undecided: u64, cur: u64, max_part: usize) -> usize {
        let mut used = 0u64;
        let mut hits = 0;
        for part in 1..=max_part {
            for &m in &self.matchings {
                let u = m & undecided;
                if m & !undecided & !cur == 0 && u.count_ones() as usize == part && u & used == 0 {
                    used |= u;
                    hits += 1;
                }
            }
        }
        hits
    }

    fn valid(&self, mask: u64) -> bool {
        self.matchings.iter().all(|&m| m & !mask != 0)
    }

    fn family(&self, mask: u64) -> Family {
        let members = (0..self.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.sets[i].clone());
        Family::new(self.n, Some(self.k), members).expect("subsets of [n]")
    }
}

fn collect_matchings(masks: &[u64], size: usize, start: usize, used: u64, chosen: u64, out: &mut Vec<u64>) {
    if size == 0 {
        out.push(chosen);
        return;
    }
    for i in start..masks.len() {
        if masks[i] & used == 0 {
            collect_matchings(masks, size - 1, i + 1, used | masks[i], chosen | 1 << i, out);
        }
    }
}

struct OverBudget;

struct Bnb<'a> {
    inst: &'a Instance,
    shifted: bool,
    budget: Option<u64>,
    nodes: u64,
    best: usize,
    /// Largest undecided part packed by the exclusion bound.
    part_cap: usize,
}

/// Mask of ranks `0..i`.
fn low_bits(i: usize) -> u64 {
    if i >= 64 {
        u64::MAX
    } else {
        (1 << i) - 1
    }
}

impl Bnb<'_> {
    fn tick(&mut self) -> std::result::Result<(), OverBudget> {
        self.nodes += 1;
        match self.budget {
            Some(b) if self.nodes > b => Err(OverBudget),
            _ => Ok(()),
        }
    }

    /// Largest size, deciding ranks in increasing order, including first.
    fn value(&mut self, i: usize, cur: u64, count: usize) -> std::result::Result<(), OverBudget> {
        self.tick()?;
        if count > self.best {
            self.best = count;
        }
        let left = self.inst.len() - i;
        if left == 0 || count + left <= self.best {
            return Ok(());
        }
        let undecided = low_bits(self.inst.len()) & !low_bits(i);
        if count + left - self.inst.forced_exclusions(undecided, cur, self.part_cap) <= self.best {
            return Ok(());
        }
        let shifted_ok = !self.shifted || self.inst.preds[i].iter().all(|&p| cur >> p & 1 == 1);
        if shifted_ok && !self.inst.completes_matching(cur, i) {
            self.value(i + 1, cur | 1 << i, count + 1)?;
        }
        self.value(i + 1, cur, count)
    }

    /// Smallest mask of the given size, deciding ranks in decreasing order,
    /// excluding first. `required[j] > 0` means an included successor needs `j`.
    fn witness(
        &mut self,
        i: usize,
        cur: u64,
        count: usize,
        target: usize,
        required: &mut Vec<u32>,
    ) -> std::result::Result<Option<u64>, OverBudget> {
        self.tick()?;
        if count == target {
            let pending = (0..i).any(|j| required[j] > 0);
            return Ok((!pending).then_some(cur));
        }
        if count + i < target || count + i - self.inst.forced_exclusions(low_bits(i), cur, self.part_cap) < target {
            return Ok(None);
        }
        let j = i - 1;
        if required[j] == 0 {
            if let Some(found) = self.witness(j, cur, count, target, required)? {
                return Ok(Some(found));
            }
        }
        if self.inst.completes_matching(cur, j) {
            return Ok(None);
        }
        if self.shifted {
            for &p in &self.inst.preds[j] {
                required[p] += 1;
            }
        }
        let r = self.witness(j, cur | 1 << j, count + 1, target, required);
        if self.shifted {
            for &p in &self.inst.preds[j] {
                required[p] -= 1;
            }
        }
        r
    }
}

fn exhaustive(inst: &Instance) -> SearchResult {
    let total: u64 = 1 << inst.len();
    let chunk: u64 = 1 << 12;
    let chunks = total.div_ceil(chunk);
    let (count, mask) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best = (0usize, 0u64);
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                let size = mask.count_ones() as usize;
                if size > best.0 && inst.valid(mask) {
                    best = (size, mask);
                }
            }
            best
        })
        .reduce(|| (0, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    SearchResult {
        max: count,
        witness: inst.family(mask),
        nodes: total,
    }
}

/// Exact maximum of `|F|` over `F ⊆ C([n], k)` with `ν(F) <= s`.
pub fn max_family_size(n: usize, k: usize, s: usize, method: Method) -> Result<Outcome<SearchResult>> {
    max_family_size_with(n, k, s, method, &SearchLimits::default())
}

pub fn max_family_size_with(
    n: usize,
    k: usize,
    s: usize,
    method: Method,
    limits: &SearchLimits,
) -> Result<Outcome<SearchResult>> {
    let cap = match method {
        Method::Exhaustive => limits.exhaustive_max.min(40),
        Method::Bnb | Method::ShiftedOnly => limits.bnb_max,
    };
    let inst = Instance::new(n, k, s, cap)?;
    if method == Method::Exhaustive {
        return Ok(Outcome::Solved(exhaustive(&inst)));
    }
    let mut bnb = Bnb {
        inst: &inst,
        shifted: method == Method::ShiftedOnly,
        budget: limits.node_budget,
        nodes: 0,
        best: 0,
        part_cap: s + 1,
    };
    if bnb.value(0, 0, 0).is_err() {
        return Ok(Outcome::Unknown { nodes: bnb.nodes });
    }
    let target = bnb.best;
    let mut required = vec![0u32; inst.len()];
    match bnb.witness(inst.len(), 0, 0, target, &mut required) {
        Ok(Some(mask)) => Ok(Outcome::Solved(SearchResult {
            max: target,
            witness: inst.family(mask),
            nodes: bnb.nodes,
        })),
        Ok(None) => unreachable!("the value search found a family of this size"),
        Err(OverBudget) => Ok(Outcome::Unknown { nodes: bnb.nodes }),
    }
}

/// `max |F|` against `max(|A|, |B|)`, as an exact equality report.
pub fn verify_conjecture(n: usize, k: usize, s: usize, method: Method) -> Result<Outcome<AuditReport>> {
    verify_conjecture_with(n, k, s, method, &SearchLimits::default())
}

pub fn verify_conjecture_with(
    n: usize,
    k: usize,
    s: usize,
    method: Method,
    limits: &SearchLimits,
) -> Result<Outcome<AuditReport>> {
    let (a, b) = extremal_sizes(n as u64, k as u64, s as u64)?;
    let best = a.max(b);
    Ok(max_family_size_with(n, k, s, method, limits)?.map(|res| {
        let witness = res.witness.iter().map(ToString::to_string).collect::<Vec<_>>().join(";");
        AuditReport::compare(
            "conjecture",
            ReportParams::ksn(k as u64, s as u64, n as u64),
            ExactScalar::from_integer(BigInt::from(res.max)),
            Cmp::Eq,
            ExactScalar::from_integer(best),
        )
        .witness_on_failure(|| witness)
    }))
}

/// The colex-least `(k-1)`-subset `G0` of `[(s+1)k - 1]` outside the trace
/// such that `G0 ∪ {min B}` is a member for every member `B` avoiding `G0`.
pub fn find_g0(fam: &Family, k: usize, s: usize) -> Result<Option<KSet>> {
    if k == 0 || s == 0 {
        return Err(Error::InvalidParams("need k >= 1 and s >= 1".into()));
    }
    let prefix = prefix_len(k, s);
    let trace = trace_of(fam, k, s)?.family;
    Ok(enumerate_ksets(prefix, k - 1).find(|g0| has_special_set_property(fam, &trace, g0)))
}
