//! The two extremal candidates, their sizes and crossover, and the
//! trace/saturation bookkeeping that reduces a family to its prefix.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::kset::{enumerate_ksets, KSet};
use crate::scalar::binom;

/// Length of the prefix `[(s+1)k - 1]` carrying the clique candidate.
pub fn prefix_len(k: usize, s: usize) -> usize {
    (s + 1) * k - 1
}

/// `n - (s+1)k + 1`: number of ground elements outside the prefix.
pub fn n_bar(n: usize, k: usize, s: usize) -> Result<usize> {
    let prefix = prefix_len(k, s);
    n.checked_sub(prefix).ok_or_else(|| {
        Error::InvalidParams(format!("n={n} is smaller than the prefix length {prefix}"))
    })
}

/// The clique candidate: every `k`-subset of `[(s+1)k - 1]`, over ground set `[n]`.
pub fn build_a(n: usize, k: usize, s: usize) -> Result<Family> {
    if k == 0 || s == 0 {
        return Err(Error::InvalidParams(format!("need k >= 1 and s >= 1, got k={k}, s={s}")));
    }
    let prefix = prefix_len(k, s);
    if n < prefix {
        return Err(Error::InvalidParams(format!("need n >= (s+1)k - 1 = {prefix}, got n={n}")));
    }
    Family::new(n, Some(k), enumerate_ksets(prefix, k))
}

/// The star-like candidate: every `k`-subset of `[n]` meeting `[s]`.
pub fn build_b(n: usize, k: usize, s: usize) -> Result<Family> {
    if n < k || s > n {
        return Err(Error::InvalidParams(format!("need k <= n and s <= n, got n={n}, k={k}, s={s}")));
    }
    Family::new(
        n,
        Some(k),
        enumerate_ksets(n, k).filter(|f| f.min_element().is_some_and(|m| m <= s)),
    )
}

/// Exact sizes of the two candidates.
pub fn extremal_sizes(n: u64, k: u64, s: u64) -> Result<(BigInt, BigInt)> {
    if s > n || k == 0 {
        return Err(Error::InvalidParams(format!("need 1 <= k and s <= n, got n={n}, k={k}, s={s}")));
    }
    let size_a = binom((s + 1) * k - 1, k as i64);
    let size_b = binom(n, k as i64) - binom(n - s, k as i64);
    Ok((size_a, size_b))
}

/// Smallest `n >= (s+1)k` at which the star-like candidate is strictly larger.
pub fn crossover_n(k: u64, s: u64) -> Result<u64> {
    if k < 2 || s < k {
        return Err(Error::InvalidParams(format!("crossover needs s >= k >= 2, got k={k}, s={s}")));
    }
    let size_a = binom((s + 1) * k - 1, k as i64);
    let mut n = (s + 1) * k;
    loop {
        let size_b = binom(n, k as i64) - binom(n - s, k as i64);
        if size_b > size_a {
            return Ok(n);
        }
        n += 1;
    }
}

/// The trace of a family on the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub family: Family,
    /// Some member lies entirely outside the prefix.
    pub has_empty: bool,
}

/// `{F ∩ [(s+1)k - 1] : F ∈ fam}`, duplicates removed. The result keeps the
/// ground set of `fam` and is uniform only if every intersection has one size.
pub fn trace_of(fam: &Family, k: usize, s: usize) -> Result<Trace> {
    let prefix = prefix_len(k, s);
    if fam.ground_n() < prefix {
        return Err(Error::InvalidParams(format!(
            "ground set {} is smaller than the prefix {prefix}",
            fam.ground_n()
        )));
    }
    let members: BTreeSet<KSet> = fam.iter().map(|f| f.truncated(prefix)).collect();
    let has_empty = members.contains(&KSet::empty());
    let mut sizes = members.iter().map(KSet::len);
    let uniformity = match sizes.next() {
        Some(first) if sizes.all(|d| d == first) => Some(first),
        Some(_) => None,
        None => fam.uniformity(),
    };
    Ok(Trace {
        family: Family::new(fam.ground_n(), uniformity, members)?,
        has_empty,
    })
}

/// All `k`-subsets of `[n]` containing at least one member of `tr`.
pub fn generate_from_trace(tr: &Family, n: usize, k: usize) -> Result<Family> {
    let mut out = BTreeSet::new();
    for t in tr {
        if t.max_element().is_some_and(|m| m > n) {
            return Err(Error::ElementOutOfRange {
                element: t.max_element().unwrap_or(0),
                n,
            });
        }
        if t.len() > k {
            continue;
        }
        let outside: Vec<usize> = (1..=n).filter(|&e| !t.contains(e)).collect();
        for ext in enumerate_ksets(outside.len(), k - t.len()) {
            let mut f = t.clone();
            for i in ext.elements() {
                f.insert(outside[i - 1]);
            }
            out.insert(f);
        }
    }
    Family::new(n, Some(k), out)
}

/// The saturation of `fam`: every `k`-set containing some trace member.
pub fn saturate(fam: &Family, k: usize, s: usize) -> Result<Family> {
    let tr = trace_of(fam, k, s)?;
    generate_from_trace(&tr.family, fam.ground_n(), k)
}

pub fn is_saturated(fam: &Family, k: usize, s: usize) -> Result<bool> {
    Ok(saturate(fam, k, s)?.len() == fam.len())
}

/// `Σ_d #{T ∈ tr : |T| = d} · C(n̄, k - d)` over the complete trace.
///
/// The count equals `|generate_from_trace(tr)|` exactly when `tr` is closed
/// under adding prefix elements (up to the sizes that still admit an
/// extension outside the prefix), which is what the trace of a saturated
/// family looks like. Any violation is reported with a witness.
pub fn size_via_trace(tr: &Family, n: usize, k: usize, s: usize) -> Result<BigInt> {
    let prefix = prefix_len(k, s);
    let nb = n_bar(n, k, s)?;
    let mut total = BigInt::zero();
    for t in tr {
        if t.len() > k || t.max_element().is_some_and(|m| m > prefix) {
            return Err(Error::InvalidParams(format!(
                "trace member {t} is not a set of size <= {k} inside [{prefix}]"
            )));
        }
        if t.is_empty() && nb < k {
            return Err(Error::InvalidParams(format!(
                "empty trace member needs n̄ >= k, got n̄={nb}, k={k}"
            )));
        }
        total += binom(nb as u64, (k - t.len()) as i64);
        if t.len() < k && k - t.len() - 1 <= nb {
            for x in (1..=prefix).filter(|&x| !t.contains(x)) {
                let mut up = t.clone();
                up.insert(x);
                if !tr.contains(&up) {
                    return Err(Error::TraceNotSaturated {
                        member: t.to_string(),
                        missing: up.to_string(),
                    });
                }
            }
        }
    }
    Ok(total)
}
