//! Families of subsets over a common ground set, plus the shared text format.
//!
//! Text format: the first non-comment line is `n k` (`k` may be `*` for a mixed
//! family); each further line lists one member as strictly increasing
//! comma-separated integers. Blank lines and `#` comments are ignored. The
//! empty set is written `{}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kset::{enumerate_ksets, KSet, DEFAULT_GROUND_CAP};

/// A finite collection of distinct sets over `[ground_n]`, kept sorted by
/// (size, colex).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Family {
    ground_n: usize,
    uniformity: Option<usize>,
    members: Vec<KSet>,
}

impl Family {
    /// Builds a family, dropping duplicate members.
    pub fn new<I>(ground_n: usize, uniformity: Option<usize>, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = KSet>,
    {
        Self::with_cap(ground_n, uniformity, members, DEFAULT_GROUND_CAP)
    }

    pub fn with_cap<I>(
        ground_n: usize,
        uniformity: Option<usize>,
        members: I,
        cap: usize,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = KSet>,
    {
        if ground_n > cap {
            return Err(Error::GroundTooLarge { n: ground_n, cap });
        }
        let mut members: Vec<KSet> = members.into_iter().collect();
        for m in &members {
            if let Some(max) = m.max_element() {
                if max > ground_n {
                    return Err(Error::ElementOutOfRange {
                        element: max,
                        n: ground_n,
                    });
                }
            }
            if let Some(k) = uniformity {
                if m.len() != k {
                    return Err(Error::NotUniform {
                        expected: k,
                        found: m.len(),
                    });
                }
            }
        }
        members.sort();
        members.dedup();
        Ok(Self {
            ground_n,
            uniformity,
            members,
        })
    }

    /// The family with no members.
    pub fn empty(ground_n: usize, uniformity: Option<usize>) -> Self {
        Self {
            ground_n,
            uniformity,
            members: Vec::new(),
        }
    }

    /// All `k`-subsets of `[n]`.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        Self::new(n, Some(k), enumerate_ksets(n, k))
    }

    pub fn ground_n(&self) -> usize {
        self.ground_n
    }

    pub fn uniformity(&self) -> Option<usize> {
        self.uniformity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KSet> {
        self.members.iter()
    }

    pub fn contains(&self, set: &KSet) -> bool {
        self.members.binary_search(set).is_ok()
    }

    /// Position of `set` in the canonical member order.
    pub fn rank_of(&self, set: &KSet) -> Option<usize> {
        self.members.binary_search(set).ok()
    }

    /// Whether every member of `self` is a member of `other`.
    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }

    /// Same members, reinterpreted over a different ground set or uniformity.
    pub fn relabel(&self, ground_n: usize, uniformity: Option<usize>) -> Result<Self> {
        Self::new(ground_n, uniformity, self.members.iter().cloned())
    }

    /// Keeps the members selected by `keep`.
    pub fn filtered<P: FnMut(&KSet) -> bool>(&self, mut keep: P) -> Self {
        Self {
            ground_n: self.ground_n,
            uniformity: self.uniformity,
            members: self.members.iter().filter(|m| keep(m)).cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a KSet;
    type IntoIter = std::slice::Iter<'a, KSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.uniformity {
            Some(k) => writeln!(f, "{} {}", self.ground_n, k)?,
            None => writeln!(f, "{} *", self.ground_n)?,
        }
        for m in &self.members {
            if m.is_empty() {
                writeln!(f, "{{}}")?;
            } else {
                let line: Vec<String> = m.elements().map(|e| e.to_string()).collect();
                writeln!(f, "{}", line.join(","))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut header: Option<(usize, Option<usize>)> = None;
        let mut members = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if header.is_none() {
                let mut parts = line.split_whitespace();
                let n = parts
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(format!("expected `n k` header, got `{line}`")))?;
                let k = match parts.next() {
                    Some("*") => None,
                    Some(t) => Some(
                        t.parse::<usize>()
                            .map_err(|_| parse_err(format!("bad uniformity `{t}`")))?,
                    ),
                    None => return Err(parse_err("header is missing k".into())),
                };
                if parts.next().is_some() {
                    return Err(parse_err("trailing tokens in header".into()));
                }
                header = Some((n, k));
                continue;
            }
            if line == "{}" {
                members.push(KSet::empty());
                continue;
            }
            let mut prev = 0usize;
            let mut elements = Vec::new();
            for tok in line.split(',') {
                let tok = tok.trim();
                let e: usize = tok
                    .parse()
                    .map_err(|_| parse_err(format!("bad element `{tok}`")))?;
                if e == 0 || e <= prev {
                    return Err(parse_err(format!(
                        "elements must be positive and strictly increasing: `{line}`"
                    )));
                }
                prev = e;
                elements.push(e);
            }
            members.push(KSet::from_elements(elements)?);
        }
        let (n, k) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        Family::new(n, k, members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_sorted_and_deduplicated() {
        let fam = Family::new(
            5,
            Some(2),
            [KSet::of(&[2, 3]), KSet::of(&[1, 2]), KSet::of(&[2, 3])],
        )
        .unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.members()[0], KSet::of(&[1, 2]));
        assert!(fam.contains(&KSet::of(&[2, 3])));
        assert_eq!(fam.rank_of(&KSet::of(&[2, 3])), Some(1));
    }

    #[test]
    fn rejects_bad_members() {
        assert!(matches!(
            Family::new(3, Some(2), [KSet::of(&[1, 4])]),
            Err(Error::ElementOutOfRange { element: 4, n: 3 })
        ));
        assert!(matches!(
            Family::new(3, Some(2), [KSet::of(&[1])]),
            Err(Error::NotUniform { .. })
        ));
        assert!(matches!(
            Family::new(5000, Some(2), []),
            Err(Error::GroundTooLarge { .. })
        ));
        assert!(Family::with_cap(5000, Some(2), [], 8192).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let text = "# sample\n6 *\n\n1,2\n3 , 5 # trailing\n{}\n";
        let fam: Family = text.parse().unwrap();
        assert_eq!(fam.uniformity(), None);
        assert_eq!(fam.len(), 3);
        let back: Family = fam.to_text().parse().unwrap();
        assert_eq!(back, fam);
        assert_eq!(fam.to_text(), "6 *\n{}\n1,2\n3,5\n");
    }

    #[test]
    fn text_errors() {
        assert!(matches!("".parse::<Family>(), Err(Error::Parse { .. })));
        assert!(matches!("4 2\n2,1\n".parse::<Family>(), Err(Error::Parse { line: 2, .. })));
        assert!(matches!("4 2\n1,x\n".parse::<Family>(), Err(Error::Parse { .. })));
        assert!(matches!("4\n".parse::<Family>(), Err(Error::Parse { .. })));
        assert!(matches!("4 2\n1,5\n".parse::<Family>(), Err(Error::ElementOutOfRange { .. })));
    }

    #[test]
    fn complete_family_sizes() {
        assert_eq!(Family::complete(6, 3).unwrap().len(), 20);
        assert_eq!(Family::complete(4, 0).unwrap().len(), 1);
    }
}
