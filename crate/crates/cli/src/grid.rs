//! Integer lists and ranges given on the command line.

use std::str::FromStr;

/// `7`, `5,6`, or an inclusive range `2..6`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntList(pub Vec<u64>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if let Some((a, b)) = part.split_once("..") {
                let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
                let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| format!("not an integer: {part:?}"))?);
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(IntList(out))
    }
}

/// `--n`: explicit values, or `auto` for a per-command default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NChoice {
    Auto,
    Values(Vec<u64>),
}

impl FromStr for NChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(NChoice::Auto)
        } else {
            s.parse::<IntList>().map(|l| NChoice::Values(l.0))
        }
    }
}

impl NChoice {
    pub fn expand(&self, auto: impl FnOnce() -> Vec<u64>) -> Vec<u64> {
        match self {
            NChoice::Auto => auto(),
            NChoice::Values(v) => v.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!("7".parse::<IntList>().unwrap().0, vec![7]);
        assert_eq!("5,6".parse::<IntList>().unwrap().0, vec![5, 6]);
        assert_eq!("2..4,9".parse::<IntList>().unwrap().0, vec![2, 3, 4, 9]);
        assert!("4..2".parse::<IntList>().is_err());
        assert!("x".parse::<IntList>().is_err());
        assert_eq!("auto".parse::<NChoice>().unwrap(), NChoice::Auto);
        assert_eq!("3..4".parse::<NChoice>().unwrap(), NChoice::Values(vec![3, 4]));
    }
}
