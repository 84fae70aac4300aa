//! Audit reports and their JSON and CSV renderings.
//!
//! Fractions are always written as `p/q` strings so that no precision is lost.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{approx, parse_fraction, render_fraction};
use crate::ExactScalar;

/// The comparison a report asserts between its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
}

impl Cmp {
    pub fn holds(self, lhs: &ExactScalar, rhs: &ExactScalar) -> bool {
        match self {
            Cmp::Le => lhs <= rhs,
            Cmp::Lt => lhs < rhs,
            Cmp::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Eq => "==",
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u64>,
}

impl ReportParams {
    pub fn k(k: u64) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn ks(k: u64, s: u64) -> Self {
        Self {
            s: Some(s),
            ..Self::k(k)
        }
    }

    pub fn ksn(k: u64, s: u64, n: u64) -> Self {
        Self {
            n: Some(n),
            ..Self::ks(k, s)
        }
    }

    pub fn with_g(self, g: u64) -> Self {
        Self { g: Some(g), ..self }
    }

    pub fn with_cd(self, c: u64, d: u64) -> Self {
        Self {
            c: Some(c),
            d: Some(d),
            ..self
        }
    }
}

impl fmt::Display for ReportParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            ("k", self.k),
            ("s", self.s),
            ("n", self.n),
            ("g", self.g),
            ("c", self.c),
            ("d", self.d),
        ]
        .iter()
        .filter_map(|(name, v)| v.map(|v| format!("{name}={v}")))
        .collect();
        f.write_str(&parts.join(","))
    }
}

/// One exact comparison `lhs cmp rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub claim_id: String,
    pub params: ReportParams,
    pub lhs: ExactScalar,
    pub rhs: ExactScalar,
    pub cmp: Cmp,
    pub pass: bool,
    pub witness: Option<String>,
}

impl AuditReport {
    /// Builds a report whose verdict is computed from the two sides.
    pub fn compare(claim_id: impl Into<String>, params: ReportParams, lhs: ExactScalar, cmp: Cmp, rhs: ExactScalar) -> Self {
        let pass = cmp.holds(&lhs, &rhs);
        Self {
            claim_id: claim_id.into(),
            params,
            lhs,
            rhs,
            cmp,
            pass,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    /// Attaches the witness only when the comparison failed.
    pub fn witness_on_failure(self, witness: impl FnOnce() -> String) -> Self {
        if self.pass {
            self
        } else {
            let w = witness();
            self.with_witness(w)
        }
    }

    /// Whether `pass` agrees with the recorded sides and comparison.
    pub fn recheck(&self) -> bool {
        self.pass == self.cmp.holds(&self.lhs, &self.rhs)
    }

    /// Ordering used for every merged report list.
    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.claim_id
            .cmp(&other.claim_id)
            .then(self.params.cmp(&other.params))
    }

    /// One line with approximate decimals, for terminal summaries.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} [{}] {} {} {} ({:.6e} {} {:.6e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.claim_id,
            self.params,
            render_fraction(&self.lhs),
            self.cmp,
            render_fraction(&self.rhs),
            approx(&self.lhs),
            self.cmp,
            approx(&self.rhs),
        )
    }
}

/// Sorts by `(claim_id, params)`; ties keep their input order.
pub fn sort_reports(reports: &mut [AuditReport]) {
    reports.sort_by(AuditReport::sort_key_cmp);
}

pub fn all_pass(reports: &[AuditReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[derive(Serialize, Deserialize)]
struct Wire {
    claim_id: String,
    params: ReportParams,
    lhs: String,
    rhs: String,
    cmp: Cmp,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    witness: Option<String>,
}

impl From<&AuditReport> for Wire {
    fn from(r: &AuditReport) -> Self {
        Wire {
            claim_id: r.claim_id.clone(),
            params: r.params,
            lhs: render_fraction(&r.lhs),
            rhs: render_fraction(&r.rhs),
            cmp: r.cmp,
            pass: r.pass,
            witness: r.witness.clone(),
        }
    }
}

impl TryFrom<Wire> for AuditReport {
    type Error = Error;

    fn try_from(w: Wire) -> Result<Self> {
        let frac = |t: &str| {
            parse_fraction(t).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("bad fraction {t:?}"),
            })
        };
        Ok(AuditReport {
            lhs: frac(&w.lhs)?,
            rhs: frac(&w.rhs)?,
            claim_id: w.claim_id,
            params: w.params,
            cmp: w.cmp,
            pass: w.pass,
            witness: w.witness,
        })
    }
}

impl Serialize for AuditReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Wire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AuditReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(deserializer)?;
        AuditReport::try_from(wire).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Pretty JSON array with a trailing newline.
pub fn to_json(reports: &[AuditReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Vec<AuditReport>> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

const CSV_HEADER: [&str; 12] = ["claim_id", "k", "s", "n", "g", "c", "d", "lhs", "rhs", "cmp", "pass", "witness"];

/// CSV with a header row, written even for an empty list.
pub fn to_csv(reports: &[AuditReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in reports {
        let p = &r.params;
        w.write_record([
            r.claim_id.clone(),
            opt(p.k),
            opt(p.s),
            opt(p.n),
            opt(p.g),
            opt(p.c),
            opt(p.d),
            render_fraction(&r.lhs),
            render_fraction(&r.rhs),
            r.cmp.symbol().to_string(),
            r.pass.to_string(),
            r.witness.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn render(reports: &[AuditReport], format: Format) -> String {
    match format {
        Format::Json => to_json(reports),
        Format::Csv => to_csv(reports),
    }
}

pub fn write_reports<W: Write>(mut out: W, reports: &[AuditReport], format: Format) -> std::io::Result<()> {
    out.write_all(render(reports, format).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i64, d: i64) -> ExactScalar {
        ExactScalar::new(BigInt::from(p), BigInt::from(d))
    }

    fn sample() -> AuditReport {
        AuditReport::compare("full_threshold", ReportParams::k(5), q(35, 4), Cmp::Lt, q(256, 1))
    }

    #[test]
    fn fractions_stay_exact() {
        let json = to_json(&[sample()]);
        assert!(json.contains("\"35/4\""));
        assert!(!json.contains("8.75"));
        assert!(json.contains("\"cmp\": \"<\""));
        assert!(json.contains("\"pass\": true"));
        assert!(json.ends_with('\n'));
        assert!(!json.contains("witness"));
    }

    #[test]
    fn empty_lists() {
        assert_eq!(to_json(&[]), "[]\n");
        assert_eq!(to_csv(&[]), "claim_id,k,s,n,g,c,d,lhs,rhs,cmp,pass,witness\n");
    }

    #[test]
    fn json_round_trip() {
        let r = AuditReport::compare("x", ReportParams::ksn(5, 12626, 63135).with_cd(1, 2), q(3, 7), Cmp::Le, q(1, 2))
            .with_witness("c=1,d=2");
        let back = from_json(&to_json(&[r.clone(), sample()])).unwrap();
        assert_eq!(back, vec![r, sample()]);
        assert!(back.iter().all(AuditReport::recheck));
    }

    #[test]
    fn csv_rows() {
        let csv = to_csv(&[sample()]);
        assert_eq!(csv.lines().nth(1).unwrap(), "full_threshold,5,,,,,,35/4,256/1,<,true,");
    }

    #[test]
    fn verdicts_follow_comparison() {
        assert!(!AuditReport::compare("x", ReportParams::default(), q(1, 1), Cmp::Lt, q(1, 1)).pass);
        assert!(AuditReport::compare("x", ReportParams::default(), q(1, 1), Cmp::Le, q(1, 1)).pass);
        assert!(AuditReport::compare("x", ReportParams::default(), q(2, 2), Cmp::Eq, q(1, 1)).pass);
        let mut tampered = sample();
        tampered.pass = false;
        assert!(!tampered.recheck());
    }

    #[test]
    fn sorting_is_by_claim_then_params() {
        let a = AuditReport::compare("b", ReportParams::k(5), q(1, 1), Cmp::Le, q(1, 1));
        let b = AuditReport::compare("a", ReportParams::k(6), q(1, 1), Cmp::Le, q(1, 1));
        let c = AuditReport::compare("a", ReportParams::k(5), q(1, 1), Cmp::Le, q(1, 1));
        let mut v = vec![a.clone(), b.clone(), c.clone()];
        sort_reports(&mut v);
        assert_eq!(v, vec![c, b, a]);
    }
}
