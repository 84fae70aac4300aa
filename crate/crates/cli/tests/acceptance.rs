//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every command runs twice, with `--jobs 1` and `--jobs 8`; criterion 11
//! compares the two report files byte for byte.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use emc_core::audit::AuditReport;
use emc_core::report::from_json;
use emc_core::ExactScalar;

struct Suite {
    dir: tempfile::TempDir,
    runs: usize,
    mismatched: Vec<String>,
}

/// Reports of one command and the wall time of its `--jobs 1` run.
struct Run {
    reports: Vec<AuditReport>,
    exit: Option<i32>,
    elapsed: Duration,
}

impl Suite {
    fn run(&mut self, args: &[&str]) -> Run {
        let mut texts = Vec::new();
        let mut first = None;
        for jobs in ["1", "8"] {
            self.runs += 1;
            let path: PathBuf = self.dir.path().join(format!("r{}.json", self.runs));
            let start = Instant::now();
            let out = Command::new(env!("CARGO_BIN_EXE_emc"))
                .args(args)
                .args(["--jobs", jobs, "--out", path.to_str().unwrap()])
                .output()
                .expect("binary runs");
            let elapsed = start.elapsed();
            let text = fs::read_to_string(&path).unwrap_or_default();
            if first.is_none() {
                first = Some((out.status.code(), elapsed));
            }
            texts.push(text);
        }
        if texts[0] != texts[1] {
            self.mismatched.push(args.join(" "));
        }
        let (exit, elapsed) = first.unwrap();
        Run {
            reports: from_json(&texts[0]).unwrap_or_default(),
            exit,
            elapsed,
        }
    }
}

type Check = fn(&mut Suite) -> Result<String, String>;

fn int(v: u64) -> ExactScalar {
    ExactScalar::from_integer(v.into())
}

fn all_ok(r: &Run) -> Result<(), String> {
    if r.exit != Some(0) {
        return Err(format!("exit code {:?}", r.exit));
    }
    if r.reports.is_empty() {
        return Err("no reports".into());
    }
    match r.reports.iter().find(|x| !x.pass) {
        Some(bad) => Err(bad.summary_line()),
        None => Ok(()),
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.1?}, limit {limit:?}"))
    }
}

fn count(r: &Run, prefix: &str) -> usize {
    r.reports.iter().filter(|x| x.claim_id.starts_with(prefix)).count()
}

fn conjecture(suite: &mut Suite, n: &str, k: &str, s: &str, method: Option<&str>, expect: u64) -> Result<Duration, String> {
    let mut args = vec!["verify", "--n", n, "--k", k, "--s", s];
    if let Some(m) = method {
        args.extend(["--method", m]);
    }
    let r = suite.run(&args);
    all_ok(&r)?;
    if r.reports[0].lhs != int(expect) {
        return Err(format!("max at ({n},{k},{s}) is {}, expected {expect}", r.reports[0].lhs));
    }
    Ok(r.elapsed)
}

fn c1(suite: &mut Suite) -> Result<String, String> {
    let t = conjecture(suite, "6", "2", "2", Some("exhaustive"), 10)?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("max_family_size(6,2,2) = 10 in {t:.1?}"))
}

fn c2(suite: &mut Suite) -> Result<String, String> {
    let t = conjecture(suite, "5", "2", "1", None, 4)? + conjecture(suite, "7", "2", "2", None, 11)?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("4 and 11, equal to max(|A|,|B|), in {t:.1?}"))
}

fn c3(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["identities", "--k", "2..3", "--s", "1..4"]);
    all_ok(&r)?;
    // 2 values of k, 4 of s, 5 of n, two families.
    if count(&r, "nu.") != 80 {
        return Err(format!("{} matching-number reports, expected 80", count(&r, "nu.")));
    }
    within(r.elapsed, Duration::from_secs(30))?;
    Ok(format!("nu(A) = nu(B) = s at 40 points in {:.1?}", r.elapsed))
}

fn c4(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["identities", "--k", "2..3", "--s", "2..4"]);
    all_ok(&r)?;
    // The weights need s >= k, which leaves (2,2),(2,3),(2,4),(3,3),(3,4).
    let weights = count(&r, "identity.weight.");
    if weights != 5 * 5 * 2 {
        return Err(format!("{weights} weight identities, expected 50"));
    }
    let hand = r
        .reports
        .iter()
        .find(|x| x.claim_id == "identity.wa" && x.params.k == Some(2) && x.params.s == Some(3))
        .ok_or("no wA report at k=2, s=3")?;
    if hand.lhs != int(21) || hand.rhs != int(21) {
        return Err(format!("3·wA = {} at k=2, s=3", hand.lhs));
    }
    Ok(format!("{weights} weight identities and {} wA sums exact", count(&r, "identity.wa")))
}

fn c5(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["audit", "--claim", "3", "--k", "3..5"]);
    all_ok(&r)?;
    let main = r.reports.iter().filter(|x| x.claim_id == "claim3").count();
    let expect: u64 = (3..=5).map(|k: u64| k * (k + 1) / 2).sum();
    if main as u64 != expect {
        return Err(format!("{main} (c,d) pairs, expected {expect}"));
    }
    within(r.elapsed, Duration::from_secs(120))?;
    Ok(format!("{main} count bounds for k in 3..5 in {:.1?}", r.elapsed))
}

fn c6(suite: &mut Suite) -> Result<String, String> {
    let mut total = 0;
    for k in [5u64, 6] {
        let base = 101 * k * k * k;
        for s in [base + 1, base + 1000] {
            let (lo, hi) = ((s + 1) * k, emc_core::weights::Params::window_max_n(k, s));
            for n in [lo, hi] {
                let r = suite.run(&["audit", "--k", &k.to_string(), "--s", &s.to_string(), "--n", &n.to_string()]);
                all_ok(&r).map_err(|e| format!("(k={k}, s={s}, n={n}): {e}"))?;
                within(r.elapsed, Duration::from_secs(120))?;
                if k == 5 && count(&r, "lemma.claim7_count") == 0 {
                    return Err("lemma.claim7_count missing at k=5".into());
                }
                total += r.reports.len();
            }
        }
    }
    Ok(format!("{total} exact comparisons over 8 grid points"))
}

fn c7(suite: &mut Suite) -> Result<String, String> {
    let start = Instant::now();
    let r = suite.run(&["transversal", "--k", "3..5"]);
    all_ok(&r)?;
    for k in 3..=5u64 {
        let has = |id: &str| r.reports.iter().any(|x| x.claim_id == id && x.params.k == Some(k));
        let mut needed = vec!["transversal.full_count", "badpair.per_t_min", "badpair.per_t_max", "badpair.per_mask"];
        if k <= 4 {
            needed.extend(["cyclic.count", "cyclic.internal_disjoint", "cyclic.cross_disjoint"]);
        }
        if let Some(missing) = needed.iter().find(|id| !has(id)) {
            return Err(format!("{missing} missing at k={k}"));
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{} transversal reports in {:.1?}", r.reports.len(), r.elapsed))
}

fn c8(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["transversal", "--k", "2..10", "--check", "product"]);
    all_ok(&r)?;
    if count(&r, "claim8.all_profiles") != 9 {
        return Err("expected one composition scan per k in 2..10".into());
    }
    within(r.elapsed, Duration::from_secs(10))?;
    Ok(format!("every composition for k in 2..10 in {:.1?}", r.elapsed))
}

fn c9(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["shift", "--trials", "1000", "--seed", "1"]);
    all_ok(&r)?;
    let fams = r.reports.iter().find(|x| x.claim_id == "shift.families").ok_or("no family count")?;
    if fams.lhs != int(1000) {
        return Err(format!("{} families", fams.lhs));
    }
    within(r.elapsed, Duration::from_secs(120))?;
    Ok(format!("1000 families, no violations, in {:.1?}", r.elapsed))
}

fn c10(suite: &mut Suite) -> Result<String, String> {
    let r = suite.run(&["crossover"]);
    all_ok(&r)?;
    let expect: usize = (2..=6).map(|k| 40 - k).sum();
    if r.reports.len() != expect {
        return Err(format!("{} points, expected {expect}", r.reports.len()));
    }
    within(r.elapsed, Duration::from_secs(5))?;
    Ok(format!("{expect} points in {:.1?}", r.elapsed))
}

fn main() {
    let mut suite = Suite {
        dir: tempfile::tempdir().expect("temp dir"),
        runs: 0,
        mismatched: Vec::new(),
    };
    let criteria: [(&str, Check); 10] = [
        ("1 exhaustive search, clique regime", c1),
        ("2 search, star-like regime", c2),
        ("3 matching numbers of the candidates", c3),
        ("4 weight identities", c4),
        ("5 candidate count bounds", c5),
        ("6 weight audits in the window", c6),
        ("7 transversal counts and bad pairs", c7),
        ("8 product inequality", c8),
        ("9 shifting suite", c9),
        ("10 crossover", c10),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check(&mut suite) {
            Ok(note) => println!("criterion {name}: PASS ({note})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if suite.mismatched.is_empty() {
        println!("criterion 11 determinism: PASS ({} runs, --jobs 1 and 8 byte-identical)", suite.runs);
    } else {
        failed += 1;
        println!("criterion 11 determinism: FAIL (differs: {})", suite.mismatched.join("; "));
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
