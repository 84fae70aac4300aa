mod grid;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use emc_core::audit::{self, AuditReport, Cmp, ReportParams, TransversalCheck};
use emc_core::constructions::{build_a, build_b, crossover_n, extremal_sizes, size_via_trace, trace_of};
use emc_core::matching::{matching_number, Outcome};
use emc_core::report::{self, Format};
use emc_core::search::{self, Method, SearchLimits};
use emc_core::shifting::{decrement_criterion_mismatches, random_suite, shift_to_fixpoint};
use emc_core::weights::{wa_of_m, LocalFrame, Params, WeightFrame};
use emc_core::{binom, ExactScalar, Family};

use grid::{IntList, NChoice};

#[derive(Parser)]
#[command(name = "emc", version, about = "Exact audits and searches for the Erdős matching problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact audits of the weight bounds inside the theorem window.
    Audit(AuditArgs),
    /// Exact maximum family size against the larger of the two candidates.
    Verify(VerifyArgs),
    /// Smallest n at which the star-like candidate overtakes the clique.
    Crossover(CrossoverArgs),
    /// Transversal counts, cyclic collections, bad pairs and Q-families.
    Transversal(TransversalArgs),
    /// Weight identities, trace sizes and matching numbers of the candidates.
    Identities(IdentitiesArgs),
    /// Shift a family to a fixpoint, or run the random shifting suite.
    Shift(ShiftArgs),
    /// Search a family for the special set G0.
    #[command(name = "find-g0")]
    FindG0(FindG0Args),
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the report to this file; a summary goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Worker threads for grid points (at least 1).
    #[arg(long, default_value_t = 1, value_parser = parse_jobs)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("--jobs needs a positive integer, got {s:?}")),
        Ok(j) => Ok(j),
    }
}

#[derive(Args)]
struct AuditArgs {
    /// k values (`5`, `5,6`, `5..6`); default 5,6.
    #[arg(long)]
    k: Option<IntList>,
    /// s values; default 101k³+1 and 101k³+1000 for each k.
    #[arg(long)]
    s: Option<IntList>,
    /// n values, or `auto` for both window endpoints (s+1)k and the largest admissible n.
    #[arg(long, default_value = "auto")]
    n: NChoice,
    /// Restrict the W_g envelope to one g (only with --claim 4).
    #[arg(long)]
    g: Option<u64>,
    /// Which audit to run.
    #[arg(long, value_enum, default_value_t = ClaimArg::All)]
    claim: ClaimArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    All,
    #[value(name = "2")]
    Weight,
    #[value(name = "3")]
    Count,
    #[value(name = "4")]
    Envelope,
    Rx,
    Lemmas,
    Product,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: IntList,
    #[arg(long)]
    k: IntList,
    #[arg(long)]
    s: IntList,
    /// Search method; `auto` picks exhaustive when C(n,k) <= 24 and bnb otherwise.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Branch-and-bound node budget; exceeding it reports the point as unknown.
    #[arg(long)]
    node_budget: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Exhaustive,
    Bnb,
    #[value(name = "shifted_only", alias = "shifted-only")]
    ShiftedOnly,
}

#[derive(Args)]
struct CrossoverArgs {
    #[arg(long, default_value = "2..6")]
    k: IntList,
    /// s values; default k+1 through --s-max for each k.
    #[arg(long)]
    s: Option<IntList>,
    #[arg(long, default_value_t = 40)]
    s_max: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TransversalArgs {
    #[arg(long)]
    k: IntList,
    #[arg(long, value_enum, default_value_t = CheckArg::All)]
    check: CheckArg,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Counts,
    Cyclic,
    Badpairs,
    Q,
    Product,
    All,
}

#[derive(Args)]
struct IdentitiesArgs {
    #[arg(long, default_value = "2..3")]
    k: IntList,
    #[arg(long, default_value = "2..4")]
    s: IntList,
    /// n values, or `auto` for (s+1)k through (s+1)k+4.
    #[arg(long, default_value = "auto")]
    n: NChoice,
    /// Candidate family: A, B or both.
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    family: FamilyArg,
    /// Check a family read from this file instead of the candidates.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Both,
}

#[derive(Args)]
struct ShiftArgs {
    /// Family to shift; without it the random shifting suite runs.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random families in the suite.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FindG0Args {
    #[arg(long = "in")]
    input: PathBuf,
    /// Uniformity; defaults to the family's.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    s: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<emc_core::Error> for Failure {
    fn from(e: emc_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(format!("{e:#}"))
    }
}

type Run = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Run {
    let jobs = match &cli.command {
        Command::Audit(a) => a.output.jobs,
        Command::Verify(a) => a.output.jobs,
        Command::Crossover(a) => a.output.jobs,
        Command::Transversal(a) => a.output.jobs,
        Command::Identities(a) => a.output.jobs,
        Command::Shift(a) => a.output.jobs,
        Command::FindG0(_) => 1,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Audit(a) => cmd_audit(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Crossover(a) => cmd_crossover(a),
        Command::Transversal(a) => cmd_transversal(a),
        Command::Identities(a) => cmd_identities(a),
        Command::Shift(a) => cmd_shift(a),
        Command::FindG0(a) => cmd_find_g0(a),
    })
}

/// Runs `f` on every point in parallel and concatenates results in point order.
fn fan_out<P, F>(points: &[P], f: F) -> Result<Vec<AuditReport>, Failure>
where
    P: Sync,
    F: Fn(&P) -> Result<Vec<AuditReport>, Failure> + Sync + Send,
{
    let parts: Vec<Result<Vec<AuditReport>, Failure>> = points.par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn emit(mut reports: Vec<AuditReport>, output: &OutputArgs) -> Run {
    report::sort_reports(&mut reports);
    // n-independent reports repeat across n grid points.
    reports.dedup();
    let format = match output.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let text = report::render(&reports, format);
    match &output.out {
        Some(path) => {
            write_file(path, &text)?;
            for r in &reports {
                println!("{}", r.summary_line());
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            println!("{} reports, {} failed", reports.len(), failed);
        }
        None => print!("{text}"),
    }
    Ok(report::all_pass(&reports))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::from)
}

fn read_family(path: &Path) -> Result<Family, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::from)?;
    Ok(text.parse::<Family>()?)
}

fn int(v: impl Into<emc_core::ExactInt>) -> ExactScalar {
    ExactScalar::from_integer(v.into())
}

fn cmd_audit(a: AuditArgs) -> Run {
    if a.g.is_some() && a.claim != ClaimArg::Envelope {
        return Err(Failure::Usage("--g only applies with --claim 4".into()));
    }
    let ks = a.k.map_or(vec![5, 6], |l| l.0);
    let mut points = Vec::new();
    for &k in &ks {
        let ss = match &a.s {
            Some(l) => l.0.clone(),
            None => vec![101 * k * k * k + 1, 101 * k * k * k + 1000],
        };
        for s in ss {
            let ns = a.n.expand(|| vec![(s + 1) * k, Params::window_max_n(k, s)]);
            for n in ns {
                points.push((k, s, n));
            }
        }
    }
    let reports = match a.claim {
        ClaimArg::Count => {
            let mut ks = ks.clone();
            ks.dedup();
            fan_out(&ks, |&k| Ok(audit::audit_claim3(k)?))?
        }
        ClaimArg::Product => fan_out(&ks, |&k| Ok(audit::audit_product(k)?))?,
        ClaimArg::Lemmas => {
            let mut ks_pairs: Vec<(u64, u64)> = points.iter().map(|&(k, s, _)| (k, s)).collect();
            ks_pairs.dedup();
            fan_out(&ks_pairs, |&(k, s)| Ok(audit::audit_numeric_lemmas(k, s)?))?
        }
        claim => fan_out(&points, |&(k, s, n)| {
            Ok(match claim {
                ClaimArg::Weight => audit::audit_claim2(k, s, n)?,
                ClaimArg::Envelope => audit::audit_claim4(k, s, n, a.g)?,
                ClaimArg::Rx => audit::audit_rx(k, s, n)?,
                _ => audit::audit_all(k, s, n)?,
            })
        })?,
    };
    emit(reports, &a.output)
}

fn cmd_verify(a: VerifyArgs) -> Run {
    let mut points = Vec::new();
    for &k in &a.k.0 {
        for &s in &a.s.0 {
            for &n in &a.n.0 {
                points.push((n, k, s));
            }
        }
    }
    let limits = SearchLimits {
        node_budget: a.node_budget.or(SearchLimits::default().node_budget),
        ..SearchLimits::default()
    };
    let results: Vec<Result<Outcome<AuditReport>, Failure>> = points
        .par_iter()
        .map(|&(n, k, s)| {
            let method = match a.method {
                MethodArg::Exhaustive => Method::Exhaustive,
                MethodArg::Bnb => Method::Bnb,
                MethodArg::ShiftedOnly => Method::ShiftedOnly,
                MethodArg::Auto => {
                    if binom(n, k as i64) <= 24.into() {
                        Method::Exhaustive
                    } else {
                        Method::Bnb
                    }
                }
            };
            Ok(search::verify_conjecture_with(n as usize, k as usize, s as usize, method, &limits)?)
        })
        .collect();
    let mut reports = Vec::new();
    let mut unknown = false;
    for (r, &(n, k, s)) in results.into_iter().zip(&points) {
        match r? {
            Outcome::Solved(rep) => reports.push(rep),
            Outcome::Unknown { nodes } => {
                eprintln!("unknown: node budget exhausted after {nodes} nodes at n={n}, k={k}, s={s}");
                unknown = true;
            }
        }
    }
    Ok(emit(reports, &a.output)? && !unknown)
}

fn cmd_crossover(a: CrossoverArgs) -> Run {
    let mut points = Vec::new();
    for &k in &a.k.0 {
        let ss = match &a.s {
            Some(l) => l.0.clone(),
            None => (k + 1..=a.s_max).collect(),
        };
        points.extend(ss.into_iter().map(|s| (k, s)));
    }
    let reports = fan_out(&points, |&(k, s)| {
        let cross = crossover_n(k, s)?;
        // ceil((s+1)(k+1/2)) = ceil((s+1)(2k+1)/2)
        let bound = ((s + 1) * (2 * k + 1)).div_ceil(2);
        Ok(vec![AuditReport::compare(
            "crossover",
            ReportParams::ks(k, s),
            int(cross),
            Cmp::Le,
            int(bound),
        )])
    })?;
    emit(reports, &a.output)
}

fn cmd_transversal(a: TransversalArgs) -> Run {
    let check = match a.check {
        CheckArg::Counts => TransversalCheck::Counts,
        CheckArg::Cyclic => TransversalCheck::Cyclic,
        CheckArg::Badpairs => TransversalCheck::BadPairs,
        CheckArg::Q => TransversalCheck::Q,
        CheckArg::Product => TransversalCheck::Product,
        CheckArg::All => TransversalCheck::All,
    };
    let reports = fan_out(&a.k.0, |&k| Ok(audit::audit_transversals(k, check, a.seed)?))?;
    emit(reports, &a.output)
}

fn nu_of(fam: &Family, budget: Option<u64>) -> Result<usize, Failure> {
    match matching_number(fam, budget) {
        Outcome::Solved(m) => Ok(m.nu),
        Outcome::Unknown { nodes } => Err(Failure::Runtime(format!(
            "matching number unknown: node budget exhausted after {nodes} nodes"
        ))),
    }
}

/// Weight identity, direct sum and trace size of one family.
fn identity_reports(fam: &Family, k: u64, s: u64, label: &str, at: ReportParams) -> Result<Vec<AuditReport>, Failure> {
    let n = fam.ground_n() as u64;
    let frame = WeightFrame::canonical(Params::new(n, k, s)?)?;
    let check = emc_core::weights::family_weight_identity(fam, &frame)?;
    let mut out = vec![AuditReport::compare(
        format!("identity.weight.{label}"),
        at,
        check.lhs,
        Cmp::Eq,
        check.rhs.clone(),
    )];
    if let Some(direct) = check.direct {
        out.push(AuditReport::compare(
            format!("identity.direct.{label}"),
            at,
            direct,
            Cmp::Eq,
            check.rhs.clone(),
        ));
    }
    let trace = trace_of(fam, k as usize, s as usize)?.family;
    let via_trace = size_via_trace(&trace, n as usize, k as usize, s as usize)?;
    out.push(AuditReport::compare(
        format!("identity.trace_size.{label}"),
        at,
        int(via_trace),
        Cmp::Eq,
        check.rhs,
    ));
    Ok(out)
}

fn cmd_identities(a: IdentitiesArgs) -> Run {
    if let Some(path) = &a.input {
        let fam = read_family(path)?;
        let (Some(&k), Some(&s)) = (a.k.0.first(), a.s.0.first()) else {
            unreachable!("lists are non-empty")
        };
        if a.k.0.len() != 1 || a.s.0.len() != 1 {
            return Err(Failure::Usage("--in needs a single --k and --s".into()));
        }
        let at = ReportParams::ksn(k, s, fam.ground_n() as u64);
        let reports = identity_reports(&fam, k, s, "file", at)?;
        return emit(reports, &a.output);
    }
    let mut points = Vec::new();
    let mut pairs = Vec::new();
    for &k in &a.k.0 {
        for &s in &a.s.0 {
            pairs.push((k, s));
            for n in a.n.expand(|| ((s + 1) * k..=(s + 1) * k + 4).collect()) {
                points.push((k, s, n));
            }
        }
    }
    let families: Vec<&str> = match a.family {
        FamilyArg::A => vec!["A"],
        FamilyArg::B => vec!["B"],
        FamilyArg::Both => vec!["A", "B"],
    };
    let mut reports = fan_out(&points, |&(k, s, n)| {
        let at = ReportParams::ksn(k, s, n);
        let (size_a, size_b) = extremal_sizes(n, k, s)?;
        let mut out = Vec::new();
        for &label in &families {
            let (fam, size) = if label == "A" {
                (build_a(n as usize, k as usize, s as usize)?, size_a.clone())
            } else {
                (build_b(n as usize, k as usize, s as usize)?, size_b.clone())
            };
            out.push(AuditReport::compare(
                format!("size.{label}"),
                at,
                int(fam.len() as u64),
                Cmp::Eq,
                int(size),
            ));
            out.push(AuditReport::compare(
                format!("nu.{label}"),
                at,
                int(nu_of(&fam, a.node_budget)? as u64),
                Cmp::Eq,
                int(s),
            ));
            if s >= k {
                out.extend(identity_reports(&fam, k, s, label, at)?);
            }
        }
        Ok(out)
    })?;
    reports.extend(fan_out(&pairs, |&(k, s)| {
        if s < k {
            return Ok(Vec::new());
        }
        let p = Params::new((s + 1) * k, k, s)?;
        let wa: ExactScalar = wa_of_m(&p, &LocalFrame::canonical(k as usize)?)?;
        Ok(vec![AuditReport::compare(
            "identity.wa",
            ReportParams::ks(k, s),
            int(binom(s, k as i64)) * wa,
            Cmp::Eq,
            int(binom((s + 1) * k - 1, k as i64)),
        )])
    })?);
    emit(reports, &a.output)
}

fn family_line(f: &Family) -> String {
    f.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn cmd_shift(a: ShiftArgs) -> Run {
    if let Some(path) = &a.input {
        let fam = read_family(path)?;
        let text = shift_to_fixpoint(&fam).to_text();
        match &a.output.out {
            Some(out) => write_file(out, &text)?,
            None => print!("{text}"),
        }
        return Ok(true);
    }
    let tally = random_suite(a.trials, a.seed);
    let mismatches = decrement_criterion_mismatches(&[(4, 1), (4, 2), (5, 2), (5, 3), (6, 2)]);
    let at = ReportParams::default();
    let count = |name: &str, bad: &[Family]| {
        AuditReport::compare(name, at, int(bad.len() as u64), Cmp::Eq, int(0u64))
            .witness_on_failure(|| family_line(&bad[0]))
    };
    let reports = vec![
        count("shift.cardinality", &tally.size_changed),
        count("shift.nu_monotone", &tally.nu_increased),
        count("shift.fixpoint_shifted", &tally.not_shifted),
        count("shift.decrement_criterion", &mismatches),
        AuditReport::compare("shift.families", at, int(tally.families as u64), Cmp::Eq, int(a.trials)),
    ];
    emit(reports, &a.output)
}

fn cmd_find_g0(a: FindG0Args) -> Run {
    let fam = read_family(&a.input)?;
    let k = match a.k.or(fam.uniformity().map(|k| k as u64)) {
        Some(k) => k,
        None => return Err(Failure::Usage("family is not uniform; pass --k".into())),
    };
    let found = search::find_g0(&fam, k as usize, a.s as usize)?;
    let line = match &found {
        Some(g0) => format!("{g0}\n"),
        None => "none\n".to_string(),
    };
    match &a.out {
        Some(out) => write_file(out, &line)?,
        None => print!("{line}"),
    }
    Ok(found.is_some())
}
