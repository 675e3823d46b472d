//! `ffdyn`: exact counts and limiting proportions of periodic points of the
//! power maps `x -> x^L` on matrix algebras and classical groups.
//!
//! One invocation produces one report (JSON, CSV, or text). All counts are
//! exact; big integers and rationals are serialized as decimal strings.
//! Output is deterministic byte for byte for fixed flags, independent of
//! `--jobs`.
//!
//! Exit codes: 0 success, 1 verification mismatch or internal failure,
//! 2 invalid parameters or violated hypotheses, 3 enumeration guard exceeded.

mod report;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use ffdyn_core::classcount::{
    exact_periodic_count, limit_gl, limit_sp_u, limit_sp_u_verbatim, m2_closed, m3_closed,
    MAX_EXACT_N,
};
use ffdyn_core::counting::{
    d_plain, d_self_conjugate, d_self_conjugate_verbatim, d_self_reciprocal,
    d_self_reciprocal_verbatim, oracle_count, v_adic, OracleKind,
};
use ffdyn_core::ff::prime_power_split;
use ffdyn_core::groups::{brute_periodic_count, group_order, Family, GroupKind};
use ffdyn_core::{Error, ExactInt, ExactRational, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::Value;
use std::process::ExitCode;

use report::{int_value, rational_value, Format, Report, Table};
use verify::{run_suite, tier_for_budget, Suite};

#[derive(Parser)]
#[command(name = "ffdyn", version, about = "Periodic points of power maps over finite fields")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads; the report bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count monic irreducible polynomials whose roots are periodic points.
    CountIrr {
        /// Symmetry class of the polynomials being counted.
        #[arg(long, value_enum)]
        kind: Kind,

        /// Field order (a prime power).
        #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
        q: Option<u64>,

        /// The prime exponent of the power map.
        #[arg(long = "L")]
        l: u64,

        /// Degree index: the degree for plain and self-conjugate counts,
        /// half the degree for self-reciprocal counts.
        #[arg(long)]
        n: u32,

        #[arg(long, value_enum, default_value_t = CountMethod::Both)]
        method: CountMethod,

        /// Sweep q over an inclusive range, e.g. `q=3..31`; rows that are
        /// not prime powers or fail the hypotheses are skipped.
        #[arg(long)]
        sweep: Option<String>,
    },

    /// Count periodic points of `A -> A^L` on a matrix algebra or group.
    Periodic {
        #[arg(long, value_enum)]
        family: FamilyArg,

        /// Matrix dimension (even for sp; for u, over the quadratic extension).
        #[arg(long)]
        n: usize,

        /// Field order for m/gl/sp; base field order for u.
        #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
        q: Option<u64>,

        /// The prime exponent of the power map.
        #[arg(long = "L")]
        l: u64,

        /// Default: class sum for m/gl (when the dimension supports it),
        /// brute force otherwise. `all` cross-checks every applicable method.
        #[arg(long, value_enum)]
        method: Option<PeriodicMethod>,

        /// Sweep q over an inclusive range, e.g. `q=3..31`.
        #[arg(long)]
        sweep: Option<String>,
    },

    /// Evaluate the exact limiting proportion of periodic points as q grows.
    Limit {
        #[arg(long, value_enum)]
        family: LimitFamily,

        /// Dimension parameter: gl uses matrices of size ell, sp of size
        /// 2 ell, u of size ell.
        #[arg(long)]
        ell: u64,

        /// The prime exponent of the power map (odd).
        #[arg(long = "L")]
        l: u64,

        /// Declared valuation of q - 1 at L along the limit.
        #[arg(long)]
        c: u32,

        /// Optional finite q: also report the finite ratio and its gap to
        /// the limit. Requires v_L(q - 1) = c.
        #[arg(long, conflicts_with = "sweep")]
        q: Option<u64>,

        /// Also report the uncorrected variant of the sp/u value.
        #[arg(long)]
        paper_verbatim: bool,

        /// Sweep the finite comparison over q, e.g. `q=3..100`; rows with
        /// v_L(q - 1) != c are skipped.
        #[arg(long)]
        sweep: Option<String>,
    },

    /// Run formula-vs-oracle suites; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,

        /// Time budget in seconds; mapped deterministically to a workload
        /// tier, never measured.
        #[arg(long, default_value_t = 30)]
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Plain,
    SelfReciprocal,
    SelfConjugate,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::SelfReciprocal => "self-reciprocal",
            Kind::SelfConjugate => "self-conjugate",
        }
    }

    fn oracle_kind(self) -> OracleKind {
        match self {
            Kind::Plain => OracleKind::Plain,
            Kind::SelfReciprocal => OracleKind::SelfReciprocal,
            Kind::SelfConjugate => OracleKind::SelfConjugate,
        }
    }

    fn formula(self, q: u64, l: u64, n: u32) -> Result<ExactInt> {
        match self {
            Kind::Plain => d_plain(q, l, n),
            Kind::SelfReciprocal => d_self_reciprocal(q, l, n),
            Kind::SelfConjugate => d_self_conjugate(q, l, n),
        }
    }

    /// The uncorrected printed form, when the kind has one.
    fn verbatim(self, q: u64, l: u64, n: u32) -> Option<Result<ExactRational>> {
        match self {
            Kind::Plain => None,
            Kind::SelfReciprocal => Some(d_self_reciprocal_verbatim(q, l, n)),
            Kind::SelfConjugate => Some(d_self_conjugate_verbatim(q, l, n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    Formula,
    Oracle,
    Both,
}

impl CountMethod {
    fn label(self) -> &'static str {
        match self {
            CountMethod::Formula => "formula",
            CountMethod::Oracle => "oracle",
            CountMethod::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    M,
    Gl,
    Sp,
    U,
}

impl FamilyArg {
    fn core(self) -> Family {
        match self {
            FamilyArg::M => Family::M,
            FamilyArg::Gl => Family::Gl,
            FamilyArg::Sp => Family::Sp,
            FamilyArg::U => Family::U,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PeriodicMethod {
    Class,
    Closed,
    Brute,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LimitFamily {
    Gl,
    Sp,
    U,
}

impl LimitFamily {
    fn label(self) -> &'static str {
        match self {
            LimitFamily::Gl => "gl",
            LimitFamily::Sp => "sp",
            LimitFamily::U => "u",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Ignore the error from a second initialization; it can only happen in
    // test harnesses that call main twice.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    match run(&cli.command) {
        Ok((report, code)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("ffdyn: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::Hypothesis(_) => 2,
        Error::Guard(_) => 3,
        Error::Internal(_) => 1,
    }
}

/// Errors that invalidate a single sweep row rather than the invocation.
fn skippable(e: &Error) -> bool {
    matches!(e, Error::Invalid(_) | Error::Hypothesis(_) | Error::Guard(_))
}

fn parse_sweep(s: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let err = || Error::Invalid(format!("sweep must look like q=3..31, got {s:?}"));
    let rest = s.strip_prefix("q=").ok_or_else(err)?;
    let (lo, hi) = rest.split_once("..").ok_or_else(err)?;
    let lo: u64 = lo.trim().parse().map_err(|_| err())?;
    let hi: u64 = hi.trim().parse().map_err(|_| err())?;
    if lo < 2 || hi < lo {
        return Err(Error::Invalid(format!("sweep range {lo}..{hi} is empty or starts below 2")));
    }
    if hi - lo > 1 << 16 {
        return Err(Error::Invalid(format!("sweep range {lo}..{hi} is too wide")));
    }
    Ok(lo..=hi)
}

fn run(command: &Command) -> Result<(Report, u8)> {
    match command {
        Command::CountIrr { kind, q, l, n, method, sweep } => {
            cmd_count_irr(*kind, *q, *l, *n, *method, sweep.as_deref())
        }
        Command::Periodic { family, n, q, l, method, sweep } => {
            cmd_periodic(*family, *n, *q, *l, *method, sweep.as_deref())
        }
        Command::Limit { family, ell, l, c, q, paper_verbatim, sweep } => {
            cmd_limit(*family, *ell, *l, *c, *q, *paper_verbatim, sweep.as_deref())
        }
        Command::Verify { suite, budget } => cmd_verify(*suite, *budget),
    }
}

// ---------------------------------------------------------------------------
// count-irr
// ---------------------------------------------------------------------------

/// Result cells for one (kind, q, L, n): count(s), agreement, and the
/// uncorrected printed variant where one exists. The bool is the agreement
/// verdict (true when not applicable).
fn count_irr_cells(
    kind: Kind,
    q: u64,
    l: u64,
    n: u32,
    method: CountMethod,
) -> Result<(Vec<(&'static str, Value)>, bool)> {
    let mut cells = Vec::new();
    let mut agree = true;
    match method {
        CountMethod::Formula => {
            cells.push(("formula", int_value(&kind.formula(q, l, n)?)));
        }
        CountMethod::Oracle => {
            cells.push(("oracle", int_value(&oracle_count(kind.oracle_kind(), q, l, n)?)));
        }
        CountMethod::Both => {
            let f = kind.formula(q, l, n)?;
            let o = oracle_count(kind.oracle_kind(), q, l, n)?;
            agree = f == o;
            cells.push(("formula", int_value(&f)));
            cells.push(("oracle", int_value(&o)));
            cells.push(("agree", Value::Bool(agree)));
        }
    }
    if let Some(verbatim) = kind.verbatim(q, l, n) {
        cells.push(("paper_verbatim", rational_value(&verbatim?)));
    }
    Ok((cells, agree))
}

fn cmd_count_irr(
    kind: Kind,
    q: Option<u64>,
    l: u64,
    n: u32,
    method: CountMethod,
    sweep: Option<&str>,
) -> Result<(Report, u8)> {
    let mut report = Report::new("count-irr");
    report
        .param("kind", Value::String(kind.label().into()))
        .param("L", Value::from(l))
        .param("n", Value::from(n))
        .param("method", Value::String(method.label().into()));

    if let Some(sweep) = sweep {
        report.param("sweep", Value::String(sweep.into()));
        let mut columns = vec!["q"];
        match method {
            CountMethod::Formula => columns.push("formula"),
            CountMethod::Oracle => columns.push("oracle"),
            CountMethod::Both => columns.extend(["formula", "oracle", "agree"]),
        }
        if kind != Kind::Plain {
            columns.push("paper_verbatim");
        }
        let mut rows = Vec::new();
        let mut all_agree = true;
        for q in parse_sweep(sweep)? {
            if prime_power_split(q).is_err() {
                continue;
            }
            match count_irr_cells(kind, q, l, n, method) {
                Ok((cells, agree)) => {
                    all_agree &= agree;
                    let mut row = vec![Value::from(q)];
                    row.extend(cells.into_iter().map(|(_, v)| v));
                    rows.push(row);
                }
                Err(e) if skippable(&e) => continue,
                Err(e) => return Err(e),
            }
        }
        report.table = Some(Table { key: "rows", columns, rows });
        return Ok((report, u8::from(!all_agree)));
    }

    let q = q.expect("clap requires q without sweep");
    report.param("q", Value::from(q));
    let (cells, agree) = count_irr_cells(kind, q, l, n, method)?;
    for (k, v) in cells {
        report.field(k, v);
    }
    Ok((report, u8::from(!agree)))
}

// ---------------------------------------------------------------------------
// periodic
// ---------------------------------------------------------------------------

/// The concrete methods one invocation will run, in reporting order.
fn periodic_plan(
    family: FamilyArg,
    n: usize,
    method: Option<PeriodicMethod>,
) -> Result<Vec<PeriodicMethod>> {
    let class_ok = matches!(family, FamilyArg::M | FamilyArg::Gl) && n <= MAX_EXACT_N;
    let closed_ok = family == FamilyArg::M && (n == 2 || n == 3);
    match method {
        None => Ok(vec![if class_ok { PeriodicMethod::Class } else { PeriodicMethod::Brute }]),
        Some(PeriodicMethod::Class) => {
            if class_ok {
                Ok(vec![PeriodicMethod::Class])
            } else {
                Err(Error::Invalid(format!(
                    "class sums cover m/gl up to dimension {MAX_EXACT_N}"
                )))
            }
        }
        Some(PeriodicMethod::Closed) => {
            if closed_ok {
                Ok(vec![PeriodicMethod::Closed])
            } else {
                Err(Error::Invalid(
                    "closed forms cover family m at dimensions 2 and 3".into(),
                ))
            }
        }
        Some(PeriodicMethod::Brute) => Ok(vec![PeriodicMethod::Brute]),
        Some(PeriodicMethod::All) => {
            let mut plan = Vec::new();
            if class_ok {
                plan.push(PeriodicMethod::Class);
            }
            if closed_ok {
                plan.push(PeriodicMethod::Closed);
            }
            plan.push(PeriodicMethod::Brute);
            Ok(plan)
        }
    }
}

fn periodic_method_label(m: PeriodicMethod) -> &'static str {
    match m {
        PeriodicMethod::Class => "class",
        PeriodicMethod::Closed => "closed",
        PeriodicMethod::Brute => "brute",
        PeriodicMethod::All => "all",
    }
}

fn run_periodic_method(
    m: PeriodicMethod,
    family: FamilyArg,
    n: usize,
    q: u64,
    l: u64,
) -> Result<ExactInt> {
    match m {
        PeriodicMethod::Class => exact_periodic_count(family.core(), n, q, l),
        PeriodicMethod::Closed => {
            if n == 2 {
                m2_closed(q, l)
            } else {
                m3_closed(q, l)
            }
        }
        PeriodicMethod::Brute => {
            brute_periodic_count(&GroupKind::for_family(family.core(), q, n)?, l)
        }
        PeriodicMethod::All => unreachable!("plan expands all"),
    }
}

/// Result cells for one q: a count per planned method, the agreement
/// verdict when several ran, and the count / space / ratio summary.
fn periodic_cells(
    plan: &[PeriodicMethod],
    family: FamilyArg,
    n: usize,
    q: u64,
    l: u64,
) -> Result<(Vec<(&'static str, Value)>, bool)> {
    let counts = plan
        .iter()
        .map(|&m| run_periodic_method(m, family, n, q, l))
        .collect::<Result<Vec<_>>>()?;
    let agree = counts.windows(2).all(|w| w[0] == w[1]);
    let mut cells = Vec::new();
    if plan.len() == 1 {
        cells.push(("count", int_value(&counts[0])));
    } else {
        for (&m, c) in plan.iter().zip(&counts) {
            cells.push((periodic_method_label(m), int_value(c)));
        }
        cells.push(("agree", Value::Bool(agree)));
        if agree {
            cells.push(("count", int_value(&counts[0])));
        }
    }
    if agree {
        let space = group_order(&GroupKind::for_family(family.core(), q, n)?);
        cells.push(("space", int_value(&space)));
        cells.push(("ratio", rational_value(&exact_ratio(&counts[0], &space))));
    }
    Ok((cells, agree))
}

fn exact_ratio(count: &ExactInt, space: &ExactInt) -> ExactRational {
    ExactRational::new(BigInt::from(count.clone()), BigInt::from(space.clone()))
}

fn cmd_periodic(
    family: FamilyArg,
    n: usize,
    q: Option<u64>,
    l: u64,
    method: Option<PeriodicMethod>,
    sweep: Option<&str>,
) -> Result<(Report, u8)> {
    let plan = periodic_plan(family, n, method)?;
    let method_echo = match method {
        Some(m) => periodic_method_label(m),
        None => periodic_method_label(plan[0]),
    };
    let mut report = Report::new("periodic");
    report
        .param("family", Value::String(family.core().label().into()))
        .param("n", Value::from(n as u64))
        .param("L", Value::from(l))
        .param("method", Value::String(method_echo.into()));

    if let Some(sweep) = sweep {
        report.param("sweep", Value::String(sweep.into()));
        let mut columns = vec!["q"];
        if plan.len() == 1 {
            columns.push("count");
        } else {
            columns.extend(plan.iter().map(|&m| periodic_method_label(m)));
            columns.extend(["agree", "count"]);
        }
        columns.extend(["space", "ratio"]);
        let width = columns.len();
        let mut rows = Vec::new();
        let mut all_agree = true;
        for q in parse_sweep(sweep)? {
            if prime_power_split(q).is_err() {
                continue;
            }
            match periodic_cells(&plan, family, n, q, l) {
                Ok((cells, agree)) => {
                    all_agree &= agree;
                    let mut row = vec![Value::from(q)];
                    row.extend(cells.into_iter().map(|(_, v)| v));
                    // Disagreeing rows are short of the summary columns.
                    row.resize(width, Value::Null);
                    rows.push(row);
                }
                Err(e) if skippable(&e) => continue,
                Err(e) => return Err(e),
            }
        }
        report.table = Some(Table { key: "rows", columns, rows });
        return Ok((report, u8::from(!all_agree)));
    }

    let q = q.expect("clap requires q without sweep");
    report.param("q", Value::from(q));
    let (cells, agree) = periodic_cells(&plan, family, n, q, l)?;
    for (k, v) in cells {
        report.field(k, v);
    }
    Ok((report, u8::from(!agree)))
}

// ---------------------------------------------------------------------------
// limit
// ---------------------------------------------------------------------------

/// Exact count of periodic points in the finite instance the limit speaks
/// about: class sums for gl, exhaustive enumeration for sp/u.
fn finite_instance(family: LimitFamily, ell: u64, q: u64, l: u64) -> Result<(ExactInt, ExactInt)> {
    let (kind, count) = match family {
        LimitFamily::Gl => {
            let kind = GroupKind::for_family(Family::Gl, q, ell as usize)?;
            let count = exact_periodic_count(Family::Gl, ell as usize, q, l)?;
            (kind, count)
        }
        LimitFamily::Sp => {
            let kind = GroupKind::for_family(Family::Sp, q, 2 * ell as usize)?;
            let count = brute_periodic_count(&kind, l)?;
            (kind, count)
        }
        LimitFamily::U => {
            let kind = GroupKind::for_family(Family::U, q, ell as usize)?;
            let count = brute_periodic_count(&kind, l)?;
            (kind, count)
        }
    };
    Ok((count, group_order(&kind)))
}

/// Check v_L(q - 1) = c, the valuation the limit is taken along.
fn check_declared_valuation(q: u64, l: u64, c: u32) -> Result<()> {
    prime_power_split(q)?;
    let actual = v_adic(l, q - 1)?;
    if actual != c {
        return Err(Error::Hypothesis(format!(
            "v_{l}({q} - 1) = {actual}, but the limit was taken along c = {c}"
        )));
    }
    Ok(())
}

fn cmd_limit(
    family: LimitFamily,
    ell: u64,
    l: u64,
    c: u32,
    q: Option<u64>,
    paper_verbatim: bool,
    sweep: Option<&str>,
) -> Result<(Report, u8)> {
    let value = match family {
        LimitFamily::Gl => limit_gl(ell, l, c)?,
        LimitFamily::Sp | LimitFamily::U => limit_sp_u(ell, l, c)?,
    };
    let mut report = Report::new("limit");
    report
        .param("family", Value::String(family.label().into()))
        .param("ell", Value::from(ell))
        .param("L", Value::from(l))
        .param("c", Value::from(c));
    report
        .field("value", rational_value(&value))
        .field("numerator", Value::String(value.numer().to_string()))
        .field("denominator", Value::String(value.denom().to_string()));
    if paper_verbatim {
        match family {
            LimitFamily::Gl => {
                return Err(Error::Invalid(
                    "the gl limit has no separate printed variant".into(),
                ))
            }
            LimitFamily::Sp | LimitFamily::U => {
                report.field("paper_verbatim", rational_value(&limit_sp_u_verbatim(ell, l, c)?));
            }
        }
    }

    if let Some(sweep) = sweep {
        report.param("sweep", Value::String(sweep.into()));
        let columns = vec!["q", "finite_count", "finite_space", "finite_ratio", "gap"];
        let mut rows = Vec::new();
        for q in parse_sweep(sweep)? {
            if prime_power_split(q).is_err() || check_declared_valuation(q, l, c).is_err() {
                continue;
            }
            match finite_instance(family, ell, q, l) {
                Ok((count, space)) => {
                    let ratio = exact_ratio(&count, &space);
                    let gap = (&ratio - &value).abs();
                    rows.push(vec![
                        Value::from(q),
                        int_value(&count),
                        int_value(&space),
                        rational_value(&ratio),
                        rational_value(&gap),
                    ]);
                }
                Err(e) if skippable(&e) => continue,
                Err(e) => return Err(e),
            }
        }
        report.table = Some(Table { key: "rows", columns, rows });
        return Ok((report, 0));
    }

    if let Some(q) = q {
        report.param("q", Value::from(q));
        check_declared_valuation(q, l, c)?;
        let (count, space) = finite_instance(family, ell, q, l)?;
        let ratio = exact_ratio(&count, &space);
        let gap = (&ratio - &value).abs();
        report
            .field("finite_count", int_value(&count))
            .field("finite_space", int_value(&space))
            .field("finite_ratio", rational_value(&ratio))
            .field("gap", rational_value(&gap));
    }
    Ok((report, 0))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(suite: Suite, budget: u64) -> Result<(Report, u8)> {
    let tier = tier_for_budget(budget);
    let checks = run_suite(suite, tier);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut report = Report::new("verify");
    report
        .param("suite", Value::String(suite.label().into()))
        .param("budget", Value::from(budget));
    report
        .field("tier", Value::from(u64::from(tier)))
        .field("total", Value::from(checks.len() as u64))
        .field("passed", Value::from((checks.len() - failed) as u64))
        .field("failed", Value::from(failed as u64))
        .field("ok", Value::Bool(failed == 0));
    let rows = checks
        .into_iter()
        .map(|c| {
            vec![
                Value::String(c.name.into()),
                Value::String(c.params),
                Value::String(c.expected),
                Value::String(c.got),
                Value::Bool(c.pass),
            ]
        })
        .collect();
    report.table = Some(Table {
        key: "checks",
        columns: vec!["name", "params", "expected", "got", "pass"],
        rows,
    });
    Ok((report, u8::from(failed > 0)))
}
