//! The `vheis` command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 resource exhaustion,
//! 4 verification mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use crate::explorer::{
    self, BallIndex, BfsOptions, CayleyGroup, ExploreError, GroupTag, GrowthTable, Heis,
    OracleReport, SelfCheckedOracle, Vh,
};
use crate::group::{HeisPoint, VHPoint};
use crate::oracle;
use crate::series::{self, to_bigints};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Largest number of `t` letters a geodesic over `{a, a^-1, t}` may carry.
pub const MAX_T_COUNT: usize = 7;

#[derive(Debug, Parser)]
#[command(
    name = "vheis",
    version,
    about = "Geodesics and geodesic growth in the Heisenberg group and its index-2 extension"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Heis,
    Vh,
}

impl From<GroupArg> for GroupTag {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Heis => GroupTag::Heis,
            GroupArg::Vh => GroupTag::Vh,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, alias = "report", value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for ball construction (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Abort ball construction beyond this many bytes.
    #[arg(long, default_value_t = 4 << 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub memory_budget: u64,
}

impl Common {
    fn bfs(&self) -> BfsOptions {
        BfsOptions {
            threads: self.threads,
            memory_budget: self.memory_budget,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Word length, case and geodesic of (x, y, z) over {a, a^-1, b, b^-1}.
    Length {
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(allow_negative_numbers = true)]
        y: i64,
        #[arg(allow_negative_numbers = true)]
        z: i64,
        /// Cross-check the answer against a breadth-first ball.
        #[arg(long)]
        self_check: bool,
        /// Radius of the checking ball.
        #[arg(long, default_value_t = 12)]
        radius: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Geodesic and element growth of a Cayley ball.
    Growth {
        #[arg(value_enum)]
        group: GroupArg,
        /// Radius (same as --radius).
        #[arg(value_name = "RADIUS", conflicts_with = "radius")]
        radius_pos: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the length oracle, the t-count bound and the growth bound.
    Verify {
        #[arg(long, default_value_t = 12)]
        radius: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Degree estimates and recurrence guesses for a sequence.
    Analyze {
        /// CSV file: one value per line, `n,value` pairs, or a growth table.
        #[arg(
            required_unless_present = "from_growth",
            conflicts_with = "from_growth"
        )]
        input: Option<PathBuf>,
        /// Column to read from a CSV with a header.
        #[arg(long)]
        column: Option<String>,
        /// Compute geodesic growth of this group instead of reading a file.
        #[arg(long, value_enum)]
        from_growth: Option<GroupArg>,
        #[arg(long, default_value_t = 24)]
        radius: usize,
        #[arg(long, default_value_t = 16)]
        max_order: usize,
        #[arg(long, default_value_t = 3)]
        max_poly_degree: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args` (program name first) and runs the command, writing to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let msg = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(msg.as_bytes())
            } else {
                err.write_all(msg.as_bytes())
            };
            return code;
        }
    };
    let (code, text, common_out) = match execute(&cli.command) {
        Ok(done) => done,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.msg);
            return e.code;
        }
    };
    match common_out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_RESOURCE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    code
}

struct CliError {
    code: i32,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
    fn resource(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RESOURCE,
            msg: msg.into(),
        }
    }
}

type Outcome = Result<(i32, String, Option<PathBuf>), CliError>;

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Length {
            x,
            y,
            z,
            self_check,
            radius,
            common,
        } => {
            let text = cmd_length(
                HeisPoint::new(*x, *y, *z),
                self_check.then_some(*radius),
                common,
            )?;
            let code = if text.1 { EXIT_OK } else { EXIT_MISMATCH };
            Ok((code, text.0, common.output.clone()))
        }
        Command::Growth {
            group,
            radius_pos,
            radius,
            common,
        } => {
            let r = radius_pos
                .or(*radius)
                .ok_or_else(|| CliError::usage("a radius is required"))?;
            let (code, text) = cmd_growth((*group).into(), r, common)?;
            Ok((code, text, common.output.clone()))
        }
        Command::Verify { radius, common } => {
            let (code, text) = cmd_verify(*radius, common)?;
            Ok((code, text, common.output.clone()))
        }
        Command::Analyze {
            input,
            column,
            from_growth,
            radius,
            max_order,
            max_poly_degree,
            common,
        } => {
            let text = cmd_analyze(
                input.as_ref(),
                column.as_deref(),
                from_growth.map(Into::into),
                *radius,
                *max_order,
                *max_poly_degree,
                common,
            )?;
            Ok((EXIT_OK, text, common.output.clone()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Returns the rendered report and whether any self-check agreed.
fn cmd_length(
    p: HeisPoint,
    check_radius: Option<usize>,
    common: &Common,
) -> Result<(String, bool), CliError> {
    let format = common.format.unwrap_or(Format::Json);
    let (geodesic, check) = match check_radius {
        Some(r) => {
            let checker = SelfCheckedOracle::new(r, common.bfs())
                .map_err(|e| CliError::resource(e.to_string()))?;
            let ans = checker
                .solve(&p)
                .map_err(|e| CliError::resource(e.to_string()))?;
            (ans.geodesic, Some((r, ans.bfs_distance, ans.agrees)))
        }
        None => (
            oracle::solve(&p).map_err(|e| CliError::resource(e.to_string()))?,
            None,
        ),
    };
    let ok = !matches!(check, Some((_, _, Some(false))));
    let text = match format {
        Format::Json => to_json(&json!({
            "point": p,
            "length": geodesic.length(),
            "case": geodesic.case.map(|c| c.label()),
            "case_detail": geodesic.case,
            "reduced": geodesic.reduced,
            "trace": geodesic.trace,
            "witness": geodesic.word,
            "blocks": geodesic.word.block_count(),
            "self_check": check.map(|(r, d, a)| json!({"radius": r, "bfs_distance": d, "agrees": a})),
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "point    {p}");
            let _ = writeln!(s, "length   {}", geodesic.length());
            let _ = writeln!(
                s,
                "case     {}",
                geodesic
                    .case
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "identity".into())
            );
            let _ = writeln!(s, "reduced  {} via {}", geodesic.reduced, geodesic.trace);
            let _ = writeln!(s, "witness  {}", geodesic.word);
            if let Some((r, d, a)) = check {
                let verdict = match (d, a) {
                    (Some(d), Some(true)) => format!("agrees with BFS distance {d}"),
                    (Some(d), _) => format!("MISMATCH: BFS distance {d}"),
                    (None, _) => format!("outside radius {r}, unchecked"),
                };
                let _ = writeln!(s, "check    {verdict}");
            }
            s
        }
        other => {
            return Err(CliError::usage(format!(
                "length does not support --format {other:?}"
            )))
        }
    };
    Ok((text, ok))
}

fn render_growth<G: CayleyGroup>(
    ball: &BallIndex<G::Elem>,
    format: Format,
    truncated: Option<(usize, usize)>,
) -> String {
    let mut table = GrowthTable::from_ball(ball);
    table.truncated = truncated.is_some();
    let marker = truncated.map(|(done, next)| {
        format!("truncated: memory budget exceeded building radius {next}; complete through radius {done}")
    });
    match format {
        Format::Csv => {
            let mut s = table.to_csv();
            if let Some(m) = marker {
                let _ = writeln!(s, "# {m}");
            }
            s
        }
        Format::Json => to_json(&json!({
            "group": table.group,
            "radius": table.radius,
            "truncated": table.truncated,
            "note": marker,
            "rows": table.rows,
        })),
        Format::Dot => explorer::export_dot::<G>(ball, ball.radius()),
        Format::Text => {
            let mut s = format!(
                "{:>4} {:>22} {:>22} {:>12} {:>12}\n",
                "n", "sphere words", "gamma", "sphere", "ball"
            );
            for r in &table.rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>22} {:>22} {:>12} {:>12}",
                    r.n,
                    r.sphere_geodesic_words,
                    r.gamma_cumulative,
                    r.sphere_elements,
                    r.ball_elements
                );
            }
            if let Some(m) = marker {
                let _ = writeln!(s, "{m}");
            }
            s
        }
    }
}

fn growth_for<G: CayleyGroup>(radius: usize, common: &Common) -> Result<(i32, String), CliError> {
    let format = common.format.unwrap_or(Format::Csv);
    match explorer::bfs_ball::<G>(radius, common.bfs()) {
        Ok(ball) => Ok((EXIT_OK, render_growth::<G>(&ball, format, None))),
        Err(ExploreError::Budget {
            completed_radius,
            next,
            partial,
            ..
        }) => Ok((
            EXIT_RESOURCE,
            render_growth::<G>(&partial, format, Some((completed_radius, next))),
        )),
        Err(e) => Err(CliError::resource(e.to_string())),
    }
}

fn cmd_growth(group: GroupTag, radius: usize, common: &Common) -> Result<(i32, String), CliError> {
    match group {
        GroupTag::Heis => growth_for::<Heis>(radius, common),
        GroupTag::Vh => growth_for::<Vh>(radius, common),
    }
}

#[derive(Debug, Serialize)]
struct TCountVerdict {
    max_t_count: usize,
    attained_at: VHPoint,
    bound: usize,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct BoundViolation {
    n: usize,
    gamma: BigUint,
    bound: BigUint,
}

#[derive(Debug, Serialize)]
struct BoundVerdict {
    checked_through: usize,
    violations: Vec<BoundViolation>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    radius: usize,
    oracle: OracleReport,
    t_counts: TCountVerdict,
    growth_bound: BoundVerdict,
    passed: bool,
}

pub fn check_growth_bound(gamma: &[BigUint]) -> (usize, Vec<(usize, BigUint, BigUint)>) {
    let bound = series::theorem_bound_prefix(gamma.len().saturating_sub(1) as u64);
    let violations = gamma
        .iter()
        .zip(bound)
        .enumerate()
        .filter(|(_, (g, b))| g > &b)
        .map(|(n, (g, b))| (n, g.clone(), b))
        .collect();
    (gamma.len().saturating_sub(1), violations)
}

fn cmd_verify(radius: usize, common: &Common) -> Result<(i32, String), CliError> {
    let format = common.format.unwrap_or(Format::Json);
    let res = |e: ExploreError<_>| CliError::resource(e.to_string());
    let oracle_report = explorer::verify_oracle(radius, common.bfs()).map_err(res)?;
    let vh = explorer::bfs_ball::<Vh>(radius, common.bfs())
        .map_err(|e| CliError::resource(e.to_string()))?;
    let tc = explorer::t_count_analysis(&vh).map_err(|e| CliError::resource(e.to_string()))?;
    let gamma = explorer::geodesic_growth(&vh).values;
    let (through, violations) = check_growth_bound(&gamma);
    let t_counts = TCountVerdict {
        max_t_count: tc.max,
        attained_at: tc.argmax,
        bound: MAX_T_COUNT,
        passed: tc.max <= MAX_T_COUNT,
    };
    let growth_bound = BoundVerdict {
        checked_through: through,
        passed: violations.is_empty(),
        violations: violations
            .into_iter()
            .map(|(n, gamma, bound)| BoundViolation { n, gamma, bound })
            .collect(),
    };
    let passed = oracle_report.passed() && t_counts.passed && growth_bound.passed;
    let report = VerifyReport {
        radius,
        oracle: oracle_report,
        t_counts,
        growth_bound,
        passed,
    };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Text => {
            let mut s = String::new();
            let o = &report.oracle;
            let _ = writeln!(
                s,
                "oracle       {} elements of radius {}, {} mismatches ({})",
                o.checked,
                o.radius,
                o.mismatches.len(),
                if o.passed() { "pass" } else { "FAIL" }
            );
            for m in &o.mismatches {
                let _ = writeln!(s, "  {} d={} {}", m.point, m.bfs_distance, m.problem);
            }
            let _ = writeln!(
                s,
                "case I.1     floor reading wrong at {}, ceiling reading wrong at {}",
                o.floor_reading_disagreements, o.ceiling_reading_disagreements
            );
            let t = &report.t_counts;
            let _ = writeln!(
                s,
                "t-count      max {} at {} (bound {}) ({})",
                t.max_t_count,
                t.attained_at,
                t.bound,
                if t.passed { "pass" } else { "FAIL" }
            );
            let g = &report.growth_bound;
            let _ = writeln!(
                s,
                "growth bound checked n <= {}, {} violations ({})",
                g.checked_through,
                g.violations.len(),
                if g.passed { "pass" } else { "FAIL" }
            );
            let _ = writeln!(
                s,
                "overall      {}",
                if report.passed { "pass" } else { "FAIL" }
            );
            s
        }
        other => {
            return Err(CliError::usage(format!(
                "verify does not support --format {other:?}"
            )))
        }
    };
    Ok((
        if report.passed {
            EXIT_OK
        } else {
            EXIT_MISMATCH
        },
        text,
    ))
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub source: String,
    pub terms: usize,
    pub difference_degree: Option<series::DegreeReport>,
    pub loglog_degree: Option<series::DegreeReport>,
    pub slope_trend: series::SlopeTrend,
    pub ratio_test: Option<series::RatioReport>,
    pub linear: series::RecurrenceSearch,
    pub p_recursive: series::RecurrenceSearch,
    /// Only for geodesic growth of `(vH, S)`.
    pub growth_bound: Option<serde_json::Value>,
}

pub fn analyze_sequence(
    source: String,
    seq: &[num_bigint::BigInt],
    max_order: usize,
    max_poly_degree: usize,
) -> AnalysisReport {
    let n = seq.len();
    let window = (n / 2).max(1)..n;
    AnalysisReport {
        source,
        terms: n,
        difference_degree: series::difference_degree(seq).ok(),
        loglog_degree: series::loglog_degree(seq, window.clone()).ok(),
        slope_trend: series::slope_trend(seq, 4, 0.1),
        ratio_test: series::ratio_test(seq, window).ok(),
        linear: series::linear_recurrence_search(seq, max_order),
        p_recursive: series::p_recurrence_search(seq, max_order, max_poly_degree),
        growth_bound: None,
    }
}

fn cmd_analyze(
    input: Option<&PathBuf>,
    column: Option<&str>,
    from_growth: Option<GroupTag>,
    radius: usize,
    max_order: usize,
    max_poly_degree: usize,
    common: &Common,
) -> Result<String, CliError> {
    let (source, seq, gamma) = match (input, from_growth) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            let seq = series::parse_sequence_csv(&text, column)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), seq, None)
        }
        (None, Some(g)) => {
            let values = match g {
                GroupTag::Heis => explorer::bfs_ball::<Heis>(radius, common.bfs())
                    .map(|b| explorer::geodesic_growth(&b).values)
                    .map_err(|e| CliError::resource(e.to_string()))?,
                GroupTag::Vh => explorer::bfs_ball::<Vh>(radius, common.bfs())
                    .map(|b| explorer::geodesic_growth(&b).values)
                    .map_err(|e| CliError::resource(e.to_string()))?,
            };
            let gamma = (g == GroupTag::Vh).then(|| values.clone());
            (
                format!("geodesic growth of {g}, radius {radius}"),
                to_bigints(&values),
                gamma,
            )
        }
        (None, None) => return Err(CliError::usage("need an input file or --from-growth")),
    };
    if seq.is_empty() {
        return Err(CliError::usage("empty sequence"));
    }
    let mut report = analyze_sequence(source, &seq, max_order, max_poly_degree);
    if let Some(gamma) = gamma {
        let (through, violations) = check_growth_bound(&gamma);
        report.growth_bound = Some(json!({
            "checked_through": through,
            "violations": violations.iter().map(|v| v.0).collect::<Vec<_>>(),
            "passed": violations.is_empty(),
        }));
    }
    match common.format.unwrap_or(Format::Json) {
        Format::Json => Ok(to_json(&report)),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "source      {} ({} terms)", report.source, report.terms);
            if let Some(d) = &report.difference_degree {
                let _ = writeln!(s, "differences {:?}", d.estimate);
            }
            if let Some(d) = &report.loglog_degree {
                let _ = writeln!(s, "log-log     {:?} on {:?}", d.estimate, d.window);
            }
            let _ = writeln!(
                s,
                "trend       {} slopes, converged: {}",
                report.slope_trend.slopes.len(),
                report.slope_trend.converged
            );
            if let Some(r) = &report.ratio_test {
                let _ = writeln!(
                    s,
                    "ratio test  sub-exponential on window: {}",
                    r.sub_exponential()
                );
            }
            for (name, search) in [
                ("linear", &report.linear),
                ("p-recursive", &report.p_recursive),
            ] {
                match &search.guess {
                    Some(g) => {
                        let _ = writeln!(s, "{name:<11} {g}");
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "{name:<11} none up to order {} (poly degree {}), fit on {} of {} terms",
                            search.searched_max_order,
                            search.searched_max_poly_degree,
                            search.fit_len,
                            search.total_len
                        );
                    }
                }
            }
            Ok(s)
        }
        other => Err(CliError::usage(format!(
            "analyze does not support --format {other:?}"
        ))),
    }
}
