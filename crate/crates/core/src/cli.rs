//! Command-line interface.
//!
//! Exit codes: `0` on success, `1` if any verdict is violated (or a Monte
//! Carlo check misses its tolerance), `2` on usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, Claim, SuiteConfig, VerificationReport, Verdict};
use crate::divergence::{self, ConeDensities, Direction, Generator};
use crate::error::{Error, Result};
use crate::functionals::{homogeneity_degree, weighted_asa, Exponent, WeightIndex};
use crate::geometry::file::{load_corpus, write_corpus, BodyFile, BodyType};
use crate::geometry::SupportBody;
use crate::quadrature::RuleSpec;
use crate::randpoly;
use crate::tolerances::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "curvfun", version, about = "Curvature functionals of smooth convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write records to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file overriding default tolerances.
    #[arg(long)]
    tolerances: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BodyArgs {
    /// Body specification file.
    #[arg(long)]
    body: PathBuf,
    /// Quadrature rule, `N` for n = 2 or `NxM` for n = 3.
    #[arg(long)]
    rule: Option<RuleSpec>,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k: f64,
    /// Comma-separated `i_1,…,i_{n-1}`; empty means all zero.
    #[arg(long, default_value = "")]
    i: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one weighted affine surface area.
    Eval {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: Exponent,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate along a grid of exponents.
    Sweep {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        /// `a:b:steps[:log]` or a comma-separated list.
        #[arg(long = "p-grid", allow_hyphen_values = true)]
        p_grid: String,
        #[command(flatten)]
        output: Output,
    },
    /// f-divergences of the cone measures.
    Divergence {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        /// kl | kl-rev | hellinger:A | renyi:A | power:A | sqrt
        #[arg(long)]
        gen: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check inequalities, monotonicity and limits.
    Verify {
        #[command(subcommand)]
        claim: VerifyCommand,
    },
    /// Monte Carlo volume deficit of random inscribed polytopes.
    #[command(name = "mc-polytope")]
    McPolytope {
        #[arg(long)]
        body: PathBuf,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        p: Exponent,
        /// Comma-separated numbers of points.
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_points: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Allow runs in ℝ³.
        #[arg(long = "dim-3-ok")]
        dim_3_ok: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Write the canonical body corpus.
    #[command(name = "corpus-gen")]
    CorpusGen {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Holder3 {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        output: Output,
    },
    Holdervol {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        output: Output,
    },
    Kinterp {
        #[command(flatten)]
        body: BodyArgs,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value = "")]
        i: String,
        #[arg(long, allow_hyphen_values = true)]
        p: Exponent,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[command(flatten)]
        output: Output,
    },
    Monotone {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long = "p-grid", default_value = "0.25,0.5,1,2,4,8,16", allow_hyphen_values = true)]
        p_grid: String,
        #[command(flatten)]
        output: Output,
    },
    Petty {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        output: Output,
    },
    #[command(name = "limit-inf")]
    LimitInf {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,30,100,300,1000")]
        schedule: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    #[command(name = "limit-zero")]
    LimitZero {
        #[command(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.1,0.03,0.01")]
        schedule: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run every check on a directory of body files.
    All {
        #[arg(long)]
        corpus: PathBuf,
        /// Emit per-claim verdict counts instead of individual reports.
        #[arg(long)]
        summary: bool,
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    let text = e.to_string();
                    let message: Vec<&str> = text
                        .lines()
                        .take_while(|l| !l.starts_with("Usage:"))
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .collect();
                    eprintln!("{}", message.join(" "));
                    EXIT_USAGE
                }
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            EXIT_USAGE
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("CURVFUN_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::InvalidParameters(format!("CURVFUN_THREADS must be a positive integer, got `{value}`")))?;
        // a pool that is already initialized keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Eval { body, index, p, output } => {
            let (spec, loaded) = load(&body.body)?;
            let index = index.build(loaded.dim())?;
            let sampled = loaded.sample(&rule_for(&body, loaded.dim())?.build()?)?;
            let record = value_record(&spec, &sampled, &index, p)?;
            emit(&output, &[&record], &[&record])?;
            Ok(EXIT_OK)
        }
        Command::Sweep { body, index, p_grid, output } => {
            let (spec, loaded) = load(&body.body)?;
            let index = index.build(loaded.dim())?;
            let sampled = loaded.sample(&rule_for(&body, loaded.dim())?.build()?)?;
            let records = parse_grid(&p_grid)?
                .into_iter()
                .map(|p| value_record(&spec, &sampled, &index, Exponent::Finite(p)))
                .collect::<Result<Vec<_>>>()?;
            emit(&output, &records, &records)?;
            Ok(EXIT_OK)
        }
        Command::Divergence { body, index, gen, output } => {
            let (_, loaded) = load(&body.body)?;
            let index = index.build(loaded.dim())?;
            let sampled = loaded.sample(&rule_for(&body, loaded.dim())?.build()?)?;
            let densities = ConeDensities::new(&sampled, &index)?;
            let record = divergence_record(&sampled, &index, &densities, &gen)?;
            emit(&output, &[&record], &[&record])?;
            Ok(EXIT_OK)
        }
        Command::Verify { claim } => verify(claim),
        Command::McPolytope {
            body,
            index,
            p,
            n_points,
            trials,
            seed,
            dim_3_ok,
            output,
        } => mc_polytope(&body, index, p, &n_points, trials, seed, dim_3_ok, &output),
        Command::CorpusGen { out } => {
            for path in write_corpus(&out)? {
                let body = BodyFile::load(&path)?;
                let check = body.check_oracle(&RuleSpec::default_for(body.dim())?.build()?);
                if !check.is_valid() {
                    return Err(Error::BodyFile(format!("{} fails the validity gate: {check:?}", path.display())));
                }
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn load(path: &Path) -> Result<(BodyFile, SupportBody)> {
    let spec = BodyFile::read(path)?;
    let body = BodyFile::load(path)?;
    Ok((spec, body))
}

fn rule_for(args: &BodyArgs, dim: usize) -> Result<RuleSpec> {
    match args.rule {
        Some(rule) if rule.dim() != dim => Err(Error::InvalidRule(format!("rule {rule} does not fit dimension {dim}"))),
        Some(rule) => Ok(rule),
        None => RuleSpec::default_for(dim),
    }
}

fn parse_counts(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::InvalidIndex(format!("cannot parse i entry `{s}`"))))
        .collect()
}

impl IndexArgs {
    fn build(&self, dim: usize) -> Result<WeightIndex> {
        WeightIndex::new(dim, self.m, self.k, &parse_counts(&self.i)?)
    }
}

fn load_tolerances(output: &Output) -> Result<Tolerances> {
    match &output.tolerances {
        Some(path) => Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?),
        None => Ok(Tolerances::default()),
    }
}

/// `a:b:steps[:log]` or `p1,p2,…`.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameters(format!("cannot parse p grid `{text}`"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        if steps < 2 || !a.is_finite() || !b.is_finite() {
            return Err(bad());
        }
        if log && !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameters("log grids need positive endpoints".into()));
        }
        Ok((0..steps)
            .map(|j| {
                let f = j as f64 / (steps - 1) as f64;
                if j == 0 {
                    a
                } else if j == steps - 1 {
                    b
                } else if log {
                    (a.ln() + f * (b.ln() - a.ln())).exp()
                } else {
                    a + f * (b - a)
                }
            })
            .collect())
    } else {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad()))
            .collect()
    }
}

fn write_output(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Writes `records` as JSON or `rows` as CSV.
fn emit<J: Serialize, C: Serialize>(output: &Output, records: &[J], rows: &[C]) -> Result<()> {
    let mut text = String::new();
    match output.format {
        Format::Json => {
            for r in records {
                text.push_str(&serde_json::to_string(r)?);
                text.push('\n');
            }
        }
        Format::Pretty => {
            for r in records {
                text.push_str(&serde_json::to_string_pretty(r)?);
                text.push('\n');
            }
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for r in rows {
                writer
                    .serialize(r)
                    .map_err(|e| Error::InvalidParameters(format!("csv: {e}")))?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Error::InvalidParameters(format!("csv: {e}")))?;
            text = String::from_utf8(bytes).expect("csv output is utf-8");
        }
    }
    write_output(output, &text)
}

fn counts_text(index: &WeightIndex) -> String {
    index.counts().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct ValueRecord {
    body: String,
    dim: usize,
    m: u32,
    k: f64,
    i: String,
    p: String,
    rule: String,
    value: f64,
    target: Option<f64>,
    target_source: Option<&'static str>,
}

fn sphere_area(dim: usize) -> f64 {
    if dim == 2 {
        2.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    }
}

/// Closed-form value for centred balls and for ellipsoids at the zero index.
fn closed_form(spec: &BodyFile, index: &WeightIndex, p: Exponent) -> Option<(f64, &'static str)> {
    if spec.translate.as_ref().is_some_and(|t| t.iter().any(|&c| c != 0.0)) {
        return None;
    }
    let n = spec.dim;
    match spec.kind {
        BodyType::Ball => {
            let radius = spec.radius.unwrap_or(1.0);
            let degree = homogeneity_degree(n, p, index.k()).ok()?;
            let value = index.combinatorial_constant() as f64 * sphere_area(n) * radius.powf(degree);
            Some((value, "ball: c_n * area(S^{n-1}) * R^degree"))
        }
        BodyType::Ellipsoid if index.is_zero() && index.counts().iter().all(|&c| c == 0) => {
            let product: f64 = spec.semi_axes.as_ref()?.iter().product();
            let exponent = match p {
                Exponent::Finite(p) => (n as f64 - p) / (n as f64 + p),
                Exponent::Infinity => -1.0,
            };
            Some((sphere_area(n) * product.powf(exponent), "ellipsoid: area(S^{n-1}) * (prod a_i)^((n-p)/(n+p))"))
        }
        _ => None,
    }
}

fn value_record(spec: &BodyFile, sampled: &crate::SampledBody, index: &WeightIndex, p: Exponent) -> Result<ValueRecord> {
    let value = weighted_asa(sampled, index, p)?;
    let target = closed_form(spec, index, p);
    Ok(ValueRecord {
        body: value.body,
        dim: sampled.dim(),
        m: index.m(),
        k: index.k(),
        i: counts_text(index),
        p: p.to_string(),
        rule: sampled.rule().to_string(),
        value: value.value,
        target: target.map(|t| t.0),
        target_source: target.map(|t| t.1),
    })
}

#[derive(Serialize)]
struct DivergenceRecord {
    body: String,
    dim: usize,
    m: u32,
    k: f64,
    i: String,
    rule: String,
    generator: String,
    value: f64,
    normalized: Option<f64>,
    jensen_rhs: Option<f64>,
    jensen_rhs_stated: Option<f64>,
    jensen_holds: Option<bool>,
}

fn parse_param(text: &str, name: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|a| a.is_finite())
        .ok_or_else(|| Error::InvalidParameters(format!("cannot parse {name} parameter `{text}`")))
}

fn divergence_record(
    sampled: &crate::SampledBody,
    index: &WeightIndex,
    densities: &ConeDensities,
    gen: &str,
) -> Result<DivergenceRecord> {
    let (name, arg) = match gen.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (gen, None),
    };
    let mut record = DivergenceRecord {
        body: sampled.label().to_string(),
        dim: sampled.dim(),
        m: index.m(),
        k: index.k(),
        i: counts_text(index),
        rule: sampled.rule().to_string(),
        generator: gen.to_string(),
        value: f64::NAN,
        normalized: None,
        jensen_rhs: None,
        jensen_rhs_stated: None,
        jensen_holds: None,
    };
    let with_jensen = |mut record: DivergenceRecord, g: &Generator| -> Result<DivergenceRecord> {
        let j = divergence::jensen_bound(densities, g)?;
        record.value = j.lhs;
        record.jensen_rhs = Some(j.rhs);
        record.jensen_rhs_stated = Some(j.rhs_stated);
        record.jensen_holds = Some(j.holds);
        Ok(record)
    };
    match (name, arg) {
        ("kl", None) | ("kl-rev", None) => {
            let dir = if name == "kl" { Direction::PQ } else { Direction::QP };
            record.value = divergence::kl_divergence(densities, dir);
            record.normalized = Some(divergence::normalized_kl(densities, dir));
            Ok(record)
        }
        ("hellinger", Some(a)) => {
            record.value = divergence::hellinger(densities, parse_param(a, "hellinger")?);
            Ok(record)
        }
        ("renyi", Some(a)) => {
            record.value = divergence::renyi(densities, parse_param(a, "renyi")?)?;
            Ok(record)
        }
        ("power", Some(a)) => with_jensen(record, &Generator::power(parse_param(a, "power")?)),
        ("sqrt", None) => with_jensen(record, &Generator::sqrt()),
        _ => Err(Error::InvalidParameters(format!(
            "unknown generator `{gen}`; expected kl, kl-rev, hellinger:A, renyi:A, power:A or sqrt"
        ))),
    }
}

#[derive(Serialize)]
struct VerificationRow {
    claim: String,
    body: String,
    rule: String,
    m: Option<u32>,
    k: Option<f64>,
    i: Option<String>,
    params: String,
    lhs: f64,
    rhs: f64,
    slack: f64,
    verdict: String,
    strict: bool,
    equality_case: bool,
    alternate_rhs: Option<f64>,
    note: Option<String>,
}

impl From<&VerificationReport> for VerificationRow {
    fn from(r: &VerificationReport) -> Self {
        Self {
            claim: r.claim.to_string(),
            body: r.body.clone(),
            rule: r.rule.to_string(),
            m: r.index.as_ref().map(|i| i.m()),
            k: r.index.as_ref().map(|i| i.k()),
            i: r.index.as_ref().map(counts_text),
            params: r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            verdict: r.verdict.to_string(),
            strict: r.strict,
            equality_case: r.equality_case,
            alternate_rhs: r.alternate_rhs,
            note: r.note.clone(),
        }
    }
}

fn emit_reports(output: &Output, reports: &[VerificationReport]) -> Result<i32> {
    let rows: Vec<VerificationRow> = reports.iter().map(VerificationRow::from).collect();
    emit(output, reports, &rows)?;
    Ok(exit_for(reports))
}

fn exit_for(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct SummaryRow {
    claim: String,
    holds: usize,
    equality: usize,
    violated: usize,
    inadmissible: usize,
    strict: usize,
}

fn sampled_with_index(body: &BodyArgs, index: &IndexArgs) -> Result<(SupportBody, crate::SampledBody, WeightIndex)> {
    let (_, loaded) = load(&body.body)?;
    let index = index.build(loaded.dim())?;
    let sampled = loaded.sample(&rule_for(body, loaded.dim())?.build()?)?;
    Ok((loaded, sampled, index))
}

fn verify(claim: VerifyCommand) -> Result<i32> {
    match claim {
        VerifyCommand::Holder3 { body, index, r, s, t, output } => {
            let tol = load_tolerances(&output)?;
            let (_, sampled, index) = sampled_with_index(&body, &index)?;
            emit_reports(&output, &[analysis::verify_holder_three(&sampled, &index, r, s, t, &tol)?])
        }
        VerifyCommand::Holdervol { body, index, r, t, output } => {
            let tol = load_tolerances(&output)?;
            let (_, sampled, index) = sampled_with_index(&body, &index)?;
            emit_reports(&output, &[analysis::verify_holder_volume(&sampled, &index, r, t, &tol)?])
        }
        VerifyCommand::Kinterp {
            body,
            m,
            i,
            p,
            r,
            s,
            k,
            output,
        } => {
            let tol = load_tolerances(&output)?;
            let index = IndexArgs { m, k: 0.0, i };
            let (_, sampled, index) = sampled_with_index(&body, &index)?;
            emit_reports(&output, &[analysis::verify_k_interpolation(&sampled, &index, p, r, s, k, &tol)?])
        }
        VerifyCommand::Monotone { body, index, p_grid, output } => {
            let tol = load_tolerances(&output)?;
            let (_, sampled, index) = sampled_with_index(&body, &index)?;
            let scan = analysis::monotonicity_scan(&sampled, &index, &parse_grid(&p_grid)?, &tol)?;
            let reports = scan.reports();
            let rows: Vec<VerificationRow> = reports.iter().map(VerificationRow::from).collect();
            emit(&output, &[&scan], &rows)?;
            Ok(exit_for(&reports))
        }
        VerifyCommand::Petty { body, output } => {
            let tol = load_tolerances(&output)?;
            let (_, loaded) = load(&body.body)?;
            let sampled = loaded.sample(&rule_for(&body, loaded.dim())?.build()?)?;
            emit_reports(&output, &[analysis::petty_report(&sampled, &tol)])
        }
        VerifyCommand::LimitInf { body, index, schedule, output } => {
            let tol = load_tolerances(&output)?;
            let (_, sampled, index) = sampled_with_index(&body, &index)?;
            let limit = analysis::limit_p_infinity(&sampled, &index, &schedule, &tol)?;
            let reports = [limit.report()];
            let rows: Vec<VerificationRow> = reports.iter().map(VerificationRow::from).collect();
            emit(&output, &[&limit], &rows)?;
            Ok(exit_for(&reports))
        }
        VerifyCommand::LimitZero { body, index, schedule, output } => {
            let tol = load_tolerances(&output)?;
            let (loaded, _, index) = sampled_with_index(&body, &index)?;
            let rule = rule_for(&body, loaded.dim())?;
            let limit = analysis::limit_p_zero(&loaded, &index, rule, &schedule, &tol)?;
            let reports = [limit.report()];
            let rows: Vec<VerificationRow> = reports.iter().map(VerificationRow::from).collect();
            emit(&output, &[&limit], &rows)?;
            Ok(exit_for(&reports))
        }
        VerifyCommand::All { corpus, summary, output } => {
            let config = SuiteConfig {
                tolerances: load_tolerances(&output)?,
                ..SuiteConfig::default()
            };
            let bodies = load_corpus(&corpus)?;
            let suite = analysis::run_suite(&bodies, &config)?;
            let reports = suite.all_reports();
            if summary {
                let mut claims: Vec<Claim> = reports.iter().map(|r| r.claim).collect();
                claims.sort();
                claims.dedup();
                let rows: Vec<SummaryRow> = claims
                    .iter()
                    .map(|&c| {
                        let of = |v: Verdict| reports.iter().filter(|r| r.claim == c && r.verdict == v).count();
                        SummaryRow {
                            claim: c.to_string(),
                            holds: of(Verdict::Holds),
                            equality: of(Verdict::Equality),
                            violated: of(Verdict::Violated),
                            inadmissible: of(Verdict::Inadmissible),
                            strict: reports.iter().filter(|r| r.claim == c && r.strict).count(),
                        }
                    })
                    .collect();
                emit(&output, &rows, &rows)?;
                Ok(exit_for(&reports))
            } else {
                emit_reports(&output, &reports)
            }
        }
    }
}

#[derive(Serialize)]
struct McRecord {
    body: String,
    kind: &'static str,
    n_points: Option<usize>,
    trials: usize,
    seed: u64,
    mean_deficit: Option<f64>,
    std_error: Option<f64>,
    scaled: f64,
    scaled_std_error: f64,
    target: f64,
    ratio: f64,
}

#[allow(clippy::too_many_arguments)]
fn mc_polytope(
    body: &Path,
    index: IndexArgs,
    p: Exponent,
    schedule: &[usize],
    trials: usize,
    seed: u64,
    dim_3_ok: bool,
    output: &Output,
) -> Result<i32> {
    let tol = load_tolerances(output)?;
    let loaded = BodyFile::load(body)?;
    let dim = loaded.dim();
    if dim == 3 && !dim_3_ok {
        return Err(Error::InvalidParameters("n = 3 Monte Carlo is slow and informational; pass --dim-3-ok".into()));
    }
    let index = index.build(dim)?;
    let mut records = Vec::new();
    let code = if schedule.len() == 1 {
        let rule = RuleSpec::default_for(dim)?;
        let density = randpoly::BoundaryDensity::new(&loaded, &index, p, rule)?;
        let omega = weighted_asa(&loaded.sample(&rule.build()?)?, &index, p)?.value;
        let target = randpoly::random_polytope_constant(dim) * density.normalizer().powf(2.0 / (dim as f64 - 1.0)) * omega;
        let e = randpoly::expected_deficit(&density, schedule[0], trials, seed)?;
        records.push(McRecord {
            body: loaded.label().to_string(),
            kind: "estimate",
            n_points: Some(e.n_points),
            trials,
            seed,
            mean_deficit: Some(e.mean_deficit),
            std_error: Some(e.std_error),
            scaled: e.scaled,
            scaled_std_error: e.scaled_std_error,
            target,
            ratio: e.scaled / target,
        });
        EXIT_OK
    } else {
        let report = randpoly::interpretation_check(&loaded, &index, p, schedule, trials, seed, &tol)?;
        for e in &report.estimates {
            records.push(McRecord {
                body: report.body.clone(),
                kind: "estimate",
                n_points: Some(e.n_points),
                trials,
                seed,
                mean_deficit: Some(e.mean_deficit),
                std_error: Some(e.std_error),
                scaled: e.scaled,
                scaled_std_error: e.scaled_std_error,
                target: report.target,
                ratio: e.scaled / report.target,
            });
        }
        records.push(McRecord {
            body: report.body.clone(),
            kind: "extrapolated",
            n_points: None,
            trials,
            seed,
            mean_deficit: None,
            std_error: None,
            scaled: report.extrapolated,
            scaled_std_error: report.extrapolated_std_error,
            target: report.target,
            ratio: report.ratio,
        });
        if report.within_tolerance || report.informational {
            EXIT_OK
        } else {
            EXIT_VIOLATED
        }
    };
    emit(output, &records, &records)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("1:100:3:log").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
        assert_eq!(parse_grid("-1, 2,7").unwrap(), vec![-1.0, 2.0, 7.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("-1:1:3:log").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn index_parsing() {
        let args = IndexArgs { m: 2, k: 0.0, i: " 0, 1".into() };
        assert_eq!(args.build(3).unwrap().counts(), &[0, 1]);
        let empty = IndexArgs { m: 0, k: 0.0, i: String::new() };
        assert!(empty.build(2).unwrap().is_zero());
        let bad = IndexArgs { m: 1, k: 0.0, i: "x".into() };
        assert!(bad.build(2).is_err());
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["curvfun", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["curvfun", "eval", "--body", "/nonexistent.json", "--p", "1"]), EXIT_USAGE);
        assert_eq!(run(["curvfun", "--help"]), EXIT_OK);
    }
}
