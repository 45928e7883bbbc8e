//! Command-line driver for the multiplicity workbench.
//!
//! Subcommands query one space (`mult`, `cm`), run the weight-reduction
//! bookkeeping (`reduce`), sweep a grid and check the kernel bound and
//! the CM comparison rowwise (`verify`), or print oracle q-expansions
//! (`qexp`).  Reports are JSON (sweeps also CSV) with every number exact:
//! integers bare, rationals as "num/den", slopes as strings with "inf"
//! for the infinite slope.
//!
//! Exit codes: 0 success, 2 usage or precondition violation, 3 for a
//! sweep row where the kernel bound fails, 4 internal invariant failure.
//! Failures print a machine-readable {"error": {...}} object to stderr.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hecke_core::characters::{CharSpec, DirichletCharacter};
use hecke_core::cm::{self, CMCountReport};
use hecke_core::exactalg::{format_rational, Rational};
use hecke_core::modsym::cache::{Engine, CACHE_DIR_ENV};
use hecke_core::qexp::{eta_quotient, hecke_qexp, victor_miller_basis, QSeries};
use hecke_core::weightred::{reduce_weight, verify_bound, WeightReduction};
use hecke_core::{mult, Error};

#[derive(Parser)]
#[command(
    name = "hecke",
    version,
    about = "Exact multiplicities of Hecke eigenvalues on spaces of cusp forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cache directory for symbol spaces and operator matrices
    /// (default: the HECKE_CACHE_DIR environment variable).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Report format; csv applies to verify sweeps only.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Worker threads for sweeps (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Print work counters to stderr after the report.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicity of one eigenvalue of T_p, with dimensions, slopes,
    /// the CM count, and the weight-reduction verdicts.
    Mult(MultArgs),
    /// Digit decomposition of k-1 mod p^2-1 and the admissible reduced
    /// weights.
    Reduce(ReduceArgs),
    /// Sweep a (p, N, k) grid, checking the kernel bound and the CM
    /// comparison on every row.
    Verify(VerifyArgs),
    /// CM contributions to the kernel of T_p, one count per candidate
    /// discriminant.
    Cm(CmArgs),
    /// Oracle q-expansions: the echelon cusp basis at level one, or an
    /// eta quotient, optionally hit with a Hecke operator.
    Qexp(QexpArgs),
}

#[derive(Args)]
struct MultArgs {
    /// Operator index, a prime not dividing the level.
    #[arg(short = 'p', long = "prime")]
    p: u64,

    /// Level.
    #[arg(short = 'N', long = "level")]
    level: u64,

    /// Weight.
    #[arg(short = 'k', long = "weight")]
    k: i64,

    /// Character spec: "trivial" or "kronecker:D", optionally ";mod:M".
    #[arg(long, default_value = "trivial")]
    chi: String,

    /// Eigenvalue, an exact rational like "0", "-24", or "3/2".
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Args)]
struct ReduceArgs {
    /// Odd prime.
    #[arg(short = 'p', long = "prime")]
    p: u64,

    /// Even weight.
    #[arg(short = 'k', long = "weight")]
    k: i64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Primes to sweep, comma separated.
    #[arg(short = 'p', long = "primes", value_delimiter = ',', required = true)]
    primes: Vec<u64>,

    /// Levels to sweep, comma separated; every prime must be coprime to
    /// every level.
    #[arg(short = 'N', long = "levels", value_delimiter = ',', required = true)]
    levels: Vec<u64>,

    /// Smallest weight (odd weights are skipped).
    #[arg(long)]
    k_min: i64,

    /// Largest weight.
    #[arg(long)]
    k_max: i64,

    /// Character spec applied at every level.
    #[arg(long, default_value = "trivial")]
    chi: String,
}

#[derive(Args)]
struct CmArgs {
    /// Operator index, a prime not dividing the level.
    #[arg(short = 'p', long = "prime")]
    p: u64,

    /// Level.
    #[arg(short = 'N', long = "level")]
    level: u64,

    /// Weight.
    #[arg(short = 'k', long = "weight")]
    k: i64,

    /// Character spec.
    #[arg(long, default_value = "trivial")]
    chi: String,
}

#[derive(Args)]
struct QexpArgs {
    #[command(subcommand)]
    source: QexpSource,
}

#[derive(Subcommand)]
enum QexpSource {
    /// Echelonized basis of the level-one cusp space.
    Vm {
        /// Weight.
        #[arg(short = 'k', long = "weight")]
        k: i64,

        /// Number of q-expansion terms.
        #[arg(short = 'b', long = "terms")]
        b: usize,

        /// Print only the basis element with this row index.
        #[arg(long)]
        index: Option<usize>,

        /// Apply T_q to the selected element (requires --index).
        #[arg(long, value_name = "Q")]
        hecke: Option<u64>,
    },
    /// Eta quotient prod eta(d z)^e given as "d:e,d:e,...".
    Eta {
        /// Quotient spec, e.g. "3:8" or "3:2,9:2".
        #[arg(long)]
        spec: String,

        /// Level tag (the eta arguments must divide it).
        #[arg(short = 'N', long = "level")]
        level: u64,

        /// Number of q-expansion terms.
        #[arg(short = 'b', long = "terms")]
        b: usize,

        /// Apply T_q for the trivial character mod the level.
        #[arg(long, value_name = "Q")]
        hecke: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::ParityMismatch { .. }
                | Error::UnsupportedWeight(_)
                | Error::PDividesLevel { .. }
                | Error::NotPrime(_)
                | Error::NotOddPrime(_)
                | Error::PrimeTooSmall(_)
                | Error::OddWeight(_)
                | Error::NotFundamental(_)
                | Error::ClassNumberNotOne(_)
                | Error::ConductorNotDividing { .. }
                | Error::RamifiedConductor
                | Error::NonIntegralLeadingPower(_)
                | Error::NonCuspidalEta(_)
                | Error::BadCharSpec(_)
                | Error::BadEtaSpec(_)
                | Error::InsufficientPrecision { .. } => 2,
                _ => 4,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Serialize)]
struct WeightReductionOut {
    a: u64,
    b: u64,
    form: String,
    options: Vec<(u64, i64)>,
    chosen: (u64, i64),
}

impl From<&WeightReduction> for WeightReductionOut {
    fn from(r: &WeightReduction) -> WeightReductionOut {
        WeightReductionOut {
            a: r.a,
            b: r.b,
            form: r.form.as_str().to_string(),
            options: r.options.clone(),
            chosen: r.chosen,
        }
    }
}

#[derive(Serialize)]
struct Verdicts {
    theorem: Option<bool>,
    conjecture_equal: Option<bool>,
}

#[derive(Serialize)]
struct Dimensions {
    full: u64,
    new: u64,
}

#[derive(Serialize)]
struct MultiplicitySection {
    lambda: String,
    full: u64,
    new: u64,
    cm: Option<u64>,
}

#[derive(Serialize)]
struct MultEnvelope {
    version: &'static str,
    timestamp: u64,
    query: serde_json::Value,
    dimensions: Dimensions,
    multiplicity: MultiplicitySection,
    weight_reduction: Option<WeightReductionOut>,
    slopes: Vec<String>,
    verdicts: Verdicts,
}

#[derive(Serialize)]
struct ReduceEnvelope {
    version: &'static str,
    timestamp: u64,
    query: serde_json::Value,
    weight_reduction: WeightReductionOut,
}

#[derive(Serialize)]
struct CmEnvelope {
    version: &'static str,
    timestamp: u64,
    query: serde_json::Value,
    cm: CMCountReport,
}

#[derive(Serialize, Clone)]
struct SweepRow {
    p: u64,
    #[serde(rename = "N")]
    level: u64,
    k: i64,
    m_new: u64,
    k_prime: i64,
    m_new_kprime: u64,
    theorem: bool,
    m_cm: u64,
    conjecture_equal: bool,
}

#[derive(Serialize)]
struct VerifyEnvelope {
    version: &'static str,
    timestamp: u64,
    query: serde_json::Value,
    rows: Vec<SweepRow>,
    all_hold: bool,
}

#[derive(Serialize)]
struct SeriesOut {
    weight: i64,
    level: u64,
    character: String,
    precision: usize,
    coeffs: Vec<String>,
}

impl From<&QSeries> for SeriesOut {
    fn from(f: &QSeries) -> SeriesOut {
        SeriesOut {
            weight: f.weight(),
            level: f.level(),
            character: f.character().to_string(),
            precision: f.precision(),
            coeffs: f.coeffs().iter().map(format_rational).collect(),
        }
    }
}

#[derive(Serialize)]
struct QexpEnvelope {
    version: &'static str,
    timestamp: u64,
    query: serde_json::Value,
    series: Vec<SeriesOut>,
}

fn character_for(spec: &str, level: u64) -> Result<DirichletCharacter, Failure> {
    Ok(CharSpec::parse(spec)?.character()?.with_modulus(level)?)
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    Rational::from_str(s.trim())
        .map_err(|_| Failure::Usage(format!("cannot parse \"{s}\" as an exact rational")))
}

fn parse_eta_spec(s: &str) -> Result<Vec<(u64, i64)>, Failure> {
    let bad = || Failure::Core(Error::BadEtaSpec(s.to_string()));
    s.split(',')
        .map(|part| {
            let (d, e) = part.split_once(':').ok_or_else(bad)?;
            Ok((
                d.trim().parse().map_err(|_| bad())?,
                e.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn cmd_mult(engine: &Engine, a: &MultArgs) -> Result<MultEnvelope, Failure> {
    let chi = character_for(&a.chi, a.level)?;
    let lambda = parse_rational(&a.lambda)?;
    let summary = mult::multiplicity_summary(engine, a.level, a.k, &chi, a.p, &lambda)?;
    let at_zero = num_traits::Zero::is_zero(&lambda);

    let cm_report = if at_zero {
        Some(cm::multiplicity_cm(engine, a.level, a.k, &chi, a.p)?)
    } else {
        None
    };
    let reduction = reduce_weight(a.p, a.k).ok();
    let theorem = if at_zero && a.p >= 5 && a.k % 2 == 0 {
        Some(verify_bound(engine, a.p, a.level, a.k, &chi)?.holds)
    } else {
        None
    };

    Ok(MultEnvelope {
        version: VERSION,
        timestamp: timestamp(),
        query: json!({
            "command": "mult",
            "p": a.p,
            "N": a.level,
            "k": a.k,
            "chi": chi.spec_string(),
            "lambda": format_rational(&lambda),
        }),
        dimensions: Dimensions {
            full: summary.dim_full,
            new: summary.dim_new,
        },
        multiplicity: MultiplicitySection {
            lambda: format_rational(&lambda),
            full: summary.mult_full,
            new: summary.mult_new,
            cm: cm_report.as_ref().map(|r| r.m_cm_total),
        },
        weight_reduction: reduction.as_ref().map(WeightReductionOut::from),
        slopes: summary.slopes.iter().map(|s| s.to_string()).collect(),
        verdicts: Verdicts {
            theorem,
            conjecture_equal: cm_report.as_ref().map(|r| r.m_cm_total == r.m_new),
        },
    })
}

fn cmd_reduce(a: &ReduceArgs) -> Result<ReduceEnvelope, Failure> {
    let reduction = reduce_weight(a.p, a.k)?;
    Ok(ReduceEnvelope {
        version: VERSION,
        timestamp: timestamp(),
        query: json!({"command": "reduce", "p": a.p, "k": a.k}),
        weight_reduction: WeightReductionOut::from(&reduction),
    })
}

fn cmd_cm(engine: &Engine, a: &CmArgs) -> Result<CmEnvelope, Failure> {
    let chi = character_for(&a.chi, a.level)?;
    let report = cm::multiplicity_cm(engine, a.level, a.k, &chi, a.p)?;
    Ok(CmEnvelope {
        version: VERSION,
        timestamp: timestamp(),
        query: json!({
            "command": "cm",
            "p": a.p,
            "N": a.level,
            "k": a.k,
            "chi": chi.spec_string(),
        }),
        cm: report,
    })
}

/// Grid sweep: every (p, N) pair is validated up front, rows are computed
/// in parallel, and the output order is the deterministic grid order.
fn cmd_verify(engine: &Engine, a: &VerifyArgs, jobs: Option<usize>) -> Result<VerifyEnvelope, Failure> {
    for &p in &a.primes {
        for &n in &a.levels {
            if n % p == 0 {
                return Err(Failure::Usage(format!(
                    "prime {p} divides level {n}; pick coprime sweep lists"
                )));
            }
        }
    }
    let spec = CharSpec::parse(&a.chi)?;

    let mut grid = Vec::new();
    for &p in &a.primes {
        for &n in &a.levels {
            for k in a.k_min..=a.k_max {
                if k % 2 == 0 {
                    grid.push((p, n, k));
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(format!("cannot build worker pool: {e}")))?;
    let rows: Result<Vec<SweepRow>, Error> = pool.install(|| {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&(p, n, k)| {
                let chi = spec.character()?.with_modulus(n)?;
                let bound = verify_bound(engine, p, n, k, &chi)?;
                let cm_report = cm::multiplicity_cm(engine, n, k, &chi, p)?;
                Ok(SweepRow {
                    p,
                    level: n,
                    k,
                    m_new: bound.m_k_new,
                    k_prime: bound.k_prime,
                    m_new_kprime: bound.m_kprime_new,
                    theorem: bound.holds,
                    m_cm: cm_report.m_cm_total,
                    conjecture_equal: cm_report.m_cm_total == cm_report.m_new,
                })
            })
            .collect()
    });
    let rows = rows?;
    let all_hold = rows.iter().all(|r| r.theorem);

    Ok(VerifyEnvelope {
        version: VERSION,
        timestamp: timestamp(),
        query: json!({
            "command": "verify",
            "primes": a.primes,
            "levels": a.levels,
            "k_min": a.k_min,
            "k_max": a.k_max,
            "chi": a.chi,
        }),
        rows,
        all_hold,
    })
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("p,N,k,m_new,k_prime,m_new_kprime,theorem,m_cm,conjecture_equal\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.p,
            r.level,
            r.k,
            r.m_new,
            r.k_prime,
            r.m_new_kprime,
            r.theorem,
            r.m_cm,
            r.conjecture_equal
        ));
    }
    out
}

fn cmd_qexp(a: &QexpArgs) -> Result<QexpEnvelope, Failure> {
    let (query, series) = match &a.source {
        QexpSource::Vm { k, b, index, hecke } => {
            let query = json!({
                "command": "qexp",
                "source": "vm",
                "k": k,
                "terms": b,
                "index": index,
                "hecke": hecke,
            });
            let series = match (index, hecke) {
                (None, Some(_)) => {
                    return Err(Failure::Usage(
                        "--hecke needs --index to select one basis element".to_string(),
                    ));
                }
                (None, None) => victor_miller_basis(*k, *b).iter().map(SeriesOut::from).collect(),
                (Some(i), None) => {
                    let basis = victor_miller_basis(*k, *b);
                    let f = basis.get(*i).ok_or_else(|| {
                        Failure::Usage(format!("index {i} out of range: basis has {} elements", basis.len()))
                    })?;
                    vec![SeriesOut::from(f)]
                }
                (Some(i), Some(q)) => {
                    let basis = victor_miller_basis(*k, *q as usize * *b);
                    let f = basis.get(*i).ok_or_else(|| {
                        Failure::Usage(format!("index {i} out of range: basis has {} elements", basis.len()))
                    })?;
                    let chi = DirichletCharacter::trivial(1);
                    vec![SeriesOut::from(&hecke_qexp(f, *q, *k, &chi, *b)?)]
                }
            };
            (query, series)
        }
        QexpSource::Eta { spec, level, b, hecke } => {
            let query = json!({
                "command": "qexp",
                "source": "eta",
                "spec": spec,
                "N": level,
                "terms": b,
                "hecke": hecke,
            });
            let parsed = parse_eta_spec(spec)?;
            let series = match hecke {
                None => vec![SeriesOut::from(&eta_quotient(&parsed, *level, *b)?)],
                Some(q) => {
                    let f = eta_quotient(&parsed, *level, *q as usize * *b)?;
                    let chi = DirichletCharacter::trivial(*level);
                    vec![SeriesOut::from(&hecke_qexp(&f, *q, f.weight(), &chi, *b)?)]
                }
            };
            (query, series)
        }
    };
    Ok(QexpEnvelope {
        version: VERSION,
        timestamp: timestamp(),
        query,
        series,
    })
}

fn run(cli: &Cli) -> Result<(String, i32), Failure> {
    if cli.format == OutputFormat::Csv && !matches!(cli.command, Command::Verify(_)) {
        return Err(Failure::Usage(
            "csv output applies to verify sweeps only".to_string(),
        ));
    }
    let engine = Engine::new(
        cli.cache
            .clone()
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)),
    );

    let (body, code) = match &cli.command {
        Command::Mult(a) => (to_body(&cmd_mult(&engine, a)?), 0),
        Command::Reduce(a) => (to_body(&cmd_reduce(a)?), 0),
        Command::Cm(a) => (to_body(&cmd_cm(&engine, a)?), 0),
        Command::Verify(a) => {
            let envelope = cmd_verify(&engine, a, cli.jobs)?;
            let code = if envelope.all_hold { 0 } else { 3 };
            let body = match cli.format {
                OutputFormat::Json => to_body(&envelope),
                OutputFormat::Csv => sweep_csv(&envelope.rows),
            };
            (body, code)
        }
        Command::Qexp(a) => (to_body(&cmd_qexp(a)?), 0),
    };

    if cli.verbose {
        eprintln!("{}", json!({"counters": engine.counters()}));
    }
    Ok((body, code))
}

fn to_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprintln!(
                "{}",
                json!({"error": {"exit": 2, "message": e.to_string()}})
            );
            std::process::exit(2);
        }
    };

    match run(&cli) {
        Ok((body, code)) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &body) {
                        eprintln!(
                            "{}",
                            json!({"error": {"exit": 4, "message": format!("cannot write {}: {e}", path.display())}})
                        );
                        std::process::exit(4);
                    }
                }
                None => print!("{body}"),
            }
            std::process::exit(code);
        }
        Err(f) => {
            eprintln!(
                "{}",
                json!({"error": {"exit": f.exit_code(), "message": f.message()}})
            );
            std::process::exit(f.exit_code());
        }
    }
}
