use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mzquad::approx::write_error_csv;
use mzquad::experiments::{approx_bench, scan, BenchConfig, ScanGrid, ScanKind, ScanSpec};
use mzquad::mz::analyze;
use mzquad::rules::{load_rule, serialize_rule, verify_ade};
use mzquad::{DataSource, Domain, DomainKind, Measure, MzError, RuleFamily};

const EXIT_NO_MZ: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_CANT_CREATE: u8 = 73;

/// Marcinkiewicz-Zygmund constants of cubature rules and the approximation
/// schemes built on them.
#[derive(Debug, Parser)]
#[command(name = "mzquad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// MZ report for one rule and degree, as JSON on stdout.
    Report(ReportArgs),
    /// Grid of eta over (m, n).
    ScanEta(ScanArgs),
    /// Grid of cond2(G) over (m, n).
    ScanCond(ScanArgs),
    /// Relative L2 errors of hyperinterpolation and least squares.
    Bench(BenchArgs),
    /// Writes a constructed rule in the text format.
    RuleDump(DumpArgs),
    /// Parses a rule file and certifies its degree of exactness.
    RuleCheck(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Lebesgue,
    Cheb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct DomainArgs {
    #[arg(long, value_parser = parse_kind)]
    domain: DomainKind,
    #[arg(long, value_enum, default_value = "lebesgue")]
    measure: MeasureArg,
}

impl DomainArgs {
    fn resolve(&self) -> mzquad::Result<Domain> {
        let measure = match self.measure {
            MeasureArg::Lebesgue => Measure::Lebesgue,
            MeasureArg::Cheb => Measure::ProductChebyshev,
        };
        Domain::new(self.domain, measure)
    }
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, value_parser = parse_family, required_unless_present = "rule_file")]
    family: Option<RuleFamily>,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, required_unless_present = "rule_file")]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    /// Read the rule from this file instead of constructing it.
    #[arg(long)]
    rule_file: Option<PathBuf>,
    /// ADE claimed for the rule file, overriding its header.
    #[arg(long)]
    ade: Option<usize>,
    #[arg(long, env = "MZQUAD_DATA_DIR")]
    data_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, value_parser = parse_family)]
    family: RuleFamily,
    #[command(flatten)]
    domain: DomainArgs,
    /// Single value or inclusive range `a:b`; default 1:20.
    #[arg(long, value_parser = parse_range)]
    m: Option<RangeInclusive<usize>>,
    /// Single value or inclusive range `a:b`; default 0:30 (0:20 for qmc).
    #[arg(long, value_parser = parse_range)]
    n: Option<RangeInclusive<usize>>,
    #[arg(long, env = "MZQUAD_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; default is one per logical processor.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_kind)]
    domain: DomainKind,
    /// ADE of the low-exactness rule (log2 of the point count on the cube).
    #[arg(long, default_value_t = 15)]
    ade: usize,
    #[arg(long, default_value_t = 15)]
    n_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[arg(long, value_parser = parse_family)]
    family: RuleFamily,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    m: usize,
    #[arg(long, env = "MZQUAD_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    ade: Option<usize>,
}

fn parse_kind(s: &str) -> Result<DomainKind, String> {
    s.parse().map_err(|e: MzError| e.to_string())
}

fn parse_family(s: &str) -> Result<RuleFamily, String> {
    s.parse().map_err(|e: MzError| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad bound '{t}': {e}"));
    let r = match s.split_once(':') {
        Some((a, b)) => num(a)?..=num(b)?,
        None => {
            let v = num(s)?;
            v..=v
        }
    };
    if r.is_empty() {
        return Err(format!("empty range '{s}'"));
    }
    Ok(r)
}

fn range_token(r: &RangeInclusive<usize>) -> String {
    format!("{}:{}", r.start(), r.end())
}

fn data_source(dir: &Option<PathBuf>) -> DataSource {
    dir.clone().map_or(DataSource::Fixtures, DataSource::Dir)
}

fn data_token(dir: &Option<PathBuf>) -> String {
    dir.as_ref().map_or("fixtures".to_string(), |d| d.display().to_string())
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<MzError> for Failure {
    fn from(e: MzError) -> Self {
        let code = match &e {
            MzError::DatasetMissing(_) => EXIT_NO_INPUT,
            MzError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_NO_INPUT,
            MzError::InvalidDomain(_) | MzError::Unsupported(_) | MzError::InvalidArgument(_) => EXIT_USAGE,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match out {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(path) => File::create(path)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure {
                code: EXIT_CANT_CREATE,
                message: format!("cannot write {}: {e}", path.display()),
            }),
    }
}

fn write_failure(path: &Option<PathBuf>, e: impl std::fmt::Display) -> Failure {
    let target = path.as_deref().unwrap_or(Path::new("<stdout>"));
    Failure {
        code: EXIT_CANT_CREATE,
        message: format!("cannot write {}: {e}", target.display()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Report(a) => cmd_report(a),
        Command::ScanEta(a) => cmd_scan(ScanKind::Eta, a),
        Command::ScanCond(a) => cmd_scan(ScanKind::Cond, a),
        Command::Bench(a) => cmd_bench(a),
        Command::RuleDump(a) => cmd_dump(a),
        Command::RuleCheck(a) => cmd_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mzquad: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_report(a: ReportArgs) -> Result<u8, Failure> {
    let domain = a.domain.resolve()?;
    let (rule, config) = match &a.rule_file {
        Some(path) => (
            load_rule(path, domain, a.ade)?,
            format!("# mzquad report rule-file={} domain={domain} n={}", path.display(), a.n),
        ),
        None => {
            let family = a.family.expect("clap enforces --family");
            let m = a.m.expect("clap enforces --m");
            (
                family.build(domain, m, &data_source(&a.data_dir))?,
                format!(
                    "# mzquad report family={family} domain={domain} m={m} n={} data={}",
                    a.n,
                    data_token(&a.data_dir)
                ),
            )
        }
    };
    eprintln!("{config}");
    let report = analyze(&rule, a.n)?;
    let text = serde_json::to_string_pretty(&report.to_json()).expect("json");
    println!("{text}");
    Ok(if report.has_mz_property() { 0 } else { EXIT_NO_MZ })
}

fn cmd_scan(kind: ScanKind, a: ScanArgs) -> Result<u8, Failure> {
    let domain = a.domain.resolve()?;
    let defaults = ScanSpec::new(kind, a.family, domain);
    let spec = ScanSpec {
        m: a.m.clone().unwrap_or(defaults.m.clone()),
        n: a.n.clone().unwrap_or(defaults.n.clone()),
        data: data_source(&a.data_dir),
        jobs: a.jobs,
        ..defaults
    };
    let name = match kind {
        ScanKind::Eta => "scan-eta",
        ScanKind::Cond => "scan-cond",
    };
    let config = format!(
        "mzquad {name} family={} domain={domain} m={} n={} data={} format={}",
        a.family,
        range_token(&spec.m),
        range_token(&spec.n),
        data_token(&a.data_dir),
        if a.format == Format::Csv { "csv" } else { "json" },
    );
    let mut out = open_output(&a.out)?;
    let grid = scan(&spec)?;
    write_grid(&grid, &config, a.format, &mut out).map_err(|e| write_failure(&a.out, e))?;
    let s = grid.summary();
    let buckets: Vec<String> = s.buckets.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!(
        "cells={} computed={} skipped={} eta<1={} cond2 buckets: {}",
        s.cells,
        s.computed,
        s.skipped,
        s.eta_below_one,
        buckets.join(" ")
    );
    Ok(0)
}

fn write_grid(grid: &ScanGrid, config: &str, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# {config}")?;
            grid.write_csv(&mut *out).map_err(io::Error::other)?;
        }
        Format::Json => {
            let v = serde_json::json!({ "config": config, "grid": grid.to_json() });
            serde_json::to_writer_pretty(&mut *out, &v)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Failure> {
    let domain = Domain::new(a.domain, Measure::Lebesgue)?;
    if a.n_max == 0 {
        return Err(Failure {
            code: EXIT_USAGE,
            message: "--n-max must be at least 1".into(),
        });
    }
    let mut out = open_output(&a.out)?;
    let run = approx_bench(&BenchConfig {
        domain,
        build_ade: a.ade,
        n_max: a.n_max,
    })?;
    let config = format!(
        "mzquad bench domain={domain} ade={} n_max={} relaxed={} M={} classical=gl M_classical={} reference_ade=50 M_reference={}",
        a.ade,
        a.n_max,
        run.relaxed_family,
        run.relaxed_nodes,
        run.classical_nodes,
        run.reference_nodes
    );
    let written: io::Result<()> = (|| {
        match a.format {
            Format::Csv => {
                writeln!(out, "# {config}")?;
                write_error_csv(&run.records, &mut out).map_err(io::Error::other)?;
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = run
                    .records
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "domain": r.domain.to_string(),
                            "family": r.family,
                            "ade": r.ade,
                            "n": r.n,
                            "method": r.method.token(),
                            "fid": r.fid,
                            "relerr": if r.relerr.is_finite() { serde_json::json!(r.relerr) } else { serde_json::Value::Null },
                            "failure": r.failure,
                        })
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "config": config, "records": rows }))?;
                writeln!(out)?;
            }
        }
        out.flush()
    })();
    written.map_err(|e| write_failure(&a.out, e))?;
    let failed = run.records.iter().filter(|r| r.failure.is_some()).count();
    eprintln!("records={} failed={failed}", run.records.len());
    Ok(0)
}

fn cmd_dump(a: DumpArgs) -> Result<u8, Failure> {
    let domain = a.domain.resolve()?;
    let rule = a.family.build(domain, a.m, &data_source(&a.data_dir))?;
    let mut out = open_output(&a.out)?;
    out.write_all(serialize_rule(&rule).as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| write_failure(&a.out, e))?;
    Ok(0)
}

fn cmd_check(a: CheckArgs) -> Result<u8, Failure> {
    let domain = a.domain.resolve()?;
    let rule = load_rule(&a.file, domain, a.ade)?;
    let residual = match rule.ade() {
        Some(m) => Some(verify_ade(&rule, m)?),
        None => None,
    };
    let ok = residual.is_none_or(|r| r <= 1e-10);
    let v = serde_json::json!({
        "file": a.file.display().to_string(),
        "domain": domain.to_string(),
        "provenance": rule.provenance().to_string(),
        "M": rule.len(),
        "ade": rule.ade(),
        "ade_residual": residual,
        "weight_sum": rule.weight_sum(),
        "mass": domain.mass(),
        "min_weight": rule.min_weight(),
        "max_weight": rule.max_weight(),
        "ade_verified": ok,
    });
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    Ok(if ok { 0 } else { 1 })
}
