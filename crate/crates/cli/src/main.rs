use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orbitcount::arith::rational::parse_rational;
use orbitcount::asympt::{fit_report, FitReport, Window};
use orbitcount::counting::{count_series, CountSeries};
use orbitcount::Mode;
use orbitcount_cli::config::{load_config, resolve, Overrides, Resolved};
use orbitcount_cli::oracle::{compare, Comparison};
use orbitcount_cli::series_io::{header_value, read_series, write_series};
use orbitcount_cli::validate::{validate, Status, ValidationReport};
use orbitcount_cli::{CliResult, Failure};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "orbitcount", version, about = "Exact orbit counts of integral points on homogeneous varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypotheses the counting laws need.
    Validate(Common),
    /// Count orbits level by level and write the series as CSV.
    Count(Common),
    /// Fit `S(r) ~ c·r^λ` and report predicted constants as JSON.
    Fit(WithSeries),
    /// Compare the series with an independent oracle.
    OracleCompare(WithSeries),
    /// Validate, count, fit and compare, writing every artifact to --out.
    Report(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario: zsqrt2, gauss, model-quadric, lipschitz, hurwitz.
    #[arg(long)]
    preset: Option<String>,
    /// Largest level counted (integer or p/q).
    #[arg(long)]
    rmax: Option<String>,
    /// `exact` or `box:B`.
    #[arg(long)]
    mode: Option<String>,
    /// Count primitive points and aggregate the rest.
    #[arg(long)]
    primitive_only: bool,
    /// Act by the whole unit group on `|N| = k`.
    #[arg(long)]
    full_group: bool,
    /// Accept unsaturated box-mode counts.
    #[arg(long)]
    allow_heuristic: bool,
    /// Compare `S_all / S_prim` with the zeta factor in fit reports.
    #[arg(long)]
    aggregation: bool,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct WithSeries {
    #[command(flatten)]
    common: Common,
    /// Series CSV from `count`; computed afresh when absent.
    #[arg(long)]
    series: Option<PathBuf>,
}

fn settle(c: &Common) -> CliResult<Resolved> {
    let file = c.config.as_deref().map(load_config).transpose()?;
    let r_max = c
        .rmax
        .as_deref()
        .map(|s| parse_rational(s).map_err(|e| Failure::validation(format!("--rmax: {e}"))))
        .transpose()?;
    let mode = c
        .mode
        .as_deref()
        .map(|s| s.parse::<Mode>().map_err(|e| Failure::validation(format!("--mode: {e}"))))
        .transpose()?;
    let o = Overrides {
        preset: c.preset.clone(),
        r_max,
        mode,
        primitive_only: c.primitive_only,
        full_group: c.full_group,
        allow_heuristic: c.allow_heuristic,
        jobs: c.jobs,
        out: c.out.clone(),
        aggregation: c.aggregation,
    };
    let r = resolve(file, &o)?;
    if let Some(j) = r.jobs {
        if j == 0 {
            return Err(Failure::validation("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::validation(format!("thread pool: {e}")))?;
    }
    Ok(r)
}

/// Writes to `dir/name`, or to standard output without a directory.
fn emit(dir: Option<&Path>, name: &str, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            let mut w = BufWriter::new(File::create(d.join(name))?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn json_to(w: &mut dyn Write, v: &impl Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, v).map_err(|e| Failure::validation(format!("JSON write failed: {e}")))?;
    writeln!(w)?;
    Ok(())
}

fn print_checks(report: &ValidationReport) {
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Undetermined => "undetermined",
            Status::Fail => "FAIL",
        };
        eprintln!("{tag:>12}  {}: {}", c.name, c.detail);
    }
}

fn run_validate(r: &Resolved) -> CliResult<ValidationReport> {
    let report = validate(&r.scenario, r.config_sha256());
    print_checks(&report);
    Ok(report)
}

fn require_valid(report: &ValidationReport) -> CliResult<()> {
    match report.first_failure() {
        Some(c) => Err(Failure::validation(format!("validation failed: {}: {}", c.name, c.detail))),
        None => Ok(()),
    }
}

fn compute_series(r: &Resolved) -> CliResult<CountSeries> {
    let s = count_series(&r.scenario)?;
    if s.saturated == Some(false) && !r.allow_heuristic {
        return Err(Failure {
            code: Failure::SATURATION,
            message: "box mode did not saturate: counts kept changing as the box doubled (enlarge B or pass --allow-heuristic)"
                .into(),
        });
    }
    Ok(s)
}

fn load_series(r: &Resolved, path: Option<&Path>) -> CliResult<CountSeries> {
    match path {
        None => {
            require_valid(&validate(&r.scenario, r.config_sha256()))?;
            compute_series(r)
        }
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::validation(format!("{}: cannot read series: {e}", p.display())))?;
            if let Some(h) = header_value(&text, "config_sha256") {
                if h != r.config_sha256() {
                    eprintln!("warning: {} was produced by a different configuration", p.display());
                }
            }
            read_series(&text, &r.scenario, &p.display().to_string())
        }
    }
}

#[derive(Serialize)]
struct FitDocument<'a> {
    config_sha256: String,
    scenario: &'a str,
    exact: bool,
    saturated: Option<bool>,
    fit: FitReport,
}

fn fit_document<'a>(r: &'a Resolved, s: &CountSeries) -> CliResult<FitDocument<'a>> {
    if s.is_empty() {
        return Err(Failure::validation("cannot fit an empty series"));
    }
    let top = s.len() as f64 / s.scale_e as f64;
    let fit = fit_report(&r.scenario, s, &Window::top_decade(top), r.aggregation)?;
    Ok(FitDocument {
        config_sha256: r.config_sha256(),
        scenario: &r.label,
        exact: s.exact.iter().all(|&e| e),
        saturated: s.saturated,
        fit,
    })
}

fn mismatch(c: &Comparison) -> CliResult<()> {
    if c.diffs() == 0 {
        Ok(())
    } else {
        Err(Failure { code: Failure::MISMATCH, message: c.summary() })
    }
}

#[derive(Serialize)]
struct ReportSummary {
    config_sha256: String,
    scenario: String,
    k_max: String,
    levels: usize,
    exact: bool,
    saturated: Option<bool>,
    validation: ValidationReport,
    oracle: Option<String>,
    exit_code: i32,
}

fn run_report(r: &Resolved) -> CliResult<()> {
    let dir = r.out.clone().ok_or_else(|| Failure::validation("report needs --out DIR"))?;
    let sha = r.config_sha256();
    let validation = run_validate(r)?;
    emit(Some(&dir), "validation.json", |w| json_to(w, &validation))?;
    require_valid(&validation)?;
    let series = compute_series(r)?;
    emit(Some(&dir), "series.csv", |w| write_series(w, &series, &r.scenario, &sha))?;
    if !series.is_empty() {
        let doc = fit_document(r, &series)?;
        emit(Some(&dir), "fit.json", |w| json_to(w, &doc))?;
    }
    let mut code = 0;
    let mut oracle = None;
    if r.oracles {
        match compare(&r.scenario, &series) {
            Ok(c) => {
                emit(Some(&dir), "oracle.csv", |w| c.write_csv(w, &sha))?;
                println!("{}", c.summary());
                if c.diffs() > 0 {
                    code = Failure::MISMATCH;
                }
                oracle = Some(c.summary());
            }
            Err(e) => oracle = Some(e.message),
        }
    }
    let summary = ReportSummary {
        config_sha256: sha,
        scenario: r.label.clone(),
        k_max: orbitcount::arith::rational::format_rational(&r.scenario.k_max),
        levels: series.len(),
        exact: series.exact.iter().all(|&e| e),
        saturated: series.saturated,
        validation,
        oracle: oracle.clone(),
        exit_code: code,
    };
    emit(Some(&dir), "report.json", |w| json_to(w, &summary))?;
    if code != 0 {
        return Err(Failure { code, message: oracle.unwrap_or_default() });
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate(c) => {
            let r = settle(&c)?;
            let report = run_validate(&r)?;
            if let Some(d) = &r.out {
                emit(Some(d), "validation.json", |w| json_to(w, &report))?;
            }
            require_valid(&report)?;
            println!("valid");
            Ok(())
        }
        Command::Count(c) => {
            let r = settle(&c)?;
            require_valid(&validate(&r.scenario, r.config_sha256()))?;
            let s = compute_series(&r)?;
            emit(r.out.as_deref(), "series.csv", |w| write_series(w, &s, &r.scenario, &r.config_sha256()))
        }
        Command::Fit(c) => {
            let r = settle(&c.common)?;
            let s = load_series(&r, c.series.as_deref())?;
            let doc = fit_document(&r, &s)?;
            emit(r.out.as_deref(), "fit.json", |w| json_to(w, &doc))
        }
        Command::OracleCompare(c) => {
            let r = settle(&c.common)?;
            let s = load_series(&r, c.series.as_deref())?;
            let cmp = compare(&r.scenario, &s)?;
            if let Some(d) = &r.out {
                emit(Some(d), "oracle.csv", |w| cmp.write_csv(w, &r.config_sha256()))?;
            }
            println!("{}", cmp.summary());
            mismatch(&cmp)
        }
        Command::Report(c) => {
            let r = settle(&c)?;
            run_report(&r)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}

