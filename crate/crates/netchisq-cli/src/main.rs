//! Command-line front end for uplift significance testing.
//!
//! Exit status: 0 on success (whatever the statistical verdict), 2 on
//! parse or validation problems, 3 when a statistic is degenerate for
//! the given data.

use clap::{Args, Parser, Subcommand};
use netchisq::{
    builtin_scenarios, classical_chi_sq, contrast_test, net_chi_sq, net_chi_sq_v1, net_chi_sq_v2,
    run_study, summarize, t_net_sq, ApplicabilityPolicy, CampaignPair, Error as StatError, Method,
    ScenarioParams, TestOutcome,
};
use netchisq_cli::ingest::{self, IngestError};
use netchisq_cli::report::{self, OutputFormat, ReportRow};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "netchisq",
    version,
    about = "Significance tests for comparing the uplift of two marketing campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run significance tests on a campaign pair
    Test(TestArgs),
    /// Run a Monte-Carlo study and emit probability-plot data
    Simulate(SimulateArgs),
    /// List the built-in simulation scenarios
    Scenarios,
}

#[derive(Args)]
struct TestArgs {
    /// CSV input file (aggregate or individual schema, detected by header)
    #[arg(long, conflicts_with = "counts")]
    input: Option<PathBuf>,
    /// Inline counts: n1,aT1,k1,aC1,n2,aT2,k2,aC2
    #[arg(long)]
    counts: Option<String>,
    /// Methods to run, comma separated
    /// (netchisq, netchisq1, netchisq2, tnetsq, contrast, classical)
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Significance level for the verdict column
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Report format
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in label (fig1..fig7) or a custom row
    /// n1,n2,k1,k2,pT1,pT2,pC1,pC2
    #[arg(long)]
    scenario: String,
    /// Number of replicates
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    /// Master seed; every replicate derives its own stream from it
    #[arg(long, env = "UPLIFT_SIG_SEED", default_value_t = 0)]
    seed: u64,
    /// Significance level used in the summary block
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the plot data to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Stat(StatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<StatError> for AppError {
    fn from(err: StatError) -> Self {
        match err {
            StatError::InvalidArgument(msg) => AppError::Usage(msg),
            other => AppError::Stat(other),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Stat(_) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Scenarios => cmd_scenarios(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), AppError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(AppError::Usage(format!(
            "alpha must lie strictly inside (0, 1), got {alpha}"
        )))
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    match path {
        Some(p) => Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn parse_counts(raw: &str) -> Result<CampaignPair, AppError> {
    let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
    if fields.len() != 8 {
        return Err(AppError::Usage(format!(
            "--counts needs 8 comma-separated values n1,aT1,k1,aC1,n2,aT2,k2,aC2, got {}",
            fields.len()
        )));
    }
    let mut counts = [0u64; 8];
    for (slot, field) in counts.iter_mut().zip(&fields) {
        *slot = field.parse::<u64>().map_err(|_| {
            AppError::Usage(format!("count '{field}' is not a whole nonnegative number"))
        })?;
    }
    Ok(CampaignPair::from_counts(counts)?)
}

fn parse_methods(raw: &[String]) -> Result<Vec<Method>, AppError> {
    if raw.is_empty() {
        return Ok(Method::ALL.to_vec());
    }
    raw.iter()
        .map(|token| {
            Method::from_id(token).ok_or_else(|| {
                AppError::Usage(format!(
                    "unknown method '{token}' (choose from netchisq, netchisq1, netchisq2, \
                     tnetsq, contrast, classical)"
                ))
            })
        })
        .collect()
}

fn cmd_test(args: TestArgs) -> Result<(), AppError> {
    check_alpha(args.alpha)?;
    let methods = parse_methods(&args.method)?;
    let pair = match (&args.counts, &args.input) {
        (Some(raw), None) => parse_counts(raw)?,
        (None, Some(path)) => {
            let ingested = ingest::read_auto(path)?;
            for warning in &ingested.warnings {
                eprintln!("warning: {warning}");
            }
            ingested.pair
        }
        (None, None) => {
            return Err(AppError::Usage(
                "provide campaign data with --input FILE or --counts n1,aT1,...".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let policy = ApplicabilityPolicy::default();
    let mut rows = Vec::new();
    for method in methods {
        match method {
            Method::ClassicalChiSq => {
                let first: TestOutcome = classical_chi_sq(pair.sub1())?;
                let second: TestOutcome = classical_chi_sq(pair.sub2())?;
                rows.push(ReportRow::from_outcome(&first, "subgroup1", args.alpha));
                rows.push(ReportRow::from_outcome(&second, "subgroup2", args.alpha));
            }
            other => {
                let outcome = match other {
                    Method::NetChiSq => net_chi_sq(&pair)?,
                    Method::NetChiSq1 => net_chi_sq_v1(&pair, &policy)?,
                    Method::NetChiSq2 => net_chi_sq_v2(&pair, &policy)?,
                    Method::TNetSq => t_net_sq(&pair)?,
                    Method::Contrast => contrast_test(&pair)?,
                    Method::ClassicalChiSq => unreachable!(),
                };
                rows.push(ReportRow::from_outcome(&outcome, "pair", args.alpha));
            }
        }
    }

    let mut out = open_output(&args.out)?;
    report::render_rows(&mut out, &rows, args.format, args.alpha)?;
    out.flush()?;
    Ok(())
}

fn resolve_scenario(raw: &str) -> Result<ScenarioParams, AppError> {
    let trimmed = raw.trim();
    if let Some(found) = builtin_scenarios()
        .into_iter()
        .find(|sc| sc.label().eq_ignore_ascii_case(trimmed))
    {
        return Ok(found);
    }
    let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
    if fields.len() != 8 {
        return Err(AppError::Usage(format!(
            "unknown scenario '{trimmed}': use a built-in label (see the scenarios subcommand) \
             or 8 values n1,n2,k1,k2,pT1,pT2,pC1,pC2"
        )));
    }
    let mut sizes = [0u64; 4];
    for (slot, field) in sizes.iter_mut().zip(&fields[..4]) {
        *slot = field
            .parse::<u64>()
            .map_err(|_| AppError::Usage(format!("group size '{field}' is not a whole number")))?;
    }
    let mut probs = [0f64; 4];
    for (slot, field) in probs.iter_mut().zip(&fields[4..]) {
        *slot = field
            .parse::<f64>()
            .map_err(|_| AppError::Usage(format!("probability '{field}' is not a number")))?;
    }
    Ok(ScenarioParams::new(
        "custom",
        [sizes[0], sizes[1]],
        [sizes[2], sizes[3]],
        [probs[0], probs[1]],
        [probs[2], probs[3]],
    )?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), AppError> {
    check_alpha(args.alpha)?;
    if args.replicates == 0 {
        return Err(AppError::Usage("--replicates must be at least 1".into()));
    }
    let scenario = resolve_scenario(&args.scenario)?;
    let table = run_study(&scenario, args.replicates, args.seed);
    let summary = summarize(&table, args.alpha)?;
    let mut out = open_output(&args.out)?;
    report::render_plot_csv(&mut out, &table, &summary, scenario.label())?;
    out.flush()?;
    if args.out.is_some() {
        // the data went to a file; give the terminal the short version
        eprint!("{}", report::summary_sketch(&summary));
    }
    Ok(())
}

fn cmd_scenarios() -> Result<(), AppError> {
    let mut out = std::io::stdout().lock();
    report::render_scenarios(&mut out, &builtin_scenarios())?;
    Ok(())
}
