//! Command-line front end.
//!
//! Every command resolves to the same internal request type whether it came
//! from flags or from a bench description file, so `polbench run file` and
//! the equivalent flag spelling produce byte-identical reports.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 unreadable or
//! invalid bench file, 4 internal invariant failure.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::AnalyzerSettings;
use crate::benchfile::{self, BenchDescription, ScanKind, ScanSpec};
use crate::estimators::{
    denominator_diagnostic, CorrelationResult, Estimator, EstimatorKind,
    InterferenceFlag, RngSpec, COINCIDENCE_MAX,
};
use crate::report::{Cell, Meta, OutputRecord};
use crate::scans::{self, SkewKind};

/// Seed fallback consulted when neither `--seed` nor a bench-file `seed`
/// line names one. Absent, the seed is 0.
pub const SEED_ENV: &str = "POLBENCH_SEED";

const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "polbench",
    version,
    about = "Fourfold polarization-coincidence bench: classical stochastic model\n\
             with exact, Monte Carlo, and quantum-reference estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Pulse-overlap weight in [0, 1]; defaults to 1 (full overlap).
    #[arg(long, global = true, value_name = "WEIGHT")]
    e: Option<f64>,

    /// Estimator: coherent, incoherent, coherent-mc, or detection-mc.
    #[arg(long, global = true, value_name = "NAME")]
    estimator: Option<String>,

    /// Sample count for Monte Carlo estimators; defaults to 1000000.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<u64>,

    /// RNG seed for Monte Carlo estimators.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// One coincidence estimate at explicit analyzer angles.
    Simulate {
        /// Analyzer angles in degrees: T1,T2,T3,T4
        #[arg(long, value_name = "T1,T2,T3,T4")]
        theta: String,
    },
    /// All 16 combinations of analyzers at 0 or 90 degrees.
    Regimes,
    /// Coincidence along skewed analyzer paths (90-t, t, t, 90∓t).
    Curve {
        /// Trace to follow: upper, lower, middle, or all.
        #[arg(long, value_name = "KIND")]
        kind: String,
        /// Grid points across the quarter turn.
        #[arg(long, default_value_t = 181, value_name = "N")]
        points: u32,
    },
    /// Coincidence at fixed analyzers across pulse-overlap weights.
    Sweep {
        /// Analyzer angles in degrees: T1,T2,T3,T4
        #[arg(long, value_name = "T1,T2,T3,T4")]
        theta: String,
        /// Grid points across the overlap range.
        #[arg(long, default_value_t = 101, value_name = "N")]
        points: u32,
    },
    /// Execute a bench description file.
    Run { file: PathBuf },
    /// Check a bench description file and print its canonical form.
    Validate { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// A failed run, carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
enum Failure {
    /// Bad flags or values; exit 2.
    Usage(String),
    /// Unreadable or invalid bench file; exit 3.
    File(String),
    /// Broken internal invariant; exit 4.
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::File(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::File(m) | Failure::Internal(m) => m,
        }
    }
}

/// A fully resolved command, independent of where its inputs came from.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Request {
    Simulate {
        theta_deg: [f64; 4],
        e: InterferenceFlag,
        estimator: Estimator,
    },
    Regimes {
        e: InterferenceFlag,
        estimator: Estimator,
    },
    Curve {
        selection: CurveSelection,
        points: u32,
        range_deg: (f64, f64),
    },
    Sweep {
        theta_deg: [f64; 4],
        points: u32,
        range: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CurveSelection {
    One(SkewKind),
    All,
}

/// Parse arguments from the process environment, run, and report.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String, Failure> {
    if let Cmd::Validate { file } = &cli.command {
        forbid(&cli.e, "--e", "validate")?;
        forbid(&cli.estimator, "--estimator", "validate")?;
        forbid(&cli.samples, "--samples", "validate")?;
        forbid(&cli.seed, "--seed", "validate")?;
        let description = load_description(file)?;
        return Ok(benchfile::serialize(&description));
    }
    let request = build_request(cli)?;
    let record = execute(&request)?;
    if !record.is_finite() {
        return Err(Failure::Internal(
            "report contains non-finite values".into(),
        ));
    }
    Ok(match cli.format {
        OutputFormat::Csv => record.to_csv(),
        OutputFormat::Json => record.to_json(),
    })
}

fn forbid<T>(value: &Option<T>, flag: &str, command: &str) -> Result<(), Failure> {
    if value.is_some() {
        Err(Failure::Usage(format!(
            "{flag} does not apply to `{command}`"
        )))
    } else {
        Ok(())
    }
}

fn build_request(cli: &Cli) -> Result<Request, Failure> {
    match &cli.command {
        Cmd::Simulate { theta } => Ok(Request::Simulate {
            theta_deg: parse_theta(theta)?,
            e: interference(cli.e)?,
            estimator: flag_estimator(cli)?,
        }),
        Cmd::Regimes => Ok(Request::Regimes {
            e: interference(cli.e)?,
            estimator: flag_estimator(cli)?,
        }),
        Cmd::Curve { kind, points } => {
            forbid(&cli.e, "--e", "curve")?;
            forbid(&cli.estimator, "--estimator", "curve")?;
            forbid(&cli.samples, "--samples", "curve")?;
            forbid(&cli.seed, "--seed", "curve")?;
            let selection = match kind.as_str() {
                "all" => CurveSelection::All,
                word => CurveSelection::One(SkewKind::from_keyword(word).ok_or_else(
                    || {
                        Failure::Usage(format!(
                            "unknown curve kind {word:?}; expected upper, lower, middle, or all"
                        ))
                    },
                )?),
            };
            Ok(Request::Curve {
                selection,
                points: *points,
                range_deg: (0.0, 90.0),
            })
        }
        Cmd::Sweep { theta, points } => {
            forbid(&cli.e, "--e", "sweep")?;
            forbid(&cli.estimator, "--estimator", "sweep")?;
            forbid(&cli.samples, "--samples", "sweep")?;
            forbid(&cli.seed, "--seed", "sweep")?;
            Ok(Request::Sweep {
                theta_deg: parse_theta(theta)?,
                points: *points,
                range: (0.0, 1.0),
            })
        }
        Cmd::Run { file } => {
            forbid(&cli.e, "--e", "run")?;
            forbid(&cli.estimator, "--estimator", "run")?;
            forbid(&cli.samples, "--samples", "run")?;
            forbid(&cli.seed, "--seed", "run")?;
            let description = load_description(file)?;
            request_from_description(&description)
        }
        Cmd::Validate { .. } => unreachable!("handled in dispatch"),
    }
}

fn load_description(path: &Path) -> Result<BenchDescription, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|err| Failure::File(format!("{}: {err}", path.display())))?;
    benchfile::parse_bytes(&bytes)
        .map_err(|err| Failure::File(format!("{}: {err}", path.display())))
}

fn request_from_description(d: &BenchDescription) -> Result<Request, Failure> {
    match d.scan {
        None => Ok(Request::Simulate {
            theta_deg: d.analyzers_deg.expect("parser requires analyzers"),
            e: d.interference_flag(),
            estimator: build_estimator(d.estimator, d.samples, d.seed)?,
        }),
        Some(ScanSpec {
            kind: ScanKind::Regimes,
            ..
        }) => Ok(Request::Regimes {
            e: d.interference_flag(),
            estimator: build_estimator(d.estimator, d.samples, d.seed)?,
        }),
        Some(ScanSpec {
            kind,
            points,
            range,
        }) if kind.is_skew() => {
            let selection = CurveSelection::One(match kind {
                ScanKind::SkewUpper => SkewKind::Upper,
                ScanKind::SkewLower => SkewKind::Lower,
                ScanKind::SkewMiddle => SkewKind::Middle,
                _ => unreachable!(),
            });
            Ok(Request::Curve {
                selection,
                points: points.expect("parser injects skew defaults"),
                range_deg: range.expect("parser injects skew defaults"),
            })
        }
        Some(ScanSpec {
            kind: ScanKind::Overlap,
            points,
            range,
        }) => Ok(Request::Sweep {
            theta_deg: d.analyzers_deg.expect("parser requires analyzers"),
            points: points.expect("parser injects overlap defaults"),
            range: range.expect("parser injects overlap defaults"),
        }),
        Some(_) => unreachable!("all scan kinds covered"),
    }
}

fn parse_theta(text: &str) -> Result<[f64; 4], Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Failure::Usage(format!(
            "--theta needs 4 comma-separated angles, got {}",
            parts.len()
        )));
    }
    let mut theta = [0.0f64; 4];
    for (slot, part) in theta.iter_mut().zip(&parts) {
        let value: f64 = part
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("invalid angle {part:?}")))?;
        if !value.is_finite() {
            return Err(Failure::Usage(format!("angle {part:?} is not finite")));
        }
        *slot = value;
    }
    Ok(theta)
}

fn interference(flag: Option<f64>) -> Result<InterferenceFlag, Failure> {
    InterferenceFlag::new(flag.unwrap_or(1.0))
        .map_err(|err| Failure::Usage(err.to_string()))
}

fn flag_estimator(cli: &Cli) -> Result<Estimator, Failure> {
    let kind = match cli.estimator.as_deref() {
        None => EstimatorKind::CoherentExact,
        Some(word) => EstimatorKind::from_keyword(word).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown estimator {word:?}; expected coherent, incoherent, \
                 coherent-mc, or detection-mc"
            ))
        })?,
    };
    build_estimator(kind, cli.samples, cli.seed)
}

/// Resolve an estimator kind plus optional sampling knobs, shared by the
/// flag and bench-file paths so both produce the same `Estimator`.
fn build_estimator(
    kind: EstimatorKind,
    samples: Option<u64>,
    seed: Option<u64>,
) -> Result<Estimator, Failure> {
    if !kind.is_sampled() {
        if samples.is_some() {
            return Err(Failure::Usage(format!(
                "--samples needs a sampled estimator, not {}",
                kind.keyword()
            )));
        }
        if seed.is_some() {
            return Err(Failure::Usage(format!(
                "--seed needs a sampled estimator, not {}",
                kind.keyword()
            )));
        }
        return Ok(match kind {
            EstimatorKind::CoherentExact => Estimator::Coherent,
            EstimatorKind::IncoherentExact => Estimator::Incoherent,
            _ => unreachable!(),
        });
    }
    let samples = samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let rng = RngSpec::new(resolve_seed(seed)?, 0);
    Ok(match kind {
        EstimatorKind::CoherentMc => Estimator::CoherentMc { samples, rng },
        EstimatorKind::DetectionMc => Estimator::DetectionMc {
            trials: samples,
            rng,
        },
        _ => unreachable!(),
    })
}

fn resolve_seed(explicit: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            Failure::Usage(format!(
                "{SEED_ENV} must be a nonnegative integer, got {text:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(std::env::VarError::NotUnicode(_)) => Err(Failure::Usage(format!(
            "{SEED_ENV} is not valid unicode"
        ))),
    }
}

fn execute(request: &Request) -> Result<OutputRecord, Failure> {
    match *request {
        Request::Simulate {
            theta_deg,
            e,
            estimator,
        } => simulate_record(theta_deg, e, estimator),
        Request::Regimes { e, estimator } => regimes_record(e, estimator),
        Request::Curve {
            selection,
            points,
            range_deg,
        } => curve_record(selection, points, range_deg),
        Request::Sweep {
            theta_deg,
            points,
            range,
        } => sweep_record(theta_deg, points, range),
    }
}

fn base_decisions() -> Vec<(&'static str, String)> {
    vec![(
        "normalized_by",
        format!(
            "raw / {COINCIDENCE_MAX}, the coincidence at analyzers 90,0,0,90 \
             with full overlap"
        ),
    )]
}

fn push_sampling_params(
    params: &mut Vec<(&'static str, Meta)>,
    result: &CorrelationResult,
) {
    if let (Some(samples), Some(rng)) = (result.samples, result.rng) {
        params.push(("samples", Meta::U(samples)));
        params.push(("seed", Meta::U(rng.seed)));
        params.push(("stream", Meta::U(rng.stream)));
    }
    if let Some(scale) = result.scale {
        params.push(("scale", Meta::F(scale)));
    }
}

fn simulate_record(
    theta_deg: [f64; 4],
    e: InterferenceFlag,
    estimator: Estimator,
) -> Result<OutputRecord, Failure> {
    let settings =
        AnalyzerSettings::from_degrees(theta_deg).expect("validated finite angles");
    let result = estimator
        .evaluate(settings, e)
        .map_err(|err| Failure::Internal(err.to_string()))?;
    let diag = denominator_diagnostic(settings, e);
    let mut params = vec![
        ("theta_deg", Meta::List(theta_deg.to_vec())),
        ("interference", Meta::F(e.value())),
        ("estimator", Meta::S(result.estimator.label().into())),
    ];
    push_sampling_params(&mut params, &result);
    params.push(("denominator_mean_product", Meta::F(diag.mean_product)));
    params.push(("denominator_sum_product", Meta::F(diag.sum_product)));
    let mut columns = vec!["raw", "normalized"];
    let mut row = vec![Cell::F(result.raw), Cell::F(result.normalized)];
    if let Some(stderr) = result.stderr {
        columns.push("stderr");
        row.push(Cell::F(stderr));
    }
    Ok(OutputRecord {
        command: "simulate",
        params,
        decisions: base_decisions(),
        columns,
        rows: vec![row],
    })
}

fn regimes_record(
    e: InterferenceFlag,
    estimator: Estimator,
) -> Result<OutputRecord, Failure> {
    let table = scans::regime_table(e, estimator)
        .map_err(|err| Failure::Internal(err.to_string()))?;
    let sampled = estimator.kind().is_sampled();
    let mut params = vec![
        ("interference", Meta::F(e.value())),
        ("estimator", Meta::S(estimator.kind().label().into())),
    ];
    match estimator {
        Estimator::CoherentMc { samples, rng }
        | Estimator::DetectionMc {
            trials: samples,
            rng,
        } => {
            params.push(("samples", Meta::U(samples)));
            params.push(("seed", Meta::U(rng.seed)));
            params.push(("stream_base", Meta::U(rng.stream)));
        }
        Estimator::Coherent | Estimator::Incoherent => {}
    }
    let mut decisions = base_decisions();
    if sampled {
        decisions.push((
            "row_streams",
            "row i draws from RNG stream stream_base + i".into(),
        ));
    }
    let mut columns = vec![
        "theta1_deg",
        "theta2_deg",
        "theta3_deg",
        "theta4_deg",
        "raw",
        "normalized",
    ];
    if sampled {
        columns.push("stderr");
    }
    let rows = table
        .iter()
        .map(|row| {
            let mut cells: Vec<Cell> =
                row.settings_deg.iter().map(|&d| Cell::F(d)).collect();
            cells.push(Cell::F(row.raw));
            cells.push(Cell::F(row.normalized));
            if let Some(stderr) = row.stderr {
                cells.push(Cell::F(stderr));
            }
            cells
        })
        .collect();
    Ok(OutputRecord {
        command: "regimes",
        params,
        decisions,
        columns,
        rows,
    })
}

fn curve_record(
    selection: CurveSelection,
    points: u32,
    range_deg: (f64, f64),
) -> Result<OutputRecord, Failure> {
    let deg_grid = scans::linear_grid(points as usize, range_deg.0, range_deg.1)
        .map_err(|err| Failure::Usage(err.to_string()))?;
    let rad_grid: Vec<f64> = deg_grid.iter().map(|d| d.to_radians()).collect();
    let kinds: Vec<SkewKind> = match selection {
        CurveSelection::One(kind) => vec![kind],
        CurveSelection::All => SkewKind::ALL.to_vec(),
    };
    let curves = kinds
        .iter()
        .map(|&kind| scans::skew_curve(kind, &rad_grid))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|err| Failure::Usage(err.to_string()))?;
    let kind_label = match selection {
        CurveSelection::One(kind) => kind.keyword(),
        CurveSelection::All => "all",
    };
    let params = vec![
        ("kind", Meta::S(kind_label.into())),
        ("points", Meta::U(points as u64)),
        ("range_deg", Meta::Pair(range_deg.0, range_deg.1)),
        (
            "estimator",
            Meta::S(EstimatorKind::CoherentExact.label().into()),
        ),
    ];
    let mut decisions = base_decisions();
    decisions.push((
        "analyzer_path",
        "analyzers at (90-t, t, t, 90-t) degrees; the lower trace \
         counter-rotates analyzer 4 to 90+t"
            .into(),
    ));
    decisions.push((
        "trace_overlap",
        "upper and lower traces take full pulse overlap (e=1); \
         the middle trace takes none (e=0)"
            .into(),
    ));
    let all = matches!(selection, CurveSelection::All);
    let mut columns = Vec::new();
    if all {
        columns.push("kind");
    }
    columns.extend(["t_rad", "t_deg", "raw", "normalized"]);
    let mut rows = Vec::with_capacity(deg_grid.len() * curves.len());
    for (i, &t_deg) in deg_grid.iter().enumerate() {
        for curve in &curves {
            let point = curve.points[i];
            let mut cells = Vec::new();
            if all {
                cells.push(Cell::S(curve.kind.keyword()));
            }
            cells.extend([
                Cell::F(point.t),
                Cell::F(t_deg),
                Cell::F(point.raw),
                Cell::F(point.normalized),
            ]);
            rows.push(cells);
        }
    }
    Ok(OutputRecord {
        command: "curve",
        params,
        decisions,
        columns,
        rows,
    })
}

fn sweep_record(
    theta_deg: [f64; 4],
    points: u32,
    range: (f64, f64),
) -> Result<OutputRecord, Failure> {
    let settings =
        AnalyzerSettings::from_degrees(theta_deg).expect("validated finite angles");
    let grid = scans::overlap_grid(points as usize, range.0, range.1)
        .map_err(|err| Failure::Usage(err.to_string()))?;
    let sweep = scans::overlap_sweep(settings, &grid)
        .map_err(|err| Failure::Usage(err.to_string()))?;
    let params = vec![
        ("theta_deg", Meta::List(theta_deg.to_vec())),
        ("points", Meta::U(points as u64)),
        ("range", Meta::Pair(range.0, range.1)),
        (
            "estimator",
            Meta::S(EstimatorKind::CoherentExact.label().into()),
        ),
    ];
    let rows = sweep
        .iter()
        .map(|point| {
            vec![
                Cell::F(point.e),
                Cell::F(point.raw),
                Cell::F(point.normalized),
            ]
        })
        .collect();
    Ok(OutputRecord {
        command: "sweep",
        params,
        decisions: base_decisions(),
        columns: vec!["e", "raw", "normalized"],
        rows,
    })
}
