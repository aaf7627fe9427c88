//! Line-oriented description format for bench runs.
//!
//! One statement per line, `keyword value...`, with `#` comment lines and
//! blank lines ignored:
//!
//! ```text
//! # brightest setting
//! analyzers_deg 90 0 0 90
//! interference 1
//! estimator coherent
//! ```
//!
//! Statements: `analyzers_deg d1 d2 d3 d4`, `interference e`,
//! `estimator coherent|incoherent|coherent-mc|detection-mc`,
//! `samples n`, `seed s`, and
//! `scan regimes|skew-upper|skew-lower|skew-middle|overlap [points n] [range lo hi]`.
//! Unknown keywords, wrong arities, duplicates, and out-of-range values are
//! hard errors carrying the line number and offending token. Parsing fills
//! scan defaults in, so serializing a parsed description always spells the
//! grid out.

use std::fmt;

use thiserror::Error;

use crate::bench::AnalyzerSettings;
use crate::estimators::{EstimatorKind, InterferenceFlag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Regimes,
    SkewUpper,
    SkewLower,
    SkewMiddle,
    Overlap,
}

impl ScanKind {
    pub const ALL: [ScanKind; 5] = [
        ScanKind::Regimes,
        ScanKind::SkewUpper,
        ScanKind::SkewLower,
        ScanKind::SkewMiddle,
        ScanKind::Overlap,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ScanKind::Regimes => "regimes",
            ScanKind::SkewUpper => "skew-upper",
            ScanKind::SkewLower => "skew-lower",
            ScanKind::SkewMiddle => "skew-middle",
            ScanKind::Overlap => "overlap",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn is_skew(self) -> bool {
        matches!(
            self,
            ScanKind::SkewUpper | ScanKind::SkewLower | ScanKind::SkewMiddle
        )
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A scan request. After parsing, `points` and `range` are concrete for
/// every kind that uses a grid (`None` only for `regimes`). Skew ranges are
/// in degrees; the overlap range is the dimensionless weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub kind: ScanKind,
    pub points: Option<u32>,
    pub range: Option<(f64, f64)>,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchDescription {
    pub analyzers_deg: Option<[f64; 4]>,
    pub interference: f64,
    pub estimator: EstimatorKind,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub scan: Option<ScanSpec>,
}

impl BenchDescription {
    pub fn settings(&self) -> Option<AnalyzerSettings> {
        self.analyzers_deg
            .map(|d| AnalyzerSettings::from_degrees(d).expect("validated finite angles"))
    }

    pub fn interference_flag(&self) -> InterferenceFlag {
        InterferenceFlag::new(self.interference).expect("validated interference weight")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    NotUtf8,
    UnknownKey,
    WrongArity { expected: usize, got: usize },
    InvalidNumber,
    OutOfRange(String),
    Duplicate,
    MissingKey,
    Unsupported(String),
}

/// Parse or validation failure, pinned to a line and the token at fault.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::NotUtf8 => write!(f, "input is not valid UTF-8"),
            ParseErrorKind::UnknownKey => write!(f, "unknown keyword `{}`", self.token),
            ParseErrorKind::WrongArity { expected, got } => write!(
                f,
                "`{}` takes {expected} value(s), got {got}",
                self.token
            ),
            ParseErrorKind::InvalidNumber => {
                write!(f, "`{}` is not a valid number here", self.token)
            }
            ParseErrorKind::OutOfRange(why) => write!(f, "`{}` {why}", self.token),
            ParseErrorKind::Duplicate => write!(f, "duplicate keyword `{}`", self.token),
            ParseErrorKind::MissingKey => write!(f, "missing required keyword `{}`", self.token),
            ParseErrorKind::Unsupported(why) => write!(f, "`{}` {why}", self.token),
        }
    }
}

fn err(line: usize, token: impl Into<String>, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line,
        token: token.into(),
        kind,
    }
}

fn parse_real(line: usize, token: &str) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, token, ParseErrorKind::InvalidNumber)),
    }
}

fn parse_integer(line: usize, token: &str) -> Result<u64, ParseError> {
    token
        .parse::<u64>()
        .map_err(|_| err(line, token, ParseErrorKind::InvalidNumber))
}

/// Tracks a keyword's value together with the line that set it, for
/// duplicate detection and cross-line validation messages.
struct Slot<T> {
    value: Option<(T, usize)>,
    key: &'static str,
}

impl<T> Slot<T> {
    fn new(key: &'static str) -> Self {
        Slot { value: None, key }
    }

    fn set(&mut self, line: usize, value: T) -> Result<(), ParseError> {
        if self.value.is_some() {
            return Err(err(line, self.key, ParseErrorKind::Duplicate));
        }
        self.value = Some((value, line));
        Ok(())
    }

    fn get(&self) -> Option<&T> {
        self.value.as_ref().map(|(v, _)| v)
    }

    fn line(&self) -> Option<usize> {
        self.value.as_ref().map(|(_, l)| *l)
    }
}

pub fn parse(text: &str) -> Result<BenchDescription, ParseError> {
    let mut analyzers = Slot::<[f64; 4]>::new("analyzers_deg");
    let mut interference = Slot::<f64>::new("interference");
    let mut estimator = Slot::<EstimatorKind>::new("estimator");
    let mut samples = Slot::<u64>::new("samples");
    let mut seed = Slot::<u64>::new("seed");
    let mut scan = Slot::<ScanSpec>::new("scan");
    let mut last_line = 0usize;

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let stmt = raw_line.trim();
        if stmt.is_empty() || stmt.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = stmt.split_whitespace().collect();
        let (key, args) = tokens.split_first().expect("nonempty statement");
        match *key {
            "analyzers_deg" => {
                if args.len() != 4 {
                    return Err(err(
                        line,
                        *key,
                        ParseErrorKind::WrongArity {
                            expected: 4,
                            got: args.len(),
                        },
                    ));
                }
                let mut values = [0.0f64; 4];
                for (slot, token) in values.iter_mut().zip(args) {
                    *slot = parse_real(line, token)?;
                }
                analyzers.set(line, values)?;
            }
            "interference" => {
                if args.len() != 1 {
                    return Err(err(
                        line,
                        *key,
                        ParseErrorKind::WrongArity {
                            expected: 1,
                            got: args.len(),
                        },
                    ));
                }
                let value = parse_real(line, args[0])?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(err(
                        line,
                        args[0],
                        ParseErrorKind::OutOfRange("must lie in [0, 1]".into()),
                    ));
                }
                interference.set(line, value)?;
            }
            "estimator" => {
                if args.len() != 1 {
                    return Err(err(
                        line,
                        *key,
                        ParseErrorKind::WrongArity {
                            expected: 1,
                            got: args.len(),
                        },
                    ));
                }
                let kind = EstimatorKind::from_keyword(args[0])
                    .ok_or_else(|| err(line, args[0], ParseErrorKind::UnknownKey))?;
                estimator.set(line, kind)?;
            }
            "samples" => {
                if args.len() != 1 {
                    return Err(err(
                        line,
                        *key,
                        ParseErrorKind::WrongArity {
                            expected: 1,
                            got: args.len(),
                        },
                    ));
                }
                let value = parse_integer(line, args[0])?;
                if value == 0 {
                    return Err(err(
                        line,
                        args[0],
                        ParseErrorKind::OutOfRange("must be positive".into()),
                    ));
                }
                samples.set(line, value)?;
            }
            "seed" => {
                if args.len() != 1 {
                    return Err(err(
                        line,
                        *key,
                        ParseErrorKind::WrongArity {
                            expected: 1,
                            got: args.len(),
                        },
                    ));
                }
                seed.set(line, parse_integer(line, args[0])?)?;
            }
            "scan" => {
                scan.set(line, parse_scan(line, args)?)?;
            }
            _ => return Err(err(line, *key, ParseErrorKind::UnknownKey)),
        }
    }

    finish(
        analyzers,
        interference,
        estimator,
        samples,
        seed,
        scan,
        last_line.max(1),
    )
}

/// Parse raw bytes; invalid UTF-8 is reported at the line containing the
/// first offending byte.
pub fn parse_bytes(bytes: &[u8]) -> Result<BenchDescription, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let line = bytes[..e.valid_up_to()]
                .iter()
                .filter(|b| **b == b'\n')
                .count()
                + 1;
            Err(err(line, "<invalid utf-8>", ParseErrorKind::NotUtf8))
        }
    }
}

/// `scan kind [points n] [range lo hi]`, options in that order.
fn parse_scan(line: usize, args: &[&str]) -> Result<ScanSpec, ParseError> {
    let (kind_token, mut rest) = args
        .split_first()
        .ok_or_else(|| err(line, "scan", ParseErrorKind::WrongArity { expected: 1, got: 0 }))?;
    let kind = ScanKind::from_keyword(kind_token)
        .ok_or_else(|| err(line, *kind_token, ParseErrorKind::UnknownKey))?;
    let mut points = None;
    let mut range = None;

    if let Some((&"points", after)) = rest.split_first() {
        let token = after
            .first()
            .ok_or_else(|| err(line, "points", ParseErrorKind::WrongArity { expected: 1, got: 0 }))?;
        let value = parse_integer(line, token)?;
        let value = u32::try_from(value)
            .map_err(|_| err(line, *token, ParseErrorKind::OutOfRange("is too large".into())))?;
        if value < 2 {
            return Err(err(
                line,
                *token,
                ParseErrorKind::OutOfRange("must be at least 2".into()),
            ));
        }
        points = Some(value);
        rest = &after[1..];
    }

    if let Some((&"range", after)) = rest.split_first() {
        if after.len() < 2 {
            return Err(err(
                line,
                "range",
                ParseErrorKind::WrongArity {
                    expected: 2,
                    got: after.len(),
                },
            ));
        }
        let lo = parse_real(line, after[0])?;
        let hi = parse_real(line, after[1])?;
        if lo >= hi {
            return Err(err(
                line,
                after[1],
                ParseErrorKind::OutOfRange("range bounds must increase".into()),
            ));
        }
        range = Some((lo, hi));
        rest = &after[2..];
    }

    if let Some(extra) = rest.first() {
        return Err(err(line, *extra, ParseErrorKind::UnknownKey));
    }

    if kind == ScanKind::Regimes {
        if points.is_some() || range.is_some() {
            return Err(err(
                line,
                kind.keyword(),
                ParseErrorKind::Unsupported("does not take points or range".into()),
            ));
        }
        return Ok(ScanSpec {
            kind,
            points: None,
            range: None,
        });
    }

    // Grid scans: fill defaults so a parsed scan is always explicit.
    let (default_points, default_range) = if kind.is_skew() {
        (181, (0.0, 90.0))
    } else {
        (101, (0.0, 1.0))
    };
    let range = range.unwrap_or(default_range);
    if kind == ScanKind::Overlap && !(0.0 <= range.0 && range.1 <= 1.0) {
        return Err(err(
            line,
            kind.keyword(),
            ParseErrorKind::OutOfRange("overlap range must stay within [0, 1]".into()),
        ));
    }
    Ok(ScanSpec {
        kind,
        points: Some(points.unwrap_or(default_points)),
        range: Some(range),
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    analyzers: Slot<[f64; 4]>,
    interference: Slot<f64>,
    estimator: Slot<EstimatorKind>,
    samples: Slot<u64>,
    seed: Slot<u64>,
    scan: Slot<ScanSpec>,
    eof_line: usize,
) -> Result<BenchDescription, ParseError> {
    let estimator_kind = estimator.get().copied().unwrap_or(EstimatorKind::CoherentExact);

    if !estimator_kind.is_sampled() {
        if let Some(line) = samples.line() {
            return Err(err(
                line,
                "samples",
                ParseErrorKind::Unsupported("requires a sampled estimator".into()),
            ));
        }
        if let Some(line) = seed.line() {
            return Err(err(
                line,
                "seed",
                ParseErrorKind::Unsupported("requires a sampled estimator".into()),
            ));
        }
    }

    if let Some(spec) = scan.get() {
        let scan_line = scan.line().unwrap_or(eof_line);
        match spec.kind {
            ScanKind::Regimes => {
                if let Some(line) = analyzers.line() {
                    return Err(err(
                        line,
                        "analyzers_deg",
                        ParseErrorKind::Unsupported("is not used by scan regimes".into()),
                    ));
                }
            }
            ScanKind::Overlap | ScanKind::SkewUpper | ScanKind::SkewLower
            | ScanKind::SkewMiddle => {
                if estimator_kind != EstimatorKind::CoherentExact {
                    return Err(err(
                        scan_line,
                        spec.kind.keyword(),
                        ParseErrorKind::Unsupported(
                            "supports only the coherent estimator".into(),
                        ),
                    ));
                }
                if spec.kind == ScanKind::Overlap {
                    if analyzers.get().is_none() {
                        return Err(err(
                            scan_line,
                            "analyzers_deg",
                            ParseErrorKind::MissingKey,
                        ));
                    }
                } else if let Some(line) = analyzers.line() {
                    return Err(err(
                        line,
                        "analyzers_deg",
                        ParseErrorKind::Unsupported(
                            "is not used by skew scans".into(),
                        ),
                    ));
                }
                if spec.kind != ScanKind::Overlap {
                    // skew interference is pinned per trace
                    if let Some(line) = interference.line() {
                        return Err(err(
                            line,
                            "interference",
                            ParseErrorKind::Unsupported(
                                "is fixed per skew trace".into(),
                            ),
                        ));
                    }
                }
            }
        }
        if spec.kind == ScanKind::Overlap {
            if let Some(line) = interference.line() {
                return Err(err(
                    line,
                    "interference",
                    ParseErrorKind::Unsupported("is the swept axis of scan overlap".into()),
                ));
            }
        }
    } else if analyzers.get().is_none() {
        return Err(err(eof_line, "analyzers_deg", ParseErrorKind::MissingKey));
    }

    Ok(BenchDescription {
        analyzers_deg: analyzers.get().copied(),
        interference: interference.get().copied().unwrap_or(1.0),
        estimator: estimator_kind,
        samples: samples.get().copied(),
        seed: seed.get().copied(),
        scan: scan.get().copied(),
    })
}

/// Canonical text form: statements in a fixed order, scan grids spelled out.
pub fn serialize(d: &BenchDescription) -> String {
    use fmt::Write;
    let mut out = String::new();
    if let Some(a) = d.analyzers_deg {
        writeln!(out, "analyzers_deg {} {} {} {}", a[0], a[1], a[2], a[3]).unwrap();
    }
    let skip_interference = matches!(
        d.scan,
        Some(ScanSpec {
            kind: ScanKind::Overlap | ScanKind::SkewUpper | ScanKind::SkewLower
                | ScanKind::SkewMiddle,
            ..
        })
    );
    if !skip_interference {
        writeln!(out, "interference {}", d.interference).unwrap();
    }
    writeln!(out, "estimator {}", d.estimator.keyword()).unwrap();
    if let Some(samples) = d.samples {
        writeln!(out, "samples {samples}").unwrap();
    }
    if let Some(seed) = d.seed {
        writeln!(out, "seed {seed}").unwrap();
    }
    if let Some(scan) = d.scan {
        write!(out, "scan {}", scan.kind).unwrap();
        if let Some(points) = scan.points {
            write!(out, " points {points}").unwrap();
        }
        if let Some((lo, hi)) = scan.range {
            write!(out, " range {lo} {hi}").unwrap();
        }
        out.push('\n');
    }
    out
}
