//! Parameter scans over the bench: the 16-setting regime table, skewed
//! analyzer curves, and pulse-overlap sweeps.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::bench::AnalyzerSettings;
use crate::estimators::{
    coherent_correlation, Estimator, EstimatorError, InterferenceFlag,
};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ScanError {
    #[error("scan grid must not be empty")]
    EmptyGrid,
    #[error("scan grid must be finite and strictly increasing")]
    GridNotIncreasing,
    #[error("scan needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("scan range [{0}, {1}] is invalid")]
    InvalidRange(f64, f64),
    #[error("skew parameter must be finite, got {0}")]
    NonFiniteSkew(f64),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

fn check_grid(grid: &[f64]) -> Result<(), ScanError> {
    if grid.is_empty() {
        return Err(ScanError::EmptyGrid);
    }
    if grid.iter().any(|t| !t.is_finite())
        || grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(ScanError::GridNotIncreasing);
    }
    Ok(())
}

/// Evenly spaced grid with exact endpoints.
pub fn linear_grid(points: usize, lo: f64, hi: f64) -> Result<Vec<f64>, ScanError> {
    if points < 2 {
        return Err(ScanError::TooFewPoints(points));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ScanError::InvalidRange(lo, hi));
    }
    let span = hi - lo;
    let last = points - 1;
    Ok((0..points)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + span * i as f64 / last as f64
            }
        })
        .collect())
}

/// Evenly spaced grid in degrees converted to radians. Degree steps keep the
/// emitted grid values exact for round fractions (the default half-degree
/// step included).
pub fn skew_grid(points: usize, lo_deg: f64, hi_deg: f64) -> Result<Vec<f64>, ScanError> {
    Ok(linear_grid(points, lo_deg, hi_deg)?
        .into_iter()
        .map(f64::to_radians)
        .collect())
}

/// The canonical 181-point quarter-turn grid.
pub fn default_skew_grid() -> Vec<f64> {
    skew_grid(181, 0.0, 90.0).expect("static grid bounds")
}

/// Evenly spaced overlap-weight grid within `[0, 1]`.
pub fn overlap_grid(points: usize, lo: f64, hi: f64) -> Result<Vec<f64>, ScanError> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && hi <= 1.0) {
        return Err(ScanError::InvalidRange(lo, hi));
    }
    linear_grid(points, lo, hi)
}

/// One row of the 16-setting regime table.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeRow {
    pub settings: AnalyzerSettings,
    /// The same settings in degrees, each 0 or 90.
    pub settings_deg: [f64; 4],
    pub raw: f64,
    pub normalized: f64,
    /// Standard error when a sampled estimator filled the row.
    pub stderr: Option<f64>,
}

/// Evaluate all 16 combinations of analyzers at 0 or 90 degrees, ordered
/// lexicographically with analyzer 1 most significant and 0 before 90.
/// Sampled estimators get one stream per row.
pub fn regime_table(
    e: InterferenceFlag,
    estimator: Estimator,
) -> Result<Vec<RegimeRow>, EstimatorError> {
    let mut rows = Vec::with_capacity(16);
    for bits in 0..16u32 {
        let settings_deg: [f64; 4] =
            std::array::from_fn(|k| 90.0 * ((bits >> (3 - k)) & 1) as f64);
        let settings =
            AnalyzerSettings::from_degrees(settings_deg).expect("finite regime angles");
        let result = estimator
            .with_stream_offset(bits as u64)
            .evaluate(settings, e)?;
        rows.push(RegimeRow {
            settings,
            settings_deg,
            raw: result.raw,
            normalized: result.normalized,
            stderr: result.stderr,
        });
    }
    Ok(rows)
}

/// The three published skew traces. All skew analyzers move together except
/// that the lower trace counter-rotates analyzer 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewKind {
    /// `(pi/2 - t, t, t, pi/2 - t)` with full overlap.
    Upper,
    /// `(pi/2 - t, t, t, pi/2 + t)` with full overlap: analyzer 4 turns the
    /// other way.
    Lower,
    /// The upper trace's path with no pulse overlap. (Either path gives the
    /// same curve once the cross term is gone.)
    Middle,
}

impl SkewKind {
    pub const ALL: [SkewKind; 3] = [SkewKind::Upper, SkewKind::Lower, SkewKind::Middle];

    pub fn keyword(self) -> &'static str {
        match self {
            SkewKind::Upper => "upper",
            SkewKind::Lower => "lower",
            SkewKind::Middle => "middle",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Analyzer path at skew parameter `t` (radians).
    pub fn settings_at(self, t: f64) -> Result<AnalyzerSettings, ScanError> {
        let theta4 = match self {
            SkewKind::Lower => FRAC_PI_2 + t,
            SkewKind::Upper | SkewKind::Middle => FRAC_PI_2 - t,
        };
        AnalyzerSettings::from_radians([FRAC_PI_2 - t, t, t, theta4])
            .map_err(|_| ScanError::NonFiniteSkew(t))
    }

    /// Pulse overlap the trace is defined at.
    pub fn interference(self) -> InterferenceFlag {
        match self {
            SkewKind::Upper | SkewKind::Lower => InterferenceFlag::FULL,
            SkewKind::Middle => InterferenceFlag::NONE,
        }
    }
}

impl std::fmt::Display for SkewKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewPoint {
    /// Skew parameter in radians.
    pub t: f64,
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkewCurve {
    pub kind: SkewKind,
    pub points: Vec<SkewPoint>,
}

/// Trace one skew curve with the coherent estimator.
pub fn skew_curve(kind: SkewKind, t_grid: &[f64]) -> Result<SkewCurve, ScanError> {
    check_grid(t_grid)?;
    let e = kind.interference();
    let points = t_grid
        .iter()
        .map(|&t| {
            let r = coherent_correlation(kind.settings_at(t)?, e);
            Ok(SkewPoint {
                t,
                raw: r.raw,
                normalized: r.normalized,
            })
        })
        .collect::<Result<Vec<_>, ScanError>>()?;
    Ok(SkewCurve { kind, points })
}

/// Analytic form of each trace's raw coincidence:
/// upper `(cos^4 + sin^4)^2 / 16`, lower `(cos^4 - sin^4)^2 / 16`,
/// middle `(cos^8 + sin^8) / 16`.
pub fn skew_closed_form(kind: SkewKind, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let c4 = c.powi(4);
    let s4 = s.powi(4);
    match kind {
        SkewKind::Upper => {
            let sum = c4 + s4;
            sum * sum / 16.0
        }
        SkewKind::Lower => {
            let diff = c4 - s4;
            diff * diff / 16.0
        }
        SkewKind::Middle => (c4 * c4 + s4 * s4) / 16.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapPoint {
    pub e: f64,
    pub raw: f64,
    pub normalized: f64,
}

/// Coherent coincidence at fixed settings across a grid of overlap weights.
pub fn overlap_sweep(
    a: AnalyzerSettings,
    e_grid: &[f64],
) -> Result<Vec<OverlapPoint>, ScanError> {
    check_grid(e_grid)?;
    e_grid
        .iter()
        .map(|&ev| {
            let flag = InterferenceFlag::new(ev)?;
            let r = coherent_correlation(a, flag);
            Ok(OverlapPoint {
                e: ev,
                raw: r.raw,
                normalized: r.normalized,
            })
        })
        .collect()
}
