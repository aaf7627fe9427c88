//! Fourfold coincidence estimators over the random source configurations.
//!
//! Every estimator averages over the four equiprobable source states. The
//! coherent estimator adds route amplitudes before squaring; the incoherent
//! estimator multiplies per-detector intensities. Both accept an
//! interference weight `e` in `[0, 1]` scaling the cross terms produced by
//! pulse overlap at the beam splitter: `e = 1` means full overlap, `e = 0`
//! means the pulses miss each other in time.
//!
//! Monte Carlo variants draw source states from a counter-based ChaCha8
//! stream, so a run is fully determined by `(seed, stream, sample count)`
//! and may be partitioned across workers without changing the estimate.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bench::{
    detector_amplitudes, pathway_amplitudes, AnalyzerSettings, SourceState,
};

/// Raw coherent coincidence at the brightest setting (analyzers at
/// 90, 0, 0, 90 degrees with full overlap). Normalized outputs are reported
/// relative to this value.
pub const COINCIDENCE_MAX: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EstimatorError {
    #[error("interference weight must lie in [0, 1], got {0}")]
    InterferenceOutOfRange(f64),
    #[error("sample count must be positive")]
    ZeroSamples,
}

/// Pulse-overlap weight `e` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceFlag(f64);

impl InterferenceFlag {
    /// Crossover pulses fully overlapping in time.
    pub const FULL: InterferenceFlag = InterferenceFlag(1.0);
    /// Crossover pulses missing each other entirely.
    pub const NONE: InterferenceFlag = InterferenceFlag(0.0);

    pub fn new(e: f64) -> Result<Self, EstimatorError> {
        if e.is_finite() && (0.0..=1.0).contains(&e) {
            Ok(InterferenceFlag(e))
        } else {
            Err(EstimatorError::InterferenceOutOfRange(e))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which computation produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    CoherentExact,
    IncoherentExact,
    CoherentMc,
    DetectionMc,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::CoherentExact,
        EstimatorKind::IncoherentExact,
        EstimatorKind::CoherentMc,
        EstimatorKind::DetectionMc,
    ];

    /// Label attached to emitted results.
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::CoherentExact => "coherent-exact",
            EstimatorKind::IncoherentExact => "incoherent-exact",
            EstimatorKind::CoherentMc => "coherent-mc",
            EstimatorKind::DetectionMc => "detection-mc",
        }
    }

    /// Name used to select the estimator in files and on the command line.
    pub fn keyword(self) -> &'static str {
        match self {
            EstimatorKind::CoherentExact => "coherent",
            EstimatorKind::IncoherentExact => "incoherent",
            EstimatorKind::CoherentMc => "coherent-mc",
            EstimatorKind::DetectionMc => "detection-mc",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn is_sampled(self) -> bool {
        matches!(self, EstimatorKind::CoherentMc | EstimatorKind::DetectionMc)
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Addressing of a reproducible random stream: ChaCha8 keyed by `seed`, on
/// stream `stream`, consumed at fixed word offsets per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub const fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    fn rng_at(self, word_pos: u128) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(word_pos);
        rng
    }
}

/// One coincidence estimate, with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    /// Coincidence intensity in model units.
    pub raw: f64,
    /// `raw / COINCIDENCE_MAX`.
    pub normalized: f64,
    pub estimator: EstimatorKind,
    pub e: InterferenceFlag,
    /// Standard error of `raw`; sampled estimators only.
    pub stderr: Option<f64>,
    /// Sample (trial) count; sampled estimators only.
    pub samples: Option<u64>,
    /// Stream addressing; sampled estimators only.
    pub rng: Option<RngSpec>,
    /// Intensity-to-probability scale factor; detection Monte Carlo only.
    pub scale: Option<f64>,
}

impl CorrelationResult {
    fn exact(estimator: EstimatorKind, e: InterferenceFlag, raw: f64) -> Self {
        CorrelationResult {
            raw,
            normalized: raw / COINCIDENCE_MAX,
            estimator,
            e,
            stderr: None,
            samples: None,
            rng: None,
            scale: None,
        }
    }
}

/// Interference-weighted square: `x^2 + y^2 + 2 e x y`.
///
/// The exact value is nonnegative for `e <= 1`; clamp the rounding residue
/// so callers can rely on it.
fn cross_square(x: f64, y: f64, e: f64) -> f64 {
    (x * x + y * y + 2.0 * e * x * y).max(0.0)
}

/// Route amplitudes averaged over the four source states.
pub fn pathway_means(a: AnalyzerSettings) -> (f64, f64) {
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    for s in SourceState::ALL {
        let p = pathway_amplitudes(s, a);
        sum1 += p.t1;
        sum2 += p.t2;
    }
    (sum1 / 4.0, sum2 / 4.0)
}

/// The same means in closed form:
/// `(1/4) sin t1 cos t2 cos t3 sin t4` and `(1/4) cos t1 sin t2 sin t3 cos t4`.
pub fn pathway_means_closed_form(a: AnalyzerSettings) -> (f64, f64) {
    let m1 = 0.25 * a.theta1.sin() * a.theta2.cos() * a.theta3.cos() * a.theta4.sin();
    let m2 = 0.25 * a.theta1.cos() * a.theta2.sin() * a.theta3.sin() * a.theta4.cos();
    (m1, m2)
}

/// Coincidence from averaged route amplitudes:
/// `A1^2 + A2^2 + 2 e A1 A2` with `Ai` the mean route amplitudes.
pub fn coherent_correlation(a: AnalyzerSettings, e: InterferenceFlag) -> CorrelationResult {
    let (m1, m2) = pathway_means(a);
    CorrelationResult::exact(EstimatorKind::CoherentExact, e, cross_square(m1, m2, e.0))
}

/// Per-detector intensities for one source state; detectors 2 and 3 carry
/// the `e`-weighted cross term between their two source contributions.
fn state_intensities(s: SourceState, a: AnalyzerSettings, e: f64) -> [f64; 4] {
    let d = detector_amplitudes(s, a);
    [
        d.det1 * d.det1,
        cross_square(d.det2_a, d.det2_b, e),
        cross_square(d.det3_a, d.det3_b, e),
        d.det4 * d.det4,
    ]
}

/// Coincidence from per-state intensity products, averaged over states.
pub fn incoherent_correlation(a: AnalyzerSettings, e: InterferenceFlag) -> CorrelationResult {
    let mut sum = 0.0;
    for s in SourceState::ALL {
        let i = state_intensities(s, a, e.0);
        sum += i[0] * i[1] * i[2] * i[3];
    }
    CorrelationResult::exact(EstimatorKind::IncoherentExact, e, sum / 4.0)
}

/// Products of per-detector singles intensities under the two averaging
/// conventions that could normalize the coincidence rate.
///
/// Neither convention yields a settings-independent constant: the mean
/// convention gives 1/2 per outer detector, and under the sum convention the
/// beam-splitter detectors acquire angle-dependent cross terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorDiagnostic {
    /// Per-detector singles averaged over the four states.
    pub mean_singles: [f64; 4],
    /// Product of `mean_singles`.
    pub mean_product: f64,
    /// Per-detector singles summed over the source bits each detector sees:
    /// detector 1 over `n`, detector 4 over `m`, detectors 2 and 3 over both.
    pub sum_singles: [f64; 4],
    /// Product of `sum_singles`.
    pub sum_product: f64,
}

pub fn denominator_diagnostic(a: AnalyzerSettings, e: InterferenceFlag) -> DenominatorDiagnostic {
    let mut totals = [0.0f64; 4];
    for s in SourceState::ALL {
        let i = state_intensities(s, a, e.0);
        for (acc, value) in totals.iter_mut().zip(i) {
            *acc += value;
        }
    }
    let mean_singles = totals.map(|t| t / 4.0);
    // Detector 1 depends only on n, detector 4 only on m; summing over that
    // one bit halves the four-state total.
    let sum_singles = [totals[0] / 2.0, totals[1], totals[2], totals[3] / 2.0];
    DenominatorDiagnostic {
        mean_singles,
        mean_product: mean_singles.iter().product(),
        sum_singles,
        sum_product: sum_singles.iter().product(),
    }
}

/// Draw `len` source states starting at sample index `start` and tally them.
///
/// Sample `i` always consumes keystream word `i`, so any partition of the
/// index range produces tallies that sum to the single-worker tally.
fn state_counts(spec: RngSpec, start: u64, len: u64) -> [u64; 4] {
    let mut rng = spec.rng_at(start as u128);
    let mut counts = [0u64; 4];
    for _ in 0..len {
        counts[(rng.next_u32() & 3) as usize] += 1;
    }
    counts
}

/// Monte Carlo counterpart of the coherent estimator: sample mean route
/// amplitudes plugged into the interference-weighted square, with a
/// delta-method standard error.
pub fn coherent_mc(
    a: AnalyzerSettings,
    e: InterferenceFlag,
    samples: u64,
    rng: RngSpec,
) -> Result<CorrelationResult, EstimatorError> {
    if samples == 0 {
        return Err(EstimatorError::ZeroSamples);
    }
    let routes: [(f64, f64); 4] = std::array::from_fn(|i| {
        let p = pathway_amplitudes(SourceState::from_index(i), a);
        (p.t1, p.t2)
    });
    let counts = state_counts(rng, 0, samples);
    let n = samples as f64;

    let mut mean1 = 0.0;
    let mut mean2 = 0.0;
    for (c, (t1, t2)) in counts.iter().zip(routes) {
        mean1 += *c as f64 * t1;
        mean2 += *c as f64 * t2;
    }
    mean1 /= n;
    mean2 /= n;

    // Sample covariance of (t1, t2) under the empirical state tallies.
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    if samples > 1 {
        for (c, (t1, t2)) in counts.iter().zip(routes) {
            let (d1, d2) = (t1 - mean1, t2 - mean2);
            s11 += *c as f64 * d1 * d1;
            s12 += *c as f64 * d1 * d2;
            s22 += *c as f64 * d2 * d2;
        }
        let denom = n - 1.0;
        s11 /= denom;
        s12 /= denom;
        s22 /= denom;
    }

    let ev = e.0;
    let raw = cross_square(mean1, mean2, ev);
    // Delta method for g(x, y) = x^2 + y^2 + 2 e x y at the sample means.
    let gx = 2.0 * mean1 + 2.0 * ev * mean2;
    let gy = 2.0 * mean2 + 2.0 * ev * mean1;
    let var = (gx * gx * s11 + 2.0 * gx * gy * s12 + gy * gy * s22) / n;
    Ok(CorrelationResult {
        raw,
        normalized: raw / COINCIDENCE_MAX,
        estimator: EstimatorKind::CoherentMc,
        e,
        stderr: Some(var.max(0.0).sqrt()),
        samples: Some(samples),
        rng: Some(rng),
        scale: None,
    })
}

/// Keystream words consumed per detection trial: one state draw plus four
/// 64-bit uniforms.
const TRIAL_WORDS: u128 = 9;

fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Count coincidences for trial indices `start..start + len`.
///
/// Each trial consumes a fixed nine-word slice of the keystream, so
/// partitioned counts sum to the single-worker count. All four detector
/// draws happen even after a miss, keeping the stride constant.
fn coincidence_count(spec: RngSpec, start: u64, len: u64, fire: &[[f64; 4]; 4]) -> u64 {
    let mut rng = spec.rng_at(start as u128 * TRIAL_WORDS);
    let mut hits = 0u64;
    for _ in 0..len {
        let state = (rng.next_u32() & 3) as usize;
        let mut all = true;
        for p in fire[state] {
            // A draw of exactly p (including p = 0) is a miss.
            let fired = unit_f64(rng.next_u64()) < p;
            all &= fired;
        }
        hits += all as u64;
    }
    hits
}

/// Detection-style Monte Carlo: per trial, each detector fires with
/// probability proportional to its intensity for the drawn source state, and
/// a coincidence needs all four. The scaled coincidence rate estimates the
/// incoherent coincidence intensity; `scale` restores intensity units.
pub fn detection_mc(
    a: AnalyzerSettings,
    e: InterferenceFlag,
    trials: u64,
    rng: RngSpec,
) -> Result<CorrelationResult, EstimatorError> {
    if trials == 0 {
        return Err(EstimatorError::ZeroSamples);
    }
    let intensities: [[f64; 4]; 4] =
        std::array::from_fn(|i| state_intensities(SourceState::from_index(i), a, e.0));
    let maxima: [f64; 4] =
        std::array::from_fn(|j| intensities.iter().fold(0.0f64, |m, row| m.max(row[j])));
    let fire: [[f64; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if maxima[j] > 0.0 {
                intensities[i][j] / maxima[j]
            } else {
                0.0
            }
        })
    });
    let scale: f64 = maxima.iter().product();

    let hits = coincidence_count(rng, 0, trials, &fire);
    let n = trials as f64;
    let rate = hits as f64 / n;
    let raw = rate * scale;
    let stderr = scale * (rate * (1.0 - rate) / n).sqrt();
    Ok(CorrelationResult {
        raw,
        normalized: raw / COINCIDENCE_MAX,
        estimator: EstimatorKind::DetectionMc,
        e,
        stderr: Some(stderr),
        samples: Some(trials),
        rng: Some(rng),
        scale: Some(scale),
    })
}

/// A fully resolved estimator choice, ready to evaluate settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Coherent,
    Incoherent,
    CoherentMc { samples: u64, rng: RngSpec },
    DetectionMc { trials: u64, rng: RngSpec },
}

impl Estimator {
    pub fn kind(self) -> EstimatorKind {
        match self {
            Estimator::Coherent => EstimatorKind::CoherentExact,
            Estimator::Incoherent => EstimatorKind::IncoherentExact,
            Estimator::CoherentMc { .. } => EstimatorKind::CoherentMc,
            Estimator::DetectionMc { .. } => EstimatorKind::DetectionMc,
        }
    }

    pub fn evaluate(
        self,
        a: AnalyzerSettings,
        e: InterferenceFlag,
    ) -> Result<CorrelationResult, EstimatorError> {
        match self {
            Estimator::Coherent => Ok(coherent_correlation(a, e)),
            Estimator::Incoherent => Ok(incoherent_correlation(a, e)),
            Estimator::CoherentMc { samples, rng } => coherent_mc(a, e, samples, rng),
            Estimator::DetectionMc { trials, rng } => detection_mc(a, e, trials, rng),
        }
    }

    /// Same estimator on a shifted stream; scans give each grid point its
    /// own stream so rows stay independent yet reproducible.
    pub fn with_stream_offset(self, offset: u64) -> Self {
        let shift = |rng: RngSpec| RngSpec::new(rng.seed, rng.stream.wrapping_add(offset));
        match self {
            Estimator::CoherentMc { samples, rng } => Estimator::CoherentMc {
                samples,
                rng: shift(rng),
            },
            Estimator::DetectionMc { trials, rng } => Estimator::DetectionMc {
                trials,
                rng: shift(rng),
            },
            exact => exact,
        }
    }
}
